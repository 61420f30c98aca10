"""Fundamental-domain boundary: tracing, sign-change counting, inversion.

The lower arcs are sampled and the ratio y'(t) / (j o z)'(t) is scanned
for isolated sign changes; Gamma-inequivalent sign-change points are
counted by c.  The same machinery inverts j along monotone boundary
pieces to pull polynomial roots back to points of the upper half-plane.

Series evaluation near a boundary cusp cannot converge, so samples whose
|q| exceeds the cap or whose tail envelope exceeds the tolerance are
skipped and reported rather than trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp

from .errors import ImaginaryPartTooSmall, NonIsolatedCrit, NotFoundOnBoundary
from .forms import hauptmodul
from .groups import ArcSpec, GroupSpec
from .qseries import QSeries, q_derivative

TRACE_TRUNCATION = 512
HAUPTMODUL_GROWTH_EXPONENT = 6  # heuristic envelope; doubling check is authoritative
DEFAULT_TAIL_TOL = 1e-10
DEFAULT_Q_CAP = 0.9
CUSP_ARC_CUTOFF = 1e-3  # arc-parameter fraction excluded next to a boundary cusp


# ---------------------------------------------------------------------------
# cached high-precision evaluator for j and dj/dz
# ---------------------------------------------------------------------------

class _JEvaluator:
    """Horner evaluation of the hauptmodul and its z-derivative with
    pre-converted mpf coefficients."""

    def __init__(self, group: GroupSpec, truncation: int, precision: int):
        self.group = group
        self.truncation = truncation
        self.precision = precision
        self.j_series = hauptmodul(group, truncation).series
        self.jq_series = q_derivative(self.j_series)
        with mp.workprec(precision + 16):
            self._jc = self._convert(self.j_series)
            self._jqc = self._convert(self.jq_series)
        self._tail_hat_j = self._tail_hat(self.j_series)

    @staticmethod
    def _convert(f: QSeries):
        return [mp.mpf(c.numerator) / c.denominator for c in f.coeffs]

    @staticmethod
    def _tail_hat(f: QSeries):
        hat = mp.mpf(0)
        for n, c in list(f.items())[-10:]:
            if c == 0:
                continue
            mag = abs(mp.mpf(c.numerator)) / c.denominator
            hat = max(hat, mag * mp.mpf(n + 1) ** HAUPTMODUL_GROWTH_EXPONENT)
        return hat

    def _q(self, z):
        return mp.exp(2j * mp.pi * mp.mpc(z) / self.group.cusp_width)

    def _horner(self, coeffs, series: QSeries, z):
        q = self._q(z)
        acc = mp.mpc(0)
        for c in reversed(coeffs):
            acc = acc * q + c
        return acc * q ** series.valuation

    def value(self, z):
        with mp.workprec(self.precision):
            return self._horner(self._jc, self.j_series, z)

    def dvalue(self, z):
        """dj/dz = (2*pi*i/h) * (q d/dq j)(z)."""
        with mp.workprec(self.precision):
            jq = self._horner(self._jqc, self.jq_series, z)
            return 2j * mp.pi / self.group.cusp_width * jq

    def tail_bound(self, z):
        with mp.workprec(self.precision):
            absq = abs(self._q(z))
            if absq >= 1:
                return mp.inf
            return self._tail_hat_j * absq ** self.j_series.truncation / (1 - absq)

    def point_ok(self, z, q_cap=DEFAULT_Q_CAP, tail_tol=DEFAULT_TAIL_TOL) -> bool:
        with mp.workprec(self.precision):
            if mp.im(mp.mpc(z)) <= 0:
                return False
            absq = abs(self._q(z))
            if absq > q_cap:
                return False
            return self.tail_bound(z) <= tail_tol


@lru_cache(maxsize=8)
def _evaluator(group: GroupSpec, truncation: int = TRACE_TRUNCATION, precision: int = 192) -> _JEvaluator:
    return _JEvaluator(group, truncation, precision)


# ---------------------------------------------------------------------------
# arc parametrization helpers
# ---------------------------------------------------------------------------

def _theta(arc: ArcSpec, s: float) -> float:
    t0, t1 = float(arc.t_start), float(arc.t_end)
    return math.pi * (t0 + (t1 - t0) * s)

def _arc_point(arc: ArcSpec, s: float) -> complex:
    th = _theta(arc, s)
    return complex(float(arc.center_x) + float(arc.radius) * math.cos(th),
                   float(arc.radius) * math.sin(th))

def _arc_dz(arc: ArcSpec, s: float) -> complex:
    th = _theta(arc, s)
    dth = math.pi * (float(arc.t_end) - float(arc.t_start))
    return 1j * float(arc.radius) * complex(math.cos(th), math.sin(th)) * dth

def _arc_dy(arc: ArcSpec, s: float) -> float:
    th = _theta(arc, s)
    dth = math.pi * (float(arc.t_end) - float(arc.t_start))
    return float(arc.radius) * math.cos(th) * dth

def _is_cusp_end(arc: ArcSpec, which: str) -> bool:
    s = 0.0 if which == "start" else 1.0
    return _arc_point(arc, s).imag < 1e-12


# ---------------------------------------------------------------------------
# boundary trace
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceSample:
    t: float
    x: float
    y: float
    j: complex
    dy_dt: float
    djz_dt: complex


@dataclass(frozen=True)
class SkippedSample:
    piece: str
    t: float
    reason: str


@dataclass(frozen=True)
class ArcTrace:
    arc_index: int
    samples: tuple[TraceSample, ...]


@dataclass(frozen=True)
class VerticalTrace:
    side: str
    samples: tuple[TraceSample, ...]


@dataclass(frozen=True)
class BoundaryTrace:
    group_name: str
    n_samples: int
    arcs: tuple[ArcTrace, ...]
    verticals: tuple[VerticalTrace, ...]
    skipped: tuple[SkippedSample, ...]
    max_abs_im_j: float


def trace_boundary(
    group: GroupSpec,
    precision_bits: int = 192,
    n_samples: int = 256,
    *,
    truncation: int = TRACE_TRUNCATION,
    q_cap: float = DEFAULT_Q_CAP,
    tail_tol: float = DEFAULT_TAIL_TOL,
    vertical_height: float | None = None,
) -> BoundaryTrace:
    """Sample every lower arc and the two vertical lines.

    Samples within the cusp cutoff, above the |q| cap, or with a tail
    envelope above `tail_tol` are skipped and reported."""
    if n_samples < 64:
        raise ValueError("need at least 64 samples per arc")
    ev = _evaluator(group, truncation, precision_bits)
    max_im = mp.mpf(0)
    skipped: list[SkippedSample] = []
    arc_traces = []
    for idx, arc in enumerate(group.arcs):
        lo = CUSP_ARC_CUTOFF if _is_cusp_end(arc, "start") else 0.0
        hi = 1.0 - CUSP_ARC_CUTOFF if _is_cusp_end(arc, "end") else 1.0
        rows = []
        for i in range(n_samples):
            s = lo + (hi - lo) * (i + 0.5) / n_samples
            z = _arc_point(arc, s)
            if not ev.point_ok(z, q_cap, tail_tol):
                skipped.append(SkippedSample(f"arc{idx}", s, "near-cusp: |q| cap or tail envelope"))
                continue
            jv = ev.value(z)
            djz = ev.dvalue(z) * _arc_dz(arc, s)
            max_im = max(max_im, abs(mp.im(jv)))
            rows.append(TraceSample(s, z.real, z.imag, complex(jv), _arc_dy(arc, s), complex(djz)))
        arc_traces.append(ArcTrace(idx, tuple(rows)))

    h2 = group.cusp_width / 2
    y0 = float(group.y0)
    top = vertical_height if vertical_height is not None else y0 + 4.0 * group.cusp_width
    verticals = []
    for side, x in (("left", -h2), ("right", h2)):
        rows = []
        for i in range(n_samples):
            y = y0 + (top - y0) * (i + 0.5) / n_samples
            z = complex(x, y)
            jv = ev.value(z)
            djz = ev.dvalue(z) * 1j  # z(t) = x + i t along the line
            max_im = max(max_im, abs(mp.im(jv)))
            rows.append(TraceSample(y, x, y, complex(jv), 1.0, complex(djz)))
        verticals.append(VerticalTrace(side, tuple(rows)))

    return BoundaryTrace(
        group_name=group.name,
        n_samples=n_samples,
        arcs=tuple(arc_traces),
        verticals=tuple(verticals),
        skipped=tuple(skipped),
        max_abs_im_j=float(max_im),
    )


# ---------------------------------------------------------------------------
# Crit set and c
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CritPoint:
    arc_index: int
    t: float
    z: complex
    kind: str  # "zero" | "undefined" | "zero+undefined"
    sign_change: bool
    class_id: int


@dataclass(frozen=True)
class CritSet:
    points: tuple[CritPoint, ...]


def _mobius(matrix, z: complex) -> complex:
    (a, b), (c, d) = matrix
    return (a * z + b) / (c * z + d)


def _mobius_inv(matrix):
    (a, b), (c, d) = matrix
    return ((d, -b), (-c, a))


def _bisect_sign_flip(f, a: float, b: float, width: float) -> float:
    fa = f(a)
    while b - a > width:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0:
            return m
        if (fa < 0) != (fm < 0):
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


@lru_cache(maxsize=32)
def crit_and_c(
    group: GroupSpec,
    n_samples: int = 256,
    precision_bits: int = 128,
    refine_width: float = 1e-10,
) -> tuple[CritSet, int]:
    """Locate sign changes of y'/(j o z)' along the arcs and count the
    Gamma-inequivalent ones.

    Candidates are sign flips of the numerator y' and of the denominator
    Re (j o z)'; each is refined by bisection and then the ratio is tested
    on both sides.  A point where numerator and denominator vanish
    together (the order-2 corner of the classical domain) is kept in the
    set but does not change the ratio sign.
    """
    ev = _evaluator(group, TRACE_TRUNCATION, precision_bits)

    def num(arc):
        return lambda s: _arc_dy(arc, s)

    def den(arc):
        return lambda s: float(mp.re(ev.dvalue(_arc_point(arc, s)) * _arc_dz(arc, s)))

    points: list[dict] = []
    for idx, arc in enumerate(group.arcs):
        lo = CUSP_ARC_CUTOFF if _is_cusp_end(arc, "start") else 1e-9
        hi = 1.0 - CUSP_ARC_CUTOFF if _is_cusp_end(arc, "end") else 1.0 - 1e-9
        # push the window inward until evaluation converges
        while lo < hi and not ev.point_ok(_arc_point(arc, lo)):
            lo += CUSP_ARC_CUTOFF
        while hi > lo and not ev.point_ok(_arc_point(arc, hi)):
            hi -= CUSP_ARC_CUTOFF
        nf, df = num(arc), den(arc)
        grid = [lo + (hi - lo) * i / (n_samples - 1) for i in range(n_samples)]
        nvals = [nf(s) for s in grid]
        dvals = [df(s) for s in grid]
        flips: list[tuple[float, str]] = []
        for (s1, s2, v1, v2) in zip(grid, grid[1:], nvals, nvals[1:]):
            if v1 == 0 or (v1 < 0) != (v2 < 0):
                flips.append((_bisect_sign_flip(nf, s1, s2, refine_width), "zero"))
        for (s1, s2, v1, v2) in zip(grid, grid[1:], dvals, dvals[1:]):
            if v1 == 0 or (v1 < 0) != (v2 < 0):
                flips.append((_bisect_sign_flip(df, s1, s2, refine_width), "undefined"))
        flips.sort()
        merged: list[tuple[float, str]] = []
        for s, kind in flips:
            if merged and abs(s - merged[-1][0]) < 100 * refine_width:
                prev_s, prev_kind = merged[-1]
                if prev_kind != kind:
                    merged[-1] = (0.5 * (s + prev_s), "zero+undefined")
                continue
            merged.append((s, kind))
        for i in range(1, len(merged)):
            if merged[i][0] - merged[i - 1][0] < 1e4 * refine_width:
                raise NonIsolatedCrit(
                    f"{group.name} arc {idx}: candidate points at {merged[i - 1][0]} and "
                    f"{merged[i][0]} are not isolated at the refinement resolution"
                )
        span = hi - lo
        for s, kind in merged:
            changes = []
            for eps_frac in (1e-4, 3e-5):
                eps = eps_frac * span
                if s - eps <= lo or s + eps >= hi:
                    continue
                left = nf(s - eps) / df(s - eps)
                right = nf(s + eps) / df(s + eps)
                changes.append(left * right < 0)
            sign_change = bool(changes) and all(changes)
            points.append({
                "arc_index": idx,
                "t": s,
                "z": _arc_point(arc, s),
                "kind": kind,
                "sign_change": sign_change,
            })

    # Gamma-equivalence classes through the declared identification matrices
    classes = list(range(len(points)))

    def find(i):
        while classes[i] != i:
            classes[i] = classes[classes[i]]
            i = classes[i]
        return i

    matrices = list(group.boundary_identifications)
    matrices += [_mobius_inv(m) for m in group.boundary_identifications]
    for i, p in enumerate(points):
        for m in matrices:
            image = _mobius(m, p["z"])
            for jdx, q in enumerate(points):
                if jdx != i and abs(image - q["z"]) < 1e-9:
                    ri, rj = find(i), find(jdx)
                    if ri != rj:
                        classes[max(ri, rj)] = min(ri, rj)
    crit_points = tuple(
        CritPoint(p["arc_index"], p["t"], p["z"], p["kind"], p["sign_change"], find(i))
        for i, p in enumerate(points)
    )
    changing_classes = {pt.class_id for pt in crit_points if pt.sign_change}
    return CritSet(crit_points), len(changing_classes)


# ---------------------------------------------------------------------------
# corner value and boundary inversion
# ---------------------------------------------------------------------------

def corner_value(group: GroupSpec, precision_bits: int = 256, truncation: int = TRACE_TRUNCATION):
    """j(-h/2 + i*y0) as an mpf, with a cross-truncation agreement check."""
    ev = _evaluator(group, truncation, precision_bits)
    z = mp.mpc(-group.cusp_width / mp.mpf(2), group.y0.to_mpf(precision_bits + 16))
    with mp.workprec(precision_bits + 16):
        full = ev.value(z)
        shorter = _evaluator(group, truncation - 128, precision_bits) if truncation > 192 else None
        if shorter is not None:
            other = shorter.value(z)
            if abs(full - other) > mp.mpf(10) ** (-30):
                raise ImaginaryPartTooSmall(
                    "corner evaluation unstable under truncation change"
                )
        return mp.re(full)


@dataclass(frozen=True)
class BoundaryPoint:
    x: float
    y: float
    arc_id: str
    j_value: float
    residual: float


def _monotone_pieces(group: GroupSpec, crit: CritSet):
    """Arc parameter intervals on which j o z is monotone: split at
    denominator-vanishing Crit points and at the evaluability window."""
    ev = _evaluator(group)
    pieces = []
    for idx, arc in enumerate(group.arcs):
        lo = CUSP_ARC_CUTOFF if _is_cusp_end(arc, "start") else 1e-9
        hi = 1.0 - CUSP_ARC_CUTOFF if _is_cusp_end(arc, "end") else 1.0 - 1e-9
        while lo < hi and not ev.point_ok(_arc_point(arc, lo)):
            lo += CUSP_ARC_CUTOFF
        while hi > lo and not ev.point_ok(_arc_point(arc, hi)):
            hi -= CUSP_ARC_CUTOFF
        cuts = [lo, hi]
        for pt in crit.points:
            if pt.arc_index == idx and "undefined" in pt.kind and lo < pt.t < hi:
                cuts.append(pt.t)
        cuts.sort()
        for a, b in zip(cuts, cuts[1:]):
            if b - a > 1e-8:
                pieces.append((idx, a, b))
    return pieces


def invert_j_on_boundary(
    group: GroupSpec,
    target,
    precision_bits: int = 96,
    tol: float = 1e-9,
) -> BoundaryPoint:
    """Find z on the boundary with j(z) = target (real).

    Searches the left vertical line (j decreases from the corner value)
    and every monotone arc piece.  Near the corner and at interior
    extrema of j the derivative vanishes, so bisection on j alone loses
    accuracy in z; those targets are resolved from the exact corner data
    and by bisecting the derivative sign flip instead.  A target attained
    only in the cusp limit is accepted when the last evaluable point is
    within `tol`."""
    ev = _evaluator(group, TRACE_TRUNCATION, precision_bits)
    target_mp = mp.mpf(target)
    corner = corner_value(group, max(precision_bits, 128))

    def finish(z, arc_id):
        jv = ev.value(z)
        return BoundaryPoint(float(mp.re(z)), float(mp.im(z)), arc_id,
                             float(mp.re(jv)), float(abs(jv - target_mp)))

    # the corner itself: exact coordinates, and j is flat there (elliptic)
    if abs(target_mp - corner) <= tol:
        z = mp.mpc(-group.cusp_width / mp.mpf(2), group.y0.to_mpf(precision_bits + 16))
        return finish(z, "corner")

    crit, _ = crit_and_c(group)

    # interior extrema of j along the arcs: polish the derivative flip
    with mp.workprec(precision_bits):
        for pt in crit.points:
            if "undefined" not in pt.kind:
                continue
            arc = group.arcs[pt.arc_index]

            def den(s, arc=arc):
                return float(mp.re(ev.dvalue(mp.mpc(_arc_point(arc, s))) * _arc_dz(arc, s)))

            delta = 1e-6
            lo_s, hi_s = pt.t - delta, pt.t + delta
            if den(lo_s) * den(hi_s) < 0:
                s_star = _bisect_sign_flip(den, lo_s, hi_s, 1e-17)
                z = mp.mpc(_arc_point(arc, s_star))
                if abs(ev.value(z) - target_mp) <= tol:
                    return finish(z, f"arc{pt.arc_index}")

    # vertical line: j strictly decreasing from the corner value
    if target_mp <= corner + mp.mpf(tol):
        x = -group.cusp_width / mp.mpf(2)
        y_lo = group.y0.to_mpf(precision_bits)
        y_hi = y_lo + group.cusp_width
        with mp.workprec(precision_bits):
            for _ in range(80):
                if mp.re(ev.value(mp.mpc(x, y_hi))) < target_mp:
                    break
                y_hi += y_hi
            else:
                raise NotFoundOnBoundary(f"target {target} below the vertical range")
            for _ in range(precision_bits + 20):
                mid = (y_lo + y_hi) / 2
                if mp.re(ev.value(mp.mpc(x, mid))) >= target_mp:
                    y_lo = mid
                else:
                    y_hi = mid
                if y_hi - y_lo < mp.mpf(2) ** (-precision_bits // 2):
                    break
            z = mp.mpc(x, (y_lo + y_hi) / 2)
        point = finish(z, "vertical_left")
        if point.residual <= max(tol, 1e-9 * max(1.0, abs(float(target_mp)))):
            return point

    best = None
    with mp.workprec(precision_bits):
        for idx, a, b in _monotone_pieces(group, crit):
            arc = group.arcs[idx]

            def jre(s):
                return mp.re(ev.value(mp.mpc(_arc_point(arc, s))))

            ja, jb = jre(a), jre(b)
            lo_v, hi_v = (ja, jb) if ja <= jb else (jb, ja)
            if lo_v - mp.mpf(tol) <= target_mp <= hi_v + mp.mpf(tol):
                sa, sb = a, b
                fa = ja - target_mp
                for _ in range(128):
                    sm = 0.5 * (sa + sb)
                    fm = jre(sm) - target_mp
                    if (fa < 0) == (fm < 0):
                        sa, fa = sm, fm
                    else:
                        sb = sm
                    if sb - sa < 1e-16:
                        break
                z = mp.mpc(_arc_point(arc, 0.5 * (sa + sb)))
                point = finish(z, f"arc{idx}")
                if point.residual <= tol:
                    return point
                if best is None or point.residual < best.residual:
                    best = point
            else:
                # cusp-limited targets: the nearest attainable endpoint
                for s in (a, b):
                    jv = jre(s)
                    if abs(jv - target_mp) <= tol:
                        return finish(mp.mpc(_arc_point(arc, s)), f"arc{idx}")
    if best is not None and best.residual <= tol:
        return best
    raise NotFoundOnBoundary(
        f"j = {target} not attained on the boundary of {group.name} within {tol}"
    )


def identification_residual(group: GroupSpec, n_points: int = 32) -> float:
    """Max distance from gamma-mapped arc samples to the nearest arc circle;
    small values confirm the declared identifications pair up the arcs.

    Each declared matrix maps one arc of a pair onto the other, so a
    sample passes when the matrix or its inverse lands it on some arc."""
    matrices = list(group.boundary_identifications)
    matrices += [_mobius_inv(m) for m in group.boundary_identifications]
    worst = 0.0
    for arc in group.arcs:
        for i in range(1, n_points):
            s = i / n_points
            z = _arc_point(arc, s)
            if z.imag < 1e-6:
                continue
            best = min(
                abs(abs(_mobius(m, z) - complex(float(a.center_x), 0.0)) - float(a.radius))
                for m in matrices
                for a in group.arcs
            )
            worst = max(worst, best)
    return worst
