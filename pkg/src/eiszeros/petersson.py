"""Petersson inner products by direct 2D quadrature over the truncated domain.

The integral of f * conj(g) * y^(2k-2) runs over the strip between the
arc-defined lower boundary and a height chosen so the integrand tail is
below tolerance.  Tensor Gauss-Legendre nodes, fixed ordering, compensated
summation: results are deterministic and the error estimate comes from
node doubling.  The orthogonality replay instantiates the vanishing inner
product against Q(j) * Upsilon for the largest Q the convergence
precondition admits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .divpoly import divisor_polynomial, mpf_to_fraction, real_root_analysis, verify_theorem
from .errors import DoesNotExist, NonConvergent, PreconditionCuspGrowth
from .forms import default_truncation, eisenstein_infinity, hauptmodul, upsilon
from .geometry import corner_value, crit_and_c, _evaluator
from .groups import GroupSpec, dimension
from .qseries import QSeries

DEFAULT_TRUNCATION = 256
CUSP_FLOOR = 0.05  # clip height around interior boundary cusps


@dataclass(frozen=True)
class QuadratureSpec:
    y_max: float | None = None
    nodes_per_cell: int = 48
    target_tol: float = 1e-7
    refinement_limit: int = 3


@dataclass(frozen=True)
class InnerProduct:
    value: complex
    error_estimate: float
    nodes: int
    y_max: float


def _to_float_coeffs(f: QSeries) -> tuple[np.ndarray, int]:
    return np.array([float(c) for c in f.coeffs], dtype=np.float64), f.valuation


def _eval_grid(coeffs: np.ndarray, valuation: int, width: int, z: np.ndarray) -> np.ndarray:
    q = np.exp(2j * np.pi * z / width)
    acc = np.zeros_like(q)
    for c in coeffs[::-1]:
        acc = acc * q + c
    return acc * q ** valuation


@lru_cache(maxsize=64)
def _gauss_nodes(n: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    x, w = np.polynomial.legendre.leggauss(n)
    return tuple(x), tuple(w)


def _x_segments(group: GroupSpec) -> list[tuple]:
    """Strip segments (x_lo, x_hi, y_low) on which the lower boundary is a
    single smooth arc."""
    segments = []
    for arc in group.arcs:
        xs = sorted((arc.point(0.0).real, arc.point(1.0).real))
        cx, r = float(arc.center_x), float(arc.radius)

        def ylow(x, cx=cx, r=r):
            inside = r * r - (x - cx) ** 2
            return math.sqrt(max(inside, 0.0))

        segments.append((xs[0], xs[1], ylow))
    return sorted(segments, key=lambda s: s[0])


def _default_y_max(f: QSeries, g: QSeries, k: int, width: int, tol: float) -> float:
    """Smallest height with max-coefficient bound * e^{-2 pi y / h} * y^{2k-2}
    below tol/10; the product has combined valuation >= 1."""
    cmax = 1.0
    for series in (f, g):
        biggest = max((abs(float(c)) for _, c in series.items()), default=1.0)
        cmax *= max(biggest, 1.0)
    y = 1.0
    for _ in range(400):
        tail = cmax * math.exp(-2 * math.pi * y / width) * max(y, 1.0) ** (2 * k - 2)
        if tail < tol / 10:
            return y
        y += 0.5
    return y


def _integrate(
    f: QSeries,
    g: QSeries,
    group: GroupSpec,
    k: int,
    nodes: int,
    y_max: float,
) -> complex:
    fc, fv = _to_float_coeffs(f)
    gc, gv = _to_float_coeffs(g)
    h = group.cusp_width
    xs_ref, xw_ref = map(np.array, _gauss_nodes(nodes))
    ys_ref, yw_ref = xs_ref, xw_ref
    total_parts = []
    for x_lo, x_hi, ylow in _x_segments(group):
        xm, xr = (x_lo + x_hi) / 2, (x_hi - x_lo) / 2
        x_nodes = xm + xr * xs_ref
        for xi, wxi in zip(x_nodes, xw_ref):
            y_lo = max(ylow(xi), CUSP_FLOOR if group.nu_inf > 1 else 0.0)
            if y_lo >= y_max:
                continue
            # Geometric panels resolve the steep transition above an
            # interior boundary cusp, where the integrand climbs from the
            # cusp-vanishing regime within a fraction of a unit of height.
            bounds = [y_lo]
            cur = y_lo
            while cur < 2.0 and 2 * cur < y_max:
                cur *= 2
                bounds.append(cur)
            bounds.append(y_max)
            for p_lo, p_hi in zip(bounds, bounds[1:]):
                ym, yr = (p_lo + p_hi) / 2, (p_hi - p_lo) / 2
                y_nodes = ym + yr * ys_ref
                z = xi + 1j * y_nodes
                vals = (
                    _eval_grid(fc, fv, h, z)
                    * np.conj(_eval_grid(gc, gv, h, z))
                    * y_nodes ** (2 * k - 2)
                )
                total_parts.append(complex(wxi * xr * yr * np.dot(yw_ref, vals)))
    re = math.fsum(p.real for p in total_parts)
    im = math.fsum(p.imag for p in total_parts)
    return complex(re, im)


def petersson_inner(
    f: QSeries,
    g: QSeries,
    group: GroupSpec,
    k: int,
    spec: QuadratureSpec | None = None,
    *,
    product_vanishes_at_other_cusps: bool | None = None,
) -> InnerProduct:
    """<f, g> over the fundamental domain, with a node-doubling error estimate.

    Precondition: f * conj(g) vanishes at every cusp.  At infinity that is
    the combined valuation >= 1, checked directly; for multi-cusp groups the
    caller must assert vanishing at the remaining cusps (it follows from
    construction metadata, not from the series)."""
    spec = spec or QuadratureSpec()
    if f.valuation + g.valuation < 1:
        raise PreconditionCuspGrowth(
            f"combined valuation at infinity is {f.valuation + g.valuation}; "
            "the product must vanish at every cusp"
        )
    if group.nu_inf > 1 and not product_vanishes_at_other_cusps:
        raise PreconditionCuspGrowth(
            f"{group.name} has {group.nu_inf} cusps; pass "
            "product_vanishes_at_other_cusps=True when the construction guarantees it"
        )
    y_max = spec.y_max or _default_y_max(f, g, k, group.cusp_width, spec.target_tol)
    nodes = spec.nodes_per_cell
    prev = _integrate(f, g, group, k, nodes, y_max)
    for _ in range(spec.refinement_limit):
        nodes *= 2
        cur = _integrate(f, g, group, k, nodes, y_max)
        err = abs(cur - prev)
        scale = max(abs(cur), 1e-30)
        if err <= spec.target_tol * scale or err <= spec.target_tol:
            return InnerProduct(cur, err, nodes, y_max)
        prev = cur
    raise NonConvergent(
        f"error estimate {err:.3e} above tolerance {spec.target_tol} at {nodes} nodes"
    )


def truncated_norm(f: QSeries, group: GroupSpec, k: int, spec: QuadratureSpec | None = None) -> float:
    """sqrt of <f, f> over the truncated domain (y <= y_max), used only to
    scale residuals; no convergence claim is attached when f fails the
    cusp-vanishing precondition."""
    spec = spec or QuadratureSpec()
    y_max = spec.y_max or _default_y_max(f, f, k, group.cusp_width, spec.target_tol)
    value = _integrate(f, f, group, k, spec.nodes_per_cell * 2, y_max)
    return math.sqrt(max(value.real, 0.0))


@dataclass(frozen=True)
class OrthogonalityReport:
    group: str
    weight: int
    q_factors: tuple[float, ...]
    q_factors_omitted: tuple[float, ...]
    inner_value: complex
    relative_residual: float
    error_estimate: float
    norm_e: float
    norm_qu: float


def finite_cusp_j_value(group: GroupSpec) -> float | None:
    """j at the cusp 0 for the builtin prime-level recipes.

    The hauptmodul recipe there is an eta quotient vanishing at 0, so
    j(0) equals minus the constant term the canonicalization removed."""
    recipe = group.hauptmodul_recipe
    if group.nu_inf < 2 or recipe.kind != "eta":
        return None
    level = group.eisenstein_level()
    if level is None:
        return None
    order_at_zero = Fraction(level, 24) * sum(Fraction(r, dlt) for dlt, r in recipe.factors)
    if order_at_zero <= 0:
        return None
    from .qseries import eta_quotient

    # canonicalization shifted the quotient by minus its constant term
    return -float(eta_quotient(recipe.factors, 8).coefficient(0))


def orthogonality_replay(group: GroupSpec, k: int, spec: QuadratureSpec | None = None) -> OrthogonalityReport:
    """Check <E_2k, Q(j) Upsilon> = 0 for the largest admissible Q.

    Q(X) multiplies factors (X - value) drawn from the odd-multiplicity
    in-interval roots and the sign-change values, subject to
    deg Q <= dim - 2 so that Q(j) Upsilon is holomorphic and vanishes at
    infinity (larger products leave the convergent regime).  Factors are
    chosen cusp-first: the root sitting at the finite-cusp j-value makes
    Q(j) Upsilon vanish at that cusp as well, and orthogonality of the
    Eisenstein series genuinely holds against such cusp-vanishing forms;
    against forms vanishing at infinity only, the inner product converges
    but is a nonzero cross-cusp pairing (measured and reported as is).
    """
    spec = spec or QuadratureSpec()
    d = dimension(group, k)
    t = max(default_truncation(group, k), DEFAULT_TRUNCATION)
    e = eisenstein_infinity(group, k, t)
    budget = d - 2
    if budget < 0:
        raise PreconditionCuspGrowth(
            f"dim M_{2 * k}({group.name}) = {d}: even Q = 1 leaves "
            "Q(j)*Upsilon nonvanishing at infinity"
        )
    u = upsilon(group, k, t)
    crit, c = crit_and_c(group)
    sign_change_values = []
    ev = _evaluator(group)
    seen = set()
    for pt in crit.points:
        if pt.sign_change and pt.class_id not in seen:
            seen.add(pt.class_id)
            sign_change_values.append(float(mp.re(ev.value(mp.mpc(pt.z)))))
    poly = divisor_polynomial(group, k, t)
    endpoint = corner_value(group)
    root_values = []
    if poly.degree >= 1:
        analysis = real_root_analysis(poly, mpf_to_fraction(endpoint))
        for lo, hi in analysis.isolating_intervals:
            mid = (lo + hi) / 2
            if mid >= mpf_to_fraction(endpoint):
                root_values.append(float(mid))

    cusp_j = finite_cusp_j_value(group)
    cusp_roots = [v for v in root_values if cusp_j is not None and abs(v - cusp_j) < 1e-9]
    other_roots = sorted(v for v in root_values if v not in cusp_roots)
    chosen: list[float] = []
    omitted: list[float] = []
    for value in cusp_roots + sign_change_values + other_roots:
        (chosen if len(chosen) < budget else omitted).append(value)

    qu = u
    j = hauptmodul(group, t).series
    for value in chosen:
        frac = Fraction(value).limit_denominator(10 ** 12)
        qu = (j - frac) * qu  # truncation shrinks by one per factor

    inner = petersson_inner(
        e, qu, group, k, spec, product_vanishes_at_other_cusps=(group.nu_inf > 1) or None
    )
    ne = truncated_norm(e, group, k, QuadratureSpec(y_max=inner.y_max,
                                                    nodes_per_cell=spec.nodes_per_cell,
                                                    target_tol=spec.target_tol))
    nqu = truncated_norm(qu, group, k, QuadratureSpec(y_max=inner.y_max,
                                                      nodes_per_cell=spec.nodes_per_cell,
                                                      target_tol=spec.target_tol))
    residual = abs(inner.value) / max(ne * nqu, 1e-300)
    return OrthogonalityReport(
        group=group.name,
        weight=2 * k,
        q_factors=tuple(chosen),
        q_factors_omitted=tuple(omitted),
        inner_value=inner.value,
        relative_residual=residual,
        error_estimate=inner.error_estimate,
        norm_e=ne,
        norm_qu=nqu,
    )
