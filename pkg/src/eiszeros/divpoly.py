"""Divisor polynomials and certified root structure.

P(f, X) is extracted from the exact series quotient f * Upsilon^{-1} by
greedy reduction against powers of the hauptmodul; its real-root counts,
simplicity and interval membership are certified with exact rational
arithmetic (Sturm chains and gcds).  Floating point enters only to locate
roots, and every located root carries a residual-based certified radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from . import polyrat as pr
from .errors import DoesNotExist, NotPolynomial, PrecisionExhausted, NotFoundOnBoundary
from .forms import (
    Hauptmodul,
    eisenstein_comparison,
    eisenstein_infinity,
    hauptmodul,
    default_truncation,
    upsilon,
)
from .geometry import corner_value, crit_and_c, invert_j_on_boundary
from .groups import GroupSpec, dimension
from .qseries import QSeries

ISOLATION_WIDTH = Fraction(1, 10 ** 20)
ENDPOINT_BRACKET = Fraction(1, 10 ** 25)
DEFAULT_ROOT_PRECISION = 256
RADIUS_TARGET = 1e-25


@dataclass(frozen=True)
class DivisorPoly:
    """Exact polynomial in the hauptmodul variable, ascending coefficients."""

    coeffs: tuple[Fraction, ...]
    group_name: str
    weight: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return pr.evaluate(self.coeffs, Fraction(x))

    def __str__(self):
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            var = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            terms.append(f"{c}{'*' if var and c != 1 else ''}{var if c != 1 or i == 0 else var}")
        return " + ".join(terms) if terms else "0"


def to_j_polynomial(g: QSeries, j: Hauptmodul | QSeries, *,
                    group_name: str = "", weight: int = 0) -> DivisorPoly:
    """Write a weight-0 series with pole order m at infinity as a degree-m
    polynomial in the hauptmodul.

    Repeatedly subtracts c * j^p to kill the most negative exponent, then
    requires the remainder to vanish through the available truncation.
    """
    jser = j.series if isinstance(j, Hauptmodul) else j
    if jser.valuation != -1 or jser.leading_coefficient() != 1 or jser.coefficient(0) != 0:
        raise NotPolynomial("second argument is not a canonical hauptmodul")
    if g.is_zero:
        raise NotPolynomial("zero series has no divisor polynomial")
    if g.valuation > 0:
        raise NotPolynomial(f"series vanishes at infinity (valuation {g.valuation})")
    m = -g.valuation
    if g.truncation < 2 or jser.truncation < m + 1:
        raise NotPolynomial("not enough known coefficients to reduce")
    coeffs = [Fraction(0)] * (m + 1)
    remainder = g
    jpow = {0: QSeries.constant(1, jser.width, jser.window)}
    power = jser
    for p in range(1, m + 1):
        jpow[p] = power
        if p < m:
            power = power * jser
    while not remainder.is_zero and remainder.valuation <= 0:
        p = -remainder.valuation
        c = remainder.leading_coefficient()
        coeffs[p] = c
        remainder = remainder - jpow[p].scale(c)
    if not remainder.is_zero:
        if remainder.truncation <= 1:
            raise NotPolynomial("truncation exhausted before the remainder could be checked")
        raise NotPolynomial(
            f"nonzero remainder coefficient {remainder.leading_coefficient()} "
            f"at q^{remainder.valuation}"
        )
    return DivisorPoly(tuple(coeffs), group_name, weight)


def divisor_polynomial(group: GroupSpec, k: int, truncation: int | None = None) -> DivisorPoly:
    """P(E_2k, X) = (E_2k * Upsilon^{-1}) written in the hauptmodul; degree
    is exactly dim - 1."""
    t = truncation if truncation is not None else default_truncation(group, k)
    d = dimension(group, k)
    e = eisenstein_infinity(group, k, t)
    if d == 1:
        # Upsilon is E itself (both are the normalized constant-term-1 form)
        return DivisorPoly((Fraction(1),), group.name, 2 * k)
    u = upsilon(group, k, t)
    quotient = e / u
    j = hauptmodul(group, t)
    poly = to_j_polynomial(quotient, j, group_name=group.name, weight=2 * k)
    if poly.degree != d - 1:
        raise NotPolynomial(
            f"divisor polynomial degree {poly.degree} != dim - 1 = {d - 1}"
        )
    return poly


# ---------------------------------------------------------------------------
# exact real-root analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootAnalysis:
    n_real_distinct: int
    n_real_with_multiplicity: int
    n_in_interval_distinct: int
    n_in_interval_with_multiplicity: int
    n_endpoint_ambiguous: int
    n_good: int  # real, simple, strictly right of the endpoint bracket
    squarefree: bool
    isolating_intervals: tuple[tuple[Fraction, Fraction], ...]


def real_root_analysis(p: DivisorPoly | tuple, interval_endpoint, *,
                       isolate: bool = True) -> RootAnalysis:
    """Sturm-certified counts over [a, infinity).

    `interval_endpoint` is either an exact rational or an outward bracket
    (lo, hi); roots falling inside the bracket are counted separately as
    endpoint-ambiguous, never silently classified.  `isolate=False` skips
    the isolating-interval refinement when only the counts are consumed.
    """
    coeffs = p.coeffs if isinstance(p, DivisorPoly) else pr.poly(p)
    if pr.degree(coeffs) < 0:
        raise ValueError("zero polynomial")
    if isinstance(interval_endpoint, tuple):
        lo, hi = Fraction(interval_endpoint[0]), Fraction(interval_endpoint[1])
    else:
        lo = hi = Fraction(interval_endpoint)
    decomposition = pr.squarefree_decomposition(coeffs)
    squarefree = all(m == 1 for _, m in decomposition)
    n_real_d = n_real_m = n_in_d = n_in_m = n_amb = n_good = 0
    for factor, mult in decomposition:
        chain = pr.sturm_chain(factor)
        reals = pr.count_real_roots(chain)
        inside = pr.count_real_roots(chain, hi, None)
        amb = pr.count_real_roots(chain, lo, hi)
        n_real_d += reals
        n_real_m += mult * reals
        n_in_d += inside
        n_in_m += mult * inside
        n_amb += amb
        if mult == 1:
            n_good += inside
    intervals = ()
    if isolate:
        squarefree = pr.squarefree_part(coeffs)
        intervals = tuple(
            pr.refine_root(squarefree, iv, ISOLATION_WIDTH)
            for iv in pr.isolate_real_roots(coeffs)
        )
    return RootAnalysis(
        n_real_distinct=n_real_d,
        n_real_with_multiplicity=n_real_m,
        n_in_interval_distinct=n_in_d,
        n_in_interval_with_multiplicity=n_in_m,
        n_endpoint_ambiguous=n_amb,
        n_good=n_good,
        squarefree=squarefree,
        isolating_intervals=intervals,
    )


# ---------------------------------------------------------------------------
# certified numeric roots
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CertifiedRoot:
    value: complex  # repr-level location; certified data below
    re: object      # mpf
    im: object      # mpf
    certified_radius: object  # mpf
    multiplicity: int


def _polyroots_certified(factor, precision: int):
    """Roots of a squarefree rational polynomial with residual disk radii.

    For squarefree F of degree n, each approximation x is within
    n * |F(x) / F'(x)| of a true root.
    """
    n = pr.degree(factor)
    deriv = pr.derivative(factor)
    with mp.workprec(precision):
        cs = [mp.mpf(c.numerator) / c.denominator for c in reversed(factor)]
        roots = mp.polyroots(cs, maxsteps=200, extraprec=precision)
        out = []
        for r in roots:
            fr = _eval_mp(factor, r)
            dfr = _eval_mp(deriv, r)
            radius = mp.inf if dfr == 0 else n * abs(fr / dfr)
            out.append((mp.mpc(r), radius))
        return out


def _eval_mp(poly_coeffs, x):
    acc = mp.mpc(0)
    for c in reversed(poly_coeffs):
        acc = acc * x + mp.mpf(c.numerator) / c.denominator
    return acc


def all_roots(p: DivisorPoly | tuple, precision: int = DEFAULT_ROOT_PRECISION) -> tuple[CertifiedRoot, ...]:
    """All roots with multiplicities (exact, via square-free decomposition)
    and certified radii; the root set is closed under conjugation and the
    count of certified-real roots must match the Sturm count, else the
    precision is doubled (twice) before giving up.
    """
    coeffs = p.coeffs if isinstance(p, DivisorPoly) else pr.poly(p)
    if pr.degree(coeffs) < 1:
        return ()
    decomposition = pr.squarefree_decomposition(coeffs)
    prec = precision
    for _ in range(3):
        try:
            result = []
            ok = True
            for factor, mult in decomposition:
                chain = pr.sturm_chain(factor)
                expected_real = pr.count_real_roots(chain)
                located = _polyroots_certified(factor, prec)
                if any(not (rad < mp.mpf(RADIUS_TARGET)) for _, rad in located):
                    ok = False
                    break
                real_like = [(r, rad) for r, rad in located if abs(mp.im(r)) <= rad]
                if len(real_like) != expected_real:
                    ok = False
                    break
                for r, rad in located:
                    is_real = abs(mp.im(r)) <= rad
                    re, im = mp.re(r), (mp.mpf(0) if is_real else mp.im(r))
                    result.append(CertifiedRoot(
                        value=complex(float(re), float(im)),
                        re=re, im=im, certified_radius=rad, multiplicity=mult,
                    ))
            if ok:
                result.sort(key=lambda cr: (float(cr.re), float(cr.im)))
                return tuple(result)
        except mp.libmp.NoConvergence:
            pass
        prec *= 2
    raise PrecisionExhausted(
        f"root certification failed at precisions up to {prec // 2} bits"
    )


# ---------------------------------------------------------------------------
# theorem verdict
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReportRoot:
    re: object
    im: object
    certified_radius: object
    multiplicity: int
    boundary_preimage: dict | None


@dataclass(frozen=True)
class ZeroReport:
    group: str
    weight: int
    status: str  # "ok" | "does_not_exist"
    dim: int
    degree: int | None = None
    interval_endpoint: object = None  # mpf
    endpoint_bracket: tuple[Fraction, Fraction] | None = None
    counts: dict | None = None
    roots: tuple[ReportRoot, ...] = ()
    c_value: int | None = None
    theorem_pass: bool | None = None
    corollary_note: str = ""
    hauptmodul_comparison: dict | None = None
    eisenstein_comparison: dict | None = None
    notes: tuple[str, ...] = ()
    polynomial: DivisorPoly | None = None
    analysis: RootAnalysis | None = None


def mpf_to_fraction(x) -> Fraction:
    """Exact rational value of an mpf (binary floating point is rational)."""
    sign, man, exp, _ = mp.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    value = Fraction(man) * (Fraction(2) ** exp)
    return -value if sign else value


def _endpoint_bracket(value_mp) -> tuple[Fraction, Fraction]:
    scale = ENDPOINT_BRACKET.denominator
    lo = Fraction(int(mp.floor(value_mp * scale)), scale)
    hi = Fraction(int(mp.ceil(value_mp * scale)), scale)
    if lo == hi:
        lo -= ENDPOINT_BRACKET
        hi += ENDPOINT_BRACKET
    return lo, hi


def verify_theorem(
    group: GroupSpec,
    k: int,
    *,
    truncation: int | None = None,
    precision_bits: int = DEFAULT_ROOT_PRECISION,
    samples_per_arc: int = 256,
    with_preimages: bool = True,
) -> ZeroReport:
    """Assemble the certified verdict for one (group, weight) pair."""
    d = dimension(group, k)
    hc = hauptmodul(group, truncation or default_truncation(group, k)).comparison_record()
    ec = eisenstein_comparison(group, k)
    try:
        poly = divisor_polynomial(group, k, truncation)
    except DoesNotExist as e:
        note = str(e)
        return ZeroReport(
            group=group.name, weight=2 * k, status="does_not_exist", dim=d,
            hauptmodul_comparison=hc, eisenstein_comparison=ec, notes=(note,),
        )

    crit, c = crit_and_c(group, samples_per_arc)
    endpoint = corner_value(group, max(precision_bits, 128))
    bracket = _endpoint_bracket(endpoint)
    notes: list[str] = []

    if poly.degree == 0:
        counts = {"real": 0, "simple": 0, "in_interval": 0, "exceptions": 0}
        return ZeroReport(
            group=group.name, weight=2 * k, status="ok", dim=d, degree=0,
            interval_endpoint=endpoint, endpoint_bracket=bracket, counts=counts,
            roots=(), c_value=c, theorem_pass=True,
            corollary_note="degree 0: no zeros beyond the forced ones",
            hauptmodul_comparison=hc, eisenstein_comparison=ec,
            polynomial=poly, notes=tuple(notes),
        )

    analysis = real_root_analysis(poly, bracket, isolate=False)
    degree = poly.degree
    exceptions = degree - analysis.n_good
    if analysis.n_endpoint_ambiguous:
        notes.append(
            f"{analysis.n_endpoint_ambiguous} root(s) inside the endpoint bracket: "
            "classified as endpoint-ambiguous and excluded from the good count"
        )
    roots = all_roots(poly, precision_bits)
    located: list[ReportRoot] = []
    for root in roots:
        preimage = None
        is_real = root.im == 0
        in_interval = is_real and mpf_to_fraction(root.re) > bracket[1]
        if with_preimages and in_interval:
            try:
                bp = invert_j_on_boundary(group, root.re, tol=1e-8)
                preimage = {"x": bp.x, "y": bp.y, "arc_id": bp.arc_id}
            except NotFoundOnBoundary as e:
                notes.append(f"no boundary preimage for root {float(root.re):.6f}: {e}")
        located.append(ReportRoot(root.re, root.im, root.certified_radius,
                                  root.multiplicity, preimage))

    nonreal = degree - analysis.n_real_with_multiplicity
    counts = {
        "real": analysis.n_real_with_multiplicity,
        "simple": sum(1 for r in roots if r.multiplicity == 1),
        "in_interval": analysis.n_in_interval_with_multiplicity,
        "exceptions": exceptions,
    }
    theorem_pass = exceptions <= c
    if c % 2 == 1:
        corollary = (
            f"c = {c} odd: at most c - 1 = {c - 1} nonreal zeros expected; "
            f"observed {nonreal} (conjugate pairs force an even count)"
        )
    else:
        corollary = f"c = {c} even: corollary adds nothing; observed {nonreal} nonreal zeros"
    return ZeroReport(
        group=group.name, weight=2 * k, status="ok", dim=d, degree=degree,
        interval_endpoint=endpoint, endpoint_bracket=bracket, counts=counts,
        roots=tuple(located), c_value=c, theorem_pass=theorem_pass,
        corollary_note=corollary, hauptmodul_comparison=hc,
        eisenstein_comparison=ec, polynomial=poly, analysis=analysis,
        notes=tuple(notes),
    )
