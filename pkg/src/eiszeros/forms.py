"""Eisenstein series at infinity, hauptmoduls, and echelon bases of M_2k.

Spaces are spanned inductively: every generator g of weight w multiplies
the echelon basis of weight 2k - w, and the collected products are row
reduced over exact rationals by increasing q-order.  The last echelon
element is the extremal form with a zero of order dim - 1 at infinity and
only the forced elliptic zeros elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    DoesNotExist,
    RankMismatch,
    RecipeInvalid,
    TruncationTooShort,
    UnsupportedLevel,
)
from .groups import GeneratorSpec, GroupSpec, dimension
from .qseries import (
    QSeries,
    eisenstein_level1,
    eisenstein_weight2,
    eta_quotient,
    rescale,
)

ECHELON_PRE_GUARD = 8
TRUNCATION_CAP = 4096


@dataclass(frozen=True)
class EchelonBasis:
    """Row-reduced basis with strictly increasing vanishing orders at infinity."""

    weight: int
    elements: tuple[QSeries, ...]
    pivot_orders: tuple[int, ...]


@dataclass(frozen=True)
class Hauptmodul:
    """Canonical weight-0 generator: q^-1 + 0 + O(q), leading coefficient 1."""

    series: QSeries
    group: GroupSpec
    comparison: tuple | None = None

    def comparison_record(self) -> dict | None:
        """Computed-vs-declared coefficient comparison, None when nothing declared."""
        if self.comparison is None:
            return None
        rows = [
            {"n": n, "declared": str(dec), "computed": str(comp), "match": dec == comp}
            for (n, dec, comp) in self.comparison
        ]
        return {"coefficients": rows, "all_match": all(r["match"] for r in rows)}


# ---------------------------------------------------------------------------
# generator realization
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def weight2_combination(level: int, truncation: int) -> QSeries:
    """(p*E_2(pz) - E_2(z)) / (p - 1): the weight-2 series with constant 1
    at infinity on level p."""
    e2 = eisenstein_weight2(truncation)
    return (rescale(e2, level).slice_to(truncation) * level - e2) / (level - 1)


@lru_cache(maxsize=None)
def generator_series(group: GroupSpec, gen: GeneratorSpec, truncation: int) -> QSeries:
    if gen.kind == "eta":
        return eta_quotient(gen.factors, truncation)
    if gen.kind == "eisenstein":
        base = eisenstein_level1(gen.weight // 2, truncation)
        if gen.scale == 1:
            return base
        return rescale(base, gen.scale).slice_to(truncation)
    if gen.kind == "weight2_eisenstein":
        return weight2_combination(gen.level, truncation)
    raise RecipeInvalid(f"{gen.kind!r} is not a ring-generator recipe")


# ---------------------------------------------------------------------------
# Eisenstein series with constant term 1 at infinity, vanishing at the rest
# ---------------------------------------------------------------------------

def eisenstein_infinity(group: GroupSpec, k: int, truncation: int) -> QSeries:
    """E_{2k} with constant term 1 at infinity, vanishing at every other cusp.

    Level 1 is the classical series; prime level p uses the cusp-pinned
    combination (p^{2k} E_{2k}(pz) - E_{2k}(z)) / (p^{2k} - 1).  Weight 2
    triggers the existence check: the value at the cusp 0 is -1/p, so the
    series does not exist there; at level 1 the space is empty.
    """
    if k < 1:
        raise ValueError("weight 2k must be >= 2")
    level = group.eisenstein_level()
    if level is None:
        raise UnsupportedLevel(f"{group.name}: no Eisenstein recipe configured")
    if level == 1:
        if k == 1:
            raise DoesNotExist(
                "weight 2 at level 1: dim M_2 = 0, no form with constant term 1",
                dim=dimension(group, 1),
            )
        return eisenstein_level1(k, truncation)
    if k == 1:
        # Unique normalized weight-2 candidate is the combination; its
        # constant term at the cusp 0 is (1/p - 1)/(p - 1) = -1/p != 0.
        cusp0 = Fraction(1 - level, level * (level - 1))
        raise DoesNotExist(
            f"weight 2 on level {level}: cusp-0 constant term {cusp0} is nonzero",
            cusp_value=cusp0,
        )
    p2k = level ** (2 * k)
    base = eisenstein_level1(k, truncation)
    return (rescale(base, level).slice_to(truncation) * p2k - base) / (p2k - 1)


def eisenstein_alpha_expansion(k: int, truncation: int, reading: str) -> QSeries:
    """Level-3 twisted-divisor-sum expansion of E_{2k} at infinity.

    reading = "multiple": alpha(d) = 1 when 3 | d, else -1/2.
    reading = "divisor":  alpha(d) = 1 when d | 3, else -1/2 (as printed
    in the source formula; disagrees with the cusp-pinned combination).
    """
    if reading not in ("multiple", "divisor"):
        raise ValueError("reading must be 'multiple' or 'divisor'")
    from .qseries import bernoulli

    pref = -Fraction(8 * k) / (bernoulli(2 * k) * (3 ** (2 * k) - 1))
    cs = [Fraction(1)]
    for n in range(1, truncation):
        tot = Fraction(0)
        for d in range(1, n + 1):
            if n % d:
                continue
            if reading == "multiple":
                a = Fraction(1) if d % 3 == 0 else Fraction(-1, 2)
            else:
                a = Fraction(1) if 3 % d == 0 else Fraction(-1, 2)
            tot += a * d ** (2 * k - 1)
        cs.append(pref * tot)
    return QSeries(1, 0, cs, truncation)


def eisenstein_comparison(group: GroupSpec, k: int, terms: int = 50) -> dict | None:
    """Compare the cusp-pinned combination with both twisted-sum readings.

    Only defined for the level-3 builtin family; None elsewhere.
    """
    if group.eisenstein_level() != 3 or k < 2:
        return None
    combo = eisenstein_infinity(group, k, terms + 1)
    record: dict = {"weight": 2 * k, "terms": terms}
    for reading, key in (("multiple", "alpha_3_divides_d"), ("divisor", "alpha_d_divides_3")):
        alt = eisenstein_alpha_expansion(k, terms + 1, reading)
        mismatch = None
        for n in range(terms + 1):
            if combo.coefficient(n) != alt.coefficient(n):
                mismatch = {
                    "n": n,
                    "combination": str(combo.coefficient(n)),
                    "twisted_sum": str(alt.coefficient(n)),
                }
                break
        record[key] = {"matches": mismatch is None, "first_mismatch": mismatch}
    return record


# ---------------------------------------------------------------------------
# hauptmodul
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def hauptmodul(group: GroupSpec, truncation: int) -> Hauptmodul:
    """Build the canonical hauptmodul q^-1 + 0 + O(q) from the group recipe."""
    recipe = group.hauptmodul_recipe
    if truncation < 2:
        raise TruncationTooShort("hauptmodul needs truncation >= 2")
    if recipe.kind == "eta":
        series = eta_quotient(recipe.factors, truncation)
    elif recipe.kind == "level1_j":
        work = truncation + 2
        e4 = eisenstein_level1(2, work)
        delta = eta_quotient([(1, 24)], work)
        series = ((e4 ** 3) / delta).slice_to(truncation)
    else:
        raise RecipeInvalid(f"{recipe.kind!r} is not a hauptmodul recipe")
    if series.valuation != -1 or series.leading_coefficient() != 1:
        raise RecipeInvalid(
            f"recipe produced valuation {series.valuation}, "
            f"leading {series.leading_coefficient() if not series.is_zero else 0}; "
            "expected q^-1 with coefficient 1"
        )
    series = series - series.coefficient(0)
    comparison = None
    if recipe.reference_coeffs:
        comparison = tuple(
            (n, Fraction(declared), series.coefficient(n))
            for n, declared in recipe.reference_coeffs
            if n < series.truncation
        )
    return Hauptmodul(series=series, group=group, comparison=comparison)


# ---------------------------------------------------------------------------
# echelon basis and the extremal form
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _echelon_cached(group: GroupSpec, k: int, truncation: int) -> EchelonBasis:
    if k == 0:
        return EchelonBasis(0, (QSeries.constant(1, group.cusp_width, truncation),), (0,))
    d = dimension(group, k)
    if d == 0:
        return EchelonBasis(2 * k, (), ())
    if truncation < d + ECHELON_PRE_GUARD:
        raise TruncationTooShort(
            f"truncation {truncation} < dim + guard = {d + ECHELON_PRE_GUARD}"
        )

    candidates: list[QSeries] = []
    for gen in group.generators:
        if gen.weight == 0 or gen.weight > 2 * k:
            continue
        series = generator_series(group, gen, truncation)
        rem = 2 * k - gen.weight
        if rem == 0:
            candidates.append(series.slice_to(truncation))
            continue
        lower = _echelon_cached(group, rem // 2, truncation)
        for b in lower.elements:
            candidates.append((b * series).slice_to(truncation))

    pivots: dict[int, QSeries] = {}
    for cand in sorted(candidates, key=lambda s: s.valuation):
        cur = cand
        while not cur.is_zero:
            v = cur.valuation
            if v in pivots:
                cur = cur - pivots[v].scale(cur.leading_coefficient())
            else:
                pivots[v] = cur.scale(1 / cur.leading_coefficient())
                break
    if len(pivots) != d:
        raise RankMismatch(
            f"{group.name} weight {2 * k}: spanning set reached rank {len(pivots)}, "
            f"dimension formula gives {d}"
        )
    # back-substitution so every element vanishes at the other pivots
    for p in sorted(pivots, reverse=True):
        row = pivots[p]
        for p2 in sorted(pivots, reverse=True):
            if p2 <= p:
                break
            c = row.coefficient(p2)
            if c:
                row = row - pivots[p2].scale(c)
        pivots[p] = row
    orders = tuple(sorted(pivots))
    return EchelonBasis(2 * k, tuple(pivots[p] for p in orders), orders)


def echelon_basis(group: GroupSpec, k: int, truncation: int | None = None) -> EchelonBasis:
    """Row-reduced basis of M_{2k}; rank must equal the dimension formula."""
    if truncation is None:
        truncation = default_truncation(group, k)
    return _echelon_cached(group, k, truncation)


def default_truncation(group: GroupSpec, k: int) -> int:
    """Enough terms for echelon pivots plus the divisor-polynomial division."""
    d = dimension(group, k)
    return max(2 * d + 32, 64)


def upsilon(group: GroupSpec, k: int, truncation: int | None = None) -> QSeries:
    """The weight-2k form q^{d-1} + O(q^d) with only trivial elliptic zeros.

    Retries with doubled truncation when the requested window is too short.
    """
    if dimension(group, k) < 1:
        raise DoesNotExist(f"M_{2 * k}({group.name}) is trivial", dim=0)
    t = truncation if truncation is not None else default_truncation(group, k)
    while True:
        try:
            basis = echelon_basis(group, k, t)
            return basis.elements[-1]
        except TruncationTooShort:
            if truncation is not None or t >= TRUNCATION_CAP:
                raise
            t *= 2
