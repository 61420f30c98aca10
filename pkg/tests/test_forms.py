"""Eisenstein construction, hauptmoduls, echelon bases, the extremal form."""

import random
from fractions import Fraction

import mpmath as mp
import pytest

from eiszeros.errors import DoesNotExist, RankMismatch, TruncationTooShort
from eiszeros.forms import (
    echelon_basis,
    eisenstein_alpha_expansion,
    eisenstein_comparison,
    eisenstein_infinity,
    hauptmodul,
    upsilon,
    weight2_combination,
)
from eiszeros.groups import dimension, valence_check, trivial_order
from eiszeros.qseries import (
    QSeries,
    eisenstein_level1,
    eta_quotient,
    eval_series,
    rescale,
)


def oracle_sigma(n, m):
    return sum(d ** m for d in range(1, n + 1) if n % d == 0)


# ---------------------------------------------------------------------------
# Eisenstein series at infinity
# ---------------------------------------------------------------------------

def test_eisenstein_infinity_gamma0_3_weight4_oracle(gamma0_3):
    """Cusp-pinned combination (81 E4(3z) - E4(z)) / 80, brute-force sums."""
    T = 30
    e = eisenstein_infinity(gamma0_3, 2, T)
    for n in range(T):
        c4 = 240 * oracle_sigma(n, 3) if n else 1
        c4_old = (240 * oracle_sigma(n // 3, 3) if n // 3 else 1) if n % 3 == 0 else 0
        assert e.coefficient(n) == Fraction(81 * c4_old - c4, 80)
    # frozen leading terms from the oracle (the q^3 value is +159)
    assert [e.coefficient(n) for n in range(5)] == [1, -3, -27, 159, -219]


def test_eisenstein_infinity_level1(sl2z):
    e = eisenstein_infinity(sl2z, 6, 8)
    assert e.matches(eisenstein_level1(6, 8))
    assert e.coefficient(1) == Fraction(65520, 691)


def test_eisenstein_infinity_matches_combination_k2_to_10(gamma0_3):
    T = 51
    for k in range(2, 11):
        e = eisenstein_infinity(gamma0_3, k, T)
        base = eisenstein_level1(k, T)
        p2k = 3 ** (2 * k)
        combo = (rescale(base, 3).slice_to(T) * p2k - base) / (p2k - 1)
        assert e.matches(combo)


def test_alpha_reading_multiple_matches_divisor_does_not(gamma0_3):
    record = eisenstein_comparison(gamma0_3, 2, 50)
    assert record["alpha_3_divides_d"]["matches"] is True
    assert record["alpha_d_divides_3"]["matches"] is False
    mismatch = record["alpha_d_divides_3"]["first_mismatch"]
    assert mismatch["n"] == 1
    assert mismatch["combination"] == "-3"
    assert mismatch["twisted_sum"] == "6"


def test_alpha_expansion_agreement_50_terms(gamma0_3):
    for k in range(2, 11):
        e = eisenstein_infinity(gamma0_3, k, 51)
        alt = eisenstein_alpha_expansion(k, 51, "multiple")
        assert e.matches(alt)


def test_weight2_does_not_exist_gamma0_3(gamma0_3):
    with pytest.raises(DoesNotExist) as err:
        eisenstein_infinity(gamma0_3, 1, 8)
    assert err.value.cusp_value == Fraction(-1, 3)


def test_weight2_does_not_exist_sl2z(sl2z):
    with pytest.raises(DoesNotExist) as err:
        eisenstein_infinity(sl2z, 1, 8)
    assert err.value.dim == 0


def test_weight2_combination_series():
    b = weight2_combination(3, 6)
    assert [b.coefficient(n) for n in range(5)] == [1, 12, 36, 12, 84]


# ---------------------------------------------------------------------------
# hauptmoduls
# ---------------------------------------------------------------------------

def test_hauptmodul_sl2z(sl2z):
    h = hauptmodul(sl2z, 8)
    assert h.series.valuation == -1
    assert h.series.coefficient(0) == 0
    assert h.series.coefficient(1) == 196884
    assert h.series.coefficient(2) == 21493760
    assert h.comparison_record()["all_match"] is True


def test_hauptmodul_gamma0_3_flags_declared_mismatch(gamma0_3):
    h = hauptmodul(gamma0_3, 8)
    assert [h.series.coefficient(n) for n in (1, 2, 3, 4)] == [54, -76, -243, 1188]
    record = h.comparison_record()
    assert record["all_match"] is False
    declared = [row["declared"] for row in record["coefficients"]]
    assert declared == ["783", "8672", "65367", "371520"]
    assert all(row["match"] is False for row in record["coefficients"])


def test_hauptmodul_gamma0_2(gamma0_2):
    h = hauptmodul(gamma0_2, 6)
    assert h.series.valuation == -1
    assert h.series.coefficient(0) == 0
    assert h.series.coefficient(1) == 276  # eta-quotient oracle value


# ---------------------------------------------------------------------------
# echelon bases and upsilon
# ---------------------------------------------------------------------------

def test_echelon_sl2z_weight12(sl2z):
    basis = echelon_basis(sl2z, 6, 40)
    assert basis.pivot_orders == (0, 1)
    delta = basis.elements[1]
    assert delta.matches(eta_quotient([(1, 24)], 40))


def test_echelon_gamma0_3_weight4(gamma0_3):
    basis = echelon_basis(gamma0_3, 2, 40)
    assert basis.pivot_orders == (0, 1)
    assert [basis.elements[1].coefficient(n) for n in (1, 2, 3)] == [1, 9, 27]


def test_echelon_sl2z_weight4_single_element(sl2z):
    basis = echelon_basis(sl2z, 2, 40)
    assert len(basis.elements) == 1
    assert basis.elements[0].matches(eisenstein_level1(2, 40))


def test_echelon_unit_pivots_and_zeros_at_other_pivots(gamma0_3):
    basis = echelon_basis(gamma0_3, 6, 64)
    for i, elem in enumerate(basis.elements):
        for j, p in enumerate(basis.pivot_orders):
            assert elem.coefficient(p) == (1 if i == j else 0)


@pytest.mark.parametrize("name", ["sl2z", "gamma0_2", "gamma0_3"])
def test_rank_matches_dimension_to_k20(name, request):
    group = request.getfixturevalue(name if name != "sl2z" else "sl2z")
    for k in range(1, 21):
        d = dimension(group, k)
        basis = echelon_basis(group, k, max(2 * d + 32, 64))
        assert len(basis.elements) == d
        assert basis.pivot_orders == tuple(range(d))


def test_truncation_too_short(sl2z):
    with pytest.raises(TruncationTooShort):
        echelon_basis(sl2z, 6, 4)


def test_upsilon_examples(sl2z, gamma0_3):
    assert upsilon(sl2z, 6, 40).matches(eta_quotient([(1, 24)], 40))
    assert upsilon(sl2z, 2, 40).matches(eisenstein_level1(2, 40))
    u3 = upsilon(gamma0_3, 2, 40)
    assert [u3.coefficient(n) for n in (1, 2, 3)] == [1, 9, 27]


def test_upsilon_leading_term_and_valence(sl2z, gamma0_2, gamma0_3):
    for group in (sl2z, gamma0_2, gamma0_3):
        for k in range(1, 13):
            d = dimension(group, k)
            if d < 1:
                continue
            u = upsilon(group, k)
            assert u.valuation == d - 1
            assert u.leading_coefficient() == 1
            divisor = [("inf", d - 1, 1)]
            for class_id, order in group.elliptic_classes().items():
                divisor.append((f"class{class_id}", trivial_order(group, class_id, k), order))
            assert valence_check(group, k, divisor)


def test_rank_mismatch_with_deficient_generators(gamma0_3):
    from dataclasses import replace

    crippled = replace(gamma0_3, name="g3_crippled",
                       generators=gamma0_3.generators[:1])  # weight-2 series only
    with pytest.raises(RankMismatch):
        echelon_basis(crippled, 2, 64)


# ---------------------------------------------------------------------------
# numeric modularity spot-check
# ---------------------------------------------------------------------------

def _mobius(m, z):
    (a, b), (c, d) = m
    return (a * z + b) / (c * z + d), c * z + d


def test_modularity_spot_check(sl2z, gamma0_3):
    """|f(gz) - (cz+d)^{2k} f(z)| small for small group elements."""
    rng = random.Random(7)
    cases = [
        (sl2z, 6, [((1, 1), (0, 1)), ((0, -1), (1, 0)), ((1, -1), (1, 0)),
                   ((2, 1), (1, 1)), ((1, 0), (1, 1))]),
        (gamma0_3, 2, [((1, 1), (0, 1)), ((1, 0), (3, 1)), ((1, -1), (0, 1)),
                       ((4, 1), (3, 1)), ((2, 1), (3, 2))]),
    ]
    for group, k, elements in cases:
        basis = echelon_basis(group, k, 128)
        weight = 2 * k
        for f in basis.elements:
            for m in elements:
                assert m[0][0] * m[1][1] - m[0][1] * m[1][0] == 1
                for _ in range(10):
                    z = mp.mpc(rng.uniform(-0.4, 0.4), rng.uniform(1.0, 1.6))
                    gz, czd = _mobius(m, z)
                    lhs, _ = eval_series(f, gz, 128, growth_exponent=weight)
                    rhs, _ = eval_series(f, z, 128, growth_exponent=weight)
                    rhs = czd ** weight * rhs
                    scale = max(abs(rhs), mp.mpf(1e-30))
                    assert abs(lhs - rhs) / scale < 1e-9
