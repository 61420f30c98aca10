"""Divisor polynomial extraction and certified root structure."""

from fractions import Fraction

import mpmath as mp
import pytest

from eiszeros.divpoly import (
    all_roots,
    divisor_polynomial,
    mpf_to_fraction,
    real_root_analysis,
    to_j_polynomial,
    verify_theorem,
)
from eiszeros.errors import NotPolynomial
from eiszeros.forms import hauptmodul
from eiszeros.groups import dimension
from eiszeros.qseries import QSeries, eisenstein_level1, eta_quotient


def test_to_j_identity_and_constant(sl2z):
    j = hauptmodul(sl2z, 40)
    assert to_j_polynomial(j.series, j).coeffs == (0, 1)
    assert to_j_polynomial(QSeries.constant(1, 1, 30), j).coeffs == (1,)


def test_to_j_e12_over_delta(sl2z):
    j = hauptmodul(sl2z, 40)
    g = eisenstein_level1(6, 40) / eta_quotient([(1, 24)], 40)
    p = to_j_polynomial(g, j)
    assert p.coeffs == (Fraction(82104, 691), 1)


def test_to_j_rejects_vanishing_series(sl2z):
    j = hauptmodul(sl2z, 40)
    with pytest.raises(NotPolynomial):
        to_j_polynomial(eta_quotient([(1, 24)], 40), j)  # valuation 1


def test_to_j_detects_non_polynomial(sl2z):
    j = hauptmodul(sl2z, 40)
    g = eisenstein_level1(2, 40)  # weight 4, not weight 0: no j-polynomial
    with pytest.raises(NotPolynomial):
        to_j_polynomial(g, j)


def test_divisor_polynomial_examples(sl2z, gamma0_3):
    assert divisor_polynomial(sl2z, 2).coeffs == (1,)
    assert divisor_polynomial(sl2z, 6).coeffs == (Fraction(82104, 691), 1)
    assert divisor_polynomial(gamma0_3, 2).coeffs == (-12, 1)


def test_divisor_polynomial_degree_is_dim_minus_one(sl2z, gamma0_3):
    for group in (sl2z, gamma0_3):
        for k in (2, 3, 4, 5, 6, 10):
            assert divisor_polynomial(group, k).degree == dimension(group, k) - 1


# ---------------------------------------------------------------------------
# real_root_analysis
# ---------------------------------------------------------------------------

def test_rra_complex_pair():
    r = real_root_analysis((1, 0, 1), Fraction(0))
    assert r.n_real_distinct == 0 and r.squarefree


def test_rra_single_root_in_interval():
    r = real_root_analysis((Fraction(82104, 691), 1), Fraction(-744))
    assert (r.n_real_distinct, r.n_in_interval_distinct, r.n_good) == (1, 1, 1)


def test_rra_multiplicities():
    # (X-1)^2 (X+2): 2 distinct real roots, 1 in (0, inf), none simple there... the
    # root at 1 has multiplicity 2 so good = 0
    coeffs = (2, -3, 0, 1)
    r = real_root_analysis(coeffs, Fraction(0))
    assert r.n_real_distinct == 2
    assert r.n_real_with_multiplicity == 3
    assert r.n_in_interval_distinct == 1
    assert r.n_good == 0
    assert not r.squarefree


def test_rra_endpoint_ambiguity_bracket():
    # root exactly at the bracketed endpoint is counted ambiguous
    r = real_root_analysis((0, 1), (Fraction(-1, 10 ** 25), Fraction(1, 10 ** 25)))
    assert r.n_endpoint_ambiguous == 1
    assert r.n_good == 0


# ---------------------------------------------------------------------------
# all_roots
# ---------------------------------------------------------------------------

def test_all_roots_rational_root():
    (root,) = all_roots((Fraction(-12), Fraction(1)))
    assert root.value == 12
    assert root.multiplicity == 1
    assert root.certified_radius < mp.mpf("1e-30")


def test_all_roots_conjugate_pair():
    roots = all_roots((1, 0, 1))
    values = sorted((r.value for r in roots), key=lambda v: v.imag)
    assert values[0] == values[1].conjugate()
    assert all(abs(r.value.imag) == 1.0 for r in roots)


def test_all_roots_multiplicity_detection():
    roots = all_roots((2, -3, 0, 1))
    by_value = {round(r.value.real): r.multiplicity for r in roots}
    assert by_value == {-2: 1, 1: 2}


def test_mpf_to_fraction_roundtrip():
    x = mp.mpf("-15.0")
    assert mpf_to_fraction(x) == -15
    y = mp.mpf(1) / 3
    assert abs(mpf_to_fraction(y) - Fraction(1, 3)) < Fraction(1, 10 ** 15)


# ---------------------------------------------------------------------------
# verify_theorem
# ---------------------------------------------------------------------------

def test_verify_sl2z_weight12(sl2z):
    rep = verify_theorem(sl2z, 6)
    assert rep.status == "ok"
    assert rep.degree == 1
    assert rep.counts == {"real": 1, "simple": 1, "in_interval": 1, "exceptions": 0}
    assert rep.c_value == 0
    assert rep.theorem_pass is True
    assert mpf_to_fraction(rep.interval_endpoint) == -744
    (root,) = rep.roots
    assert abs(float(root.re) + 118.8191) < 1e-3
    assert root.boundary_preimage is not None
    x, y = root.boundary_preimage["x"], root.boundary_preimage["y"]
    assert abs(x * x + y * y - 1) < 1e-12  # on the unit arc


def test_verify_gamma0_3_weight4(gamma0_3):
    rep = verify_theorem(gamma0_3, 2)
    assert rep.status == "ok"
    assert rep.degree == 1
    assert rep.c_value == 1
    assert rep.theorem_pass is True
    assert mpf_to_fraction(rep.interval_endpoint) == -15
    (root,) = rep.roots
    assert mpf_to_fraction(root.re) == 12 and root.im == 0


def test_verify_weight2_reports(gamma0_3, sl2z):
    rep = verify_theorem(gamma0_3, 1)
    assert rep.status == "does_not_exist"
    assert "-1/3" in rep.notes[0]
    rep = verify_theorem(sl2z, 1)
    assert rep.status == "does_not_exist"
    assert rep.dim == 0


def test_verify_polynomial_evaluation_at_preimages(gamma0_3):
    """|P(j(z_root))| is small at certified preimages."""
    from eiszeros.geometry import _evaluator

    rep = verify_theorem(gamma0_3, 3)
    ev = _evaluator(gamma0_3)
    scale = max(abs(float(c)) for c in rep.polynomial.coeffs)
    for root in rep.roots:
        if root.boundary_preimage is None:
            continue
        z = mp.mpc(float(root.boundary_preimage["x"]), float(root.boundary_preimage["y"]))
        jz = ev.value(z)
        val = mp.polyval([mp.mpf(str(c)) for c in reversed(rep.polynomial.coeffs)], jz)
        assert abs(val) < 1e-8 * scale
