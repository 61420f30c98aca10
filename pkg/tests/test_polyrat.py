"""Exact polynomial toolkit: gcd, Yun, Sturm, isolation."""

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from eiszeros import polyrat as pr


def P(*coeffs):
    return pr.poly([Fraction(c) for c in coeffs])


def test_divmod_exact():
    # (x^2 - 1) = (x - 1)(x + 1)
    q, r = pr.divmod_exact(P(-1, 0, 1), P(-1, 1))
    assert q == P(1, 1) and r == ()


def test_gcd_multiplicity():
    # gcd((x-1)^2 (x+2), derivative) = (x-1)
    p = pr.mul(pr.mul(P(-1, 1), P(-1, 1)), P(2, 1))
    g = pr.gcd(p, pr.derivative(p))
    assert g == P(-1, 1)


def test_squarefree_decomposition():
    p = pr.mul(pr.mul(P(-1, 1), P(-1, 1)), P(2, 1))
    decomposition = pr.squarefree_decomposition(p)
    assert decomposition == [(P(2, 1), 1), (P(-1, 1), 2)]


def test_sturm_counts():
    chain = pr.sturm_chain(P(1, 0, 1))  # x^2 + 1
    assert pr.count_real_roots(chain) == 0
    chain = pr.sturm_chain(P(-2, 0, 1))  # x^2 - 2
    assert pr.count_real_roots(chain) == 2
    assert pr.count_real_roots(chain, 0, None) == 1
    assert pr.count_real_roots(chain, Fraction(3, 2), None) == 0


def test_isolation_and_refinement():
    p = P(-2, 0, 1)
    intervals = pr.isolate_real_roots(p)
    assert len(intervals) == 2
    refined = [pr.refine_root(p, iv, Fraction(1, 10 ** 20)) for iv in intervals]
    import math

    for lo, hi in refined:
        assert hi - lo <= Fraction(1, 10 ** 20)
        assert min(abs(float(lo) - math.sqrt(2)), abs(float(lo) + math.sqrt(2))) < 1e-15


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(min_value=-9, max_value=9), min_size=2, max_size=6))
def test_sturm_total_count_vs_roots_of_random_products(roots):
    """Polynomial with prescribed integer roots: Sturm finds the distinct ones."""
    p = P(1)
    for r in roots:
        p = pr.mul(p, P(-r, 1))
    sf = pr.squarefree_part(p)
    chain = pr.sturm_chain(sf)
    assert pr.count_real_roots(chain) == len(set(roots))


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(min_value=-8, max_value=8), min_size=1, max_size=4),
    st.lists(st.integers(min_value=-8, max_value=8), min_size=1, max_size=4),
)
def test_divmod_roundtrip(a, b):
    pa, pb = P(*a), P(*b)
    if pr.is_zero(pb):
        return
    q, r = pr.divmod_exact(pa, pb)
    assert pr.add(pr.mul(q, pb), r) == pa
    assert pr.degree(r) < pr.degree(pb) or pr.is_zero(r)
