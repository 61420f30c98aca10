"""Boundary tracing, sign-change counting, inversion of j."""

import math

import mpmath as mp
import pytest

from eiszeros.errors import NotFoundOnBoundary
from eiszeros.geometry import (
    corner_value,
    crit_and_c,
    identification_residual,
    invert_j_on_boundary,
    trace_boundary,
)


def test_trace_requires_64_samples(sl2z):
    with pytest.raises(ValueError):
        trace_boundary(sl2z, 128, 32)


def test_trace_sl2z_j_real_on_boundary(sl2z):
    trace = trace_boundary(sl2z, 160, 64)
    assert trace.max_abs_im_j < 1e-9
    assert len(trace.skipped) == 0  # no boundary cusp on the sl2z arc


def test_trace_gamma0_3_j_real_and_skips_near_cusp(gamma0_3):
    trace = trace_boundary(gamma0_3, 160, 64)
    assert trace.max_abs_im_j < 1e-9
    assert trace.skipped  # samples next to the cusp 0 are excluded
    assert all(s.piece.startswith("arc") for s in trace.skipped)


def test_trace_vertical_lines_real(gamma0_2):
    trace = trace_boundary(gamma0_2, 160, 64)
    for vert in trace.verticals:
        for s in vert.samples:
            assert abs(s.j.imag) < 1e-9


def test_trace_monotone_pieces_injective(sl2z):
    """j strictly monotone on each side of the arc apex."""
    trace = trace_boundary(sl2z, 160, 128)
    (arc,) = trace.arcs
    values = [s.j.real for s in arc.samples]
    mid = len(values) // 2
    first, second = values[:mid], values[mid:]
    assert all(a < b for a, b in zip(first, first[1:]))
    assert all(a > b for a, b in zip(second, second[1:]))


# ---------------------------------------------------------------------------
# crit and c
# ---------------------------------------------------------------------------

def test_crit_sl2z(sl2z):
    crit, c = crit_and_c(sl2z)
    assert c == 0
    # the order-2 point i: numerator and denominator vanish together
    (point,) = crit.points
    assert point.kind == "zero+undefined"
    assert point.sign_change is False
    assert abs(point.z - 1j) < 1e-8


def test_crit_gamma0_3(gamma0_3):
    crit, c = crit_and_c(gamma0_3)
    assert c == 1
    changing = [p for p in crit.points if p.sign_change]
    assert len(changing) == 2  # the two arc apexes, one Gamma-class
    assert len({p.class_id for p in changing}) == 1
    for p in changing:
        assert abs(abs(p.z.real) - 1 / 3) < 1e-8
        assert abs(p.z.imag - 1 / 3) < 1e-8


def test_crit_gamma0_2_monotone_arcs(gamma0_2):
    crit, c = crit_and_c(gamma0_2)
    assert c == 0
    assert not crit.points  # y and j both monotone along each arc


def test_c_stable_under_sample_doubling(sl2z, gamma0_3):
    for group, expected in ((sl2z, 0), (gamma0_3, 1)):
        _, c1 = crit_and_c(group, 256)
        _, c2 = crit_and_c(group, 512)
        assert c1 == c2 == expected


def test_sign_change_consistent_across_class(gamma0_3):
    crit, _ = crit_and_c(gamma0_3)
    by_class: dict[int, set] = {}
    for p in crit.points:
        by_class.setdefault(p.class_id, set()).add(p.sign_change)
    for flags in by_class.values():
        assert len(flags) == 1


def test_identification_matrices_act_on_the_arcs(sl2z, gamma0_2, gamma0_3):
    for group in (sl2z, gamma0_2, gamma0_3):
        assert identification_residual(group) < 1e-12


# ---------------------------------------------------------------------------
# corner values and inversion
# ---------------------------------------------------------------------------

def test_corner_values(sl2z, gamma0_2, gamma0_3):
    assert abs(corner_value(sl2z) - (-744)) < 1e-40
    assert abs(corner_value(gamma0_3) - (-15)) < 1e-40
    assert abs(corner_value(gamma0_2) - (-40)) < 1e-40


def test_invert_classical_points(sl2z):
    p = invert_j_on_boundary(sl2z, 984, tol=1e-9)
    assert abs(complex(p.x, p.y) - 1j) < 1e-12
    p = invert_j_on_boundary(sl2z, -744, tol=1e-9)
    assert abs(complex(p.x, p.y) - complex(-0.5, math.sqrt(3) / 2)) < 1e-12


def test_invert_gamma0_3_corner_and_cusp(gamma0_3):
    p = invert_j_on_boundary(gamma0_3, -15, tol=1e-9)
    assert abs(complex(p.x, p.y) - complex(-0.5, math.sqrt(3) / 6)) < 1e-10
    # j -> 12 only in the cusp limit; accepted within tolerance near the cusp
    p = invert_j_on_boundary(gamma0_3, 12, tol=1e-8)
    assert p.residual < 1e-8
    assert abs(p.x) < 0.02 and p.y < 0.08


def test_invert_vertical_line(sl2z):
    p = invert_j_on_boundary(sl2z, -5000, tol=1e-6)
    assert p.arc_id == "vertical_left"
    assert abs(p.j_value + 5000) < 1e-6


def test_invert_not_found(sl2z):
    with pytest.raises(NotFoundOnBoundary):
        invert_j_on_boundary(sl2z, 985.0, tol=1e-9)  # beyond j(i) = 984


def test_invert_matches_eval(gamma0_3):
    from eiszeros.geometry import _evaluator

    ev = _evaluator(gamma0_3)
    for target in (-14.0, -5.0, 0.0, 7.5, 11.0):
        p = invert_j_on_boundary(gamma0_3, target, tol=1e-9)
        assert abs(ev.value(mp.mpc(p.x, p.y)) - target) < 1e-8
