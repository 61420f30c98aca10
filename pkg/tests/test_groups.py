"""Registry entries, dimension/valence bookkeeping, config validation."""

import json
from fractions import Fraction

import pytest

from eiszeros.errors import ConfigValidation, UnknownEllipticClass, UnknownGroup
from eiszeros.exactnum import QuadReal
from eiszeros.groups import (
    builtin_names,
    dimension,
    group_spec,
    trivial_order,
    valence_check,
)


def test_builtin_names():
    assert builtin_names() == ("gamma0_2", "gamma0_3", "sl2z")


def test_sl2z_registry_entry(sl2z):
    assert sl2z.cusp_width == 1
    assert sl2z.nu_inf == 1
    assert sl2z.elliptic_classes() == {0: 2, 1: 3}
    assert float(sl2z.y0) == pytest.approx(3 ** 0.5 / 2, abs=1e-15)
    (arc,) = sl2z.arcs
    assert (arc.center_x, arc.radius) == (0, 1)


def test_gamma0_3_registry_entry(gamma0_3):
    assert gamma0_3.nu_inf == 2
    assert gamma0_3.elliptic_classes() == {0: 3}
    assert float(gamma0_3.y0) == pytest.approx(3 ** 0.5 / 6, abs=1e-15)
    assert [(a.center_x, a.radius) for a in gamma0_3.arcs] == [
        (Fraction(-1, 3), Fraction(1, 3)),
        (Fraction(1, 3), Fraction(1, 3)),
    ]


def test_gamma0_3_arc_endpoints_hit_elliptic_points_exactly(gamma0_3):
    """|corner - center| = radius symbolically: corner = -1/2 + i sqrt(3)/6."""
    arc = gamma0_3.arcs[0]
    endpoint = arc.endpoint_exact("start")
    assert endpoint is not None
    x, y = endpoint
    corner = gamma0_3.elliptic_points[0]
    assert x == corner.x and y == corner.y
    dx = x - QuadReal.rational(arc.center_x)
    assert dx.square() + y.square() == QuadReal.rational(Fraction(1, 9))


def test_unknown_group():
    with pytest.raises(UnknownGroup):
        group_spec("gamma0_7")


# ---------------------------------------------------------------------------
# dimensions (closed forms for the builtins are the oracle)
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k,expected", [(1, 0), (2, 1), (3, 1), (6, 2), (7, 1), (40, 7)])
def test_dimension_sl2z(sl2z, k, expected):
    assert dimension(sl2z, k) == expected


def test_dimension_gamma0_3(gamma0_3):
    for k in range(1, 41):
        assert dimension(gamma0_3, k) == 1 + (2 * k) // 3


def test_dimension_gamma0_2(gamma0_2):
    for k in range(1, 41):
        assert dimension(gamma0_2, k) == 1 + k // 2


# ---------------------------------------------------------------------------
# trivial orders and valence
# ---------------------------------------------------------------------------

def test_trivial_orders(sl2z, gamma0_3):
    assert trivial_order(sl2z, 0, 3) == 1   # order-2 class at weight 6
    assert trivial_order(sl2z, 1, 3) == 0   # order-3 class at weight 6
    assert trivial_order(gamma0_3, 0, 2) == 1
    with pytest.raises(UnknownEllipticClass):
        trivial_order(sl2z, 9, 2)


def test_valence_check_examples(sl2z, gamma0_3):
    assert valence_check(sl2z, 6, [("inf", 1, 1)])            # the cusp form of weight 12
    assert valence_check(sl2z, 2, [("rho", 1, 3)])            # weight 4
    assert not valence_check(sl2z, 2, [("i", 1, 2)])
    assert valence_check(gamma0_3, 2, [("inf", 1, 1), ("corner", 1, 3)])


# ---------------------------------------------------------------------------
# config ingestion
# ---------------------------------------------------------------------------

def make_config():
    return {
        "name": "gamma0_3_custom",
        "cusp_width": 1,
        "nu_inf": 2,
        "y0": {"rational": [1, 6], "sqrt": 3},
        "elliptic_points": [
            {"x": [-1, 2], "y": {"rational": [1, 6], "sqrt": 3}, "order": 3, "class_id": 0},
            {"x": [1, 2], "y": {"rational": [1, 6], "sqrt": 3}, "order": 3, "class_id": 0},
        ],
        "arcs": [
            {"center_x": [-1, 3], "radius": [1, 3], "t_start": [2, 3], "t_end": 0,
             "orientation": "cw"},
            {"center_x": [1, 3], "radius": [1, 3], "t_start": 1, "t_end": [1, 3],
             "orientation": "cw"},
        ],
        "generators": [
            {"kind": "weight2_eisenstein", "weight": 2, "level": 3},
            {"kind": "eisenstein", "weight": 4, "scale": 1},
            {"kind": "eisenstein", "weight": 4, "scale": 3},
            {"kind": "eta", "weight": 6, "factors": [[1, 6], [3, 6]]},
        ],
        "hauptmodul": {"kind": "eta", "weight": 0, "factors": [[1, 12], [3, -12]]},
        "identifications": [[[1, 0], [3, 1]]],
    }


def test_config_roundtrip(tmp_path):
    doc = make_config()
    spec = group_spec(doc)
    assert spec.name == "gamma0_3_custom"
    assert spec.eisenstein_level() == 3
    path = tmp_path / "group.json"
    path.write_text(json.dumps(doc))
    spec2 = group_spec(str(path))
    assert spec2 == spec


def test_config_determinant_two_rejected():
    doc = make_config()
    doc["identifications"] = [[[2, 0], [0, 1]]]
    with pytest.raises(ConfigValidation) as err:
        group_spec(doc)
    assert any("determinant" in p for p in err.value.problems)


def test_config_unknown_field_rejected():
    doc = make_config()
    doc["surprise"] = 1
    with pytest.raises(ConfigValidation) as err:
        group_spec(doc)
    assert any("unknown fields" in p for p in err.value.problems)


def test_config_bad_elliptic_order():
    doc = make_config()
    doc["elliptic_points"][0]["order"] = 4
    with pytest.raises(ConfigValidation) as err:
        group_spec(doc)
    assert any("order" in p for p in err.value.problems)


def test_config_arc_outside_strip():
    doc = make_config()
    doc["arcs"][0]["radius"] = [2, 1]
    with pytest.raises(ConfigValidation):
        group_spec(doc)


def test_config_missing_field():
    doc = make_config()
    del doc["y0"]
    with pytest.raises(ConfigValidation) as err:
        group_spec(doc)
    assert any("missing" in p for p in err.value.problems)


def test_config_matches_schema():
    jsonschema = pytest.importorskip("jsonschema")
    import importlib.resources as resources

    schema = json.loads(
        resources.files("eiszeros").joinpath("schemas/group_config.schema.json").read_text()
    )
    jsonschema.validate(make_config(), schema)
