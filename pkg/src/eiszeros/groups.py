"""Genus-zero group registry: domain data, dimension and valence bookkeeping.

A GroupSpec bundles the combinatorial and geometric data the rest of the
package consumes: cusp width, cusp count, elliptic classes, the corner
height y0, the circular boundary arcs below the vertical lines, ring
generators for spanning M_{2k}, a hauptmodul recipe, and the matrices
identifying paired boundary arcs.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigValidation, UnknownEllipticClass, UnknownGroup
from .exactnum import QuadReal, exact_cos_pi, exact_sin_pi

GENERATOR_KINDS = ("eta", "eisenstein", "weight2_eisenstein", "level1_j")


@dataclass(frozen=True)
class ArcSpec:
    """Circular boundary arc center_x + radius*e^{i*theta}, theta = t*pi.

    t runs affinely from t_start to t_end (as the path parameter goes
    0 -> 1), so t_start > t_end encodes clockwise traversal.
    """

    center_x: Fraction
    radius: Fraction
    t_start: Fraction
    t_end: Fraction
    orientation: str
    kind: str = "circle"

    def angle(self, s: float) -> float:
        """Angle (radians) at path parameter s in [0, 1]."""
        t = self.t_start + (self.t_end - self.t_start) * Fraction(s).limit_denominator(10**15)
        return float(t) * math.pi

    def point(self, s: float) -> complex:
        th = self.angle(s)
        return complex(float(self.center_x) + float(self.radius) * math.cos(th),
                       float(self.radius) * math.sin(th))

    def endpoint_exact(self, which: str):
        """(x, y) of an endpoint as QuadReal when the angle is in the table."""
        t = self.t_start if which == "start" else self.t_end
        c, s = exact_cos_pi(t), exact_sin_pi(t)
        if c is None or s is None:
            return None
        x = QuadReal.rational(self.center_x) + QuadReal.rational(self.radius) * c
        y = QuadReal.rational(self.radius) * s
        return x, y


@dataclass(frozen=True)
class EllipticPoint:
    x: QuadReal
    y: QuadReal
    order: int
    class_id: int


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for one ring generator (or the hauptmodul).

    kinds: "eta" (eta quotient with `factors`), "eisenstein" (level-1
    series of `weight`, oldform-rescaled by `scale`), "weight2_eisenstein"
    (the weight-2 combination at prime `level`), "level1_j" (hauptmodul
    recipe E_4^3/Delta minus its constant term).
    """

    kind: str
    weight: int
    scale: int = 1
    level: int = 0
    factors: tuple[tuple[int, int], ...] = ()
    reference_coeffs: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class GroupSpec:
    name: str
    cusp_width: int
    nu_inf: int
    elliptic_points: tuple[EllipticPoint, ...]
    y0: QuadReal
    arcs: tuple[ArcSpec, ...]
    generators: tuple[GeneratorSpec, ...]
    hauptmodul_recipe: GeneratorSpec
    boundary_identifications: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = ()

    def elliptic_classes(self) -> dict[int, int]:
        """Map class_id -> elliptic order."""
        classes: dict[int, int] = {}
        for p in self.elliptic_points:
            if classes.setdefault(p.class_id, p.order) != p.order:
                raise ConfigValidation(
                    [f"elliptic class {p.class_id} has inconsistent orders"]
                )
        return classes

    def eisenstein_level(self) -> int | None:
        """1 for one-cusp groups, the prime p when a weight-2 combination
        generator declares it, otherwise None (no builtin recipe)."""
        if self.nu_inf == 1:
            return 1
        for g in self.generators:
            if g.kind == "weight2_eisenstein":
                return g.level
        return None


# ---------------------------------------------------------------------------
# builtin registry
# ---------------------------------------------------------------------------

def _sl2z() -> GroupSpec:
    half = Fraction(1, 2)
    return GroupSpec(
        name="sl2z",
        cusp_width=1,
        nu_inf=1,
        elliptic_points=(
            EllipticPoint(QuadReal.rational(0), QuadReal.rational(1), 2, 0),
            EllipticPoint(QuadReal.rational(-half), QuadReal.root(3, half), 3, 1),
            EllipticPoint(QuadReal.rational(half), QuadReal.root(3, half), 3, 1),
        ),
        y0=QuadReal.root(3, half),
        arcs=(
            ArcSpec(Fraction(0), Fraction(1), Fraction(2, 3), Fraction(1, 3), "cw"),
        ),
        generators=(
            GeneratorSpec("eisenstein", 4, scale=1),
            GeneratorSpec("eisenstein", 6, scale=1),
        ),
        hauptmodul_recipe=GeneratorSpec(
            "level1_j", 0, reference_coeffs=((1, 196884), (2, 21493760))
        ),
        boundary_identifications=(((0, -1), (1, 0)),),
    )


def _gamma0_2() -> GroupSpec:
    half = Fraction(1, 2)
    return GroupSpec(
        name="gamma0_2",
        cusp_width=1,
        nu_inf=2,
        elliptic_points=(
            EllipticPoint(QuadReal.rational(-half), QuadReal.rational(half), 2, 0),
            EllipticPoint(QuadReal.rational(half), QuadReal.rational(half), 2, 0),
        ),
        y0=QuadReal.rational(half),
        arcs=(
            ArcSpec(Fraction(-1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(0), "cw"),
            ArcSpec(Fraction(1, 2), Fraction(1, 2), Fraction(1), Fraction(1, 2), "cw"),
        ),
        generators=(
            GeneratorSpec("weight2_eisenstein", 2, level=2),
            GeneratorSpec("eisenstein", 4, scale=1),
            GeneratorSpec("eisenstein", 4, scale=2),
            GeneratorSpec("eta", 8, factors=((1, 8), (2, 8))),
        ),
        hauptmodul_recipe=GeneratorSpec("eta", 0, factors=((1, 24), (2, -24))),
        boundary_identifications=(((1, 0), (2, 1)),),
    )


def _gamma0_3() -> GroupSpec:
    half = Fraction(1, 2)
    sixth = Fraction(1, 6)
    return GroupSpec(
        name="gamma0_3",
        cusp_width=1,
        nu_inf=2,
        elliptic_points=(
            EllipticPoint(QuadReal.rational(-half), QuadReal.root(3, sixth), 3, 0),
            EllipticPoint(QuadReal.rational(half), QuadReal.root(3, sixth), 3, 0),
        ),
        y0=QuadReal.root(3, sixth),
        arcs=(
            ArcSpec(Fraction(-1, 3), Fraction(1, 3), Fraction(2, 3), Fraction(0), "cw"),
            ArcSpec(Fraction(1, 3), Fraction(1, 3), Fraction(1), Fraction(1, 3), "cw"),
        ),
        generators=(
            GeneratorSpec("weight2_eisenstein", 2, level=3),
            GeneratorSpec("eisenstein", 4, scale=1),
            GeneratorSpec("eisenstein", 4, scale=3),
            GeneratorSpec("eta", 6, factors=((1, 6), (3, 6))),
        ),
        hauptmodul_recipe=GeneratorSpec(
            "eta",
            0,
            factors=((1, 12), (3, -12)),
            reference_coeffs=((1, 783), (2, 8672), (3, 65367), (4, 371520)),
        ),
        boundary_identifications=(((1, 0), (3, 1)),),
    )


_BUILTINS = {"sl2z": _sl2z, "gamma0_2": _gamma0_2, "gamma0_3": _gamma0_3}


def builtin_names() -> tuple[str, ...]:
    return tuple(sorted(_BUILTINS))


def group_spec(name_or_config) -> GroupSpec:
    """Resolve a builtin name, a config dict, or a path to a config JSON."""
    if isinstance(name_or_config, GroupSpec):
        return name_or_config
    if isinstance(name_or_config, dict):
        return validate_config(name_or_config)
    if isinstance(name_or_config, (str, os.PathLike)):
        key = str(name_or_config)
        if key in _BUILTINS:
            spec = _BUILTINS[key]()
            _structural_checks(spec)  # builtin specs obey the same rules
            return spec
        if os.path.exists(key):
            with open(key, "r", encoding="utf-8") as fh:
                try:
                    doc = json.load(fh)
                except json.JSONDecodeError as e:
                    raise ConfigValidation([f"config is not valid JSON: {e}"]) from e
            return validate_config(doc)
        raise UnknownGroup(
            f"{key!r} is not a builtin group ({', '.join(builtin_names())}) or a config path"
        )
    raise UnknownGroup(f"cannot interpret group spec of type {type(name_or_config)!r}")


# ---------------------------------------------------------------------------
# config ingestion
# ---------------------------------------------------------------------------

_CONFIG_FIELDS = {
    "name", "cusp_width", "nu_inf", "elliptic_points", "y0",
    "arcs", "generators", "hauptmodul", "identifications",
}


def _parse_fraction(value, path, problems) -> Fraction:
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return Fraction(int(value[0]), int(value[1]))
        if isinstance(value, str):
            return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        pass
    problems.append(f"{path}: expected a rational ([num, den], int, or 'p/q')")
    return Fraction(0)


def _parse_exact(value, path, problems) -> QuadReal:
    """Rational or {'rational': [n,d], 'sqrt': D}, meaning (n/d)*sqrt(D)."""
    if isinstance(value, dict):
        unknown = set(value) - {"rational", "sqrt"}
        if unknown:
            problems.append(f"{path}: unknown keys {sorted(unknown)}")
        coef = _parse_fraction(value.get("rational", 1), f"{path}.rational", problems)
        d = value.get("sqrt", 1)
        if not isinstance(d, int) or d < 0:
            problems.append(f"{path}.sqrt: expected a nonnegative integer")
            d = 1
        return QuadReal.root(d, coef) if d > 1 else QuadReal.rational(coef)
    return QuadReal.rational(_parse_fraction(value, path, problems))


def _parse_generator(doc, path, problems, *, hauptmodul=False) -> GeneratorSpec:
    if not isinstance(doc, dict):
        problems.append(f"{path}: expected an object")
        return GeneratorSpec("eta", 0)
    allowed = {"kind", "weight", "scale", "level", "factors", "reference_coeffs"}
    unknown = set(doc) - allowed
    if unknown:
        problems.append(f"{path}: unknown keys {sorted(unknown)}")
    kind = doc.get("kind")
    if kind not in GENERATOR_KINDS:
        problems.append(f"{path}.kind: expected one of {GENERATOR_KINDS}")
        kind = "eta"
    weight = doc.get("weight", 0)
    if not isinstance(weight, int) or weight < 0 or weight % 2:
        if not (hauptmodul and weight == 0):
            problems.append(f"{path}.weight: expected a nonnegative even integer")
        weight = max(weight, 0) if isinstance(weight, int) else 0
    scale = doc.get("scale", 1)
    if not isinstance(scale, int) or scale < 1:
        problems.append(f"{path}.scale: expected a positive integer")
        scale = 1
    level = doc.get("level", 0)
    factors: tuple[tuple[int, int], ...] = ()
    if kind == "eta":
        raw = doc.get("factors")
        if not isinstance(raw, list) or not raw:
            problems.append(f"{path}.factors: eta recipes need a nonempty factor list")
        else:
            try:
                factors = tuple((int(d), int(r)) for d, r in raw)
            except (TypeError, ValueError):
                problems.append(f"{path}.factors: expected pairs [scale, exponent]")
        if factors and sum(d * r for d, r in factors) % 24:
            problems.append(f"{path}.factors: sum(delta*r) must be divisible by 24")
    if kind == "weight2_eisenstein":
        if not isinstance(level, int) or level < 2 or not _is_prime(level):
            problems.append(f"{path}.level: weight-2 combinations need a prime level")
            level = 2
    refs_raw = doc.get("reference_coeffs", {})
    refs: tuple[tuple[int, int], ...] = ()
    if refs_raw:
        try:
            refs = tuple(sorted((int(n), int(c)) for n, c in dict(refs_raw).items()))
        except (TypeError, ValueError):
            problems.append(f"{path}.reference_coeffs: expected a map exponent -> integer")
    return GeneratorSpec(kind, weight, scale=scale, level=level or 0,
                         factors=factors, reference_coeffs=refs)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def validate_config(doc: dict) -> GroupSpec:
    """Build a GroupSpec from a config document, collecting diagnostics."""
    problems: list[str] = []
    if not isinstance(doc, dict):
        raise ConfigValidation(["config root must be an object"])
    unknown = set(doc) - _CONFIG_FIELDS
    if unknown:
        problems.append(f"unknown fields {sorted(unknown)}")
    missing = _CONFIG_FIELDS - set(doc)
    if missing:
        problems.append(f"missing fields {sorted(missing)}")
        raise ConfigValidation(problems)

    name = doc["name"]
    if not isinstance(name, str) or not name:
        problems.append("name: expected a nonempty string")
        name = "unnamed"
    width = doc["cusp_width"]
    if not isinstance(width, int) or width < 1:
        problems.append("cusp_width: expected a positive integer")
        width = 1
    nu_inf = doc["nu_inf"]
    if not isinstance(nu_inf, int) or nu_inf < 1:
        problems.append("nu_inf: expected a positive integer")
        nu_inf = 1

    y0 = _parse_exact(doc["y0"], "y0", problems)
    if float(y0) <= 0:
        problems.append("y0: must be positive")

    pts = []
    raw_pts = doc["elliptic_points"]
    if not isinstance(raw_pts, list):
        problems.append("elliptic_points: expected a list")
        raw_pts = []
    for i, p in enumerate(raw_pts):
        path = f"elliptic_points[{i}]"
        if not isinstance(p, dict):
            problems.append(f"{path}: expected an object")
            continue
        unknown = set(p) - {"x", "y", "order", "class_id"}
        if unknown:
            problems.append(f"{path}: unknown keys {sorted(unknown)}")
        order = p.get("order")
        if order not in (2, 3):
            problems.append(f"{path}.order: elliptic orders must be 2 or 3")
            order = 2
        cid = p.get("class_id", 0)
        if not isinstance(cid, int) or cid < 0:
            problems.append(f"{path}.class_id: expected a nonnegative integer")
            cid = 0
        pts.append(EllipticPoint(
            _parse_exact(p.get("x", 0), f"{path}.x", problems),
            _parse_exact(p.get("y", 1), f"{path}.y", problems),
            order, cid,
        ))

    arcs = []
    raw_arcs = doc["arcs"]
    if not isinstance(raw_arcs, list):
        problems.append("arcs: expected a list")
        raw_arcs = []
    for i, a in enumerate(raw_arcs):
        path = f"arcs[{i}]"
        if not isinstance(a, dict):
            problems.append(f"{path}: expected an object")
            continue
        unknown = set(a) - {"kind", "center_x", "radius", "t_start", "t_end", "orientation"}
        if unknown:
            problems.append(f"{path}: unknown keys {sorted(unknown)}")
        if a.get("kind", "circle") != "circle":
            problems.append(f"{path}.kind: only 'circle' arcs are supported")
        orientation = a.get("orientation", "ccw")
        if orientation not in ("ccw", "cw"):
            problems.append(f"{path}.orientation: expected 'ccw' or 'cw'")
            orientation = "ccw"
        arc = ArcSpec(
            _parse_fraction(a.get("center_x", 0), f"{path}.center_x", problems),
            _parse_fraction(a.get("radius", 1), f"{path}.radius", problems),
            _parse_fraction(a.get("t_start", 0), f"{path}.t_start", problems),
            _parse_fraction(a.get("t_end", 1), f"{path}.t_end", problems),
            orientation,
        )
        if arc.radius <= 0:
            problems.append(f"{path}.radius: must be positive")
        if (arc.t_start > arc.t_end) != (orientation == "cw"):
            problems.append(f"{path}.orientation: inconsistent with angle direction")
        arcs.append(arc)

    gens = []
    raw_gens = doc["generators"]
    if not isinstance(raw_gens, list) or not raw_gens:
        problems.append("generators: expected a nonempty list")
        raw_gens = []
    for i, g in enumerate(raw_gens):
        gens.append(_parse_generator(g, f"generators[{i}]", problems))

    hpt = _parse_generator(doc["hauptmodul"], "hauptmodul", problems, hauptmodul=True)

    idents = []
    raw_ids = doc["identifications"]
    if not isinstance(raw_ids, list):
        problems.append("identifications: expected a list")
        raw_ids = []
    for i, m in enumerate(raw_ids):
        path = f"identifications[{i}]"
        ok = (
            isinstance(m, list) and len(m) == 2
            and all(isinstance(row, list) and len(row) == 2 for row in m)
            and all(isinstance(e, int) for row in m for e in row)
        )
        if not ok:
            problems.append(f"{path}: expected a 2x2 integer matrix")
            continue
        a, b = m[0]
        c, d = m[1]
        if a * d - b * c != 1:
            problems.append(f"{path}: determinant must be 1, got {a * d - b * c}")
        idents.append(((a, b), (c, d)))

    if problems:
        raise ConfigValidation(problems)

    spec = GroupSpec(
        name=name, cusp_width=width, nu_inf=nu_inf,
        elliptic_points=tuple(pts), y0=y0, arcs=tuple(arcs),
        generators=tuple(gens), hauptmodul_recipe=hpt,
        boundary_identifications=tuple(idents),
    )
    _structural_checks(spec)
    return spec


def _structural_checks(spec: GroupSpec):
    """Geometric consistency: arcs inside the strip, endpoints matched up."""
    problems: list[str] = []
    h2 = float(spec.cusp_width) / 2
    eps = 1e-12
    endpoints: list[tuple[float, float]] = []
    for i, arc in enumerate(spec.arcs):
        for s in (0.0, 0.25, 0.5, 0.75, 1.0):
            z = arc.point(s)
            if abs(z.real) > h2 + eps:
                problems.append(f"arcs[{i}]: leaves the strip |Re z| <= {h2}")
                break
            if z.imag < -eps:
                problems.append(f"arcs[{i}]: dips below the real axis")
                break
        endpoints.append((arc.point(0.0).real, arc.point(0.0).imag))
        endpoints.append((arc.point(1.0).real, arc.point(1.0).imag))
    y0f = float(spec.y0)
    for i, (x, y) in enumerate(endpoints):
        foot = abs(abs(x) - h2) < 1e-9 and abs(y - y0f) < 1e-9
        cusp = y < 1e-9
        neighbor = any(
            j != i and abs(x - x2) < 1e-9 and abs(y - y2) < 1e-9
            for j, (x2, y2) in enumerate(endpoints)
        )
        if not (foot or cusp or neighbor):
            problems.append(
                f"arc endpoint ({x:.6f}, {y:.6f}) matches no vertical foot, cusp, or neighbor arc"
            )
    spec.elliptic_classes()  # raises on inconsistent class orders
    if problems:
        raise ConfigValidation(problems)


# ---------------------------------------------------------------------------
# dimension and valence bookkeeping
# ---------------------------------------------------------------------------

def dimension(group: GroupSpec, k: int) -> int:
    """dim M_{2k} = 1 - 2k + nu_inf*k + sum over elliptic classes of
    floor(k*(1 - 1/e)); genus zero throughout."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 1
    d = 1 - 2 * k + group.nu_inf * k
    for e in group.elliptic_classes().values():
        d += (k * (e - 1)) // e
    return max(d, 0)


def trivial_order(group: GroupSpec, elliptic_class: int, k: int) -> int:
    """Forced vanishing order e*frac(k*(1 - 1/e)) at an elliptic class."""
    classes = group.elliptic_classes()
    if elliptic_class not in classes:
        raise UnknownEllipticClass(f"no elliptic class {elliptic_class} in {group.name}")
    e = classes[elliptic_class]
    frac = Fraction(k * (e - 1), e) - (k * (e - 1)) // e
    result = e * frac
    assert result.denominator == 1
    return int(result)


def valence_check(group: GroupSpec, k: int, divisor) -> bool:
    """Exact total-zero-count identity for a weight-2k form.

    `divisor` lists (label, order, stabilizer_order) entries, cusps counted
    in the local q_h variable with stabilizer order 1.  Returns True iff
    sum(order/e) - sum over elliptic classes of k*(1-1/e) equals
    (-2 + nu_inf)*k.
    """
    total = Fraction(0)
    for _, order, e in divisor:
        if order < 0:
            raise ValueError("divisor orders must be nonnegative")
        total += Fraction(order, e)
    for e in group.elliptic_classes().values():
        total -= Fraction(k * (e - 1), e)
    return total == Fraction((group.nu_inf - 2) * k)
