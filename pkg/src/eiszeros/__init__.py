"""Eisenstein series, hauptmoduls and certified divisor-polynomial zeros
for genus-zero Fuchsian groups, over exact rational arithmetic."""

from .divpoly import (
    DivisorPoly,
    ZeroReport,
    all_roots,
    divisor_polynomial,
    real_root_analysis,
    to_j_polynomial,
    verify_theorem,
)
from .forms import (
    EchelonBasis,
    Hauptmodul,
    echelon_basis,
    eisenstein_infinity,
    hauptmodul,
    upsilon,
)
from .geometry import (
    BoundaryTrace,
    CritSet,
    crit_and_c,
    invert_j_on_boundary,
    trace_boundary,
)
from .groups import (
    ArcSpec,
    GroupSpec,
    builtin_names,
    dimension,
    group_spec,
    trivial_order,
    valence_check,
)
from .petersson import (
    QuadratureSpec,
    orthogonality_replay,
    petersson_inner,
)
from .qseries import (
    EtaQuotientSpec,
    QSeries,
    Rational,
    bernoulli,
    eisenstein_level1,
    eta_quotient,
    eval_series,
    q_derivative,
    rescale,
    series_arith,
)

__version__ = "0.1.0"

__all__ = [
    "ArcSpec", "BoundaryTrace", "CritSet", "DivisorPoly", "EchelonBasis",
    "EtaQuotientSpec", "GroupSpec", "Hauptmodul", "QSeries", "QuadratureSpec",
    "Rational", "ZeroReport", "all_roots", "bernoulli", "builtin_names",
    "crit_and_c", "dimension", "divisor_polynomial", "echelon_basis",
    "eisenstein_infinity", "eisenstein_level1", "eta_quotient", "eval_series",
    "group_spec", "hauptmodul", "invert_j_on_boundary", "orthogonality_replay",
    "petersson_inner", "q_derivative", "real_root_analysis", "rescale",
    "series_arith", "to_j_polynomial", "trace_boundary", "trivial_order",
    "upsilon", "valence_check", "verify_theorem",
]
