"""Exception hierarchy for the eiszeros package."""

from __future__ import annotations


class EisZerosError(Exception):
    """Base class for all eiszeros errors."""


# --- series arithmetic ---

class WidthMismatch(EisZerosError):
    """Operands expand in different cusp-width variables."""


class DivisionByZeroSeries(EisZerosError):
    """Division or inversion of the zero series."""


class EmptyTruncation(EisZerosError):
    """An operation produced a series with no known coefficients (T <= v)."""


class InvalidEtaSpec(EisZerosError):
    """Eta-quotient exponents violate the mod-24 leading-exponent condition."""


class WeightTooSmall(EisZerosError):
    """Weight 2 requested where only weights >= 4 are modular."""


class ImaginaryPartTooSmall(EisZerosError):
    """|q| at the evaluation point exceeds the configured cap."""


# --- group registry / config ---

class UnknownGroup(EisZerosError):
    """Name is not a builtin group and not a readable config."""


class ConfigValidation(EisZerosError):
    """Group config rejected; `problems` lists field-level diagnostics."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class UnknownEllipticClass(EisZerosError):
    """No elliptic class with the requested id."""


# --- forms ---

class DoesNotExist(EisZerosError):
    """The requested Eisenstein series does not exist for this (group, weight).

    `cusp_value` carries the obstructing constant term at the cusp 0 when
    the obstruction is a nonvanishing value there; `dim` carries the space
    dimension when the obstruction is an empty space.
    """

    def __init__(self, message, cusp_value=None, dim=None):
        self.cusp_value = cusp_value
        self.dim = dim
        super().__init__(message)


class UnsupportedLevel(EisZerosError):
    """No Eisenstein construction recipe for this group."""


class RecipeInvalid(EisZerosError):
    """A generator recipe did not produce a series of the declared shape."""


class RankMismatch(EisZerosError):
    """Spanning monomials did not reach the dimension-formula rank."""


class TruncationTooShort(EisZerosError):
    """Requested truncation cannot support the computation."""


# --- divisor polynomials ---

class NotPolynomial(EisZerosError):
    """Reduction against hauptmodul powers left a nonzero remainder."""


class PrecisionExhausted(EisZerosError):
    """Root certification radius stayed above target after precision doubling."""


# --- geometry ---

class NonIsolatedCrit(EisZerosError):
    """Sign pattern along an arc oscillates below the refinement resolution."""


class NotFoundOnBoundary(EisZerosError):
    """Target value lies outside the attainable boundary range of j."""


# --- quadrature ---

class NonConvergent(EisZerosError):
    """Quadrature error estimate stayed above tolerance at the refinement limit."""


class PreconditionCuspGrowth(EisZerosError):
    """Integrand does not vanish at every cusp; the inner product diverges."""
