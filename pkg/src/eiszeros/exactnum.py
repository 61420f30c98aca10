"""Exact real numbers of the form a + b*sqrt(d) with rational a, b.

Elliptic points and corner heights of the builtin fundamental domains live
in real quadratic fields, so arc-endpoint identities can be checked with
exact arithmetic instead of floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp


def _squarefree_split(d: int) -> tuple[int, int]:
    """Return (s, m) with d = s^2 * m and m squarefree."""
    s, m, p = 1, d, 2
    while p * p <= m:
        while m % (p * p) == 0:
            m //= p * p
            s *= p
        p += 1
    return s, m


@dataclass(frozen=True)
class QuadReal:
    """a + b*sqrt(d), normalized so b == 0 implies d == 1 and d is squarefree."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        a, b, d = Fraction(self.a), Fraction(self.b), int(self.d)
        if d < 0:
            raise ValueError("radicand must be nonnegative")
        s, m = _squarefree_split(d) if d > 0 else (0, 0)
        if d == 0:
            a, b, d = a, Fraction(0), 1
        elif m == 1:
            a, b, d = a + b * s, Fraction(0), 1
        else:
            b, d = b * s, m
        if b == 0:
            d = 1
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    @classmethod
    def rational(cls, value) -> "QuadReal":
        return cls(Fraction(value), Fraction(0), 1)

    @classmethod
    def root(cls, d: int, coefficient=1) -> "QuadReal":
        return cls(Fraction(0), Fraction(coefficient), d)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def __add__(self, other):
        other = _coerce(other)
        if self.b == 0 or other.b == 0 or self.d == other.d:
            d = self.d if self.b != 0 else other.d
            return QuadReal(self.a + other.a, self.b + other.b, d)
        raise ValueError("incompatible radicands")

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return QuadReal(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if self.b == 0 or other.b == 0 or self.d == other.d:
            d = self.d if self.b != 0 else other.d
            shared = self.d if (self.b != 0 and other.b != 0) else 0
            a = self.a * other.a + (self.b * other.b * shared if shared else 0)
            b = self.a * other.b + self.b * other.a
            return QuadReal(a, b, d)
        raise ValueError("incompatible radicands")

    def __rmul__(self, other):
        return self.__mul__(other)

    def square(self) -> "QuadReal":
        return self * self

    def __float__(self) -> float:
        import math

        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def to_mpf(self, prec: int = 113):
        with mp.workprec(prec):
            return mp.mpf(self.a.numerator) / self.a.denominator + (
                mp.mpf(self.b.numerator) / self.b.denominator
            ) * mp.sqrt(self.d)

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt({self.d})"
        return f"{self.a} + {self.b}*sqrt({self.d})"


def _coerce(value) -> QuadReal:
    if isinstance(value, QuadReal):
        return value
    return QuadReal.rational(value)


# cos(t*pi) and sin(t*pi) for the angle denominators the builtin arcs use;
# None for angles outside the table (callers fall back to numeric checks).
_COS_TABLE = {
    Fraction(0): QuadReal.rational(1),
    Fraction(1, 6): QuadReal.root(3, Fraction(1, 2)),
    Fraction(1, 4): QuadReal.root(2, Fraction(1, 2)),
    Fraction(1, 3): QuadReal.rational(Fraction(1, 2)),
    Fraction(1, 2): QuadReal.rational(0),
    Fraction(2, 3): QuadReal.rational(Fraction(-1, 2)),
    Fraction(3, 4): QuadReal.root(2, Fraction(-1, 2)),
    Fraction(5, 6): QuadReal.root(3, Fraction(-1, 2)),
    Fraction(1): QuadReal.rational(-1),
}


def exact_cos_pi(t: Fraction):
    """cos(t*pi) as a QuadReal for table angles, else None."""
    t = Fraction(t) % 2
    if t > 1:
        t = 2 - t
    return _COS_TABLE.get(t)


def exact_sin_pi(t: Fraction):
    """sin(t*pi) as a QuadReal for table angles, else None."""
    return exact_cos_pi(Fraction(1, 2) - Fraction(t))
