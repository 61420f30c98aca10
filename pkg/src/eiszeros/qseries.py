"""Truncated Laurent series in q_h = exp(2*pi*i*z/h) over exact rationals.

A QSeries stores the coefficients of exponents v..T-1 exactly; T is the
first unknown exponent and every arithmetic operation propagates it so a
coefficient is never reported beyond what the inputs determine.  This is
the carrier type for every modular object in the package: Eisenstein
series, eta quotients, hauptmoduls, echelon basis elements.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import mpmath as mp

from .errors import (
    DivisionByZeroSeries,
    EmptyTruncation,
    ImaginaryPartTooSmall,
    InvalidEtaSpec,
    WeightTooSmall,
    WidthMismatch,
)

# The Rational of the domain model: stdlib Fraction already guarantees
# lowest terms, positive denominator and arbitrary precision.
Rational = Fraction

DEFAULT_Q_CAP = 0.9


class QSeries:
    """Exact truncated Laurent series sum_{n=v}^{T-1} c_n q_h^n.

    Invariants: len(coeffs) == truncation - valuation; the leading stored
    coefficient is nonzero unless the series is (known to be) zero, in
    which case coeffs is empty and valuation == truncation.
    """

    __slots__ = ("width", "valuation", "coeffs", "truncation")

    def __init__(self, width: int, valuation: int, coeffs: Iterable, truncation: int | None = None):
        if width < 1:
            raise ValueError("width must be a positive integer")
        cs = [Fraction(c) for c in coeffs]
        if truncation is None:
            truncation = valuation + len(cs)
        if len(cs) != truncation - valuation:
            raise ValueError("coefficient count must equal truncation - valuation")
        while cs and cs[0] == 0:
            cs.pop(0)
            valuation += 1
        if not cs:
            valuation = truncation
        object_setattr = object.__setattr__
        object_setattr(self, "width", int(width))
        object_setattr(self, "valuation", int(valuation))
        object_setattr(self, "coeffs", tuple(cs))
        object_setattr(self, "truncation", int(truncation))

    def __setattr__(self, name, value):  # immutable after construction
        raise AttributeError("QSeries is immutable")

    # --- constructors ---

    @classmethod
    def zero(cls, width: int = 1, truncation: int = 0) -> "QSeries":
        return cls(width, truncation, [], truncation)

    @classmethod
    def constant(cls, value, width: int = 1, truncation: int = 16) -> "QSeries":
        if truncation < 1:
            raise EmptyTruncation("constant needs truncation >= 1")
        return cls(width, 0, [Fraction(value)] + [Fraction(0)] * (truncation - 1), truncation)

    @classmethod
    def monomial(cls, coefficient, exponent: int, width: int = 1, truncation: int | None = None) -> "QSeries":
        if truncation is None:
            truncation = exponent + 16
        if truncation <= exponent:
            raise EmptyTruncation("monomial exponent at or beyond truncation")
        pad = [Fraction(0)] * (truncation - exponent - 1)
        return cls(width, exponent, [Fraction(coefficient)] + pad, truncation)

    # --- inspection ---

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def window(self) -> int:
        """Number of known unit-part coefficients (T - v)."""
        return self.truncation - self.valuation

    def coefficient(self, n: int) -> Fraction:
        """Coefficient of q^n; raises beyond the truncation."""
        if n >= self.truncation:
            raise ValueError(f"coefficient q^{n} is beyond truncation {self.truncation}")
        if n < self.valuation:
            return Fraction(0)
        return self.coeffs[n - self.valuation]

    def leading_coefficient(self) -> Fraction:
        if self.is_zero:
            raise DivisionByZeroSeries("zero series has no leading coefficient")
        return self.coeffs[0]

    def items(self):
        """(exponent, coefficient) pairs over the stored window."""
        return ((self.valuation + i, c) for i, c in enumerate(self.coeffs))

    def matches(self, other: "QSeries") -> bool:
        """Coefficient-wise equality on the common known window."""
        if self.width != other.width:
            return False
        lo = min(self.valuation, other.valuation)
        hi = min(self.truncation, other.truncation)
        return all(self.coefficient(n) == other.coefficient(n) for n in range(lo, hi))

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self.width, self.valuation, self.coeffs, self.truncation) == (
            other.width,
            other.valuation,
            other.coeffs,
            other.truncation,
        )

    def __hash__(self):
        return hash((self.width, self.valuation, self.coeffs, self.truncation))

    def __repr__(self):
        terms = []
        for n, c in list(self.items())[:6]:
            if c == 0:
                continue
            terms.append(f"{c}*q^{n}" if n else f"{c}")
        body = " + ".join(terms) if terms else "0"
        return f"QSeries({body} + O(q^{self.truncation}), width={self.width})"

    # --- arithmetic ---

    def _check_width(self, other: "QSeries"):
        if self.width != other.width:
            raise WidthMismatch(f"width {self.width} vs {other.width}")

    def slice_to(self, truncation: int) -> "QSeries":
        """Narrow to a smaller truncation (never widens knowledge)."""
        if truncation > self.truncation:
            raise ValueError("cannot extend truncation")
        if truncation <= self.valuation:
            if truncation < self.valuation and not self.is_zero:
                raise EmptyTruncation("slice removes every known coefficient")
            return QSeries.zero(self.width, truncation)
        return QSeries(self.width, self.valuation, self.coeffs[: truncation - self.valuation], truncation)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries.constant(other, self.width, max(self.truncation, 1))
        self._check_width(other)
        t = min(self.truncation, other.truncation)
        v = min(self.valuation if not self.is_zero else t, other.valuation if not other.is_zero else t)
        if t <= v and not (self.is_zero and other.is_zero):
            if t < min(self.valuation, other.valuation):
                raise EmptyTruncation("sum has no known coefficients")
        v = min(v, t)
        cs = [self.coefficient(n) + other.coefficient(n) for n in range(v, t)]
        return QSeries(self.width, v, cs, t)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return QSeries(self.width, self.valuation, [-c for c in self.coeffs], self.truncation)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QSeries.constant(other, self.width, max(self.truncation, 1))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = Fraction(c)
        if c == 0:
            return QSeries.zero(self.width, self.truncation)
        return QSeries(self.width, self.valuation, [c * a for a in self.coeffs], self.truncation)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check_width(other)
        t = min(self.truncation + other.valuation, other.truncation + self.valuation)
        v = self.valuation + other.valuation
        if self.is_zero or other.is_zero:
            return QSeries.zero(self.width, t)
        if t <= v:
            raise EmptyTruncation("product has no known coefficients")
        n = t - v
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * n
        for i, ai in enumerate(a):
            if i >= n:
                break
            if ai == 0:
                continue
            jmax = min(len(b), n - i)
            for j in range(jmax):
                bj = b[j]
                if bj:
                    out[i + j] += ai * bj
        return QSeries(self.width, v, out, t)

    def __rmul__(self, other):
        return self.scale(other)

    def inverse(self) -> "QSeries":
        """Multiplicative inverse; window (T - v) is preserved."""
        if self.is_zero:
            raise DivisionByZeroSeries("cannot invert the zero series")
        n = self.window
        a = self.coeffs
        lead = a[0]
        b = [Fraction(0)] * n
        b[0] = 1 / lead
        for k in range(1, n):
            s = Fraction(0)
            for i in range(1, min(k, len(a) - 1) + 1):
                if a[i]:
                    s += a[i] * b[k - i]
            b[k] = -s / lead
        v = -self.valuation
        return QSeries(self.width, v, b, v + n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1, 1) / Fraction(other))
        self._check_width(other)
        if other.is_zero:
            raise DivisionByZeroSeries("division by zero series")
        return self * other.inverse()

    def __pow__(self, m: int) -> "QSeries":
        if not isinstance(m, int):
            raise TypeError("series powers must be integers")
        if m < 0:
            return self.inverse() ** (-m)
        if m == 0:
            if self.is_zero:
                return QSeries.constant(1, self.width, max(self.truncation, 1))
            return QSeries.constant(1, self.width, self.window)
        result = None
        base = self
        e = m
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result


def series_arith(f: QSeries, g: QSeries, op: str, exponent: int | None = None) -> QSeries:
    """Dispatch helper mirroring the operation contract: add/sub/mul/div/pow."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    if op == "pow":
        if exponent is None:
            raise ValueError("pow requires an exponent")
        return f ** exponent
    raise ValueError(f"unknown op {op!r}")


def q_derivative(f: QSeries) -> QSeries:
    """q * d/dq: coefficient c_n becomes n*c_n; truncation preserved."""
    cs = [n * c for n, c in f.items()]
    return QSeries(f.width, f.valuation, cs, f.truncation)


def rescale(f: QSeries, n: int) -> QSeries:
    """Oldform substitution q -> q^n for width-1 series (f(z) -> f(Nz))."""
    if f.width != 1:
        raise WidthMismatch("rescale requires a width-1 series")
    if n < 1:
        raise ValueError("rescale factor must be a positive integer")
    if n == 1:
        return f
    t = n * f.truncation
    if f.is_zero:
        return QSeries.zero(1, t)
    v = n * f.valuation
    cs = [Fraction(0)] * (t - v)
    for m, c in f.items():
        cs[n * m - v] = c
    return QSeries(1, v, cs, t)


# --- Bernoulli numbers ---

_bernoulli_cache: dict[int, Fraction] = {0: Fraction(1)}
_bernoulli_lock = threading.Lock()


def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2, the convention giving E_4 the q-coefficient +240.

    Computed (and memoized) through the recurrence
    sum_{j=0}^{n} C(n+1, j) B_j = 0.
    """
    if n < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    with _bernoulli_lock:
        if n in _bernoulli_cache:
            return _bernoulli_cache[n]
        top = max(_bernoulli_cache) + 1
        for m in range(top, n + 1):
            s = sum(comb(m + 1, j) * _bernoulli_cache[j] for j in range(m))
            _bernoulli_cache[m] = -s / (m + 1)
        return _bernoulli_cache[n]


# --- divisor sums and Eisenstein series ---

def sigma_table(power: int, truncation: int) -> list[Fraction]:
    """sigma_power(n) for 0 <= n < truncation (index 0 unused, set to 0)."""
    s = [0] * max(truncation, 1)
    for d in range(1, truncation):
        dp = d ** power
        for m in range(d, truncation, d):
            s[m] += dp
    return [Fraction(x) for x in s]


def eisenstein_level1(k: int, truncation: int) -> QSeries:
    """Level-1 Eisenstein series of weight 2k >= 4, constant term 1.

    1 - (4k/B_{2k}) sum_{n>=1} sigma_{2k-1}(n) q^n.
    """
    if k < 2:
        raise WeightTooSmall("weight 2 is quasi-modular at level 1; use weight >= 4")
    return _eisenstein_any_weight(k, truncation)


def eisenstein_weight2(truncation: int) -> QSeries:
    """The quasi-modular E_2 = 1 - 24 sum sigma_1(n) q^n (internal building block)."""
    return _eisenstein_any_weight(1, truncation)


def _eisenstein_any_weight(k: int, truncation: int) -> QSeries:
    if truncation < 1:
        raise EmptyTruncation("truncation must be >= 1")
    factor = -Fraction(4 * k) / bernoulli(2 * k)
    sig = sigma_table(2 * k - 1, truncation)
    cs = [Fraction(1)] + [factor * sig[n] for n in range(1, truncation)]
    return QSeries(1, 0, cs, truncation)


# --- eta quotients ---

@dataclass(frozen=True)
class EtaQuotientSpec:
    """Product over (scale delta, exponent r) of eta(delta*z)^r."""

    factors: tuple[tuple[int, int], ...]

    def __init__(self, factors: Sequence[Sequence[int]]):
        fs = tuple((int(d), int(r)) for d, r in factors)
        for d, _ in fs:
            if d < 1:
                raise InvalidEtaSpec("eta scales must be positive integers")
        object.__setattr__(self, "factors", fs)

    @property
    def leading_exponent_numerator(self) -> int:
        return sum(d * r for d, r in self.factors)

    def validate(self):
        if self.leading_exponent_numerator % 24 != 0:
            raise InvalidEtaSpec(
                f"sum(delta*r) = {self.leading_exponent_numerator} is not divisible by 24"
            )


def _euler_product(scale: int, window: int) -> QSeries:
    """prod_{n>=1} (1 - q^{scale*n}) via the pentagonal-number expansion."""
    cs = [Fraction(0)] * window
    if window > 0:
        cs[0] = Fraction(1)
    k = 1
    while True:
        g1 = scale * k * (3 * k - 1) // 2
        g2 = scale * k * (3 * k + 1) // 2
        if g1 >= window and g2 >= window:
            break
        sign = Fraction(-1 if k % 2 else 1)
        if g1 < window:
            cs[g1] = sign
        if g2 < window:
            cs[g2] = sign
        k += 1
    return QSeries(1, 0, cs, window)


def eta_quotient(spec: EtaQuotientSpec | Sequence[Sequence[int]], truncation: int) -> QSeries:
    """Expansion of prod eta(delta*z)^{r_delta}, exact through q^{truncation-1}."""
    if not isinstance(spec, EtaQuotientSpec):
        spec = EtaQuotientSpec(spec)
    spec.validate()
    lead = spec.leading_exponent_numerator // 24
    window = truncation - lead
    if window <= 0:
        raise EmptyTruncation("truncation at or below the leading eta exponent")
    unit = QSeries.constant(1, 1, window)
    for d, r in spec.factors:
        if r == 0:
            continue
        unit = unit * (_euler_product(d, window) ** r)
    cs = list(unit.coeffs)
    # reattach the q^{lead} prefactor
    pad = unit.valuation  # zero leading coefficients stripped by canonicalization
    return QSeries(1, lead + pad, cs, lead + window)


# --- numeric evaluation ---

def eval_series(
    f: QSeries,
    z,
    precision: int = 256,
    *,
    q_cap: float = DEFAULT_Q_CAP,
    growth_exponent: int = 0,
):
    """Evaluate the stored part of f at z in the upper half-plane.

    Returns (value, tail_bound) where tail_bound = C * |q|^T / (1 - |q|)
    with C the maximum of |c_n| * (n+1)^growth_exponent over the last ten
    stored coefficients -- a heuristic envelope; cross-truncation agreement
    is the authoritative accuracy check.
    """
    if precision < 53:
        raise ValueError("precision below 53 bits is not supported")
    with mp.workprec(precision + 16):
        zz = mp.mpc(z)
        if mp.im(zz) <= 0:
            raise ImaginaryPartTooSmall("evaluation point must lie in the upper half-plane")
        q = mp.exp(2j * mp.pi * zz / f.width)
        absq = abs(q)
        if absq > q_cap:
            raise ImaginaryPartTooSmall(
                f"|q| = {mp.nstr(absq, 8)} exceeds the cap {q_cap}"
            )
        if f.is_zero:
            return mp.mpc(0), mp.mpf(0)
        # Horner over the stored window, then the valuation prefactor.
        acc = mp.mpc(0)
        for c in reversed(f.coeffs):
            acc = acc * q
            if c:
                acc += mp.mpf(c.numerator) / c.denominator
        value = acc * q ** f.valuation
        tail_window = list(f.items())[-10:]
        chat = mp.mpf(0)
        for n, c in tail_window:
            if c == 0:
                continue
            mag = abs(mp.mpf(c.numerator)) / c.denominator
            mag *= mp.mpf(max(n + 1, 1)) ** growth_exponent
            chat = max(chat, mag)
        tail = chat * absq ** f.truncation / (1 - absq)
        return value, tail
