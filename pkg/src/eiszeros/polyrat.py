"""Dense univariate polynomials over exact rationals.

Coefficients are ascending (index = exponent).  Everything here is exact:
Euclidean gcd, Yun square-free decomposition, Sturm chains and bisection
refinement.  Root *counting* throughout the package runs on these
routines; floating point only ever locates roots, never counts them.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Poly = tuple[Fraction, ...]


def poly(coeffs: Sequence) -> Poly:
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


def degree(p: Poly) -> int:
    return len(p) - 1  # zero polynomial has degree -1


def is_zero(p: Poly) -> bool:
    return not p


def add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return poly([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def neg(p: Poly) -> Poly:
    return tuple(-c for c in p)


def sub(p: Poly, q: Poly) -> Poly:
    return add(p, neg(q))


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] += a * b
    return poly(out)


def scale(p: Poly, c) -> Poly:
    c = Fraction(c)
    if c == 0:
        return ()
    return tuple(a * c for a in p)


def monic(p: Poly) -> Poly:
    if not p:
        return ()
    return scale(p, 1 / p[-1])


def divmod_exact(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    """Quotient and remainder over the rationals."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    qd, qlc = degree(q), q[-1]
    out = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    while len(r) - 1 >= qd and any(c != 0 for c in r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < qd:
            break
        shift = len(r) - 1 - qd
        factor = r[-1] / qlc
        out[shift] = factor
        for i in range(len(q)):
            r[shift + i] -= factor * q[i]
        r.pop()
    return poly(out), poly(r)


def derivative(p: Poly) -> Poly:
    return poly([i * p[i] for i in range(1, len(p))])


def evaluate(p: Poly, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _primitive_int(p: Poly) -> tuple[int, ...]:
    """Scale by a positive rational to primitive integer coefficients."""
    if not p:
        return ()
    from math import gcd as igcd, lcm

    denom = 1
    for c in p:
        denom = lcm(denom, c.denominator)
    ints = [int(c * denom) for c in p]
    content = 0
    for c in ints:
        content = igcd(content, abs(c))
    return tuple(c // content for c in ints)


def _prem_positive(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Pseudo-remainder of a by b scaled only by positive constants, so the
    sign of the true remainder is preserved at every evaluation point."""
    r = list(a)
    db = len(b) - 1
    lcb = b[-1]
    scale = abs(lcb)
    sign = 1 if lcb > 0 else -1
    while len(r) - 1 >= db and any(r):
        while r and r[-1] == 0:
            r.pop()
        if len(r) - 1 < db:
            break
        shift = len(r) - 1 - db
        lead = r[-1]
        r = [c * scale for c in r]
        for i in range(db + 1):
            r[shift + i] -= sign * lead * b[i]
        r.pop()
    while r and r[-1] == 0:
        r.pop()
    if not r:
        return ()
    from math import gcd as igcd

    content = 0
    for c in r:
        content = igcd(content, abs(c))
    return tuple(c // content for c in r)


def gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd via a primitive pseudo-remainder sequence over the integers
    (content stripping keeps coefficient growth polynomial)."""
    a, b = _primitive_int(p), _primitive_int(q)
    while b:
        a, b = b, _prem_positive(a, b)
    return monic(poly(a))


def squarefree_part(p: Poly) -> Poly:
    if degree(p) < 1:
        return monic(p)
    g = gcd(p, derivative(p))
    if degree(g) == 0:
        return monic(p)
    quotient, rem = divmod_exact(p, g)
    assert is_zero(rem)
    return monic(quotient)


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: p = prod f_i^i with the f_i squarefree and coprime.

    Returns [(f_i, i)] for the nonconstant f_i only.
    """
    if degree(p) < 1:
        return []
    p = monic(p)
    dp = derivative(p)
    a = gcd(p, dp)
    b, rem = divmod_exact(p, a)
    assert is_zero(rem)
    c, rem = divmod_exact(dp, a)
    assert is_zero(rem)
    d = sub(c, derivative(b))
    out: list[tuple[Poly, int]] = []
    i = 1
    while degree(b) > 0:
        f = gcd(b, d)
        if degree(f) > 0:
            out.append((monic(f), i))
        b, rem = divmod_exact(b, f)
        assert is_zero(rem)
        c, rem = divmod_exact(d, f)
        assert is_zero(rem)
        d = sub(c, derivative(b))
        i += 1
    return out


# ---------------------------------------------------------------------------
# Sturm chains
# ---------------------------------------------------------------------------

def sturm_chain(p: Poly) -> list[tuple]:
    """Generalized Sturm chain of (p, p') with primitive integer members.

    Each member is the signed pseudo-remainder stripped of its positive
    content; positive rescaling preserves the sign-variation counts.  p
    should be squarefree for exact distinct-root counts (we always pass
    the squarefree part)."""
    first = _primitive_int(poly(p))
    second = _primitive_int(derivative(poly(p)))
    chain = [first, second]
    while chain[-1] and len(chain[-1]) - 1 > 0:
        r = _prem_positive(chain[-2], chain[-1])
        if not r:
            break
        chain.append(tuple(-c for c in r))
    return [c for c in chain if c]


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def sign_variations_at(chain: list[Poly], x) -> int:
    signs = [_sign(evaluate(p, Fraction(x))) for p in chain]
    return _variations(signs)


def sign_variations_at_inf(chain: list[Poly], positive: bool) -> int:
    signs = []
    for p in chain:
        s = _sign(p[-1])
        if not positive and degree(p) % 2 == 1:
            s = -s
        signs.append(s)
    return _variations(signs)


def _variations(signs: list[int]) -> int:
    nz = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(nz, nz[1:]) if a * b < 0)


def count_real_roots(chain: list[Poly], lo=None, hi=None) -> int:
    """Distinct real roots in (lo, hi]; None endpoints mean -/+ infinity."""
    va = sign_variations_at_inf(chain, False) if lo is None else sign_variations_at(chain, lo)
    vb = sign_variations_at_inf(chain, True) if hi is None else sign_variations_at(chain, hi)
    return va - vb


def cauchy_root_bound(p: Poly) -> Fraction:
    """Every root has absolute value below 1 + max |a_i / a_n|."""
    if degree(p) < 1:
        return Fraction(1)
    lc = abs(p[-1])
    m = max((abs(c) for c in p[:-1]), default=Fraction(0))
    return 1 + m / lc


def isolate_real_roots(p: Poly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint open-closed intervals (a, b] each containing exactly one
    distinct real root of the squarefree part of p."""
    f = squarefree_part(p)
    if degree(f) < 1:
        return []
    chain = sturm_chain(f)
    bound = cauchy_root_bound(f)
    total = count_real_roots(chain, -bound, bound)
    out: list[tuple[Fraction, Fraction]] = []

    def split(a: Fraction, b: Fraction, n: int):
        if n == 0:
            return
        if n == 1:
            out.append((a, b))
            return
        mid = (a + b) / 2
        nl = count_real_roots(chain, a, mid)
        split(a, mid, nl)
        split(mid, b, n - nl)

    split(-bound, bound, total)
    return sorted(out)


def refine_root(p: Poly, interval: tuple[Fraction, Fraction], width: Fraction) -> tuple[Fraction, Fraction]:
    """Shrink an isolating (a, b] of the squarefree polynomial p by sign
    bisection until b - a <= width."""
    a, b = interval
    fa = evaluate(p, a)
    fb = evaluate(p, b)
    if fb == 0:
        return (b, b)
    if fa == 0:
        # root exactly at the open endpoint cannot happen for an isolating
        # interval of p itself; nudge inward
        a = (a + b) / 2
        fa = evaluate(p, a)
        if fa == 0:
            return (a, a)
    assert fa * fb < 0, "interval endpoints must straddle the root"
    while b - a > width:
        mid = (a + b) / 2
        fm = evaluate(p, mid)
        if fm == 0:
            return (mid, mid)
        if fa * fm < 0:
            b = mid
        else:
            a, fa = mid, fm
    return (a, b)
