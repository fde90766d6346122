"""Pairs of integral binary cubic forms: invariants, covariants, group action.

A pair v = (F1, F2) is stored as eight integers r1..r8 in the binomial basis

    F1 = r1 x^3 + 3 r2 x^2 y + 3 r3 x y^2 + r4 y^3
    F2 = r5 x^3 + 3 r6 x^2 y + 3 r7 x y^2 + r8 y^3

Everything here is exact integer arithmetic (Python ints).
"""
from __future__ import annotations

import math
import random
from functools import lru_cache
from math import gcd
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

__all__ = [
    "CubicPair", "BinaryQuartic", "GroupElement", "NonIntegralOutput",
    "a1_invariant", "jacobian_covariant", "reduced_covariant", "quartic_data",
    "resultant_quartic", "a3_invariant", "classical_invariants", "act",
    "is_reducible", "IDENTITY", "GENERATORS", "random_word", "KAPPA_G",
    "KAPPA_F",
]


class NonIntegralOutput(ArithmeticError):
    """An expression that must be integral was not (a convention bug)."""


class CubicPair(NamedTuple):
    r1: int
    r2: int
    r3: int
    r4: int
    r5: int
    r6: int
    r7: int
    r8: int

    @property
    def F1(self):
        return self[0:4]

    @property
    def F2(self):
        return self[4:8]

    def __str__(self):
        return " ".join(str(x) for x in self)

    @classmethod
    def parse(cls, line: str) -> "CubicPair":
        parts = line.split()
        if len(parts) != 8:
            raise ValueError(f"expected 8 integers, got {len(parts)}")
        return cls(*(int(p) for p in parts))


class BinaryQuartic(NamedTuple):
    """a w1^4 + b w1^3 w2 + c w1^2 w2^2 + d w1 w2^3 + e w2^4"""
    a: int
    b: int
    c: int
    d: int
    e: int

    def __call__(self, x, y=1):
        a, b, c, d, e = self
        return (((a * x + b * y) * x + c * y * y) * x + d * y ** 3) * x + e * y ** 4

    @property
    def I(self):
        a, b, c, d, e = self
        return 12 * a * e - 3 * b * d + c * c

    @property
    def J(self):
        a, b, c, d, e = self
        return (72 * a * c * e + 9 * b * c * d - 27 * a * d * d
                - 27 * e * b * b - 2 * c ** 3)

    @property
    def disc(self):
        return Fraction(4 * self.I ** 3 - self.J ** 2, 27)

    def content(self):
        from math import gcd
        g = 0
        for x in self:
            g = gcd(g, x)
        return g

    def compose(self, m):
        """f(x, y) -> f((x, y) m) for m = (p, q, r, s) = [[p, q], [r, s]].

        Same convention as the Sym^3 part of `act`, so covariants commute
        with the action.
        """
        p, q, r, s = m
        # expand sum c_j X^{4-j} Y^j with X = p x + r y, Y = q x + s y
        out = [0] * 5
        for j, cj in enumerate(self):
            if not cj:
                continue
            poly = [cj]
            for _ in range(4 - j):
                poly = _mul_lin(poly, p, r)
            for _ in range(j):
                poly = _mul_lin(poly, q, s)
            for k in range(5):
                out[k] += poly[k]
        return BinaryQuartic(*out)

    def __str__(self):
        return " ".join(str(x) for x in self)


def _mul_lin(poly, u, w):
    # multiply a form (coeff list in descending x-degree) by (u x + w y)
    out = [0] * (len(poly) + 1)
    for k, c in enumerate(poly):
        out[k] += c * u
        out[k + 1] += c * w
    return out


class GroupElement(NamedTuple):
    """(g1, g2) in SL2(Z)^2, each stored as (a, b, c, d) for [[a, b], [c, d]]."""
    g1: tuple
    g2: tuple

    def __mul__(self, other):
        return GroupElement(_mm(self.g1, other.g1), _mm(self.g2, other.g2))

    def inverse(self):
        return GroupElement(_minv(self.g1), _minv(self.g2))

    def canonical(self):
        # equality is up to the simultaneous sign (-g1, -g2)
        neg = GroupElement(tuple(-x for x in self.g1), tuple(-x for x in self.g2))
        return min(self, neg)

    def __eq__(self, other):
        return tuple.__eq__(self.canonical(), GroupElement(*other).canonical())

    def __hash__(self):
        return tuple.__hash__(self.canonical())


def _mm(x, y):
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _minv(x):
    a, b, c, d = x
    return (d, -b, -c, a)


_I2 = (1, 0, 0, 1)
_S = (0, -1, 1, 0)
_T = (1, 1, 0, 1)
IDENTITY = GroupElement(_I2, _I2)
GENERATORS = [
    GroupElement(_S, _I2), GroupElement(_T, _I2),
    GroupElement(_I2, _S), GroupElement(_I2, _T),
]
GENERATORS = GENERATORS + [g.inverse() for g in GENERATORS]


def random_word(length: int, rng: random.Random) -> GroupElement:
    g = IDENTITY
    for _ in range(length):
        g = g * rng.choice(GENERATORS)
    return g


# -- invariants ---------------------------------------------------------------

def a1_invariant(v) -> int:
    r1, r2, r3, r4, r5, r6, r7, r8 = v
    return r1 * r8 - 3 * r2 * r7 + 3 * r3 * r6 - r4 * r5


def _pluecker(v):
    r1, r2, r3, r4, r5, r6, r7, r8 = v
    return (r1 * r6 - r2 * r5, r1 * r7 - r3 * r5, r1 * r8 - r4 * r5,
            r2 * r7 - r3 * r6, r2 * r8 - r4 * r6, r3 * r8 - r4 * r7)


def reduced_covariant(v) -> BinaryQuartic:
    """G/9 where G is the Jacobian covariant; always integral.

    In Pluecker coordinates p_ij = F1_i F2_j - F1_j F2_i this is
    (p12, 2 p13, p14 + 3 p23, 2 p24, p34).
    """
    p12, p13, p14, p23, p24, p34 = _pluecker(v)
    return BinaryQuartic(p12, 2 * p13, p14 + 3 * p23, 2 * p24, p34)


def jacobian_covariant(v) -> BinaryQuartic:
    """dF1/dx dF2/dy - dF1/dy dF2/dx as a binary quartic in (x, y)."""
    return BinaryQuartic(*(9 * c for c in reduced_covariant(v)))


def quartic_data(f) -> tuple:
    """(I, J_std, disc) with disc = (4 I^3 - J^2) / 27."""
    f = BinaryQuartic(*f)
    return f.I, f.J, f.disc


# J_std(G(v1)) = 54 * KAPPA_G with v1 = (3xy^2, x^3 + y^3); pinned by tests.
KAPPA_G = -1458
# J_std(f) = KAPPA_F * A3^2 on the quadric A1 = 0, f the discriminant quartic.
KAPPA_F = -432


def a3_invariant(v) -> int:
    """A3 = (J(G)/KAPPA_G - A1^3) / 54, computed through G/9.

    With G = 9 G' we have J_std(G) = 729 J_std(G'), which gives
    A3 = -(J_std(G') + 2 A1^3) / 108.
    """
    num = reduced_covariant(v).J + 2 * a1_invariant(v) ** 3
    q, r = divmod(-num, 108)
    if r:
        raise NonIntegralOutput(f"A3 not integral on {tuple(v)}")
    return q


def classical_invariants(v) -> tuple:
    a1, a3 = a1_invariant(v), a3_invariant(v)
    return max(abs(a1) ** 12, abs(a3) ** 4), 16 * a3 ** 3 * (a1 ** 3 - 27 * a3)


def _cubic_disc(a, b, c, d):
    return b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d + 18 * a * b * c * d


def resultant_quartic(v) -> BinaryQuartic:
    """f(w1, w2) = Disc(w1 F1 - w2 F2), Disc being -1/27 of the classical one.

    The pencil w1 F1 - w2 F2 has monomial coefficients
    (w1 r1 - w2 r5, 3(w1 r2 - w2 r6), 3(w1 r3 - w2 r7), w1 r4 - w2 r8).
    We expand the classical discriminant as a quartic in (w1, w2) by
    evaluating at five points and interpolating.
    """
    r1, r2, r3, r4, r5, r6, r7, r8 = v
    # disc of A x^3 + 3B x^2 y + 3C x y^2 + D y^3 is -27 (A^2 D^2 - 6ABCD + 4AC^3 + 4B^3 D - 3B^2C^2)
    def q(A, B, C, D):
        return A * A * D * D - 6 * A * B * C * D + 4 * A * C ** 3 + 4 * B ** 3 * D - 3 * B * B * C * C
    # q is a quartic form in (w1, w2); get its coefficients from the linear forms
    lin = [(r1, -r5), (r2, -r6), (r3, -r7), (r4, -r8)]
    coeffs = _form_from_polynomial(q, lin)
    return BinaryQuartic(*coeffs)


def _form_from_polynomial(q, lin):
    # exact expansion of q(l1, l2, l3, l4) where each l_i = s_i w1 + t_i w2,
    # q homogeneous quartic; done with polynomials in w1 with w2 = 1 and
    # degree bookkeeping (coefficient lists, descending powers of w1)
    polys = [[s, t] for s, t in lin]

    def mul(p, r):
        out = [0] * (len(p) + len(r) - 1)
        for i, x in enumerate(p):
            if x:
                for j, y in enumerate(r):
                    out[i + j] += x * y
        return out

    def add(*ps):
        out = [0] * max(len(p) for p in ps)
        for p in ps:
            for i, x in enumerate(p):
                out[i] += x
        return out

    def scale(p, k):
        return [k * x for x in p]
    A, B, C, D = polys
    AD = mul(A, D)
    terms = add(
        mul(AD, AD),
        scale(mul(AD, mul(B, C)), -6),
        scale(mul(A, mul(C, mul(C, C))), 4),
        scale(mul(mul(B, mul(B, B)), D), 4),
        scale(mul(mul(B, B), mul(C, C)), -3),
    )
    return terms


def act(g, v) -> CubicPair:
    """Left action: g1 mixes (F1, F2), g2 substitutes (x, y) -> (x, y) g2."""
    g1, g2 = g
    a, b, c, d = g1
    F1, F2 = v[0:4], v[4:8]
    F1, F2 = _sym3(F1, g2), _sym3(F2, g2)
    G1 = tuple(a * x + b * y for x, y in zip(F1, F2))
    G2 = tuple(c * x + d * y for x, y in zip(F1, F2))
    return CubicPair(*G1, *G2)


def _sym3(F, m):
    """Cubic in binomial coordinates (r1, r2, r3, r4) composed with (x, y) m.

    F(x, y) = sum binom(3, j) r_{j+1} x^{3-j} y^j and the new variables are
    X = p x + r y, Y = q x + s y for m = [[p, q], [r, s]].
    """
    p, q, r, s = m
    r1, r2, r3, r4 = F
    # monomial coefficients of F(X, Y)
    c = [0, 0, 0, 0]
    for j, (w, rj) in enumerate(zip((1, 3, 3, 1), F)):
        if not rj:
            continue
        poly = [w * rj]
        for _ in range(3 - j):
            poly = _mul_lin(poly, p, r)
        for _ in range(j):
            poly = _mul_lin(poly, q, s)
        for k in range(4):
            c[k] += poly[k]
    # back to binomial coordinates; middle coefficients stay divisible by 3
    return (c[0], c[1] // 3, c[2] // 3, c[3])


# -- reducibility ---------------------------------------------------------------

@lru_cache(maxsize=4096)
def _divisors(n: int) -> tuple:
    import sympy
    return tuple(sympy.divisors(abs(n)))


def quartic_has_rational_root(f, real_roots=None) -> bool:
    """True iff the binary quartic f has a zero in P^1(Q).

    A root p/q in lowest terms has q | a.  Floating-point roots locate the
    candidates p near q * r; each candidate is checked exactly.  When f is
    not squarefree the roots are ill-conditioned and we fall back on the
    full rational-root test.  `real_roots` may pass precomputed approximate
    real roots of f (in x = w1/w2)."""
    a, b, c, d, e = f
    if a == 0 or e == 0:
        return True  # [1:0] or [0:1]
    if not any(f):
        return True
    g = BinaryQuartic(*f).content()
    f = BinaryQuartic(*(x // g for x in f))
    a, e = f[0], f[4]
    if f.disc != 0:
        if real_roots is None:
            roots = np.roots([float(x) for x in f])
            real_roots = [r.real for r in roots if abs(r.imag) <= 1e-6 * (1 + abs(r))]
        real = real_roots
        for q in _divisors(a):
            for r in real:
                p0 = math.floor(r * q)
                for p in (p0 - 1, p0, p0 + 1, p0 + 2):
                    if p and f(p, q) == 0:
                        return True
        return False
    for p in _divisors(e):
        for q in _divisors(a):
            if gcd(p, q) != 1:
                continue
            if f(p, q) == 0 or f(-p, q) == 0:
                return True
    return False


def is_reducible(v) -> bool:
    """Reducible iff Disc(w1 F1 - w2 F2) vanishes on P^1(Q) or has zero disc."""
    f = resultant_quartic(v)
    if not any(f):
        return True
    if f.disc == 0:
        return True
    return quartic_has_rational_root(f)


def read_pairs(lines: Iterable[str]):
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            yield CubicPair.parse(line)
