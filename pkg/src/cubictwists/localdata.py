"""Local computations on the quadric Y: A1 = 0.

  * p-adic densities of Y (exact point counts mod p^k, plus brute-force and
    sampled variants for arbitrary residue conditions),
  * the mod-p proportion of irreducible quartics,
  * real and p-adic solubility of z^2 = t f(w1, w2),
  * the archimedean volume and the Jacobian constant of the section map,
  * acceptable sets of integers defined by local conditions.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import mpmath as mp
import numba
import numpy as np
import sympy

from .forms_core import BinaryQuartic, a3_invariant

__all__ = [
    "LevelTooLarge", "DegeneratePencil", "PrecisionExhausted", "NotCalibrated",
    "InconsistentSamples", "SampledDensity", "LocalDensityReport",
    "padic_quadric_density", "quadric_count", "quadric_count_histogram",
    "quadric_count_bruteforce", "jacobian_samples", "dumps_reports",
    "irreducible_density_modp", "is_locally_soluble_R", "is_locally_soluble_Qp",
    "is_square_Qp", "has_root_Qp", "fundamental_domain_integral", "sl2_volume",
    "archimedean_volume", "jacobian_constant", "main_term_constant",
    "density_product", "selmer_local_mass", "uniformity_filter", "AcceptableSet",
    "density_report",
]


class LevelTooLarge(ValueError):
    pass


class DegeneratePencil(ValueError):
    pass


class PrecisionExhausted(RuntimeError):
    """The Hensel search ran past its precision bound (should not happen)."""


class NotCalibrated(RuntimeError):
    pass


class InconsistentSamples(RuntimeError):
    """Jacobian samples disagree: a measure-convention bug."""


# Exhaustive enumeration budget for densities with a residue condition: all
# of (Z/q)^8 is visited, so q <= 13 keeps it to ~10^9 cheap operations.
EXHAUSTIVE_MAX_MODULUS = 13


# -- quadric point counts ------------------------------------------------------

# A1 = r1 r8 - 3 r2 r7 + 3 r3 r6 - r4 r5 is a sum of four hyperbolic pairs.
_A1_COEFFS = (1, -3, 3, -1)


def _vp(n: int, p: int) -> int:
    if n == 0:
        return 10 ** 9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def quadric_count(p: int, k: int = 1) -> int:
    """#{v mod p^k : A1(v) = 0 mod p^k}, exactly.

    With e(x) = exp(2 pi i x / q), sum_{x, y mod q} e(t c x y) = q gcd(t c, q),
    so the count is q^-1 sum_t prod_i q gcd(t c_i, q); the sum over t is
    grouped by v_p(t)."""
    q = p ** k
    vc = [_vp(c, p) for c in _A1_COEFFS]
    total = 0
    for v in range(k + 1):
        # number of t mod q with v_p(t) = v
        num_t = 1 if v == k else p ** (k - v) - p ** (k - v - 1)
        prod = 1
        for w in vc:
            prod *= q * p ** min(k, v + w)
        total += num_t * prod
    assert total % q == 0
    return total // q


def quadric_count_histogram(q: int) -> int:
    """The same count by meet in the middle: the value distribution of
    c x y mod q for each hyperbolic pair, convolved.  Exact for any q; used
    for q = 3^k where the binomial coefficients make A1 degenerate mod 3."""
    hists = []
    x = np.arange(q, dtype=np.int64)
    prod = np.outer(x, x) % q
    for c in _A1_COEFFS:
        hists.append(np.bincount((c * prod).ravel() % q, minlength=q).astype(object))

    def conv(h1, h2):
        out = np.zeros(q, dtype=object)
        for i in range(q):
            if h1[i]:
                out += h1[i] * np.roll(h2, i)
        return out

    T = conv(conv(hists[0], hists[1]), conv(hists[2], hists[3]))
    return int(T[0])


@numba.njit(cache=True)
def _brute_count(p):
    # all of F_p^8; r8 is summed in closed form only through the inner loop
    cnt = 0
    for r1 in range(p):
        for r2 in range(p):
            for r3 in range(p):
                for r4 in range(p):
                    for r5 in range(p):
                        for r6 in range(p):
                            for r7 in range(p):
                                base = (-3 * r2 * r7 + 3 * r3 * r6 - r4 * r5) % p
                                for r8 in range(p):
                                    if (r1 * r8 + base) % p == 0:
                                        cnt += 1
    return cnt


def quadric_count_bruteforce(p: int) -> int:
    """#{v in F_p^8 : A1(v) = 0} by visiting every vector (oracle, p <= 13)."""
    if p > 13:
        raise LevelTooLarge(f"brute force over F_{p}^8 is too large")
    return int(_brute_count(p))


@dataclass(frozen=True)
class SampledDensity:
    """Monte Carlo estimate of a conditional density (not exact)."""
    value: float
    stderr: float
    samples: int
    exact: bool = False

    def __float__(self):
        return self.value


def _enumerate_Y(q: int):
    """Yield integer arrays (rows r1..r8) covering Y(Z/q) in slabs."""
    grid = np.indices((q,) * 5).reshape(5, -1).T.astype(np.int64)  # r4..r8
    for r1 in range(q):
        for r2 in range(q):
            for r3 in range(q):
                a1 = (r1 * grid[:, 4] - 3 * r2 * grid[:, 3] + 3 * r3 * grid[:, 2]
                      - grid[:, 0] * grid[:, 1]) % q
                rows = grid[a1 == 0]
                if len(rows):
                    head = np.broadcast_to(np.array([r1, r2, r3], np.int64), (len(rows), 3))
                    yield np.hstack([head, rows])


def padic_quadric_density(p: int, k: int = 1, condition: Optional[Callable] = None,
                          exhaustive: Optional[bool] = None, samples: int = 200000,
                          seed: int = 0):
    """p^{-7k} #{v mod p^k : A1(v) = 0 mod p^k, condition(v)}.

    Without a condition the value is exact for every (p, k).  A condition is
    a vectorized predicate on integer arrays of shape (N, 8) with entries in
    [0, p^k); it is evaluated exhaustively when p^k <= 13 and estimated by
    uniform sampling on Y(Z/p^k) otherwise (a SampledDensity is returned)."""
    if k < 1:
        raise ValueError("level must be >= 1")
    q = p ** k
    base = Fraction(quadric_count(p, k), q ** 7)
    if condition is None:
        return base
    if exhaustive is None:
        exhaustive = q <= EXHAUSTIVE_MAX_MODULUS
    if exhaustive:
        if q > EXHAUSTIVE_MAX_MODULUS:
            raise LevelTooLarge(f"exhaustive enumeration mod {q} exceeds the budget")
        hit = 0
        for rows in _enumerate_Y(q):
            hit += int(np.count_nonzero(condition(rows)))
        return Fraction(hit, q ** 7)
    rng = np.random.default_rng(seed)
    got = []
    need = samples
    while need > 0:
        batch = rng.integers(0, q, size=(min(max(4 * q * need, 1000), 2_000_000), 8), dtype=np.int64)
        a1 = (batch[:, 0] * batch[:, 7] - 3 * batch[:, 1] * batch[:, 6]
              + 3 * batch[:, 2] * batch[:, 5] - batch[:, 3] * batch[:, 4]) % q
        batch = batch[a1 == 0][:need]
        got.append(np.asarray(condition(batch), bool))
        need -= len(batch)
    mask = np.concatenate(got)
    frac = mask.mean()
    err = math.sqrt(max(frac * (1 - frac), 1e-300) / len(mask))
    return SampledDensity(float(base) * frac, float(base) * err, len(mask))


@lru_cache(maxsize=None)
def density_product(primes_upto: int = 100, level: int = 2) -> float:
    """prod_{p <= P} padic_quadric_density(p, level), the truncated singular series."""
    out = 1.0
    for p in sympy.primerange(2, primes_upto + 1):
        out *= float(padic_quadric_density(int(p), level))
    return out


# -- reducibility mod p -----------------------------------------------------------

@numba.njit(cache=True)
def _quartic_stats(r, p):
    """(discriminant nonzero, has an F_p root) for the covariant quartic of r."""
    p12 = r[0] * r[5] - r[1] * r[4]
    p13 = r[0] * r[6] - r[2] * r[4]
    p14 = r[0] * r[7] - r[3] * r[4]
    p23 = r[1] * r[6] - r[2] * r[5]
    p24 = r[1] * r[7] - r[3] * r[5]
    p34 = r[2] * r[7] - r[3] * r[6]
    a = p12 % p
    b = (2 * p13) % p
    c = (p14 + 3 * p23) % p
    d = (2 * p24) % p
    e = p34 % p
    # on Y, I(G') = 0 and disc(G') is a unit multiple of J(G')^2 for p > 3
    J = (72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c * c * c) % p
    if J == 0:
        return False, False
    if a == 0:
        return True, True
    for x in range(p):
        if ((((a * x + b) * x + c) * x + d) * x + e) % p == 0:
            return True, True
    return True, False


@numba.njit(cache=True)
def _irr_exhaustive(p):
    good = 0
    irr = 0
    r = np.zeros(8, np.int64)
    for r1 in range(p):
        for r2 in range(p):
            for r3 in range(p):
                for r4 in range(p):
                    for r5 in range(p):
                        for r6 in range(p):
                            for r7 in range(p):
                                rest = (3 * r2 * r7 - 3 * r3 * r6 + r4 * r5) % p
                                # r1 r8 = rest
                                if r1 == 0:
                                    if rest != 0:
                                        continue
                                    lo, hi = 0, p
                                else:
                                    inv = 1
                                    base, ex = r1, p - 2
                                    while ex:
                                        if ex & 1:
                                            inv = inv * base % p
                                        base = base * base % p
                                        ex >>= 1
                                    lo = rest * inv % p
                                    hi = lo + 1
                                for r8 in range(lo, hi):
                                    r[0] = r1; r[1] = r2; r[2] = r3; r[3] = r4
                                    r[4] = r5; r[5] = r6; r[6] = r7; r[7] = r8
                                    nz, root = _quartic_stats(r, p)
                                    if nz:
                                        good += 1
                                        if not root:
                                            irr += 1
    return good, irr


@numba.njit(cache=True)
def _irr_sampled(p, n, seed):
    # uniform on Y(F_p) by rejection from F_p^8
    np.random.seed(seed)
    good = 0
    irr = 0
    r = np.zeros(8, np.int64)
    while good < n:
        for i in range(8):
            r[i] = np.random.randint(0, p)
        if (r[0] * r[7] - 3 * r[1] * r[6] + 3 * r[2] * r[5] - r[3] * r[4]) % p != 0:
            continue
        nz, root = _quartic_stats(r, p)
        if nz:
            good += 1
            if not root:
                irr += 1
    return good, irr


def irreducible_density_modp(p: int, exhaustive: Optional[bool] = None,
                             samples: int = 10 ** 6, seed: int = 1):
    """Proportion of v in Y(F_p) with disc != 0 whose quartic G'(v) has no
    root in P^1(F_p).  Exact (a Fraction) for p <= 13 by default, otherwise
    estimated from `samples` points of Y(F_p) (a float)."""
    if p <= 3:
        raise ValueError("p must exceed 3")
    if exhaustive is None:
        exhaustive = p <= 13
    if exhaustive:
        good, irr = _irr_exhaustive(p)
        return Fraction(int(irr), int(good))
    good, irr = _irr_sampled(p, samples, seed)
    return irr / good


# -- real and p-adic solubility --------------------------------------------------

def _real_roots(coeffs) -> list:
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    if len(coeffs) <= 1:
        return []
    x = sympy.Symbol("x")
    return list(sympy.Poly([int(c) for c in coeffs], x).real_roots())


def is_locally_soluble_R(f, twist: int = 1) -> bool:
    """z^2 = twist f(w1, w2) has a real point: twist f is not negative definite."""
    f = BinaryQuartic(*f)
    if not any(f):
        raise DegeneratePencil("quartic is identically zero")
    if twist == 0:
        return True
    if f.a == 0 or _real_roots(list(f)):
        return True  # real root: a point with z = 0
    return twist * f.a > 0


def is_square_Qp(x, p: int) -> bool:
    """x a nonzero rational (or int) is a square in Q_p."""
    x = Fraction(x)
    if x == 0:
        return True
    num, den = x.numerator, x.denominator
    v = _vp(num, p) - _vp(den, p)
    if v % 2:
        return False
    u = Fraction(num // p ** _vp(num, p), den // p ** _vp(den, p))
    if p == 2:
        return (u.numerator * u.denominator) % 8 == 1
    un = (u.numerator * u.denominator) % p
    return pow(un, (p - 1) // 2, p) == 1


def _taylor(coeffs, x0, h):
    """Coefficients c_j (ascending) of g(x0 + h t) for g given descending."""
    n = len(coeffs) - 1
    # Horner-style shift to x0
    c = list(coeffs)
    shifted = [0] * (n + 1)
    work = c[:]
    for j in range(n + 1):
        # synthetic division: value of the j-th derivative / j! at x0
        acc = 0
        nxt = []
        for a in work:
            acc = acc * x0 + a
            nxt.append(acc)
        shifted[j] = nxt[-1]
        work = nxt[:-1]
    return [shifted[j] * h ** j for j in range(n + 1)]


def _ball_soluble(coeffs, p, x0, k, kmax):
    """Is there x in x0 + p^k Z_p with g(x) in Q_p^2 (zero allowed)?"""
    c = _taylor(coeffs, x0, p ** k)
    if c[0] == 0:
        return True
    v0 = _vp(c[0], p)
    # Hensel: v(g(x0)) > 2 v(g'(x0)) gives a root in Z_p
    dg = c[1] // p ** k if len(c) > 1 else 0
    if dg != 0 and v0 > 2 * _vp(dg, p):
        return True
    rest = min((_vp(cj, p) for cj in c[1:] if cj), default=10 ** 9)
    need = 3 if p == 2 else 1
    if rest - v0 >= need:
        # g = c0 (1 + O(p^need)) on the ball: a square iff c0 is
        return is_square_Qp(c[0], p)
    if k >= kmax:
        raise PrecisionExhausted(f"ball {x0} + {p}^{k} undecided")
    return any(_ball_soluble(coeffs, p, x0 + r * p ** k, k + 1, kmax) for r in range(p))


def is_locally_soluble_Qp(f, twist: int, p: int) -> bool:
    """z^2 = twist f(w1, w2) has a Q_p-point (weighted projective plane).

    Charts: f(x, 1) with x in Z_p and f(1, y) with y in p Z_p.  Balls are
    refined until either Hensel's lemma produces a root or the constant term
    dominates the Taylor expansion, in which case only its square class
    matters.  Refinement stops at v_p(disc) + 2 v_p(2) + 3."""
    f = BinaryQuartic(*f)
    if not any(f):
        raise DegeneratePencil("quartic is identically zero")
    F = BinaryQuartic(*(twist * c for c in f))
    disc = F.disc
    if disc == 0:
        raise ValueError("quartic has a repeated factor")
    kmax = _vp(disc.numerator, p) - _vp(disc.denominator, p) + 2 * _vp(2, p) + 3
    kmax = max(kmax, 1)
    down = list(F)                     # g(x) = F(x, 1)
    up = list(reversed(F))             # g(y) = F(1, y)
    if any(_ball_soluble(down, p, r, 1, kmax) for r in range(p)):
        return True
    return _ball_soluble(up, p, 0, 1, kmax)


def _ball_has_root(coeffs, p, x0, k):
    """Is there x in x0 + p^k Z_p with g(x) = 0?  (g squarefree)"""
    c = _taylor(coeffs, x0, p ** k)
    if c[0] == 0:
        return True
    v0 = _vp(c[0], p)
    dg = c[1] // p ** k
    if dg != 0 and v0 > 2 * _vp(dg, p):
        return True
    if min((_vp(cj, p) for cj in c[1:] if cj), default=10 ** 9) > v0:
        return False
    return any(_ball_has_root(coeffs, p, x0 + r * p ** k, k + 1) for r in range(p))


def has_root_Qp(f, p: int) -> bool:
    """Does the binary quartic f have a zero in P^1(Q_p)?  f must have nonzero discriminant."""
    f = BinaryQuartic(*f)
    if f.disc == 0:
        raise ValueError("quartic has a repeated factor")
    if f.a == 0:
        return True
    down = list(f)
    up = list(reversed(f))
    if any(_ball_has_root(down, p, r, 1) for r in range(p)):
        return True
    return _ball_has_root(up, p, 0, 1)


# -- archimedean volume ----------------------------------------------------------

def fundamental_domain_integral(nodes: int = 24) -> float:
    """int t^-2 du d^x t over |u| <= 1/2, u^2 + t^4 >= 1.

    With y = t^2 the integrand is du dy / (2 y^2).  The t-integral from
    (1 - u^2)^(1/4) to infinity is 1 / (2 sqrt(1 - u^2)); the u-integral is
    done by Gauss-Legendre quadrature with `nodes` points on each half."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    u = 0.25 * (x + 1)                     # [0, 1/2]
    inner = 1 / (2 * np.sqrt(1 - u * u))
    return float(2 * 0.25 * np.dot(w, inner))


def sl2_volume(nodes: int = 24) -> float:
    """Vol(SL2(Z) \\ SL2(R)) for dg = t^-2 du d^x t dtheta, theta in [0, 2 pi).

    -1 lies in SL2(Z) and in K, so the K-factor contributes pi."""
    return fundamental_domain_integral(nodes) * math.pi


def archimedean_volume(nodes: int = 24) -> float:
    """int_{G(Z) \\ Y(R), |A3| < 1} dy = |J| Vol^2 * 2.

    The last factor is the length of the A3-range (-1, 1)."""
    J = jacobian_constant()
    return float(J) * sl2_volume(nodes) ** 2 * 2


def _iwasawa(u, t, th):
    # n(u) a(t) k(theta) with n lower triangular, a = diag(1/t, t)
    c, s = mp.cos(th), mp.sin(th)
    return (c / t, -s / t, u * c / t + t * s, -u * s / t + t * c)


def _sym3_float(F, m):
    p, q, r, s = m
    a, b, c, d = F[0], 3 * F[1], 3 * F[2], F[3]
    # F((x, y) m) with X = p x + r y, Y = q x + s y
    X = (p, r)
    Y = (q, s)

    def mul(poly, lin):
        out = [0] * (len(poly) + 1)
        for i, co in enumerate(poly):
            out[i] += co * lin[0]
            out[i + 1] += co * lin[1]
        return out

    out = [0] * 4
    for j, cj in enumerate((a, b, c, d)):
        poly = [cj]
        for _ in range(3 - j):
            poly = mul(poly, X)
        for _ in range(j):
            poly = mul(poly, Y)
        for i in range(4):
            out[i] += poly[i]
    return [out[0], out[1] / 3, out[2] / 3, out[3]]


def _act_float(g1, g2, v):
    F1, F2 = _sym3_float(v[:4], g2), _sym3_float(v[4:], g2)
    a, b, c, d = g1
    return [a * x + b * y for x, y in zip(F1, F2)] + [c * x + d * y for x, y in zip(F1, F2)]


def _a3_float(v):
    r1, r2, r3, r4, r5, r6, r7, r8 = v
    p12, p13, p14 = r1 * r6 - r2 * r5, r1 * r7 - r3 * r5, r1 * r8 - r4 * r5
    p23, p24, p34 = r2 * r7 - r3 * r6, r2 * r8 - r4 * r6, r3 * r8 - r4 * r7
    a, b, c, d, e = p12, 2 * p13, p14 + 3 * p23, 2 * p24, p34
    J = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c ** 3
    A1 = r1 * r8 - 3 * r2 * r7 + 3 * r3 * r6 - r4 * r5
    return -(J + 2 * A1 ** 3) / 108


def _section_shift(A1, A3):
    # (3 x y^2 + ..., x^3 + A1 x^2 y + (A3 + (A1/3)^3) y^3)
    return [0, 0, 1, 0, 1, A1 / 3, 0, A3 + (A1 / 3) ** 3]


def _section_scaled(A1, A3):
    # scale v(A1 / A3^(1/3), 1) by A3^(1/6): A1 has degree 2, A3 degree 6
    lam = A3 ** (mp.mpf(1) / 6)
    return [lam * x for x in _section_shift(A1 / lam ** 2, 1)]


_SECTIONS = {"shift": _section_shift, "scaled": _section_scaled}


def _jacobian_sample(x, section):
    h = mp.mpf(10) ** (-(mp.mp.dps // 2))

    def phi(y):
        u1, t1, h1, u2, t2, h2, A1, A3 = y
        return _act_float(_iwasawa(u1, t1, h1), _iwasawa(u2, t2, h2), section(A1, A3))

    M = mp.matrix(8, 8)
    for i in range(8):
        xp, xm = list(x), list(x)
        xp[i] += h
        xm[i] -= h
        fp, fm = phi(xp), phi(xm)
        for j in range(8):
            M[j, i] = (fp[j] - fm[j]) / (2 * h)
    t1, t2 = x[1], x[4]
    haar = t1 ** -3 * t2 ** -3          # t^-2 du d^x t dtheta in (u, t, theta)
    return abs(mp.det(M)) / haar


_JAC_POINTS = (
    (0, 1, 0, 0, 1, 0, 0, 1),
    (0.3, 1.2, 0.7, -0.2, 0.9, 2.0, 0, 0.5),
    (0.1, 1.5, 1.1, 0.4, 1.1, 0.3, 0, 2),
    (0.2, 0.8, 0.1, 0.3, 1.3, 0.9, 0.5, 3),
)


def jacobian_samples(section: str = "shift", dps: int = 40) -> list:
    """|det d(g s(A1, A3))| / Haar density at several base points."""
    with mp.workdps(dps):
        sec = _SECTIONS[section]
        return [float(_jacobian_sample([mp.mpf(y) for y in pt], sec)) for pt in _JAC_POINTS]


@lru_cache(maxsize=None)
def jacobian_constant(section: str = "shift") -> Fraction:
    """|J| with dv = |J| dg dA1 dA3 (Haar measure as in `sl2_volume`).

    Finite differences at four base points, which must agree to 1e-6, then
    continued-fraction reconstruction with denominator at most 10^4."""
    vals = jacobian_samples(section)
    ref = vals[0]
    if any(abs(v - ref) > 1e-6 * abs(ref) for v in vals):
        raise InconsistentSamples(f"jacobian samples disagree: {vals}")
    frac = Fraction(ref).limit_denominator(10 ** 4)
    if abs(float(frac) - ref) > 1e-6 * abs(ref):
        raise InconsistentSamples(f"{ref} is not a small-denominator rational")
    return frac


def main_term_constant(primes_upto: int = 100, level: int = 2) -> float:
    """Predicted lim N_irr(X)/X: archimedean volume times the truncated
    product of local densities."""
    return archimedean_volume() * density_product(primes_upto, level)


# -- small local factors ----------------------------------------------------------

def selmer_local_mass(p) -> Fraction:
    """|2|_p^{-1}: 1 for odd p, 2 for p = 2, 1/2 at the real place."""
    if p in ("inf", "oo", math.inf) or (isinstance(p, float) and math.isinf(p)):
        return Fraction(1, 2)
    p = int(p)
    return Fraction(2) if p == 2 else Fraction(1)


def uniformity_filter(p: int) -> Callable:
    """Predicate for W_p = {p^2 | A3}; accepts an A3 value or a point v."""
    pp = p * p

    def pred(x) -> bool:
        a3 = x if isinstance(x, (int, np.integer)) else a3_invariant(x)
        return int(a3) % pp == 0

    pred.__name__ = f"W_{p}"
    return pred


# -- acceptable sets ---------------------------------------------------------------

@dataclass
class AcceptableSet:
    """Integers n cut out by local conditions.

    `conditions[p] = (k, residues)` allows n exactly when n mod p^k lies in
    `residues`.  Unlisted primes allow v_p(n) <= 1 when `default_v_le_1`
    is set (the usual choice) and impose nothing otherwise.

    Text form: "p^k:r1|r2,...,default:v<=1", e.g. "2^3:1|3|5|7,3:1|2,default:v<=1"."""
    conditions: dict = field(default_factory=dict)
    default_v_le_1: bool = True

    def __post_init__(self):
        for p, (k, res) in self.conditions.items():
            q = p ** k
            res = frozenset(r % q for r in res)
            if not res:
                raise ValueError(f"empty local condition at {p}")
            self.conditions[p] = (k, res)

    @classmethod
    def parse(cls, text: str) -> "AcceptableSet":
        conds = {}
        default = False
        for tok in (t.strip() for t in text.split(",")):
            if not tok:
                continue
            head, _, body = tok.partition(":")
            if head == "default":
                if body.replace(" ", "") == "v<=1":
                    default = True
                elif body == "all":
                    default = False
                else:
                    raise ValueError(f"unknown default {body!r}")
                continue
            p, _, k = head.partition("^")
            p, k = int(p), int(k or 1)
            if not sympy.isprime(p):
                raise ValueError(f"{p} is not prime")
            conds[p] = (k, [int(r) for r in body.split("|")])
        return cls(conds, default)

    def __str__(self):
        parts = []
        for p in sorted(self.conditions):
            k, res = self.conditions[p]
            head = f"{p}^{k}" if k > 1 else f"{p}"
            parts.append(head + ":" + "|".join(str(r) for r in sorted(res)))
        parts.append("default:v<=1" if self.default_v_le_1 else "default:all")
        return ",".join(parts)

    def local_ok(self, n: int, p: int) -> bool:
        if p in self.conditions:
            k, res = self.conditions[p]
            return n % p ** k in res
        return (not self.default_v_le_1) or n % (p * p) != 0

    def __contains__(self, n: int) -> bool:
        n = int(n)
        if n == 0:
            return False
        for p in self.conditions:
            if not self.local_ok(n, p):
                return False
        if self.default_v_le_1:
            for p, e in sympy.factorint(abs(n)).items():
                if p not in self.conditions and e > 1:
                    return False
        return True

    def local_density(self, p: int) -> Fraction:
        """Haar measure of Sigma_p inside Z_p."""
        if p in self.conditions:
            k, res = self.conditions[p]
            return Fraction(len(res), p ** k)
        return Fraction(p * p - 1, p * p) if self.default_v_le_1 else Fraction(1)


# -- reports -------------------------------------------------------------------------

@dataclass
class LocalDensityReport:
    place: object
    level: int
    condition: str
    density: object
    exact: bool

    def to_json(self) -> dict:
        if self.exact:
            d = Fraction(self.density)
            num, den = d.numerator, d.denominator
        else:
            d = Fraction(float(self.density)).limit_denominator(10 ** 12)
            num, den = d.numerator, d.denominator
        return {"place": str(self.place), "level": self.level, "condition": self.condition,
                "density_num": num, "density_den": den, "exact": self.exact}


def density_report(primes: Sequence, level: int = 1, condition: Optional[Callable] = None,
                   condition_desc: str = "none") -> list:
    """LocalDensityReport per prime (plus the archimedean place when
    "inf" is among `primes`)."""
    out = []
    for p in primes:
        if p in ("inf", "oo"):
            out.append(LocalDensityReport("inf", 0, "|A3|<1",
                                          archimedean_volume(), False))
            continue
        d = padic_quadric_density(int(p), level, condition)
        exact = isinstance(d, Fraction)
        out.append(LocalDensityReport(int(p), level, condition_desc, d, exact))
    return out


def dumps_reports(reports) -> str:
    return json.dumps([r.to_json() for r in reports], indent=1)
