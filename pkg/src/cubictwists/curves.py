"""The Mordell curves E_{d,n}: y^2 = x^3 + d n^2.

Reduction types, Tamagawa numbers and conductor exponents come from Tate's
algorithm (run on the short model, which may pass through general
Weierstrass models along the way).  For p >= 5 the answer is cross-checked
against the closed-form table for j = 0, keyed by v_p(D) mod 6.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numba
import numpy as np
import sympy

__all__ = [
    "BadReduction", "InternalDisagreement", "MordellCurve", "LocalData",
    "local_data", "tate", "sixth_power_free", "conductor", "good_reduction_at_2",
    "ap_trace", "two_descent_local_size", "torsion_two", "rational_point_search",
    "RationalPoint", "curve_report",
]


class BadReduction(ValueError):
    pass


class InternalDisagreement(AssertionError):
    """Tate's algorithm and the j = 0 table disagree."""


def _vp(n: int, p: int) -> int:
    if n == 0:
        return 10 ** 9
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def sixth_power_free(D: int) -> tuple:
    """(Dmin, u) with D = u^6 Dmin and Dmin sixth-power free."""
    if D == 0:
        raise ValueError("D must be nonzero")
    u = 1
    Dmin = D
    for p, e in sympy.factorint(abs(D)).items():
        k = e // 6
        if k:
            Dmin //= p ** (6 * k)
            u *= p ** k
    return Dmin, u


@dataclass(frozen=True)
class MordellCurve:
    d: int
    n: int

    @property
    def D(self) -> int:
        return self.d * self.n * self.n

    @property
    def Dmin(self) -> int:
        return sixth_power_free(self.D)[0]

    @property
    def unscale(self) -> int:
        return sixth_power_free(self.D)[1]

    def bad_primes(self) -> list:
        return sorted(set(sympy.primefactors(6 * self.Dmin)))

    def local_data(self, p: int) -> "LocalData":
        return local_data(self.Dmin, p)

    def conductor(self) -> int:
        return conductor(self.Dmin)


@dataclass(frozen=True)
class LocalData:
    p: int
    kodaira: str
    cp: int
    fp: int

    def as_dict(self) -> dict:
        return {"p": self.p, "kodaira": self.kodaira, "cp": self.cp, "fp": self.fp}


# -- Tate's algorithm ---------------------------------------------------------

def _binv(a):
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return b2, b4, b6, b8, c4, c6, disc


def _rst(a, r, s, t):
    """x = x' + r, y = y' + s x' + t."""
    a1, a2, a3, a4, a6 = a
    return (a1 + 2 * s,
            a2 - s * a1 + 3 * r - s * s,
            a3 + r * a1 + 2 * t,
            a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1)


def _polmod(coeffs, p):
    """Strip leading zeros of a polynomial (descending) mod p."""
    c = [x % p for x in coeffs]
    while c and c[0] == 0:
        c = c[1:]
    return c


def _pmulmod(f, g, m, p):
    """(f * g) mod (m, p); polynomials descending, m monic."""
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, x in enumerate(f):
        for j, y in enumerate(g):
            out[i + j] = (out[i + j] + x * y) % p
    return _prem(out, m, p)


def _prem(f, m, p):
    f = _polmod(f, p)
    dm = len(m) - 1
    while len(f) - 1 >= dm and f:
        lead = f[0]
        for i in range(len(m)):
            f[i] = (f[i] - lead * m[i]) % p
        f = _polmod(f, p)
    return f


def _pgcd(f, g, p):
    f, g = _polmod(f, p), _polmod(g, p)
    while g:
        inv = pow(g[0], -1, p)
        g = [x * inv % p for x in g]
        f, g = g, _prem(f, g, p)
    return f


def _nroots(coeffs, p) -> int:
    """Number of distinct roots in F_p of a polynomial (descending coefficients)."""
    f = _polmod(coeffs, p)
    if len(f) <= 1:
        return 0
    if p < 1000:
        return sum(1 for x in range(p) if _horner(f, x, p) == 0)
    inv = pow(f[0], -1, p)
    m = [x * inv % p for x in f]
    # x^p mod m by square-and-multiply
    result, base, e = [1], _prem([1, 0], m, p), p
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    xp_minus_x = list(result)
    # subtract x
    while len(xp_minus_x) < 2:
        xp_minus_x.insert(0, 0)
    xp_minus_x[-2] = (xp_minus_x[-2] - 1) % p
    g = _pgcd(m, xp_minus_x, p)
    return len(g) - 1


def _horner(f, x, p):
    acc = 0
    for c in f:
        acc = (acc * x + c) % p
    return acc


def _a_root(coeffs, p):
    f = _polmod(coeffs, p)
    for x in range(p):
        if _horner(f, x, p) == 0:
            return x
    raise ArithmeticError("no root mod p")


def _quad_has_roots(a, b, c, p) -> bool:
    """a X^2 + b X + c has a root mod p (a != 0 mod p)."""
    if p == 2:
        return any((a * x * x + b * x + c) % 2 == 0 for x in (0, 1))
    disc = (b * b - 4 * a * c) % p
    return disc == 0 or pow(disc, (p - 1) // 2, p) == 1


def tate(a, p: int) -> tuple:
    """Tate's algorithm for an integral Weierstrass model (a1, a2, a3, a4, a6).

    Returns (kodaira, f_p, c_p, minimal model)."""
    a = tuple(int(x) for x in a)
    while True:
        b2, b4, b6, b8, c4, c6, disc = _binv(a)
        n = _vp(disc, p)
        if n == 0:
            return "I0", 0, 1, a
        # move the singular point to (0, 0): p | a3, a4, a6
        if p == 2:
            if b2 % 2 == 0:
                r = a[3] % 2
                t = (r * (1 + a[1] + a[3]) + a[4]) % 2
            else:
                r = a[2] % 2
                t = (r + a[3]) % 2
        elif p == 3:
            r = (-b6) % 3 if b2 % 3 == 0 else (-b2 * b4) % 3
            t = (a[0] * r + a[2]) % 3
        else:
            if c4 % p == 0:
                r = (-pow(12, -1, p) * b2) % p
            else:
                r = (-pow(12 * c4, -1, p) * (c6 + b2 * c4)) % p
            t = (-pow(2, -1, p) * (a[0] * r + a[2])) % p
        a = _rst(a, r, 0, t)
        a1, a2, a3, a4, a6 = a
        b2, b4, b6, b8, c4, c6, disc = _binv(a)
        if c4 % p:
            # multiplicative
            if _quad_has_roots(1, a1, -a2, p):
                cp = n
            else:
                cp = 1 if n % 2 else 2
            return f"I{n}", 1, cp, a
        if _vp(a6, p) < 2:
            return "II", n, 1, a
        if _vp(b8, p) < 3:
            return "III", n - 1, 2, a
        if _vp(b6, p) < 3:
            cp = 3 if _quad_has_roots(1, a3 // p, -(a6 // p ** 2), p) else 1
            return "IV", n - 2, cp, a
        # p | a1, a2; p^2 | a3, a4; p^3 | a6
        if p == 2:
            s = a2 % 2
            t = 2 * ((a6 // 4) % 2)
        else:
            # (p + 1) / 2 inverts 2 mod p; unreduced, a1 and a3 pick up a factor p
            half = (p + 1) // 2
            s = -a1 * half
            t = -a3 * half
        a = _rst(a, 0, s, t)
        a1, a2, a3, a4, a6 = a
        b, c, d = a2 // p, a4 // p ** 2, a6 // p ** 3
        w = 27 * d * d - b * b * c * c + 4 * b ** 3 * d - 18 * b * c * d + 4 * c ** 3
        x = 3 * c - b * b
        if w % p:
            cp = 1 + _nroots([1, b, c, d], p)
            return "I0*", n - 4, cp, a
        if x % p:
            # double root: move it to 0
            if p == 2:
                r = c % 2
            elif p == 3:
                r = (b * c) % 3
            else:
                r = ((b * c - 9 * d) * pow(2 * x, -1, p)) % p
            a = _rst(a, p * r, 0, 0)
            ix, iy, mx, my = 3, 3, p * p, p * p
            while True:
                a1, a2, a3, a4, a6 = a
                xa2, xa3, xa4, xa6 = a2 // p, a3 // my, a4 // (p * mx), a6 // (mx * my)
                if (xa3 * xa3 + 4 * xa6) % p:
                    cp = 4 if _quad_has_roots(1, xa3, -xa6, p) else 2
                    break
                t = my * (xa6 % 2 if p == 2 else (-xa3 * pow(2, -1, p)) % p)
                a = _rst(a, 0, 0, t)
                my *= p
                iy += 1
                a1, a2, a3, a4, a6 = a
                xa2, xa3, xa4, xa6 = a2 // p, a3 // my, a4 // (p * mx), a6 // (mx * my)
                if (xa4 * xa4 - 4 * xa2 * xa6) % p:
                    cp = 4 if _quad_has_roots(xa2, xa4, xa6, p) else 2
                    break
                if p == 2:
                    r = mx * ((xa6 * xa2) % 2)
                else:
                    r = mx * ((-xa4 * pow(2 * xa2, -1, p)) % p)
                a = _rst(a, r, 0, 0)
                mx *= p
                ix += 1
            m = ix + iy - 5
            return f"I{m}*", n - m - 4, cp, a
        # triple root: move it to 0
        rp = (-d) % 3 if p == 3 else (-b * pow(3, -1, p)) % p if p != 2 else _a_root([1, b, c, d], 2)
        a = _rst(a, p * rp, 0, 0)
        a1, a2, a3, a4, a6 = a
        x3, x6 = a3 // p ** 2, a6 // p ** 4
        if (x3 * x3 + 4 * x6) % p:
            cp = 3 if _quad_has_roots(1, x3, -x6, p) else 1
            return "IV*", n - 6, cp, a
        t = p * p * (x6 % 2 if p == 2 else (-x3 * pow(2, -1, p)) % p)
        a = _rst(a, 0, 0, t)
        a1, a2, a3, a4, a6 = a
        if _vp(a4, p) < 4:
            return "III*", n - 7, 2, a
        if _vp(a6, p) < 6:
            return "II*", n - 8, 1, a
        # not minimal: scale by p
        a = (a1 // p, a2 // p ** 2, a3 // p ** 3, a4 // p ** 4, a6 // p ** 6)


def _table(D: int, p: int) -> tuple:
    """j = 0 reduction for p >= 5 on a model with v_p(D) <= 5."""
    v = _vp(D, p)
    if v >= 6:
        raise ValueError("model not minimal")
    u = D // p ** v
    qr = pow(u % p, (p - 1) // 2, p) == 1
    if v == 0:
        return "I0", 0, 1
    if v == 1:
        return "II", 2, 1
    if v == 2:
        return "IV", 2, 3 if qr else 1
    if v == 3:
        return "I0*", 2, 1 + _nroots([1, 0, 0, u], p)
    if v == 4:
        return "IV*", 2, 3 if qr else 1
    return "II*", 2, 1


@lru_cache(maxsize=200000)
def local_data(D: int, p: int) -> LocalData:
    """Local reduction data of y^2 = x^3 + D at p."""
    if D == 0:
        raise ValueError("D must be nonzero")
    kod, fp, cp, _ = tate((0, 0, 0, 0, D), p)
    if p >= 5:
        Dm = sixth_power_free(D)[0] if _vp(D, p) >= 6 else D
        if _vp(Dm, p) >= 6:
            Dm = Dm // p ** (6 * (_vp(Dm, p) // 6))
        if _table(Dm, p) != (kod, fp, cp):
            raise InternalDisagreement(f"D={D} p={p}: Tate {kod, fp, cp} vs table {_table(Dm, p)}")
    return LocalData(p, kod, cp, fp)


def conductor(D: int) -> int:
    N = 1
    for p in sympy.primefactors(6 * D):
        N *= p ** local_data(D, p).fp
    return N


def good_reduction_at_2(d: int, n: int) -> bool:
    """Good reduction at 2 of E_{d,n}: the sixth-power-free model has
    D = 16 D'^2 mod 64 for some odd D', i.e. D = 16 mod 64."""
    Dmin = sixth_power_free(d * n * n)[0]
    return Dmin % 64 == 16


# -- Frobenius traces -------------------------------------------------------------

@numba.njit(cache=True)
def _char_sum(p, D):
    """sum over x in F_p of the Legendre symbol of x^3 + D."""
    sq = np.zeros(p, np.bool_)
    for x in range(1, (p + 1) // 2):
        sq[x * x % p] = True
    s = 0
    for x in range(p):
        v = (x * x % p * x + D) % p
        if v != 0:
            s += 1 if sq[v] else -1
    return s


_AP_CACHE = {}


def ap_trace(D: int, p: int) -> int:
    """a_p = p + 1 - #E(F_p) for y^2 = x^3 + D, by direct point count.

    a_p(D u^6) = a_p(D), so counts are cached per class of D in
    F_p^* / F_p^*6, read off from D^((p-1)/g) with g = gcd(6, p - 1)."""
    if p in (2, 3) or D % p == 0:
        raise BadReduction(f"{p} divides 6D")
    g = math.gcd(6, p - 1)
    key = (p, pow(D % p, (p - 1) // g, p))
    a = _AP_CACHE.get(key)
    if a is None:
        a = -int(_char_sum(p, D % p))
        if p % 3 == 2 and a != 0:
            raise AssertionError(f"CM check failed: a_{p} = {a} for p = 2 mod 3")
        _AP_CACHE[key] = a
    return a


def two_descent_local_size(D: int, p: int) -> int:
    """#E(Q_p) / 2E(Q_p) = #E[2](Q_p) = 1 + #{roots of x^3 + D mod p}."""
    if p <= 3 or D % p == 0:
        raise BadReduction(f"need p > 3 and p not dividing D (p={p})")
    return 1 + _nroots([1, 0, 0, D], p)


def _icbrt(n: int) -> Optional[int]:
    if n < 0:
        r = _icbrt(-n)
        return -r if r is not None else None
    r = int(round(n ** (1 / 3))) if n else 0
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** 3 == n:
            return c
    # fall back on exact integer root for large n
    c, exact = sympy.integer_nthroot(n, 3)
    return int(c) if exact else None


def torsion_two(D: int) -> int:
    """#E[2](Q) = 1 + #{integer cube roots of -D}."""
    if D == 0:
        raise ValueError("D must be nonzero")
    return 1 + (_icbrt(-D) is not None)


# -- point search -------------------------------------------------------------------

@dataclass(frozen=True)
class RationalPoint:
    model: str           # "weierstrass" or "cubic" (u^3 + v^3 = n)
    coords: tuple        # Fractions on that model
    weierstrass: Optional[tuple]   # image on y^2 = x^3 + d n^2 (None = point at infinity)


def _cubic_to_weierstrass(u, v, n):
    # u^3 + v^3 = n  ->  y^2 = x^3 - 432 n^2
    if u + v == 0:
        return None
    return (Fraction(12 * n) / (u + v), Fraction(36 * n) * (u - v) / (u + v))


def _is_torsion(pt, D: int) -> bool:
    """Torsion points of y^2 = x^3 + D: y = 0; x = 0 (D a square);
    (2 u^2, +-3 u^3) when D = u^6; (12 u^2, +-36 u^3) when D = -432 u^6."""
    x, y = pt
    if y == 0 or x == 0:
        return True
    for scale, tx, ty in ((1, 2, 3), (-432, 12, 36)):
        if D % scale == 0 and D // scale > 0:
            r = D // scale
            s = math.isqrt(r)
            u = _icbrt(s) if s * s == r else None
            if u is not None and x == tx * u * u and abs(y) == ty * abs(u) ** 3:
                return True
    return False


def rational_point_search(d: int, n: int, height_bound: int) -> Optional[RationalPoint]:
    """First non-torsion point found on E_{d,n} with small height.

    Weierstrass search: x = a / c^2, y = b / c^3 with |a|, |b| <= H and
    c <= H^(1/6).  For d = -432 the plane cubic u^3 + v^3 = n is searched
    too, with denominators <= H and |u|, |v| <= H.  Torsion points are
    skipped."""
    D = d * n * n
    H = int(height_bound)
    cmax = max(1, int(round(H ** (1 / 6))))
    while (cmax + 1) ** 6 <= H:
        cmax += 1
    while cmax > 1 and cmax ** 6 > H:
        cmax -= 1
    for c in range(1, cmax + 1):
        for a in range(-H, H + 1):
            rhs = a ** 3 + D * c ** 6
            if rhs <= 0:
                continue
            b = math.isqrt(rhs)
            if b * b == rhs and 0 < b <= H and math.gcd(a, c) == 1:
                pt = (Fraction(a, c * c), Fraction(b, c ** 3))
                if not _is_torsion(pt, D):
                    return RationalPoint("weierstrass", pt, pt)
    if d == -432:
        for q in range(1, H + 1):
            nq3 = n * q ** 3
            for s in sorted(range(-H * q, H * q + 1), key=abs):
                t = _icbrt(nq3 - s ** 3)
                if t is None or abs(t) > H * q:
                    continue
                if math.gcd(math.gcd(s, t), q) != 1:
                    continue
                u, v = Fraction(s, q), Fraction(t, q)
                w = _cubic_to_weierstrass(u, v, n)
                if w is None or _is_torsion(w, D):
                    continue
                return RationalPoint("cubic", (u, v), w)
    return None


def curve_report(d: int, n: int) -> dict:
    E = MordellCurve(d, n)
    bad = [local_data(E.Dmin, p).as_dict() for p in E.bad_primes()]
    bad = [b for b in bad if b["fp"] > 0]
    return {"d": d, "n": n, "Dmin": E.Dmin, "conductor": E.conductor(), "bad_primes": bad}


def dumps_curve_report(d: int, n: int) -> str:
    return json.dumps(curve_report(d, n))
