"""Root numbers of the cubic twists E_{d,n}: y^2 = x^3 + d n^2.

w_{d,n} = g_d(class(n)) f_d(n), where f_d is the multiplicative function

    f_d(p^k) = 1 for p | 6d,  f_d(p^k) = f_d(p^(k-3)),  f_d(p) = f_d(p^2) = chi_{-3}(p)

and class(n) = ((n / 3^v3(n))^2 mod 9, (v_p(n) mod 3)_{p | 6d}).  The finite
table g_d is calibrated against an analytic oracle: the sign w in
theta(1/t) = w t^2 theta(t), theta(t) = sum a_n exp(-2 pi n t / sqrt(N)).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import sympy

from .curves import ap_trace, conductor, sixth_power_free, tate

__all__ = [
    "Inconclusive", "ClassInconsistent", "NotCalibrated", "CoverageGap",
    "f_d", "chi_m3", "root_class", "analytic_root_number", "OracleResult",
    "RootNumberTable", "calibrate_g_d", "root_number", "root_numbers_upto",
    "equidist_sum", "squarefree_ap_count", "level_set_decomposition",
    "register_table", "get_table",
]


class Inconclusive(RuntimeError):
    pass


class ClassInconsistent(RuntimeError):
    pass


class NotCalibrated(LookupError):
    pass


class CoverageGap(RuntimeError):
    pass


def chi_m3(p: int) -> int:
    r = p % 3
    return 0 if r == 0 else (1 if r == 1 else -1)


def _bad_set(d: int) -> tuple:
    return tuple(sorted(sympy.primefactors(6 * d)))


def f_d(d: int, n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    bad = set(_bad_set(d))
    out = 1
    for p, k in sympy.factorint(n).items():
        if p in bad or k % 3 == 0:
            continue
        out *= chi_m3(p)
    return out


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def root_class(d: int, n: int) -> tuple:
    """((n / 3^v3)^2 mod 9, (v_p(n) mod 3 for p | 6d in increasing order))."""
    n = abs(n)
    m = n // 3 ** _vp(n, 3)
    return (m * m % 9, tuple(_vp(n, p) % 3 for p in _bad_set(d)))


# -- analytic oracle ------------------------------------------------------------

def _a2_good(a) -> int:
    """a_2 of a Weierstrass model with good reduction at 2."""
    a1, a2, a3, a4, a6 = a
    cnt = 1
    for x in (0, 1):
        for y in (0, 1):
            if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                cnt += 1
    return 3 - cnt


def _coefficients(D: int, N: int, M: int) -> np.ndarray:
    """a_1 .. a_M (index 0 unused) of y^2 = x^3 + D."""
    a = np.zeros(M + 1, dtype=np.float64)
    a[1] = 1.0
    ap = {}
    for p in sympy.primerange(2, M + 1):
        p = int(p)
        if N % p == 0:
            ap[p] = 0
        elif p == 2:
            ap[p] = _a2_good(tate((0, 0, 0, 0, D), 2)[3])
        else:
            ap[p] = ap_trace(D, p)
    # multiplicative sieve via smallest prime factor
    spf = np.zeros(M + 1, dtype=np.int64)
    for p in ap:
        sl = spf[p::p]
        sl[sl == 0] = p
    for n in range(2, M + 1):
        p = int(spf[n])
        m, k = n, 0
        while m % p == 0:
            m //= p
            k += 1
        pk = n // m
        if m > 1:
            a[n] = a[pk] * a[m]
            continue
        # prime power p^k
        if k == 1:
            a[n] = ap[p]
        elif N % p == 0:
            a[n] = ap[p] * a[n // p]
        else:
            a[n] = ap[p] * a[n // p] - p * a[n // (p * p)]
    return a


@dataclass
class OracleResult:
    w: int
    residual_plus: float
    residual_minus: float
    conductor: int
    terms: int


_T_POINTS = (1.1, 1.2, 1.35)


def analytic_root_number(D: int, tol: float = 1e-3, sep: float = 1e-1,
                         max_terms: int = 10 ** 6, detail: bool = False):
    """Sign of the functional equation of y^2 = x^3 + D.

    theta(t) = sum a_n exp(-2 pi n t / sqrt N) satisfies
    theta(1/t) = w t^2 theta(t).  The residual of each hypothesis is the
    worst normalized defect over a few t; the winner must be below `tol`
    and the loser above `sep`."""
    Dmin = sixth_power_free(D)[0]
    N = conductor(Dmin)
    sq = math.sqrt(N)
    tmax = max(_T_POINTS)
    # tail below exp(-30) relative at the smallest exponent 2 pi / (tmax sqrt N)
    M = int(math.ceil(30 * tmax * sq / (2 * math.pi))) + 10
    if M > max_terms:
        raise Inconclusive(f"conductor {N} needs {M} terms")
    a = _coefficients(Dmin, N, M)
    n = np.arange(M + 1, dtype=np.float64)
    res = {1: 0.0, -1: 0.0}
    for t in _T_POINTS:
        th_t = float(np.dot(a, np.exp(-2 * np.pi * n * t / sq)))
        th_inv = float(np.dot(a, np.exp(-2 * np.pi * n / (t * sq))))
        scale = abs(th_inv) + t * t * abs(th_t)
        for w in (1, -1):
            res[w] = max(res[w], abs(th_inv - w * t * t * th_t) / scale)
    good = [w for w in (1, -1) if res[w] < tol]
    if len(good) != 1 or res[-good[0]] < sep:
        raise Inconclusive(f"residuals {res} for D = {D}")
    out = OracleResult(good[0], res[1], res[-1], N, M)
    return out if detail else out.w


# -- calibrated table ---------------------------------------------------------------

@dataclass
class RootNumberTable:
    d: int
    entries: dict = field(default_factory=dict)      # class -> +-1
    witnesses: dict = field(default_factory=dict)    # class -> [(n, w)]

    def __len__(self):
        return len(self.entries)

    def lookup(self, n: int) -> int:
        cls = root_class(self.d, n)
        if cls not in self.entries:
            raise NotCalibrated(f"class {cls} of n = {n} missing for d = {self.d}")
        return self.entries[cls]

    def to_json(self) -> str:
        return json.dumps({
            "d": self.d,
            "primes": list(_bad_set(self.d)),
            "entries": [{"a": c[0], "exponents": list(c[1]), "g": g,
                         "witnesses": [list(x) for x in self.witnesses.get(c, [])]}
                        for c, g in sorted(self.entries.items())],
        }, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "RootNumberTable":
        obj = json.loads(text)
        tab = cls(obj["d"])
        for e in obj["entries"]:
            c = (e["a"], tuple(e["exponents"]))
            tab.entries[c] = e["g"]
            tab.witnesses[c] = [tuple(x) for x in e["witnesses"]]
        return tab


def _all_classes(d: int) -> list:
    k = len(_bad_set(d))
    import itertools
    return [(a, e) for a in (1, 4, 7) for e in itertools.product(range(3), repeat=k)]


def calibrate_g_d(d: int, witnesses: int = 4, search_limit: int = 20000,
                  max_terms: int = 400000) -> RootNumberTable:
    """g_d(class) = w / f_d(n) from the oracle, on the smallest representatives.

    The residues (n / 3^v3)^2 mod 9 only take the values 1, 4, 7, so there
    are 3^(1 + omega(6d)) classes.  Each class gets `witnesses` oracle
    evaluations, all of which must agree."""
    tab = RootNumberTable(d)
    want = set(_all_classes(d))
    got = {c: [] for c in want}
    for n in range(1, search_limit + 1):
        cls = root_class(d, n)
        if len(got[cls]) >= witnesses:
            continue
        try:
            w = analytic_root_number(d * n * n, max_terms=max_terms)
        except Inconclusive:
            continue
        got[cls].append((n, w * f_d(d, n)))
        if all(len(v) >= witnesses for v in got.values()):
            break
    for cls, ws in got.items():
        if not ws:
            raise ClassInconsistent(f"no representative found for class {cls}")
        vals = {g for _, g in ws}
        if len(vals) != 1:
            raise ClassInconsistent(f"class {cls} for d = {d}: witnesses {ws}")
        tab.entries[cls] = vals.pop()
        tab.witnesses[cls] = ws
    return tab


_TABLES = {}


def register_table(table: RootNumberTable):
    _TABLES[table.d] = table


def get_table(d: int) -> RootNumberTable:
    if d not in _TABLES:
        raise NotCalibrated(f"no root-number table for d = {d}")
    return _TABLES[d]


def root_number(d: int, n: int, table: Optional[RootNumberTable] = None) -> int:
    """w_{d,n} = g_d(class(n)) f_d(|n|); depends on |n| only."""
    if n == 0:
        raise ValueError("n must be nonzero")
    table = table or get_table(d)
    n = abs(n)
    return table.lookup(n) * f_d(d, n)


def root_numbers_upto(d: int, X: int, table: Optional[RootNumberTable] = None) -> np.ndarray:
    """Array w[n] = w_{d,n} for 1 <= n <= X (w[0] = 0), computed by sieving."""
    table = table or get_table(d)
    bad = _bad_set(d)
    f = np.ones(X + 1, dtype=np.int8)
    f[0] = 0
    for p in sympy.primerange(2, X + 1):
        p = int(p)
        if p in bad:
            continue
        c = chi_m3(p)
        pk, k = p, 1
        while pk <= X:
            if k % 3:
                # v_p(n) = k exactly: multiply by chi when k is 1 or 2 mod 3;
                # handled by flipping on multiples of p^k not of p^(k+1)
                idx = np.arange(pk, X + 1, pk)
                idx = idx[(idx // pk) % p != 0]
                f[idx] *= c
            pk *= p
            k += 1
    n = np.arange(X + 1, dtype=np.int64)
    v = {p: np.zeros(X + 1, dtype=np.int64) for p in bad}
    for p in bad:
        pk = p
        while pk <= X:
            v[p][pk::pk] += 1
            pk *= p
    m = n // (3 ** v[3]) if 3 in v else n
    a = (m % 9) ** 2 % 9
    g = np.zeros(X + 1, dtype=np.int8)
    for (ac, ex), val in table.entries.items():
        mask = a == ac
        for p, e in zip(bad, ex):
            mask &= (v[p] % 3) == e
        g[mask] = val
    out = (g * f).astype(np.int8)
    out[0] = 0
    return out


def equidist_sum(d: int, m: int, r: int, X: int, table: Optional[RootNumberTable] = None) -> int:
    """sum of w_{d,n} over 1 <= n <= X with n = r mod m."""
    w = root_numbers_upto(d, X, table)
    idx = np.arange(r % m, X + 1, m)
    idx = idx[idx >= 1]
    return int(w[idx].astype(np.int64).sum())


def squarefree_ap_count(x: int, y: int, X: int) -> tuple:
    """(#{squarefree n <= X : n = x mod y}, main term)

    main term = 6/pi^2 * X/y * prod_{p | (x, y), p^2 not | y} (1 - 1/p)
                * prod_{p | y} (1 - 1/p^2)^-1, and 0 when (x, y) is not squarefree."""
    if y < 1 or not 0 <= x < y:
        raise ValueError("need y >= 1 and 0 <= x < y")
    g = math.gcd(x, y)
    if any(e > 1 for e in sympy.factorint(g).values()):
        return 0, 0.0
    sf = np.ones(X + 1, dtype=bool)
    sf[0] = False
    for p in sympy.primerange(2, math.isqrt(X) + 1):
        sf[p * p::p * p] = False
    idx = np.arange(x, X + 1, y)
    count = int(sf[idx].sum())
    main = 6 / math.pi ** 2 * X / y
    for p in sympy.primefactors(g):
        if y % (p * p):
            main *= 1 - 1 / p
    for p in sympy.primefactors(y):
        main /= 1 - 1 / p ** 2
    return count, main


def _split(d: int, n: int) -> tuple:
    """n = s nu t: s | (6d)^infinity, nu squarefull and t squarefree, both prime to 6d."""
    bad = set(_bad_set(d))
    s = nu = t = 1
    for p, k in sympy.factorint(n).items():
        if p in bad:
            s *= p ** k
        elif k >= 2:
            nu *= p ** k
        else:
            t *= p
    return s, nu, t


def level_set_decomposition(d: int, X: int, gamma: int = 1,
                            table: Optional[RootNumberTable] = None) -> dict:
    """Cells (s, nu, a = t^2 mod 9) of {n <= X : w_{d,n} = gamma}.

    Returns {cell: {"eps": eps, "count": k}} where w = eps f_d(t) on the
    cell.  Raises CoverageGap if a member fails to land in a consistent cell."""
    table = table or get_table(d)
    cells = {}
    total = 0
    for n in range(1, X + 1):
        w = root_number(d, n, table)
        if w != gamma:
            continue
        s, nu, t = _split(d, n)
        if s * nu * t != n:
            raise CoverageGap(f"{n} did not factor into a cell")
        cell = (s, nu, t * t % 9)
        eps = w * f_d(d, t)
        entry = cells.setdefault(cell, {"eps": eps, "count": 0})
        if entry["eps"] != eps:
            raise CoverageGap(f"cell {cell} has both signs (n = {n})")
        entry["count"] += 1
        total += 1
    return cells
