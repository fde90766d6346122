"""G(Z)-orbits on the quadric Y: A1 = 0.

Strategy.  For v on Y the quartic covariant G'(v) = G(v)/9 is an integral
binary quartic with I(G') = 0 and J(G') = -108 A3(v), and v |-> G'(v) is
linear in the Pluecker vector P = F1 ^ F2.  An orbit of v is the same thing
as

  * an SL2(Z)-class of such quartics (the second factor acting), and
  * an oriented sublattice M of index m = content(P) inside the rank-2
    saturated lattice L = span(F1, F2) cap Z^4, up to the automorphisms of
    the quartic (the first factor only changes the basis of M).

So we enumerate reduced quartics (complex root in the standard fundamental
domain, found by a numba lattice scan) and lift each to its sigma(m) index-m
sublattices.  Canonical forms are exact: the reduced quartic is the
lexicographic minimum over the finitely many translates whose complex root
lies in the closed fundamental domain, the sublattice is stored by its
Hermite normal form, and automorphisms are quotiented by taking minima.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Callable, Iterator, Optional

import numba
import numpy as np

from .forms_core import (
    BinaryQuartic, CubicPair, GroupElement, GENERATORS, act,
    a1_invariant, a3_invariant, quartic_has_rational_root, reduced_covariant,
)

__all__ = [
    "NotOnQuadric", "ZeroInvariant", "envelope", "reduced_quartics",
    "canonical_quartic", "quartic_automorphisms", "lattice_basis",
    "sublattice_labels", "pair_from_label", "label_of", "reduce_to_canonical",
    "canonical_key", "equivalent", "Equivalence", "enumerate_quadric_points",
    "count_orbits", "OrbitInventory", "reducible_orbit_rep",
    "DEFAULT_BOX_CONSTANT",
]


class NotOnQuadric(ValueError):
    pass


class ZeroInvariant(ValueError):
    pass


DEFAULT_BOX_CONSTANT = 1.1
_TOL = 1e-9


# -- coefficient envelope ----------------------------------------------------
#
# Every real quartic with I = 0 and J = -108 n, two real roots and complex root
# u + i v, can be written s * h((x - u y)/sqrt(v), sqrt(v) y) with s = |n|^(1/3)
# and h a rotation of f0 = lam (x^2 + y^2)(x^2 - beta^2 y^2), J(f0) = -108.
# H_j = max over rotations of |h_j| bounds the coefficients.

@lru_cache(maxsize=None)
def envelope(samples: int = 200001) -> tuple:
    beta2 = 7 - 4 * math.sqrt(3)
    f0 = np.array([1.0, 0.0, 1 - beta2, 0.0, -beta2])
    I = 12 * f0[0] * f0[4] - 3 * f0[1] * f0[3] + f0[2] ** 2
    J = (72 * f0[0] * f0[2] * f0[4] + 9 * f0[1] * f0[2] * f0[3]
         - 27 * f0[0] * f0[3] ** 2 - 27 * f0[4] * f0[1] ** 2 - 2 * f0[2] ** 3)
    assert abs(I) < 1e-12
    f0 = f0 * np.cbrt(-108 / J)
    th = np.linspace(0.0, np.pi, samples)
    co, si = np.cos(th), np.sin(th)
    # f0(X, Y) with X = cos x - sin y, Y = sin x + cos y, expanded in (x, y)
    H = np.zeros((5, th.size))
    for j in range(5):
        if f0[j] == 0:
            continue
        # (co x - si y)^(4-j) (si x + co y)^j as coefficient arrays
        poly = np.zeros((5, th.size))
        poly[0] = 1.0
        deg = 0
        for _ in range(4 - j):
            new = np.zeros_like(poly)
            new[: deg + 1] += poly[: deg + 1] * co
            new[1: deg + 2] += poly[: deg + 1] * (-si)
            poly, deg = new, deg + 1
        for _ in range(j):
            new = np.zeros_like(poly)
            new[: deg + 1] += poly[: deg + 1] * si
            new[1: deg + 2] += poly[: deg + 1] * co
            poly, deg = new, deg + 1
        H += f0[j] * poly
    # small relative slack for the finite theta grid
    return tuple(float(x) for x in np.abs(H).max(axis=1) * (1 + 1e-6))


# -- numba scan ----------------------------------------------------------------

@numba.njit(cache=True)
def _upper_root4(a, b, c, d, e):
    """Root of a x^4 + ... + e with the largest imaginary part (Aberth)."""
    B, C, D, E = b / a, c / a, d / a, e / a
    R = 1.0 + max(max(abs(B), abs(C)), max(abs(D), abs(E))) ** 0.25
    z = np.empty(4, np.complex128)
    for k in range(4):
        ang = 0.4 + k * np.pi / 2
        z[k] = R * complex(np.cos(ang), np.sin(ang))
    ok = False
    for _ in range(80):
        big = 0.0
        for k in range(4):
            x = z[k]
            p = (((x + B) * x + C) * x + D) * x + E
            dp = ((4 * x + 3 * B) * x + 2 * C) * x + D
            if p == 0:
                continue
            ratio = p / dp
            s = 0j
            for j in range(4):
                if j != k:
                    s += 1.0 / (x - z[j])
            w = ratio / (1.0 - ratio * s)
            z[k] = x - w
            aw = abs(w) / (1.0 + abs(x))
            if aw > big:
                big = aw
        if big < 1e-12:
            ok = True
            break
    if not ok:
        M = np.zeros((4, 4), np.complex128)
        M[0, 0] = -B
        M[0, 1] = -C
        M[0, 2] = -D
        M[0, 3] = -E
        M[1, 0] = 1.0
        M[2, 1] = 1.0
        M[3, 2] = 1.0
        z = np.linalg.eigvals(M)
    best = z[0]
    for k in range(1, 4):
        if z[k].imag > best.imag:
            best = z[k]
    return best


@numba.njit(cache=True)
def _in_F(w, tol):
    return abs(w.real) <= 0.5 + tol and w.real * w.real + w.imag * w.imag >= 1.0 - tol


@numba.njit(cache=True)
def _scan_general(X, s, vlo, vhi, H, out, cnt):
    """Quartics (a, b, c, d, e), a != 0, b, d even, 6 | c, I = 0, 0 < |J| <= 108 X,
    emitted when the complex root lies in the (slightly enlarged) domain and
    the envelope allows v in [vlo, vhi]."""
    amax = int(s * H[0] / vlo ** 2)
    bmax = int(s * (H[1] / vlo + 2 * H[0] / vlo ** 2))
    cmax = int(s * (H[2] + 1.5 * H[1] / vlo + 1.5 * H[0] / vlo ** 2))
    emax = s * (H[4] * vhi ** 2 + 0.5 * H[3] * vhi + 0.25 * H[2]
                + 0.125 * H[1] / vlo + H[0] / 16 / vlo ** 2)
    Jmax = 108 * X
    for a in range(-amax, amax + 1):
        if a == 0:
            continue
        vh = min(vhi, math.sqrt(s * H[0] / abs(a)))
        if vh < vlo:
            continue
        dm = int(s * (H[3] * vh + H[2] + 0.75 * H[1] / vlo + 0.5 * H[0] / vlo ** 2))
        for b in range(-bmax - (bmax % 2), bmax + 1, 2):
            for c in range(-(cmax // 6) * 6, cmax + 1, 6):
                for d in range(-dm - (dm % 2), dm + 1, 2):
                    num = 3 * b * d - c * c
                    if num % (12 * a) != 0:
                        continue
                    e = num // (12 * a)
                    if abs(e) > emax:
                        continue
                    J = 72 * a * c * e + 9 * b * c * d - 27 * a * d * d - 27 * e * b * b - 2 * c * c * c
                    if J == 0 or abs(J) > Jmax:
                        continue
                    w = _upper_root4(float(a), float(b), float(c), float(d), float(e))
                    if not _in_F(w, 1e-7):
                        continue
                    if cnt < out.shape[0]:
                        out[cnt, 0] = a
                        out[cnt, 1] = b
                        out[cnt, 2] = c
                        out[cnt, 3] = d
                        out[cnt, 4] = e
                    cnt += 1
    return cnt


@numba.njit(cache=True)
def _cubic_upper_root(p, q, t):
    """Upper complex root of x^3 + p x^2 + q x + t, or 0j if all roots are real."""
    # depressed cubic y^3 + P y + Q with x = y - p/3
    P = q - p * p / 3
    Q = 2 * p * p * p / 27 - p * q / 3 + t
    disc = Q * Q / 4 + P * P * P / 27
    if disc <= 0:
        return 0j
    sq = math.sqrt(disc)
    y = np.cbrt(-Q / 2 + sq) + np.cbrt(-Q / 2 - sq)
    r = y - p / 3
    for _ in range(3):
        f = ((r + p) * r + q) * r + t
        df = (3 * r + 2 * p) * r + q
        if df == 0:
            break
        r -= f / df
    re = (-p - r) / 2
    if r != 0:
        m2 = -t / r
    else:
        # t = 0: the other roots solve x^2 + (p) x + q = 0
        m2 = q
    im2 = m2 - re * re
    if im2 <= 0:
        return 0j
    return complex(re, math.sqrt(im2))


@numba.njit(cache=True)
def _scan_a0(X, s, H, out, cnt):
    """The a = 0 stratum (root at infinity, always reducible).

    I = 0 forces d = c^2 / (3 b) and then J = c^3 - 27 e b^2."""
    vlo = math.sqrt(3.0) / 2
    bmax = int(s * H[1] / vlo)
    cmax = int(s * (H[2] + 1.5 * H[1] / vlo))
    Jmax = 108 * X
    for b in range(-bmax - (bmax % 2), bmax + 1, 2):
        if b == 0:
            continue
        # b = s h1 / v bounds the height v of the complex root
        vmax = s * H[1] / abs(b)
        dmax = s * (0.75 * H[1] / vlo + H[2] + H[3] * vmax)
        emax = s * (0.125 * H[1] / vlo + 0.25 * H[2] + 0.5 * H[3] * vmax + H[4] * vmax * vmax)
        for c in range(-(cmax // 6) * 6, cmax + 1, 6):
            if (c * c) % (3 * b) != 0:
                continue
            d = (c * c) // (3 * b)
            if d % 2 != 0 or abs(d) > dmax:
                continue
            c3 = c * c * c
            bb = 27 * b * b
            lo = -((Jmax - c3) // bb)  # ceil((c3 - Jmax)/bb)
            hi = (c3 + Jmax) // bb
            lo = max(lo, -int(emax) - 1)
            hi = min(hi, int(emax) + 1)
            for e in range(lo, hi + 1):
                J = c3 - bb * e
                if J == 0 or abs(J) > Jmax:
                    continue
                # complex root of b x^3 + c x^2 + d x + e via the real root r
                # and Vieta: Re w = (-c/b - r)/2, |w|^2 = -(e/b)/r
                best = _cubic_upper_root(c / b, d / b, e / b)
                if best.imag <= 0:
                    continue
                if not _in_F(best, 1e-7):
                    continue
                if cnt < out.shape[0]:
                    out[cnt, 0] = 0
                    out[cnt, 1] = b
                    out[cnt, 2] = c
                    out[cnt, 3] = d
                    out[cnt, 4] = e
                cnt += 1
    return cnt


def _run_scan(fn, args, cap=1 << 16):
    while True:
        out = np.zeros((cap, 5), np.int64)
        cnt = fn(*args, out, 0)
        if cnt <= cap:
            return out[:cnt]
        cap = cnt


def reduced_quartics(X: int, box_constant: float = DEFAULT_BOX_CONSTANT,
                     include_a0: bool = True) -> np.ndarray:
    """All quartic covariants G' (rows a..e) of points on Y with 0 < |A3| <= X
    whose complex root lies in the closed fundamental domain (up to a tiny
    tolerance).  Every SL2(Z)-class occurs at least once; duplicates from
    boundary ties are left in and removed by canonicalization."""
    if X < 1:
        return np.zeros((0, 5), np.int64)
    H = np.array(envelope()) * box_constant
    s = float(X) ** (1 / 3)
    if X > 10 ** 9:
        raise ValueError("X too large for the 64-bit scan")
    parts = []
    V = math.sqrt(3) / 2
    while s * H[0] / V ** 2 >= 1:
        parts.append(_run_scan(_scan_general, (int(X), s, V, 2 * V, H)))
        V *= 2
    if include_a0:
        parts.append(_run_scan(_scan_a0, (int(X), s, H)))
    if not parts:
        return np.zeros((0, 5), np.int64)
    out = np.concatenate(parts)
    return np.unique(out, axis=0) if len(out) else out


# -- exact canonical form of a quartic -------------------------------------------

def _upper_root(f) -> complex:
    a, b, c, d, e = f
    coeffs = [a, b, c, d, e]
    while coeffs and coeffs[0] == 0:
        coeffs = coeffs[1:]
    r = np.roots(np.array(coeffs, dtype=float))
    w = r[np.argmax(r.imag)]
    if w.imag <= 1e-12:
        raise ValueError(f"quartic {tuple(f)} has no non-real root")
    # refine near-boundary cases in high precision
    if (abs(abs(w.real) - 0.5) < 1e-6 or abs(abs(w) - 1) < 1e-6):
        import mpmath as mp
        with mp.workdps(60):
            roots = mp.polyroots([int(x) for x in coeffs], maxsteps=200, extraprec=200)
            w = max(roots, key=lambda z: mp.im(z))
            return complex(w)
    return complex(w)


def _mobius(h, z):
    p, q, r, s = h
    return (p * z + q) / (r * z + s)


def _subst_for(h):
    """Matrix m with roots(f.compose(m)) = h . roots(f)."""
    p, q, r, s = h
    # m = (h^-1)^T ; h^-1 = [[s, -q], [-r, p]]
    return (s, -r, -q, p)


def _in_closed_F(w, tol=_TOL):
    return abs(w.real) <= 0.5 + tol and abs(w) >= 1 - tol


@lru_cache(maxsize=None)
def _small_psl2():
    out = []
    rng = range(-2, 3)
    for p in rng:
        for q in rng:
            for r in rng:
                for s in rng:
                    if p * s - q * r == 1:
                        h = (p, q, r, s)
                        neg = tuple(-x for x in h)
                        if neg not in out:
                            out.append(h)
    return tuple(out)


def _to_F(w):
    """Return (h, h.w) with h in SL2(Z) moving w into the closed domain."""
    h = (1, 0, 0, 1)
    for _ in range(10000):
        k = math.floor(w.real + 0.5)
        if k:
            t = (1, -k, 0, 1)
            w = w - k
            h = _mm(t, h)
        if abs(w) < 1 - 1e-13:
            w = -1 / w
            h = _mm((0, -1, 1, 0), h)
            continue
        return h, w
    raise RuntimeError("reduction did not terminate")


def _mm(x, y):
    a, b, c, d = x
    e, f, g, h = y
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def canonical_quartic(f) -> tuple:
    """(canonical quartic, m) with f.compose(m) canonical.

    The canonical quartic is the lexicographically least translate whose
    upper complex root lies in the closed fundamental domain; it depends only
    on the SL2(Z)-class."""
    f = BinaryQuartic(*f)
    w = _upper_root(f)
    h, w = _to_F(w)
    m0 = _subst_for(h)
    f0 = f.compose(m0)
    best = None
    for k in _small_psl2():
        wk = _mobius(k, w)
        if wk.imag > 0 and _in_closed_F(wk):
            mk = _subst_for(k)
            cand = f0.compose(mk)
            if best is None or tuple(cand) < tuple(best[0]):
                best = (cand, _mm(mk, m0))
    return best


@lru_cache(maxsize=None)
def _elliptic_substitutions():
    """Substitutions for the nontrivial stabilizers of i, rho and rho + 1."""
    rho = complex(-0.5, math.sqrt(3) / 2)
    out = []
    for k in _small_psl2():
        if k in ((1, 0, 0, 1), (-1, 0, 0, -1)):
            continue
        if any(abs(_mobius(k, pt) - pt) < 1e-9 for pt in (1j, rho, rho + 1)):
            out.append(_subst_for(k))
    return tuple(out)


def quartic_automorphisms(f) -> list:
    """Nontrivial substitutions m in SL2(Z)/(+-1) with f.compose(m) = f, f canonical.

    The complex root of a canonical f lies in the fundamental domain, so an
    automorphism must fix an elliptic point there."""
    f = BinaryQuartic(*f)
    # leading and trailing coefficients of f.compose(m) are f(p, q) and f(r, s)
    return [m for m in _elliptic_substitutions()
            if f(m[0], m[1]) == f.a and f(m[2], m[3]) == f.e and f.compose(m) == f]


# -- lattices ---------------------------------------------------------------------

def _pluecker_from_quartic(g):
    a, b, c, d, e = g
    if b % 2 or c % 6 or d % 2:
        raise ValueError(f"{tuple(g)} is not the covariant of a point on Y")
    # (p12, p13, p14, p23, p24, p34); on Y p14 = 3 p23
    return (a, b // 2, c // 2, c // 6, d // 2, e)


def _wedge(x, y):
    return (x[0] * y[1] - x[1] * y[0], x[0] * y[2] - x[2] * y[0],
            x[0] * y[3] - x[3] * y[0], x[1] * y[2] - x[2] * y[1],
            x[1] * y[3] - x[3] * y[1], x[2] * y[3] - x[3] * y[2])


def _saturate(rows):
    """Basis of (Q-span of the two integer 4-vectors) cap Z^4.

    Column operations bring the 2x4 matrix to [H | 0]; the first two rows of
    the inverse transform then form a primitive basis."""
    A = [list(rows[0]), list(rows[1])]
    # Uinv starts as identity; a column op A <- A E corresponds to Uinv <- E^-1 Uinv
    Ui = [[int(i == j) for j in range(4)] for i in range(4)]

    def colop(i, j, x, y, z, w):
        # new col i = x*col_i + y*col_j ; new col j = z*col_i + w*col_j (det 1)
        for row in A:
            ci, cj = row[i], row[j]
            row[i], row[j] = x * ci + y * cj, z * ci + w * cj
        # E = [[x, z], [y, w]] on (i, j); E^-1 = [[w, -z], [-y, x]] acting on rows i, j
        ri, rj = Ui[i], Ui[j]
        Ui[i] = [w * p - z * q for p, q in zip(ri, rj)]
        Ui[j] = [-y * p + x * q for p, q in zip(ri, rj)]

    for r, start in ((0, 0), (1, 1)):
        for j in range(start + 1, 4):
            a, b = A[r][start], A[r][j]
            if b == 0:
                continue
            # extended gcd: x a + y b = g
            g, x, y = _egcd(a, b)
            # col_start <- x col_start + y col_j ; col_j <- (-b/g) col_start + (a/g) col_j
            colop(start, j, x, y, -b // g, a // g)
        if A[r][start] == 0:
            raise ValueError("rows are dependent")
    return tuple(Ui[0]), tuple(Ui[1])


def _egcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _gauss_reduce(l1, l2):
    """Lagrange reduction of a 2D lattice basis; keeps orientation."""
    def dot(x, y):
        return sum(p * q for p, q in zip(x, y))
    for _ in range(1000):
        if dot(l2, l2) < dot(l1, l1):
            l1, l2 = l2, tuple(-x for x in l1)
        n1 = dot(l1, l1)
        num = dot(l1, l2)
        k = (2 * num + n1) // (2 * n1)
        if k == 0:
            break
        l2 = tuple(y - k * x for x, y in zip(l1, l2))
    return l1, l2


@lru_cache(maxsize=1 << 16)
def lattice_basis(g) -> tuple:
    """(l1, l2, m): oriented basis of L with l1 ^ l2 = P / m for the point-on-Y
    covariant g = G'."""
    P = _pluecker_from_quartic(g)
    m = 0
    for x in P:
        m = gcd(m, x)
    if m == 0:
        raise ValueError("zero Pluecker vector")
    # p_kj as a full antisymmetric matrix
    idx = {(0, 1): 0, (0, 2): 1, (0, 3): 2, (1, 2): 3, (1, 3): 4, (2, 3): 5}

    def p(k, j):
        if k == j:
            return 0
        return P[idx[(k, j)]] if k < j else -P[idx[(j, k)]]
    rows = [tuple(p(k, j) for j in range(4)) for k in range(4)]
    pair = None
    for i in range(4):
        for j in range(i + 1, 4):
            if any(_wedge(rows[i], rows[j])):
                pair = (rows[i], rows[j])
                break
        if pair:
            break
    l1, l2 = _saturate(pair)
    l1, l2 = _gauss_reduce(l1, l2)
    w = _wedge(l1, l2)
    q = tuple(x // m for x in P)
    if w == q:
        pass
    elif w == tuple(-x for x in q):
        l2 = tuple(-x for x in l2)
    else:
        raise AssertionError("saturation does not match Pluecker vector")
    return l1, l2, m


def sublattice_labels(m: int) -> list:
    """Hermite normal forms (alpha, beta, delta): alpha*delta = m, 0 <= beta < delta."""
    out = []
    for alpha in range(1, m + 1):
        if m % alpha == 0:
            delta = m // alpha
            for beta in range(delta):
                out.append((alpha, beta, delta))
    return out


def pair_from_label(g, label) -> CubicPair:
    l1, l2, m = lattice_basis(BinaryQuartic(*g))
    alpha, beta, delta = label
    F1 = tuple(alpha * x + beta * y for x, y in zip(l1, l2))
    F2 = tuple(delta * y for y in l2)
    return CubicPair(*F1, *F2)


def label_of(v, g=None) -> tuple:
    """HNF label of span(F1, F2) relative to the basis of L attached to G'(v)."""
    g = BinaryQuartic(*(g if g is not None else reduced_covariant(v)))
    l1, l2, m = lattice_basis(g)
    # two coordinates where (l1, l2) is invertible
    for i in range(4):
        for j in range(i + 1, 4):
            minor = l1[i] * l2[j] - l1[j] * l2[i]
            if minor:
                break
        else:
            continue
        break

    def coords(F):
        x, y = F[i], F[j]
        c1n = x * l2[j] - y * l2[i]
        c2n = l1[i] * y - l1[j] * x
        if c1n % minor or c2n % minor:
            raise AssertionError("F not in L")
        c1, c2 = c1n // minor, c2n // minor
        assert all(c1 * p + c2 * q == f for p, q, f in zip(l1, l2, F))
        return c1, c2
    (a, b), (c, d) = coords(v[0:4]), coords(v[4:8])
    det = a * d - b * c
    if det != m:
        raise AssertionError(f"index {det} != content {m}")
    g0, x, y = _egcd(a, c)
    alpha = g0
    beta = x * b + y * d
    delta = m // alpha
    return (alpha, beta % delta, delta)


# -- canonical representatives of points --------------------------------------------

def _check_on_Y(v):
    if a1_invariant(v) != 0:
        raise NotOnQuadric(f"A1 != 0 for {tuple(v)}")


def canonical_key(v) -> tuple:
    """(canonical quartic, HNF label): a complete G(Z)-orbit invariant on Y."""
    _check_on_Y(v)
    v = CubicPair(*v)
    g = reduced_covariant(v)
    if not any(g):
        raise ZeroInvariant("zero covariant")
    gc, m = canonical_quartic(g)
    v1 = act(GroupElement((1, 0, 0, 1), m), v)
    assert reduced_covariant(v1) == gc
    labels = [label_of(v1, gc)]
    for aut in quartic_automorphisms(gc):
        labels.append(label_of(act(GroupElement((1, 0, 0, 1), aut), v1), gc))
    return tuple(gc), min(labels)


def reduce_to_canonical(v) -> CubicPair:
    """Deterministic orbit representative (equal for equivalent inputs)."""
    if a1_invariant(v) != 0:
        raise NotOnQuadric(f"A1 != 0 for {tuple(v)}")
    g, label = canonical_key(v)
    return pair_from_label(g, label)


class Equivalence:
    YES = "Yes"
    NO = "No"
    UNDECIDED = "Undecided"


def _bfs_connect(v, w, depth):
    """Bidirectional search over generator words of length <= depth."""
    if v == w:
        return True
    fa, fb = {v}, {w}
    seen_a, seen_b = {v}, {w}
    for step in range(depth):
        if len(fa) <= len(fb):
            nxt = set()
            for x in fa:
                for gen in GENERATORS:
                    y = act(gen, x)
                    if y in seen_b:
                        return True
                    if y not in seen_a:
                        seen_a.add(y)
                        nxt.add(y)
            fa = nxt
        else:
            nxt = set()
            for x in fb:
                for gen in GENERATORS:
                    y = act(gen, x)
                    if y in seen_a:
                        return True
                    if y not in seen_b:
                        seen_b.add(y)
                        nxt.add(y)
            fb = nxt
        if len(seen_a) + len(seen_b) > 2_000_000:
            break
    return False


def equivalent(v, w, depth: int = 0) -> str:
    """Yes/No from the exact canonical key; a BFS over generator words of
    length <= depth is tried first when depth > 0 (purely as a witness)."""
    v, w = CubicPair(*v), CubicPair(*w)
    if a3_invariant(v) != a3_invariant(w) or a1_invariant(v) != a1_invariant(w):
        return Equivalence.NO
    if depth > 0 and _bfs_connect(v, w, depth):
        return Equivalence.YES
    try:
        return Equivalence.YES if canonical_key(v) == canonical_key(w) else Equivalence.NO
    except (ValueError, AssertionError):
        return Equivalence.UNDECIDED


def reducible_orbit_rep(n: int) -> CubicPair:
    if n == 0:
        raise ZeroInvariant("n must be nonzero")
    v = CubicPair(0, 0, 1, 0, 1, 0, 0, n)
    assert a1_invariant(v) == 0 and a3_invariant(v) == n
    return v


# -- enumeration and counting ---------------------------------------------------------

@dataclass
class OrbitInventory:
    xmin: int
    xmax: int
    box_constant: float = DEFAULT_BOX_CONSTANT
    filter_desc: str = "all"
    # canonical key -> (rep, A3, flags)
    entries: dict = field(default_factory=dict)

    def add(self, key, rep, a3, flags):
        self.entries[key] = (rep, a3, set(flags))

    def __len__(self):
        return len(self.entries)

    def by_invariant(self) -> dict:
        out = {}
        for key, (rep, a3, flags) in self.entries.items():
            out.setdefault(a3, []).append((key, rep, flags))
        return out

    def sorted_entries(self):
        return sorted(self.entries.items(), key=lambda kv: (kv[1][1], tuple(kv[1][0])))

    def dump(self, path, version: str = ""):
        with open(path, "w") as fh:
            fh.write(f"# X={self.xmax} Xmin={self.xmin} C={self.box_constant} "
                     f"filter={self.filter_desc} version={version}\n")
            for key, (rep, a3, flags) in self.sorted_entries():
                fh.write(f"{a3}\t{' '.join(map(str, rep))}\t{','.join(sorted(flags))}\n")

    @classmethod
    def load(cls, path) -> "OrbitInventory":
        with open(path) as fh:
            header = fh.readline()
            meta = dict(tok.split("=", 1) for tok in header[1:].split())
            inv = cls(int(meta.get("Xmin", 1)), int(meta["X"]), float(meta.get("C", DEFAULT_BOX_CONSTANT)),
                      meta.get("filter", "all"))
            for line in fh:
                if not line.strip():
                    continue
                a3, rep, flags = line.rstrip("\n").split("\t")
                rep = CubicPair.parse(rep)
                inv.add(canonical_key(rep), rep, int(a3), [f for f in flags.split(",") if f])
        return inv


def _orbits_of_quartic(g):
    """Yield (label, rep) for the sublattice orbits over a canonical quartic g."""
    l1, l2, m = lattice_basis(g)
    auts = quartic_automorphisms(g)
    labels = sublattice_labels(m)
    if not auts:
        for lab in labels:
            yield lab, pair_from_label(g, lab)
        return
    done = set()
    for lab in labels:
        if lab in done:
            continue
        v = pair_from_label(g, lab)
        orbit = {lab}
        for aut in auts:
            orbit.add(label_of(act(GroupElement((1, 0, 0, 1), aut), v), g))
        done |= orbit
        best = min(orbit)
        yield best, pair_from_label(g, best)


def _interior_mask(rows, margin=1e-6):
    """Rows whose upper complex root is strictly inside the fundamental domain;
    those quartics are canonical already and have trivial automorphism group."""
    mask = np.zeros(len(rows), bool)
    gen = rows[:, 0] != 0
    A = rows[gen].astype(float)
    if len(A):
        comp = np.zeros((len(A), 4, 4))
        comp[:, 0, :] = -A[:, 1:] / A[:, :1]
        comp[:, 1, 0] = comp[:, 2, 1] = comp[:, 3, 2] = 1.0
        z = np.linalg.eigvals(comp)
        w = z[np.arange(len(z)), np.argmax(z.imag, axis=1)]
        mask[gen] = (np.abs(w.real) < 0.5 - margin) & (np.abs(w) > 1 + margin) & (w.imag > 0)
    # a = 0: the remaining roots are those of the cubic b x^3 + ... + e
    cub = ~gen & (rows[:, 1] != 0)
    B = rows[cub].astype(float)
    if len(B):
        comp = np.zeros((len(B), 3, 3))
        comp[:, 0, :] = -B[:, 2:] / B[:, 1:2]
        comp[:, 1, 0] = comp[:, 2, 1] = 1.0
        z = np.linalg.eigvals(comp)
        w = z[np.arange(len(z)), np.argmax(z.imag, axis=1)]
        mask[cub] = (np.abs(w.real) < 0.5 - margin) & (np.abs(w) > 1 + margin) & (w.imag > 0)
    return mask


def _real_roots_batch(gs):
    """Approximate real roots of each quartic (None where a = 0)."""
    out = [None] * len(gs)
    idx = [i for i, g in enumerate(gs) if g[0] != 0]
    for start in range(0, len(idx), 50000):
        chunk = idx[start:start + 50000]
        A = np.array([gs[i] for i in chunk], dtype=float)
        comp = np.zeros((len(A), 4, 4))
        comp[:, 0, :] = -A[:, 1:] / A[:, :1]
        comp[:, 1, 0] = comp[:, 2, 1] = comp[:, 3, 2] = 1.0
        z = np.linalg.eigvals(comp)
        for i, zs in zip(chunk, z):
            out[i] = [r.real for r in zs if abs(r.imag) <= 1e-6 * (1 + abs(r))]
    return out


def _canonical_quartics(X, box_constant):
    rows = reduced_quartics(X, box_constant)
    inner = _interior_mask(rows)
    seen = {}
    for row in rows[inner]:
        t = tuple(int(x) for x in row)
        seen[t] = None
    for row in rows[~inner]:
        gc, _ = canonical_quartic(BinaryQuartic(*(int(x) for x in row)))
        seen[tuple(gc)] = None
    return [BinaryQuartic(*k) for k in sorted(seen)]


def _index(g):
    """content(P) = [L : M] for the points over g."""
    a, b, c, d, e = g
    return math.gcd(a, b // 2, c // 6, d // 2, e)


def _gp_a3(g):
    q, r = divmod(-g.J, 108)
    assert r == 0
    return q


def enumerate_quadric_points(X: int, filter: Optional[Callable[[int], bool]] = None,
                             box_constant: float = DEFAULT_BOX_CONSTANT) -> Iterator[CubicPair]:
    """Stream one canonical point of Y(Z) per G(Z)-orbit with 0 < |A3| <= X."""
    for g in _canonical_quartics(X, box_constant):
        a3 = _gp_a3(g)
        if filter is not None and not filter(a3):
            continue
        for _, rep in _orbits_of_quartic(g):
            yield rep


def count_orbits(X: int, filter: Optional[Callable[[int], bool]] = None,
                 box_constant: float = DEFAULT_BOX_CONSTANT, build_inventory: bool = True,
                 filter_desc: str = "all"):
    """(N_irr, N_red, inventory) for orbits with 0 < |A3| <= X."""
    inv = OrbitInventory(1, X, box_constant, filter_desc)
    n_irr = n_red = 0
    gs = _canonical_quartics(X, box_constant)
    if filter is not None:
        gs = [g for g in gs if filter(_gp_a3(g))]
    for g, real in zip(gs, _real_roots_batch(gs)):
        a3 = _gp_a3(g)
        red = quartic_has_rational_root(g, real)
        if not build_inventory and not quartic_automorphisms(g):
            k = len(sublattice_labels(_index(g)))
            if red:
                n_red += k
            else:
                n_irr += k
            continue
        for lab, rep in _orbits_of_quartic(g):
            if red:
                n_red += 1
            else:
                n_irr += 1
            if build_inventory:
                inv.add((tuple(g), lab), rep, a3, ["red" if red else "irr"])
    return n_irr, n_red, inv
