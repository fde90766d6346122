"""Selmer statistics for the cubic twist families E_{d,n}: y^2 = x^3 + d n^2.

2-Selmer elements of E_{16,n} are the G(Q)-classes of locally soluble points
of Y with A1 = 0, A3 = n.  By the integrality theorem every class has an
integral representative when n is cubefree and prime to 6, so the enumerated
orbits with A3 = n cover Sel_2; several integral orbits may lie in one
rational class, and those are merged by their image under the descent map

    v  ->  z(v) = (4 a theta + 3 b^2 - 8 a c) / 3   in  K* / K*^2,

where f = a w1^4 + b w1^3 w2 + c w1^2 w2^2 + ... is the discriminant quartic
of v and K = Q[theta] / (theta^3 + J(f)).  z(v) is a square exactly for the
reducible (identity) class.  Curves E_{-432 s^2, n} are 3-isogenous to
E_{16 s^2, n}, which leaves Sel_2 unchanged, so both are served by the orbits
with A3 = s n.

Also here: parity bookkeeping, rank proportions, the phi-Selmer lower bound
3^(alpha - beta), its partial sums, and the average number of classes that
are trivial at 2.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np
import sympy

from .curves import good_reduction_at_2, local_data, torsion_two
from .forms_core import resultant_quartic
from .localdata import (AcceptableSet, PrecisionExhausted, has_root_Qp,
                        is_locally_soluble_Qp, is_locally_soluble_R)
from .orbits import OrbitInventory, count_orbits
from .rootnum import root_number

__all__ = [
    "GuardViolated", "BudgetExceeded", "SelmerReport", "GrowthSeries",
    "a3_for_curve", "in_guard", "descent_element", "is_square_K", "selmer_classes",
    "sel2_count", "curve_reports", "average_sel2", "parity_check",
    "rank_proportion_report", "sel3_lower_bound", "sel3_local_factors",
    "tamagawa_ratio", "sel3_growth_sum", "selmer_local_triviality_average",
    "write_csv", "read_csv", "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 10 ** 5


class GuardViolated(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


# -- curve <-> invariant ------------------------------------------------------------

def a3_for_curve(d: int, n: int) -> int:
    """The A3 value whose orbits give Sel_2(E_{d,n}).

    Only d = 16 s^2 (Jacobian of the A3 = s n orbits) and d = -432 s^2
    (3-isogenous to it) arise from orbits with A1 = 0."""
    if n == 0:
        raise ValueError("n must be nonzero")
    for base in (16, -432):
        if d % base == 0 and d // base > 0:
            s = math.isqrt(d // base)
            if s * s == d // base:
                return s * n
    raise ValueError(f"d = {d} is not of the form 16 s^2 or -432 s^2")


def _cubefree(n: int) -> bool:
    return all(e < 3 for e in sympy.factorint(abs(n)).values())


def in_guard(d: int, n: int) -> bool:
    """n cubefree and coprime to the bad modulus 6 d."""
    return n != 0 and math.gcd(n, 6 * d) == 1 and _cubefree(n)


def _guard_filter(d: int) -> Callable[[int], bool]:
    base = 16 if d % 16 == 0 and d > 0 else -432
    s = math.isqrt(d // base)

    def ok(a3):
        return a3 % s == 0 and in_guard(d, a3 // s)
    return ok


# -- arithmetic in K = Q(theta), theta^3 = N ------------------------------------------

_T = sympy.Symbol("t")


def _kmul(x, y, N):
    a0, a1, a2 = x
    b0, b1, b2 = y
    return (a0 * b0 + N * (a1 * b2 + a2 * b1),
            a0 * b1 + a1 * b0 + N * a2 * b2,
            a0 * b2 + a1 * b1 + a2 * b0)


def _charpoly(x, N):
    x0, x1, x2 = x
    norm = x0 ** 3 + N * x1 ** 3 + N * N * x2 ** 3 - 3 * N * x0 * x1 * x2
    return [1, -3 * x0, 3 * x0 * x0 - 3 * N * x1 * x2, -norm]


def is_square_K(x, N: int) -> bool:
    """Is x0 + x1 theta + x2 theta^2 a square in Q(theta), theta^3 = N (N not a cube)?

    For x outside Q its characteristic polynomial P is irreducible, and x is
    a square iff P(t^2) has a cubic factor (the minimal polynomial of a root)."""
    x = tuple(Fraction(c) for c in x)
    if not any(x):
        raise ValueError("zero element")
    if x[1] == 0 and x[2] == 0:
        q = x[0]
        return q > 0 and math.isqrt(q.numerator) ** 2 == q.numerator and \
            math.isqrt(q.denominator) ** 2 == q.denominator
    cp = _charpoly(x, N)
    den = math.lcm(*(c.denominator for c in cp))
    coeffs = []
    for c in cp:
        coeffs += [int(c * den), 0]
    poly = sympy.Poly(coeffs[:-1], _T)
    return any(g.degree() == 3 for g, _ in poly.factor_list()[1])


def descent_element(f) -> tuple:
    """3 z(v) = 4 a theta + 3 b^2 - 8 a c, scaled by 3 (same square class as z)."""
    a, b, c = f[0], f[1], f[2]
    return (3 * (3 * b * b - 8 * a * c), 12 * a, 0)


# -- per-curve Selmer computation ---------------------------------------------------

@dataclass
class SelmerReport:
    d: int
    n: int
    raw_orbit_count: int
    weighted_count: Fraction
    undecided: int
    sel2_size: int
    flags: dict = field(default_factory=dict)
    local_trivial_2: Optional[int] = None

    def as_dict(self) -> dict:
        out = asdict(self)
        out["weighted_count"] = str(self.weighted_count)
        return out


def _soluble(f, primes) -> bool:
    return is_locally_soluble_R(f, 1) and all(is_locally_soluble_Qp(f, 1, p) for p in primes)


def selmer_classes(m: int, reps: Iterable) -> tuple:
    """Group the locally soluble orbits with A3 = m into rational classes.

    reps: iterable of (rep, flags).  Returns (classes, raw, undecided) where
    classes is a list of (f, z, orbit_count) with the identity class first."""
    N = 432 * m * m
    primes = [int(p) for p in sympy.primefactors(6 * m)]
    classes = []          # nontrivial: [f, z, count]
    ident = None
    raw = undecided = 0
    for rep, flags in reps:
        f = resultant_quartic(rep)
        try:
            if not _soluble(f, primes):
                continue
        except PrecisionExhausted:
            undecided += 1
            continue
        raw += 1
        z = descent_element(f)
        square = is_square_K(z, N)
        if square != ("red" in flags):
            # the descent map disagrees with the rational-root test
            undecided += 1
            continue
        if square:
            if ident is None:
                ident = [f, z, 0]
            ident[2] += 1
            continue
        for cl in classes:
            if is_square_K(_kmul(cl[1], z, N), N):
                cl[2] += 1
                break
        else:
            classes.append([f, z, 1])
    if ident is None:
        # no reducible orbit came through (cannot happen for guard-set n)
        undecided += 1
        ident = [None, (1, 0, 0), 0]
    return [tuple(ident)] + [tuple(c) for c in classes], raw, undecided


def _stabilizer_trivial(d: int, n: int) -> bool:
    # the G(Q)-stabilizer is nontrivial iff d^2 n^2 is a cube
    return not sympy.integer_nthroot(d * d * n * n, 3)[1]


def _report(d, n, classes, raw, undecided, with_local2=False) -> SelmerReport:
    # each of the c integral orbits in a class carries weight 1/m(v) = 1/c
    weighted = sum((Fraction(1, c[2]) for c in classes for _ in range(c[2])), Fraction(0))
    size = len(classes)
    flags = {"cubefree_ok": _cubefree(n), "stabilizer_trivial": _stabilizer_trivial(d, n)}
    rep = SelmerReport(d, n, raw, weighted, undecided, size, flags)
    if with_local2:
        rep.local_trivial_2 = 1 + sum(has_root_Qp(c[0], 2) for c in classes[1:])
    return rep


def _orbits_by_a3(X: int, filter=None, inventory: Optional[OrbitInventory] = None) -> dict:
    if inventory is None:
        _, _, inventory = count_orbits(X, filter=filter, build_inventory=True)
    out = {}
    for key, (rep, a3, flags) in inventory.entries.items():
        out.setdefault(a3, []).append((rep, flags))
    return out


def sel2_count(d: int, n: int, inventory: Optional[OrbitInventory] = None,
               budget: int = DEFAULT_BUDGET, guard: bool = True) -> SelmerReport:
    """#Sel_2(E_{d,n}) from the locally soluble integral orbits with A3 = s n."""
    m = a3_for_curve(d, n)
    if guard and not in_guard(d, n):
        raise GuardViolated(f"n = {n} is not cubefree and prime to {6 * d}")
    if abs(m) > budget:
        raise BudgetExceeded(f"|A3| = {abs(m)} exceeds budget {budget}")
    if inventory is not None and inventory.xmax >= abs(m):
        groups = _orbits_by_a3(0, inventory=inventory)
    else:
        groups = _orbits_by_a3(abs(m), filter=lambda a: a == m)
    classes, raw, und = selmer_classes(m, groups.get(m, []))
    return _report(d, n, classes, raw, und)


def curve_reports(d: int, X: int, sigma: Optional[AcceptableSet] = None,
                  with_local2: bool = False, extra: Optional[Callable[[int], bool]] = None,
                  done: Optional[dict] = None) -> tuple:
    """SelmerReports for guard-set n with 0 < |n| <= X (one orbit enumeration).

    Returns (reports sorted by |n| then n, skipped) where skipped counts the
    n in Sigma that fail the guard."""
    s = abs(a3_for_curve(d, 1))
    keep = [n for n in range(-X, X + 1) if n and (sigma is None or n in sigma)
            and (extra is None or extra(n))]
    good = [n for n in keep if in_guard(d, n)]
    done = done or {}
    todo = [n for n in good if n not in done]
    groups = _orbits_by_a3(s * X, filter=_guard_filter(d)) if todo else {}
    out = dict(done)
    for n in todo:
        m = a3_for_curve(d, n)
        classes, raw, und = selmer_classes(m, groups.get(m, []))
        out[n] = _report(d, n, classes, raw, und, with_local2)
    reports = [out[n] for n in sorted(good, key=lambda n: (abs(n), n))]
    return reports, len(keep) - len(good)


def _checkpoints(X: int, count: int = 8) -> list:
    pts = {max(1, round(X ** (k / count))) for k in range(1, count + 1)}
    return sorted(pts | {X})


def average_sel2(d: int, sigma: Optional[AcceptableSet] = None, X: int = 2000,
                 checkpoints: Optional[list] = None, reports: Optional[list] = None) -> dict:
    """Running averages of #Sel_2 over n in Sigma and the guard, |n| <= X_i."""
    skipped = 0
    if reports is None:
        reports, skipped = curve_reports(d, X, sigma)
    checkpoints = checkpoints or _checkpoints(X)
    rows = []
    for Xi in checkpoints:
        sub = [r for r in reports if abs(r.n) <= Xi]
        dec = [r for r in sub if r.undecided == 0]
        rows.append({
            "X": Xi, "curves": len(sub), "decided": len(dec),
            "average": sum(r.sel2_size for r in sub) / len(sub) if sub else float("nan"),
            "average_decided": sum(r.sel2_size for r in dec) / len(dec) if dec else float("nan"),
            "weighted_average": float(sum(r.weighted_count for r in sub) / len(sub)) if sub else float("nan"),
            "raw_average": sum(r.raw_orbit_count for r in sub) / len(sub) if sub else float("nan"),
        })
    und = sum(1 for r in reports if r.undecided)
    return {"d": d, "X": X, "sigma": str(sigma) if sigma else "all", "checkpoints": rows,
            "processed": len(reports), "skipped_guard": skipped,
            "undecided_fraction": und / len(reports) if reports else 0.0,
            "final_average": rows[-1]["average"] if rows else float("nan")}


def parity_check(d: int, reports: list, flip: Optional[int] = None) -> dict:
    """w(E) = (-1)^(dim Sel_2 + dim E[2](Q)) on every decided curve.

    `flip` negates the stored sign of that n (harness self-test)."""
    mismatches = []
    checked = torsion = 0
    for r in reports:
        if r.undecided or not r.flags.get("stabilizer_trivial", True):
            continue
        t = torsion_two(d * r.n * r.n)
        torsion += t > 1
        k = r.sel2_size.bit_length() - 1
        if 1 << k != r.sel2_size:
            mismatches.append((r.n, r.sel2_size, None))
            continue
        w = root_number(d, r.n)
        if flip is not None and r.n == flip:
            w = -w
        checked += 1
        if (-1) ** (k + (t.bit_length() - 1)) != w:
            mismatches.append((r.n, r.sel2_size, w))
    return {"d": d, "checked": checked, "torsion_corrected": torsion, "mismatches": mismatches}


def rank_proportion_report(d: int, reports: list, checkpoints: Optional[list] = None) -> dict:
    """Conditional proportions of the smallest Selmer sizes within each sign class."""
    X = max((abs(r.n) for r in reports), default=1)
    checkpoints = checkpoints or _checkpoints(X)
    rows = []
    for Xi in checkpoints:
        plus = [r.sel2_size for r in reports if abs(r.n) <= Xi and not r.undecided
                and root_number(d, r.n) == 1]
        minus = [r.sel2_size for r in reports if abs(r.n) <= Xi and not r.undecided
                 and root_number(d, r.n) == -1]
        tot = len(plus) + len(minus)
        if not plus or not minus:
            continue
        f1 = sum(s == 1 for s in plus) / len(plus)
        f2 = sum(s == 2 for s in minus) / len(minus)
        avg_p, avg_m = sum(plus) / len(plus), sum(minus) / len(minus)
        # sizes are >= 1 (even) or >= 2 (odd): Markov bounds on the tails
        markov_ok = (sum(s >= 4 for s in plus) / len(plus) <= (avg_p - 1) / 3 + 1e-12 and
                     sum(s >= 8 for s in minus) / len(minus) <= (avg_m - 2) / 6 + 1e-12)
        rows.append({"X": Xi, "plus": len(plus), "minus": len(minus),
                     "frac_trivial_given_plus": f1, "frac_two_given_minus": f2,
                     "global_rank0_floor_obs": f1 * len(plus) / tot,
                     "global_rank1_floor_obs": f2 * len(minus) / tot,
                     "markov_ok": markov_ok})
    return {"d": d, "floors": {"trivial_given_plus": 1 / 3, "two_given_minus": 5 / 6,
                               "global_trivial": 1 / 6, "global_two": 5 / 12},
            "checkpoints": rows}


# -- 3-Selmer lower bound -----------------------------------------------------------

def _chi(d: int, p: int) -> int:
    return int(sympy.legendre_symbol(d % p, p)) if d % p else 0


def sel3_local_factors(d: int, n: int, cutoff: Optional[int] = None) -> dict:
    """{p: 3^(-chi(p))} over p | n, p = 2 mod 3, p > cutoff (default 3|d|)."""
    if n == 0:
        raise ValueError("n must be nonzero")
    cutoff = 3 * abs(d) if cutoff is None else cutoff
    out = {}
    for p in sympy.primefactors(abs(n)):
        p = int(p)
        if p % 3 == 2 and p > cutoff:
            c = _chi(d, p)
            out[p] = Fraction(3) ** (-c)
    return out


def sel3_lower_bound(d: int, n: int, cutoff: Optional[int] = None) -> Fraction:
    """3^(alpha(n) - beta(n))."""
    out = Fraction(1)
    for v in sel3_local_factors(d, n, cutoff).values():
        out *= v
    return out


def tamagawa_ratio(d: int, n: int, p: int) -> Fraction:
    """c_p(E_{-3d,3n}) / c_p(E_{d,n}) by Tate's algorithm on both curves."""
    c = local_data(d * n * n, p).cp
    c2 = local_data(-27 * d * n * n, p).cp
    return Fraction(c2, c)


@dataclass
class GrowthSeries:
    d: int
    xi: float
    checkpoints: list
    sums: list
    ratios: list                      # S(X) / (X (log X)^(xi - 1))
    prime_sum: float = 0.0            # sum over primes p <= X_max
    prime_target: float = 0.0         # mean value * X / log X
    mean_prime_value: float = 0.0
    constants: dict = field(default_factory=dict)

    @property
    def stabilization(self) -> float:
        """Ratio of the normalized sums at the last two checkpoints."""
        return self.ratios[-1] / self.ratios[-2]

    def as_dict(self) -> dict:
        out = asdict(self)
        out["stabilization"] = self.stabilization
        return out


def _is_square(x: int) -> bool:
    return x > 0 and math.isqrt(x) ** 2 == x


def sel3_growth_sum(d: int, X: int = 10 ** 6, checkpoints: Optional[list] = None,
                    cutoff: Optional[int] = None) -> GrowthSeries:
    """Partial sums of 3^(alpha(n) - beta(n)) over 1 <= n <= X_i, by sieving.

    The mean over primes is 1/2 + (3 + 1/3)/4 = 4/3 in general, 2 when -3d is
    a square (chi(p) = -1 on p = 2 mod 3) and 2/3 when d is a square."""
    cutoff = 3 * abs(d) if cutoff is None else cutoff
    checkpoints = checkpoints or [10 ** k for k in range(2, int(round(math.log10(X))) + 1)]
    if checkpoints[-1] != X:
        checkpoints = sorted(set(checkpoints) | {X})
    if _is_square(-3 * d):
        xi = 2.0
    elif _is_square(d):
        xi = 2 / 3
    else:
        xi = 4 / 3
    h = np.ones(X + 1)
    h[0] = 0.0
    primes = np.array(list(sympy.primerange(2, X + 1)), dtype=np.int64)
    pval = np.ones(len(primes))
    for i, p in enumerate(primes):
        p = int(p)
        if p % 3 == 2 and p > cutoff:
            c = _chi(d, p)
            if c:
                pval[i] = 3.0 ** (-c)
                h[p::p] *= pval[i]
    cs = np.cumsum(h)
    sums = [float(cs[x]) for x in checkpoints]
    ratios = [s / (x * math.log(x) ** (xi - 1)) for s, x in zip(sums, checkpoints)]
    return GrowthSeries(d, xi, list(checkpoints), sums, ratios,
                        prime_sum=float(pval.sum()), prime_target=xi * X / math.log(X),
                        mean_prime_value=xi, constants={"C_fit": ratios[-1]})


# -- classes trivial at 2 -----------------------------------------------------------

def _two_adic_precondition(d: int, n: int) -> bool:
    # #E(Q_2)/2E(Q_2) = 2: good reduction at 2 and no Q_2-rational 2-torsion,
    # i.e. -d n^2 is not a cube in Q_2 (odd 2-adic units are all cubes)
    D = d * n * n
    v2 = (D & -D).bit_length() - 1
    return good_reduction_at_2(d, n) and v2 % 3 != 0


def selmer_local_triviality_average(d: int = -432, sigma: Optional[AcceptableSet] = None,
                                    X: int = 2000, checkpoints: Optional[list] = None,
                                    reports: Optional[list] = None) -> dict:
    """Average number of Sel_2 classes that are trivial in E(Q_2)/2E(Q_2).

    A class is trivial at 2 iff its quartic has a zero in P^1(Q_2).  The
    family is restricted to odd n, where #E(Q_2)/2E(Q_2) = 2 (k = 1)."""
    if reports is None:
        reports, _ = curve_reports(d, X, sigma, with_local2=True, extra=lambda n: n % 2 != 0)
    for r in reports:
        if not _two_adic_precondition(d, r.n):
            raise GuardViolated(f"#E(Q_2)/2E(Q_2) != 2 for n = {r.n}")
        if r.local_trivial_2 is None or r.local_trivial_2 > r.sel2_size:
            raise AssertionError(f"local count inconsistent at n = {r.n}")
    checkpoints = checkpoints or _checkpoints(X)
    rows = []
    for Xi in checkpoints:
        sub = [r.local_trivial_2 for r in reports if abs(r.n) <= Xi and not r.undecided]
        if sub:
            rows.append({"X": Xi, "curves": len(sub), "average": sum(sub) / len(sub)})
    return {"d": d, "X": X, "k": 1, "target": 2.0, "checkpoints": rows,
            "final_average": rows[-1]["average"] if rows else float("nan")}


# -- persistence --------------------------------------------------------------------

def write_csv(path, d: int, reports: list, signs: Optional[dict] = None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "n", "sel2", "w", "undecided", "flags", "raw", "weighted", "local2"])
        for r in reports:
            sign = signs.get(r.n, "") if signs else ""
            flags = ";".join(k for k, v in sorted(r.flags.items()) if v)
            local2 = "" if r.local_trivial_2 is None else r.local_trivial_2
            w.writerow([d, r.n, r.sel2_size, sign, r.undecided, flags, r.raw_orbit_count,
                        r.weighted_count, local2])


def read_csv(path) -> dict:
    """n -> SelmerReport, for resuming an interrupted run."""
    out = {}
    with open(path) as fh:
        for row in csv.DictReader(fh):
            n = int(row["n"])
            flags = {k: k in row["flags"].split(";") for k in ("cubefree_ok", "stabilizer_trivial")}
            local2 = int(row["local2"]) if row.get("local2") else None
            out[n] = SelmerReport(int(row["d"]), n, int(row["raw"]), Fraction(row["weighted"]),
                                  int(row["undecided"]), int(row["sel2"]), flags, local2)
    return out


def dumps_summary(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str)
