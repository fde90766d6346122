"""Executable acceptance suite.

Each check returns a CheckResult: pass/fail, the measured values, the
tolerance it was held to, and wall time.  The wall-time budget is part of
the pass condition.  Used by `cubictwists report` and by the test suite.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import sympy

from . import curves, forms_core, localdata, orbits, rootnum, selstats
from .forms_core import KAPPA_F, a1_invariant, a3_invariant, act, random_word, resultant_quartic


@dataclass
class CheckResult:
    cid: int
    name: str
    passed: bool
    values: dict = field(default_factory=dict)
    tolerance: str = ""
    elapsed: float = 0.0
    budget: float = math.inf

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.values.items())
        return f"[{status}] criterion {self.cid:2d} {self.name}: {vals} ({self.elapsed:.1f}s)"

    def as_dict(self) -> dict:
        return {"id": self.cid, "name": self.name, "passed": self.passed,
                "values": {k: _fmt(v) for k, v in self.values.items()},
                "tolerance": self.tolerance, "elapsed": round(self.elapsed, 2),
                "budget": self.budget}


def _fmt(v):
    if isinstance(v, float):
        return float(f"{v:.6g}")
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_fmt(x) for x in v]
    return v


def ensure_table(d: int) -> rootnum.RootNumberTable:
    try:
        return rootnum.get_table(d)
    except rootnum.NotCalibrated:
        t = rootnum.calibrate_g_d(d)
        rootnum.register_table(t)
        return t


# criterion 6 runs on criterion 5's curves
_SEL2_CACHE = {}


def _sel2_reports(d: int, X: int):
    if (d, X) not in _SEL2_CACHE:
        _SEL2_CACHE[d, X] = selstats.curve_reports(d, X)
    return _SEL2_CACHE[d, X]


def check_1():
    bad = 0
    for n in range(-10 ** 4, 10 ** 4 + 1):
        if n == 0:
            continue
        v = orbits.reducible_orbit_rep(n)
        bad += a1_invariant(v) != 0 or a3_invariant(v) != n
    return {"failures": bad}, bad == 0, "exact", 1.0


def check_2(seed: int = 2):
    rng = random.Random(seed)
    pairs = [forms_core.CubicPair(*(rng.randint(-9, 9) for _ in range(8))) for _ in range(1000)]
    inv = [(a1_invariant(v), a3_invariant(v)) for v in pairs]
    bad = 0
    for k in range(10 ** 4):
        i = k % len(pairs)
        g = random_word(rng.randint(1, 12), rng)
        w = act(g, pairs[i])
        bad += (a1_invariant(w), a3_invariant(w)) != inv[i]
    return {"words": 10 ** 4, "pairs": len(pairs), "failures": bad}, bad == 0, "exact", 30.0


def check_3(X: int = 1000):
    bad = total = 0
    for v in orbits.enumerate_quadric_points(X):
        f = resultant_quartic(v)
        I, J, disc = f.I, f.J, f.disc
        a3 = a3_invariant(v)
        total += 1
        bad += not (I == 0 and J == KAPPA_F * a3 * a3 and disc == Fraction(4 * I ** 3 - J * J, 27))
    return {"points": total, "kappa": KAPPA_F, "failures": bad}, bad == 0 and total > 0, "exact", 60.0


def check_4(X: int = 10 ** 4):
    n_irr, _, _ = orbits.count_orbits(X, build_inventory=False)
    observed = n_irr / X
    predicted = localdata.main_term_constant(100, 2)
    rel = abs(observed / predicted - 1)
    return ({"N_irr": n_irr, "observed": observed, "predicted": predicted, "rel_err": rel},
            rel <= 0.10, "relative error <= 10%", 600.0)


def check_5(d: int = 16, X: int = 2000):
    reps, skipped = _sel2_reports(d, X)
    avg = selstats.average_sel2(d, reports=reps, X=X)
    a, und = avg["final_average"], avg["undecided_fraction"]
    return ({"curves": len(reps), "skipped_guard": skipped, "average": a, "undecided": und},
            2.4 <= a <= 3.6 and und < 0.02, "average in [2.4, 3.6], undecided < 2%", 1800.0)


def check_6(d: int = 16, X: int = 2000):
    ensure_table(d)
    reps, _ = _sel2_reports(d, X)
    no_torsion = [r for r in reps if curves.torsion_two(d * r.n * r.n) == 1]
    par = selstats.parity_check(d, no_torsion)
    # the harness must notice a single flipped sign
    probe = selstats.parity_check(d, no_torsion[:1], flip=no_torsion[0].n) if no_torsion else None
    detects = bool(probe and probe["mismatches"])
    ok = par["checked"] > 0 and not par["mismatches"] and detects
    return ({"checked": par["checked"], "mismatches": len(par["mismatches"]), "injection_detected": detects},
            ok, "zero mismatches", math.inf)


def check_7(samples: int = 200, seed: int = 7):
    out = {}
    ok = True
    for d in (16, -432):
        table = rootnum.calibrate_g_d(d)
        rootnum.register_table(table)
        wit = min(len(w) for w in table.witnesses.values())
        used = {n for w in table.witnesses.values() for n in w}
        rng = random.Random(seed)
        pool = [n for n in range(1, 3000) if n not in used]
        agree = 0
        for n in rng.sample(pool, samples):
            agree += rootnum.analytic_root_number(d * n * n) == rootnum.root_number(d, n, table)
        out[f"classes[{d}]"] = len(table)
        out[f"min_witnesses[{d}]"] = wit
        out[f"holdout[{d}]"] = f"{agree}/{samples}"
        ok = ok and wit >= 4 and agree == samples
    return out, ok, ">= 4 witnesses per class, 100% holdout", 600.0


def check_8(d: int = -432):
    ensure_table(d)
    X1, X0 = 10 ** 5, 10 ** 4
    total = rootnum.equidist_sum(d, 1, 0, X1)
    bound = 3 * X1 ** 0.75
    c0 = [rootnum.equidist_sum(d, 9, r, X0) / X0 for r in range(9)]
    c1 = [rootnum.equidist_sum(d, 9, r, X1) / X1 for r in range(9)]
    scale = max(abs(c) for c in c1)
    drift = max(abs(b - a) for a, b in zip(c0, c1))
    ok = abs(total) <= bound and drift <= 0.2 * scale
    return ({"sum": total, "bound": bound, "max_drift": drift, "scale": scale},
            ok, "|sum| <= 3 X^(3/4); drift <= 20% of max |c_r|", math.inf)


def check_9(X: int = 10 ** 6):
    ratios = []
    for x, y in ((0, 1), (1, 3), (2, 4)):
        c, m = rootnum.squarefree_ap_count(x, y, X)
        ratios.append(c / m)
    return {"ratios": ratios}, all(0.99 <= r <= 1.01 for r in ratios), "ratio in [0.99, 1.01]", 60.0


def check_10(d: int = 2, X: int = 10 ** 6):
    g = selstats.sel3_growth_sum(d, X, checkpoints=[10 ** 5, X])
    prime_rel = abs(g.prime_sum / g.prime_target - 1)
    stab = g.stabilization
    return ({"prime_sum": g.prime_sum, "target": g.prime_target, "prime_rel": prime_rel,
             "stabilization": stab},
            prime_rel <= 0.10 and abs(stab - 1) <= 0.20, "prime sum 10%, ratio +-20%", 300.0)


def check_11(samples: int = 20, seed: int = 11):
    rng = random.Random(seed)
    bad = done = 0
    while done < samples:
        d = rng.choice([2, 3, 5, 7, -1, -2, -5, 10, 16, -432 // 16])
        p = rng.choice([int(q) for q in sympy.primerange(3 * abs(d) + 1, 400) if q % 3 == 2])
        # cofactors are 1 mod 3, so never equal to p
        n = p ** rng.choice([1, 2]) * rng.choice([1, 7, 13, 19])
        f = selstats.sel3_local_factors(d, n).get(p)
        bad += f != selstats.tamagawa_ratio(d, n, p)
        done += 1
    return {"samples": done, "failures": bad}, bad == 0, "exact", math.inf


def check_12():
    out = {}
    ok = True
    for p in (2, 5, 7, 11, 13):
        exact = localdata.padic_quadric_density(p, 1)
        brute = Fraction(localdata.quadric_count_bruteforce(p), p ** 7)
        out[f"p={p}"] = str(exact)
        ok = ok and exact == brute
    return out, ok, "exact", 120.0


def check_13():
    p6 = curves.rational_point_search(-432, 6, 50)
    p13 = curves.rational_point_search(-432, 13, 50)
    ok6 = p6 is not None and p6.model == "cubic" and all(c.denominator == 21 for c in p6.coords)
    ok13 = p13 is not None and p13.model == "cubic" and \
        set(p13.coords) == {Fraction(7, 3), Fraction(2, 3)}
    return ({"n=6": [str(c) for c in p6.coords] if p6 else None,
             "n=13": [str(c) for c in p13.coords] if p13 else None},
            ok6 and ok13, "points found", 10.0)


def check_14(d: int = -432, X: int = 2000):
    r = selstats.selmer_local_triviality_average(d, X=X)
    a = r["final_average"]
    return {"curves": r["checkpoints"][-1]["curves"], "average": a}, 1.5 <= a <= 2.5, "[1.5, 2.5]", math.inf


CRITERIA: list = [
    (1, "normalization A1(v_n)=0, A3(v_n)=n", check_1),
    (2, "invariance under random words", check_2),
    (3, "quartic relations on Y", check_3),
    (4, "main-term reproduction", check_4),
    (5, "average 2-Selmer d=16", check_5),
    (6, "p-parity consistency", check_6),
    (7, "root-number calibration", check_7),
    (8, "equidistribution", check_8),
    (9, "squarefree in progressions", check_9),
    (10, "3-Selmer growth d=2", check_10),
    (11, "Tamagawa-ratio oracle", check_11),
    (12, "local density exactness", check_12),
    (13, "point-search witnesses", check_13),
    (14, "local-triviality average", check_14),
]


def run_check(cid: int) -> CheckResult:
    _, name, fn = CRITERIA[cid - 1]
    t0 = time.time()
    values, ok, tol, budget = fn()
    elapsed = time.time() - t0
    within = elapsed <= budget
    if not within:
        values["over_budget"] = True
    return CheckResult(cid, name, ok and within, values, tol, elapsed, budget)


def run_all(ids=None, echo: Callable = print) -> list:
    results = []
    for cid, _, _ in CRITERIA:
        if ids and cid not in ids:
            continue
        res = run_check(cid)
        if echo:
            echo(res.line())
        results.append(res)
    return results
