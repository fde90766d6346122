"""Command-line interface: `cubictwists <command> [options]`.

Every JSON artifact embeds the resolved configuration and a hash of the
package sources, so identical config + code gives identical output.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import acceptance, localdata, orbits, rootnum, selstats
from .forms_core import CubicPair, a1_invariant, a3_invariant, classical_invariants, resultant_quartic

PRIMARY_COMMANDS = ("invariants", "enumerate", "densities", "sel2", "rootnum", "equidist",
                    "sel3-growth", "report")


class ConfigError(ValueError):
    pass


def code_hash() -> str:
    h = hashlib.sha256()
    root = Path(__file__).resolve().parent
    for path in sorted(root.glob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "resume")}
    return {"command": args.command, **cfg}


def _atomic_write(path, text: str):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _emit(args, payload: dict, text_lines):
    doc = {"config": _config(args), "code_hash": code_hash(), "result": payload}
    body = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    if args.out:
        _atomic_write(args.out, body)
    for line in text_lines:
        print(line)
    if not args.out and args.json:
        print(body, end="")


def _table(rows, cols) -> list:
    widths = [max(len(str(c)), *(len(str(r.get(c, ""))) for r in rows)) for c in cols]
    out = ["  ".join(str(c).rjust(w) for c, w in zip(cols, widths))]
    for r in rows:
        out.append("  ".join(str(_short(r.get(c, ""))).rjust(w) for c, w in zip(cols, widths)))
    return out


def _short(v):
    return f"{v:.6g}" if isinstance(v, float) else v


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise ConfigError(f"`{args.command}` needs --{name.replace('_', '-')}")


def _sigma(args):
    if not args.sigma:
        return None
    try:
        return localdata.AcceptableSet.parse(args.sigma)
    except Exception as exc:
        raise ConfigError(f"bad --sigma {args.sigma!r}: {exc}; expected e.g. '2^2:1|3,default:v<=1'")


def _tables(d):
    path = os.environ.get("CUBICTWISTS_ROOTNUM_TABLE")
    if path and Path(path).exists():
        t = rootnum.RootNumberTable.from_json(Path(path).read_text())
        if t.d == d:
            rootnum.register_table(t)
            return t
    return acceptance.ensure_table(d)


# -- commands -----------------------------------------------------------------------

def cmd_invariants(args):
    if args.pair:
        v = CubicPair(*args.pair)
    else:
        v = CubicPair.parse(sys.stdin.readline())
    a1 = a1_invariant(v)
    a3 = a3_invariant(v)
    H, Delta = classical_invariants(v)
    f = resultant_quartic(v)
    payload = {"pair": list(v), "A1": a1, "A3": a3, "H": H, "Delta": Delta, "quartic": list(f)}
    _emit(args, payload, [f"A1={a1}", f"A3={a3}", f"H={H}", f"Delta={Delta}", f"quartic={f}"])


def cmd_enumerate(args):
    _need(args, "xmax")
    if args.resume and args.out and Path(args.out).exists():
        inv = orbits.OrbitInventory.load(args.out)
        if inv.xmax == args.xmax and inv.box_constant == args.box_constant:
            print(f"{args.out}: complete ({len(inv)} orbits), nothing to do")
            return 0
    n_irr, n_red, inv = orbits.count_orbits(args.xmax, box_constant=args.box_constant)
    lines = [f"X={args.xmax} irreducible={n_irr} reducible={n_red} orbits={len(inv)}"]
    if args.out:
        tmp = args.out + ".tmp"
        inv.dump(tmp, version=code_hash())
        os.replace(tmp, args.out)
    for line in lines:
        print(line)
    return 0


def cmd_densities(args):
    primes = [int(p) for p in localdata.sympy.primerange(2, args.primes_upto + 1)]
    reports = localdata.density_report(primes, level=args.level)
    rows = [{"p": r.place, "level": r.level, "density": float(r.density), "exact": r.exact}
            for r in reports]
    payload = {"densities": [r.to_json() for r in reports],
               "product": localdata.density_product(args.primes_upto, args.level),
               "archimedean_volume": localdata.archimedean_volume(),
               "jacobian_constant": str(localdata.jacobian_constant()),
               "main_term_constant": localdata.main_term_constant(args.primes_upto, args.level)}
    lines = _table(rows, ["p", "level", "density", "exact"])
    lines.append(f"product={payload['product']:.6g} volume={payload['archimedean_volume']:.6g} "
                 f"main_term={payload['main_term_constant']:.6g}")
    _emit(args, payload, lines)


def cmd_sel2(args):
    _need(args, "d")
    if args.n is not None:
        r = selstats.sel2_count(args.d, args.n, budget=args.budget, guard=not args.no_guard)
        payload = r.as_dict()
        try:
            payload["w"] = rootnum.root_number(args.d, args.n, _tables(args.d))
        except rootnum.NotCalibrated:
            pass
        _emit(args, payload, [f"d={args.d} n={args.n} sel2={r.sel2_size} "
                              f"orbits={r.raw_orbit_count} undecided={r.undecided}"])
        return 0
    _need(args, "xmax")
    if args.xmax > args.budget:
        raise ConfigError(f"--xmax {args.xmax} exceeds --budget {args.budget}")
    sigma = _sigma(args)
    csv_path = (args.out + ".csv") if args.out else None
    done = selstats.read_csv(csv_path) if (args.resume and csv_path and Path(csv_path).exists()) else None
    reports, skipped = selstats.curve_reports(args.d, args.xmax, sigma, done=done)
    _tables(args.d)
    signs = {r.n: rootnum.root_number(args.d, r.n) for r in reports}
    avg = selstats.average_sel2(args.d, sigma, args.xmax, reports=reports)
    avg["skipped_guard"] = skipped
    par = selstats.parity_check(args.d, reports)
    ranks = selstats.rank_proportion_report(args.d, reports)
    if csv_path:
        tmp = csv_path + ".tmp"
        selstats.write_csv(tmp, args.d, reports, signs)
        os.replace(tmp, csv_path)
    payload = {"average": avg, "parity": par, "rank_proportions": ranks}
    lines = _table(avg["checkpoints"], ["X", "curves", "decided", "average"])
    lines.append(f"parity: checked={par['checked']} mismatches={len(par['mismatches'])}")
    _emit(args, payload, lines)
    return 0 if not par["mismatches"] else 1


def cmd_rootnum(args):
    _need(args, "d")
    if args.n is not None:
        oracle = rootnum.analytic_root_number(args.d * args.n * args.n, detail=True)
        payload = {"d": args.d, "n": args.n, "oracle": oracle.w,
                   "residuals": [oracle.residual_plus, oracle.residual_minus],
                   "conductor": oracle.conductor}
        try:
            payload["formula"] = rootnum.root_number(args.d, args.n, _tables(args.d))
        except (rootnum.NotCalibrated, rootnum.CoverageGap):
            pass
        _emit(args, payload, [f"w_{{{args.d},{args.n}}} = {oracle.w:+d} (N={oracle.conductor})"])
        return 0
    table = rootnum.calibrate_g_d(args.d)
    payload = json.loads(table.to_json())
    _emit(args, payload, [f"d={args.d}: {len(table)} classes calibrated"])
    return 0


def cmd_equidist(args):
    _need(args, "d", "xmax")
    _tables(args.d)
    rows = []
    for r in range(args.modulus):
        s = rootnum.equidist_sum(args.d, args.modulus, r, args.xmax)
        rows.append({"r": r, "sum": s, "normalized": s / args.xmax})
    payload = {"d": args.d, "X": args.xmax, "m": args.modulus, "sums": rows}
    _emit(args, payload, _table(rows, ["r", "sum", "normalized"]))


def cmd_sel3_growth(args):
    _need(args, "d", "xmax")
    g = selstats.sel3_growth_sum(args.d, args.xmax)
    rows = [{"X": x, "S": s, "ratio": r} for x, s, r in zip(g.checkpoints, g.sums, g.ratios)]
    lines = _table(rows, ["X", "S", "ratio"])
    lines.append(f"xi={g.xi:.4g} prime_sum={g.prime_sum:.6g} target={g.prime_target:.6g} "
                 f"stabilization={g.stabilization:.4g}")
    _emit(args, g.as_dict(), lines)


def cmd_report(args):
    ids = [int(x) for x in args.only.split(",")] if args.only else None
    results = acceptance.run_all(ids)
    ok = all(r.passed for r in results)
    payload = {"passed": ok, "criteria": [r.as_dict() for r in results]}
    _emit(args, payload, [f"overall: {'PASS' if ok else 'FAIL'} "
                          f"({sum(r.passed for r in results)}/{len(results)})"])
    return 0 if ok else 1


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--xmax", type=int)
    common.add_argument("--sigma", help="acceptable set, e.g. '2^2:1|3,default:v<=1'")
    common.add_argument("--primes-upto", type=int, default=100)
    common.add_argument("--level", type=int, default=2)
    common.add_argument("--box-constant", type=float, default=orbits.DEFAULT_BOX_CONSTANT)
    common.add_argument("--budget", type=int, default=selstats.DEFAULT_BUDGET)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="write the JSON (and CSV/inventory) artifact here")
    common.add_argument("--resume", action="store_true")
    common.add_argument("--no-guard", action="store_true", help="allow n outside the guard set (sel2 --n)")
    common.add_argument("--json", action="store_true", help="also print the JSON document")

    parser = argparse.ArgumentParser(prog="cubictwists", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("invariants", parents=[common], help="A1, A3, H, Delta and quartic of a pair")
    p.add_argument("pair", nargs="*", type=int)
    p.set_defaults(func=cmd_invariants)
    sub.add_parser("enumerate", parents=[common], help="build an orbit inventory").set_defaults(func=cmd_enumerate)
    sub.add_parser("densities", parents=[common], help="local densities and main term").set_defaults(func=cmd_densities)
    sub.add_parser("sel2", parents=[common], help="2-Selmer size or family average").set_defaults(func=cmd_sel2)
    sub.add_parser("rootnum", parents=[common], help="root number or calibration").set_defaults(func=cmd_rootnum)
    p = sub.add_parser("equidist", parents=[common], help="root-number sums in progressions")
    p.add_argument("--modulus", type=int, default=9)
    p.set_defaults(func=cmd_equidist)
    sub.add_parser("sel3-growth", parents=[common], help="partial sums of 3^(alpha-beta)").set_defaults(func=cmd_sel3_growth)
    p = sub.add_parser("report", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", help="comma-separated criterion ids")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "invariants" and args.pair and len(args.pair) != 8:
        parser.error("invariants takes exactly eight integers r1..r8")
    try:
        rc = args.func(args)
    except ConfigError as exc:
        parser.error(str(exc))
    except (selstats.GuardViolated, selstats.BudgetExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
