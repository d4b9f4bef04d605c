"""Command-line front end.

    inkspan solve --alg {exact,constant,ptas,lp-strong,lp-weak} --input F [--eps E] [--threads K] [--out F2]
    inkspan gen gap --k K --m M [--out F]
    inkspan gen 3partition --file A [--out F]
    inkspan gen random --n N --t T --seed S [--fill F] [--out F]
    inkspan evaluate --input F --schedule S
    inkspan compare --alg A [--alg B ...] [--eps E] [--out CSV] F [F ...]

Exit codes: 0 success, 1 compare found a violation, 2 usage or bad
input, 3 size or LP budget exceeded, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .constant_factor import solve_constant_factor
from .errors import InkspanError
from .generators import gen_3partition, gen_gap_family, gen_random
from .model import (
    AlgoResult,
    Instance,
    check_feasible,
    evaluate,
    instance_to_json,
    load_instance,
    schedule_from_json,
)
from .oracle import brute_force
from .ptas import solve_ptas
from .relaxation import relaxation_value

log = logging.getLogger("inkspan")

ALGORITHMS = ("exact", "constant", "ptas", "lp-strong", "lp-weak")
COMPARE_COLUMNS = ("instance", "algorithm", "value", "opt", "ratio", "claimed_factor",
                   "wall_time", "violation")
RATIO_TOL = 1e-6


class UsageError(InkspanError):
    exit_code = 2


def _emit(payload: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)


def _run(alg: str, inst: Instance, eps: Optional[Fraction], threads: int) -> AlgoResult:
    if alg == "exact":
        return brute_force(inst)
    if alg == "constant":
        return solve_constant_factor(inst, threads=threads)
    if alg == "ptas":
        if eps is None:
            raise UsageError("--alg ptas needs --eps")
        return solve_ptas(inst, eps, threads=threads)
    raise UsageError(f"unknown algorithm {alg!r}")


def _eps(raw: Optional[str]) -> Optional[Fraction]:
    if raw is None:
        return None
    try:
        eps = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--eps {raw!r} is not a number") from None
    if not 0 < eps < 1:
        raise UsageError("--eps must lie in (0, 1)")
    return eps


def cmd_solve(args) -> int:
    inst = load_instance(args.input)
    if args.alg in ("lp-strong", "lp-weak"):
        value = relaxation_value(inst, strengthened=args.alg == "lp-strong")
        payload = {"algorithm": args.alg, "value": value}
    else:
        payload = _run(args.alg, inst, _eps(args.eps), args.threads).to_json(inst)
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _read_ints(path: str) -> list[int]:
    text = Path(path).read_text(encoding="utf-8").replace(",", " ")
    try:
        return [int(tok) for tok in text.split()]
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from None


def cmd_gen(args) -> int:
    if args.family == "gap":
        inst = gen_gap_family(args.k, args.m)
        extra = {}
    elif args.family == "3partition":
        inst, target = gen_3partition(_read_ints(args.file))
        extra = {"target": int(target) if target.denominator == 1 else str(target)}
    else:
        inst = gen_random(args.n, args.t, args.seed, fill_factor=args.fill)
        extra = {}
    data = instance_to_json(inst)
    data.update(extra)
    _emit(json.dumps(data, indent=2) + "\n", args.out)
    return 0


def cmd_evaluate(args) -> int:
    inst = load_instance(args.input)
    with open(args.schedule, encoding="utf-8") as fh:
        raw = json.load(fh)
    # accept either a bare schedule or a full solve result
    sched = schedule_from_json(inst, raw.get("schedule", raw))
    report = check_feasible(inst, sched)
    out = {
        "value": str(evaluate(inst, sched)),
        "feasible": report.feasible,
        "violations": [list(v) for v in report.violations],
    }
    _emit(json.dumps(out, indent=2, default=str) + "\n", args.out)
    return 0


def compare_rows(paths: Sequence[str], algs: Sequence[str], eps: Optional[Fraction],
                 threads: int = 1) -> list[dict]:
    rows = []
    for path in paths:
        inst = load_instance(path)
        opt = brute_force(inst).value
        for alg in algs:
            start = time.perf_counter()
            res = _run(alg, inst, eps, threads)
            elapsed = time.perf_counter() - start
            ratio = float(res.value / opt) if opt > 0 else 1.0
            claimed = res.claimed_factor
            bad = (not check_feasible(inst, res.schedule)
                   or (claimed is not None and ratio < float(claimed) * (1 - RATIO_TOL)))
            rows.append({
                "instance": Path(path).name,
                "algorithm": alg,
                "value": str(res.value),
                "opt": str(opt),
                "ratio": f"{ratio:.6f}",
                "claimed_factor": "" if claimed is None else str(claimed),
                "wall_time": f"{elapsed:.3f}",
                "violation": int(bad),
            })
    return rows


def cmd_compare(args) -> int:
    algs = args.alg or ["exact", "constant"]
    for a in algs:
        if a not in ("exact", "constant", "ptas"):
            raise UsageError(f"compare supports exact, constant and ptas, not {a!r}")
    rows = compare_rows(args.inputs, algs, _eps(args.eps), args.threads)
    if args.out:
        fh = open(args.out, "w", newline="", encoding="utf-8")
    else:
        fh = sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=COMPARE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    flagged = [r for r in rows if r["violation"]]
    for r in flagged:
        log.error("violation: %s on %s (ratio %s, claimed %s)",
                  r["algorithm"], r["instance"], r["ratio"], r["claimed_factor"])
    return 1 if flagged else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="inkspan", description="Incremental knapsack solvers.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("--alg", choices=ALGORITHMS, required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--eps")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="write an instance")
    gsub = g.add_subparsers(dest="family", required=True)
    gg = gsub.add_parser("gap")
    gg.add_argument("--k", type=int, required=True)
    gg.add_argument("--m", type=int, required=True)
    gp = gsub.add_parser("3partition")
    gp.add_argument("--file", required=True, help="whitespace or comma separated integers")
    gr = gsub.add_parser("random")
    gr.add_argument("--n", type=int, required=True)
    gr.add_argument("--t", type=int, required=True)
    gr.add_argument("--seed", type=int, required=True)
    gr.add_argument("--fill", type=float, default=0.5)
    for q in (gg, gp, gr):
        q.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("evaluate", help="value and feasibility of a schedule")
    e.add_argument("--input", required=True)
    e.add_argument("--schedule", required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("compare", help="ratio table against the exact optimum")
    c.add_argument("inputs", nargs="*")
    c.add_argument("--alg", action="append", choices=("exact", "constant", "ptas"))
    c.add_argument("--eps")
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except InkspanError as e:
        print(f"inkspan: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except FileNotFoundError as e:
        print(f"inkspan: {e}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, json.JSONDecodeError) as e:
        print(f"inkspan: bad input: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
