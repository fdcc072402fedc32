"""Command-line front end: ``tsbitlab <command> ...``.

Exit codes: 0 on success, 1 when a verification fails, 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from fractions import Fraction

from .beta_math import TailSumQuery, exp_sum, exp_sum_bounds, tail_sum
from .experiments import best_case_violations, k_grid, scan_best, scan_worst, write_csv
from .mc_sim import monte_carlo
from .oracle import BudgetError, enumerate_extremal, verify_swap_lemma, verify_worst_characterization
from .prediction import BitSequence, TradeoffParameter, regret
from .sequences import decompose, gen_best, gen_worst

SEED_ENV = "TSBITLAB_SEED"


class UsageError(Exception):
    pass


def _q_arg(text: str) -> TradeoffParameter:
    try:
        return TradeoffParameter.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _seq_arg(text: str) -> BitSequence:
    try:
        return BitSequence.from_string(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return format(value, ".17g")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}")


def cmd_regret(args) -> int:
    res = regret(args.seq, args.q, args.mode)
    print(f"regret = {_fmt(res.regret)}")
    print(f"expected_loss = {_fmt(res.expected_loss)}")
    print(f"static_benchmark = {_fmt(res.static_benchmark)}")
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "bit", "error_prob"])
            for t, (bit, p) in enumerate(zip(args.seq, res.per_step_error_prob), start=1):
                w.writerow([t, bit, _fmt(p)])
    return 0


def cmd_worst(args) -> int:
    seq = gen_worst(args.T, args.k, args.q, args.tie)
    print(seq)
    return 0


def cmd_best(args) -> int:
    print(gen_best(args.T, args.k, args.q))
    return 0


def _print_failure(res) -> None:
    print(f"FAIL: {res.message}")
    print(f"counterexample: {res.counterexample}  regret = {res.counterexample_regret}")
    print(f"compared with:  {res.reference}  regret = {res.reference_regret}")


def cmd_brute(args) -> int:
    report = enumerate_extremal(args.T, args.k, args.q, args.limit)
    print(f"scanned {report.sequences_scanned} sequences (T={args.T}, k={args.k}, q={args.q})")
    print(f"max regret = {report.max_regret}")
    print("argmax: {" + ", ".join(map(str, report.sorted_argmax())) + "}")
    print(f"min regret = {report.min_regret}")
    print("argmin: {" + ", ".join(map(str, report.sorted_argmin())) + "}")
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sequence", "regret", "worst_case"])
            for s in sorted(report.regrets):
                w.writerow([s, report.regrets[s], int(decompose(s, args.q).is_worst_case)])
    if args.q.value in (0, 1):
        return 0
    res = verify_worst_characterization(args.T, args.k, args.q, args.limit)
    if not res.ok:
        _print_failure(res)
        return 1
    print("worst-case characterization: OK")
    return 0


def cmd_check_swap(args) -> int:
    res = verify_swap_lemma(args.T, args.q)
    if not res.ok:
        _print_failure(res)
        return 1
    print(f"swap rule: OK ({res.checked} swaps checked)")
    return 0


def cmd_simulate(args) -> int:
    seed = _seed(args)
    est = monte_carlo(args.seq, args.q, args.trials, seed)
    exact = regret(args.seq, args.q, "float").expected_loss
    print(f"mean loss = {_fmt(est.mean)}  stderr = {_fmt(est.stderr)}  trials = {est.trials}  seed = {seed}")
    print(f"exact expected loss = {_fmt(exact)}")
    return 0


def cmd_scan(args) -> int:
    ks = k_grid(args.kmin, args.kmax, args.steps)
    if args.kind == "worst":
        rows = scan_worst(args.q, ks, pad=args.pad, tie_choice=args.tie,
                          workers=args.workers, timing=args.timing)
    else:
        if args.T is None:
            raise UsageError("scan --kind best needs --T")
        if ks[-1] > args.T:
            raise UsageError("kmax must not exceed T")
        rows = scan_best(args.q, args.T, ks, workers=args.workers, timing=args.timing)
    print(f"{'k':>8} {'T':>9} {'regret':>22} {'regret/sqrt':>22}")
    for r in rows:
        print(f"{r.k:>8} {r.T:>9} {r.regret:>22.15g} {r.regret_over_sqrt:>22.15g}")
    if args.out:
        write_csv(rows, args.out)
    if args.kind == "best":
        bad = best_case_violations(rows)
        if bad:
            for r in bad:
                print(f"FAIL: best-case regret {r.regret!r} > 1 at T={r.T}, k={r.k}")
            return 1
    return 0


def cmd_tailsum(args) -> int:
    p = float(Fraction(args.p))
    res = tail_sum(TailSumQuery(args.n, p, args.terms))
    print(f"sum_(i>={res.start}) F_beta(i+1,{args.n + 1})({args.p}) = {_fmt(res.value)}")
    print(f"terms used = {res.terms_used}  truncation bound = {_fmt(res.truncation_bound)}")
    print(f"ratio to sqrt(n) = {_fmt(res.value / math.sqrt(args.n))}")
    e = exp_sum(args.n)
    lo, hi = exp_sum_bounds(args.n)
    print(f"exp series = {_fmt(e)}  bounds [{_fmt(lo)}, {_fmt(hi)}]")
    return 0


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tsbitlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regret", help="expected regret of TS(q) on a sequence")
    p.add_argument("--seq", type=_seq_arg, required=True)
    p.add_argument("--q", type=_q_arg, required=True)
    p.add_argument("--mode", choices=["float", "rational"], default="float")
    p.add_argument("--csv", help="write per-step error probabilities here")
    p.set_defaults(func=cmd_regret)

    p = sub.add_parser("worst", help="canonical worst-case sequence")
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--k", type=_nonneg, required=True)
    p.add_argument("--q", type=_q_arg, required=True)
    p.add_argument("--tie", type=int, choices=[0, 1], default=0)
    p.set_defaults(func=cmd_worst)

    p = sub.add_parser("best", help="low-regret sequence 1^n 0^m or 0^m 1^n")
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--k", type=_nonneg, required=True)
    p.add_argument("--q", type=_q_arg, required=True)
    p.set_defaults(func=cmd_best)

    p = sub.add_parser("brute", help="exact brute force over all sequences with k zeros")
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--k", type=_nonneg, required=True)
    p.add_argument("--q", type=_q_arg, required=True)
    p.add_argument("--limit", type=_positive, default=2_000_000)
    p.add_argument("--csv", help="write every sequence and its exact regret here")
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("check-swap", help="exhaustive check of the swap rule")
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--q", type=_q_arg, required=True)
    p.set_defaults(func=cmd_check_swap)

    p = sub.add_parser("simulate", help="Monte-Carlo estimate of the expected loss")
    p.add_argument("--seq", type=_seq_arg, required=True)
    p.add_argument("--q", type=_q_arg, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV}, then 0")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", help="regret sweep over k, written as CSV")
    p.add_argument("--q", type=_q_arg, required=True)
    p.add_argument("--kmin", type=_nonneg, required=True)
    p.add_argument("--kmax", type=_nonneg, required=True)
    p.add_argument("--steps", type=_positive, default=9)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--kind", choices=["worst", "best"], default="worst")
    p.add_argument("--T", type=_positive, help="sequence length for --kind best")
    p.add_argument("--pad", type=_nonneg, default=0, help="worst: T = 2k + pad")
    p.add_argument("--tie", type=int, choices=[0, 1], default=0)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--timing", action="store_true", help="fill the wall_time_ms column")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("tailsum", help="Beta CDF tail sum and its exponential series")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--p", default="1/2")
    p.add_argument("--terms", type=_positive, default=1_000_000)
    p.set_defaults(func=cmd_tailsum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, BudgetError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
