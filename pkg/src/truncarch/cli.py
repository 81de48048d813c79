"""Command-line front end: generate sequences, run the grid, re-derive
reports, and run the embedded oracle suite.

Exit codes: 0 success, 1 usage or input error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .experiment import (
    ExperimentConfig,
    rederive_plot_data,
    result_from_raw,
    run_experiment,
    write_summary,
)
from .refsets import FRONT_KINDS, build_sequence, write_sequence


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the contract here reserves 2 for
    runtime failures, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="truncarch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample a front and write a sequence file")
    g.add_argument("--front", required=True, choices=FRONT_KINDS)
    g.add_argument("--n", type=int, required=True, help="number of solutions")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True, help="output sequence file")

    r = sub.add_parser("run", help="run the full benchmark grid from a config")
    r.add_argument("--config", required=True, help="JSON config file")
    r.add_argument("--output", help="override the config's output directory")
    r.add_argument("--workers", type=int, help="override the config's worker count")
    r.add_argument("--quiet", action="store_true", help="suppress per-run progress")

    s = sub.add_parser("stats", help="recompute summary tables from raw results")
    s.add_argument("--results", required=True, help="results directory")
    s.add_argument("--alpha", type=float, default=0.05)

    p = sub.add_parser("plotdata", help="rebuild plot-data files from raw results + archives")
    p.add_argument("--results", required=True, help="results directory")
    p.add_argument("--alpha", type=float, default=0.05)

    t = sub.add_parser("selftest", help="run the embedded oracle suite")
    t.add_argument("--perturb-hv", type=float, default=0.0,
                   help="fault-injection hook: scale hypervolume values by "
                        "(1+x) inside the checks; nonzero must fail")
    return parser


def _cmd_generate(args) -> int:
    seq = build_sequence(args.front, args.n, args.seed, args.seed)
    write_sequence(seq, args.out)
    print(f"wrote {seq.n_solutions} solutions to {args.out}")
    return 0


def _cmd_run(args) -> int:
    try:
        cfg = ExperimentConfig.from_json(args.config)
    except (OSError, ValueError, TypeError) as exc:
        print(f"truncarch run: bad config: {exc}", file=sys.stderr)
        return 1
    overrides = {}
    if args.output is not None:
        overrides["output_dir"] = args.output
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        try:
            cfg = dataclasses.replace(cfg, **overrides)
        except ValueError as exc:
            print(f"truncarch run: bad config: {exc}", file=sys.stderr)
            return 1

    def progress(done, total, outcome):
        rec, fail = outcome
        if fail is not None:
            front, policy, schedule, shuffle, msg = fail
            print(f"[{done}/{total}] {front} {policy} {schedule} "
                  f"shuffle {shuffle} FAILED: {msg}")
        elif not args.quiet:
            print(f"[{done}/{total}] {rec.front} {rec.policy} {rec.schedule} "
                  f"shuffle {rec.shuffle} igd={rec.igd:.4e} ({rec.duration_ms:.0f} ms)")

    result = run_experiment(cfg, progress=progress)
    print()
    print((result.out_dir / "summary.txt").read_text())
    print(f"results in {result.out_dir}")
    if result.failures:
        print(f"{len(result.failures)} runs failed; see failures.csv", file=sys.stderr)
        return 2
    return 0


def _cmd_stats(args) -> int:
    view = result_from_raw(args.results, alpha=args.alpha)
    text = write_summary(view, view.out_dir / "summary.csv", view.out_dir / "summary.txt")
    print(text)
    return 0


def _cmd_plotdata(args) -> int:
    written = rederive_plot_data(args.results, alpha=args.alpha)
    print(f"wrote {len(written)} plot-data files")
    return 0


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    def report(name, passed, detail):
        mark = "ok  " if passed else "FAIL"
        print(f"{mark} {name}" + (f": {detail}" if detail else ""))

    results = run_selftest(perturb_hv=args.perturb_hv, reporter=report)
    failed = [name for name, passed, _ in results if not passed]
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed", file=sys.stderr)
        return 2
    print(f"all {len(results)} checks passed")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "run": _cmd_run,
    "stats": _cmd_stats,
    "plotdata": _cmd_plotdata,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SystemExit:
        raise
    except (OSError, ValueError) as exc:
        print(f"truncarch {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
