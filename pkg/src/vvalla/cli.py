"""Command-line entry point.

    vvalla COMMAND [DOCUMENT] [flags]     run a command over a problem document
    vvalla replay RUN_DIR                 re-execute a stored run and compare bytes

Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 input error,
3 a heuristic window was exhausted (unstabilized).
"""

import argparse
import logging
import sys

from .errors import InputError
from .experiments import runner
from .experiments.checks import RunConfig
from .experiments.corpus import bundled_corpus_path

STATUS_EXIT = {"pass": runner.EXIT_OK, "fail": runner.EXIT_FAIL, "unstable": runner.EXIT_UNSTABLE,
               "mismatch": runner.EXIT_FAIL, "incomplete": runner.EXIT_UNSTABLE}


def build_parser():
    ap = argparse.ArgumentParser(prog="vvalla", description="Valabrega-Valla modules and friends")
    ap.add_argument("command", choices=runner.COMMANDS + ("replay",))
    ap.add_argument("target", nargs="?", help="problem document (default: bundled corpus) or run dir")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=32, help="superficial sequences per estimate")
    ap.add_argument("--nmax", type=int, default=None, help="top degree scanned by q estimates")
    ap.add_argument("--window", type=int, default=8, help="a_r stabilization window (samples)")
    ap.add_argument("--strategy", choices=("both", "vv", "resolution"), default="both")
    ap.add_argument("--lmax", type=int, default=3, help="largest power in the powers scan")
    ap.add_argument("--r", type=int, default=None, help="restrict to sequences of this length")
    ap.add_argument("--only", action="append", default=[], help="entry key such as ring1.d0")
    ap.add_argument("--out", default="runs", help="directory holding run directories")
    ap.add_argument("--format", choices=("json", "csv", "both"), default="json")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "replay":
        if not args.target:
            runner.echo("replay needs a run directory")
            return runner.EXIT_INPUT
        try:
            same, report = runner.replay(args.target)
        except (OSError, InputError, KeyError) as exc:
            runner.echo(f"cannot replay: {exc}")
            return runner.EXIT_INPUT
        runner.echo(f"replay {'identical' if same else 'DIFFERS'}: {args.target}")
        return STATUS_EXIT[report["status"]] if same else runner.EXIT_FAIL
    if args.samples < 1 or args.window < 1 or args.lmax < 2:
        runner.echo("--samples and --window must be positive and --lmax at least 2")
        return runner.EXIT_INPUT
    path = args.target or bundled_corpus_path()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        runner.echo(f"cannot read {path}: {exc}")
        return runner.EXIT_INPUT
    config = RunConfig(seed=args.seed, samples=args.samples, nmax=args.nmax, window=args.window,
                       strategy=args.strategy, lmax=args.lmax, r=args.r, only=tuple(args.only))

    def progress(rec):
        runner.echo(f"{rec['entry']:<14} {rec['status']}")

    try:
        run_dir, report, status = runner.run_corpus(text, args.command, config, args.out, args.format,
                                                    on_entry=progress)
    except InputError as exc:
        runner.echo(f"input error: {exc}")
        return runner.EXIT_INPUT
    runner.echo(f"{args.command}: {status} -> {run_dir}")
    return STATUS_EXIT[status]


if __name__ == "__main__":
    sys.exit(main())
