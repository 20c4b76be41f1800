"""Command-line entry point.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from netpredict import pipeline
from netpredict.config import load_config
from netpredict.errors import ConfigError, DataError, NumericError, StageError
from netpredict.synth import SynthSpec, generate, write_dataset

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

COMMANDS = {
    "metrics": pipeline.run_metrics,
    "regress": pipeline.run_regress,
    "combine": pipeline.run_combine,
    "arima": pipeline.run_arima,
    "report": pipeline.run_report,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netpredict", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    synth = sub.add_parser("synth", help="write a synthetic minute-bar dataset")
    synth.add_argument("out", help="output directory")
    synth.add_argument("--tickers", type=int, default=SynthSpec.n_tickers)
    synth.add_argument("--minutes", type=int, default=SynthSpec.n_minutes)
    synth.add_argument("--regimes", type=int, default=SynthSpec.n_regimes)
    synth.add_argument("--seed", type=int, default=SynthSpec.seed)

    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} stage" if name != "report" else "run every stage")
        p.add_argument("-c", "--config", help="JSON config file")
        p.add_argument("--data", help="input directory")
        p.add_argument("--output", help="output directory")
        p.add_argument("--index-name", dest="index_name")
        p.add_argument("--window-length", dest="window_length", type=int)
        p.add_argument("--target-lag", dest="target_lag", type=int)
        p.add_argument("--workers", type=int)
    return parser


def _exit_code(exc: BaseException) -> int:
    cause = exc.cause if isinstance(exc, StageError) else exc
    if isinstance(cause, ConfigError):
        return EXIT_USAGE
    if isinstance(cause, DataError):
        return EXIT_DATA
    return EXIT_NUMERIC


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            spec = SynthSpec(n_tickers=args.tickers, n_minutes=args.minutes, n_regimes=args.regimes, seed=args.seed)
            write_dataset(generate(spec), args.out, spec)
            return EXIT_OK
        overrides = {k: getattr(args, k) for k in
                     ("data", "output", "index_name", "window_length", "target_lag", "workers")}
        cfg = load_config(args.config, overrides)
        COMMANDS[args.command](cfg)
    except (ConfigError, DataError, NumericError, StageError, ValueError) as exc:
        print(f"netpredict {args.command}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
