"""Command line entry point.

Exit status: 0 when the experiment passes, 1 when it fails, 2 on usage
errors (bad flags, bad config values, unknown ids).
"""

from __future__ import annotations

import argparse
import sys
import time
from importlib.metadata import PackageNotFoundError, version

from .corpus import describe
from .experiments import ExperimentConfig, run_experiment

SUBCOMMANDS = {
    "bound-uni": ("bound_univariate", "univariate overiterate bound"),
    "bound-tensor": ("bound_tensor", "d-variate overiterate bound with partial moduli"),
    "contraction": ("contraction", "contraction constant on vertex-sharing node data"),
    "converge": ("converge_to_L", "geometric convergence of T^n f to L f"),
    "zhuk": ("zhuk_lemma1", "the two Zhuk smoothing inequalities"),
    "optimality": ("optimality_dlinear", "vanishing moduli and deviation on multilinear fields"),
}

DEFAULT_FUNCTIONS = {
    "bound_univariate": "e2",
    "bound_tensor": "e2x",
    "contraction": "random_grid",
    "converge_to_L": "e2",
    "zhuk_lemma1": "e2",
    "optimality_dlinear": "multilinear",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--fn", dest="function_id", help="corpus function id")
    p.add_argument("--degree", type=int, help="univariate degree l")
    p.add_argument("--power", type=int, help="univariate power k")
    p.add_argument("--degrees", type=_int_list, help="per-axis degrees, e.g. 5,3")
    p.add_argument("--powers", type=_int_list, help="per-axis powers, e.g. 10,4")
    p.add_argument("--constant", type=float, help="constant in front of the moduli (default 2.25)")
    p.add_argument("--resolution", dest="eval_resolution", type=int, help="evaluation points per axis")
    p.add_argument("--moduli", dest="moduli_mode", choices=("analytic", "grid"))
    p.add_argument("--seed", type=int)
    p.add_argument("--h", dest="h_values", type=_float_list, help="smoothing steps, e.g. 0.1,0.25")
    p.add_argument("--trials", type=int)
    p.add_argument("--window", dest="fit_window", type=_int_list, help="fit window lo,hi")
    p.add_argument("--modulus-resolution", type=int)
    p.add_argument("--scan-points", type=int)
    p.add_argument("--out", help="write the JSON report here (default: stdout)")
    p.add_argument("--csv", help="also write the per-point CSV table here")
    p.add_argument("--no-meta", action="store_true", help="omit timestamps and timings from the JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bernover", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, text) in SUBCOMMANDS.items():
        _add_experiment_flags(sub.add_parser(name, help=text))
    sub.add_parser("corpus-list", help="list corpus function ids")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    experiment = SUBCOMMANDS[args.command][0]
    overrides = {
        key: getattr(args, key)
        for key in (
            "function_id", "constant", "eval_resolution", "moduli_mode", "seed", "h_values",
            "trials", "fit_window", "modulus_resolution", "scan_points",
        )
    }
    if args.degrees is not None and args.degree is not None:
        raise UsageError("give either --degree or --degrees, not both")
    if args.powers is not None and args.power is not None:
        raise UsageError("give either --power or --powers, not both")
    overrides["degrees"] = args.degrees or ([args.degree] if args.degree is not None else None)
    overrides["powers"] = args.powers or ([args.power] if args.power is not None else None)
    base = {"experiment": experiment}
    if args.config:
        config = ExperimentConfig.from_json(args.config, **overrides)
        if config.experiment != experiment:
            raise UsageError(f"config is for {config.experiment!r}, not {experiment!r}")
        return config
    base["function_id"] = DEFAULT_FUNCTIONS[experiment]
    return ExperimentConfig.from_dict(base, **overrides)


def _meta(elapsed: float) -> dict:
    try:
        pkg_version = version("artifact")
    except PackageNotFoundError:
        pkg_version = "unknown"
    return {
        "version": pkg_version,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "elapsed_seconds": round(elapsed, 6),
    }


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "corpus-list":
            for key, text in describe().items():
                print(f"{key}\t{text}")
            return 0
        config = config_from_args(args)
        start = time.perf_counter()
        report = run_experiment(config)
        elapsed = time.perf_counter() - start
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"bernover: error: {exc}", file=sys.stderr)
        return 2

    text = report.to_json(None if args.no_meta else _meta(elapsed))
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(report.to_csv())
    status = "PASS" if report.passed else "FAIL"
    print(f"{config.experiment}: {status} (max_lhs={report.max_lhs:.6g}, min_margin={report.min_margin:.6g})",
          file=sys.stderr)
    return 0 if report.passed else 1


cli_main = main


if __name__ == "__main__":
    sys.exit(main())
