"""Command line entry point ``rho-select``.

Subcommands::

    rho-select simulate <config> [--out data.csv]
    rho-select select   <config> [--data data.csv] [--out report.json]
    rho-select rate     <config> [--out-prefix study]
    rho-select vc       <config>
    rho-select weights  <config>

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, load_config
from .expfam import NumericalError
from .io import dataset_to_csv, read_dataset
from .models.menu import enumerate_menu
from .simulate import covariate_dim, generate, rate_study, run_selection

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_simulate(args):
    cfg = load_config(args.config)
    _emit(dataset_to_csv(generate(cfg)), args.out)


def _cmd_select(args):
    cfg = load_config(args.config)
    data = None
    if args.data:
        try:
            data = read_dataset(args.data)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read data: {exc}") from exc
    report = run_selection(cfg, data=data)
    _emit(report.to_json(timing=args.timing) + "\n", args.out)


def _cmd_rate(args):
    cfg = load_config(args.config)
    study = rate_study(cfg)
    if args.out_prefix:
        Path(f"{args.out_prefix}.csv").write_text(study.to_csv())
        Path(f"{args.out_prefix}.json").write_text(json.dumps(study.to_dict(), indent=2, sort_keys=True) + "\n")
    summary = {"n_grid": study.n_grid, "median_risk": study.medians, "slope": study.slope}
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")


def _menu_table(cfg, column: str) -> str:
    entries = enumerate_menu(cfg.menu, covariate_dim(cfg))
    lines = [f"model,kind,{column}"]
    for e in entries:
        value = e.V if column == "V" else e.delta
        lines.append(f"\"{e.label}\",{e.kind},{value:.10g}")
    return "\n".join(lines) + "\n"


def _cmd_vc(args):
    _emit(_menu_table(load_config(args.config), "V"), args.out)


def _cmd_weights(args):
    _emit(_menu_table(load_config(args.config), "delta"), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rho-select", description="Penalized rho-type model selection experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a dataset from the scenario and print it as CSV")
    p.add_argument("config")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("select", help="run the selection procedure and print the risk report as JSON")
    p.add_argument("config")
    p.add_argument("--data", help="CSV with columns w1..wd,y; replaces the simulated sample")
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true", help="include wall time (makes the report non-reproducible)")
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("rate", help="risk-versus-n study; writes CSV and JSON tables")
    p.add_argument("config")
    p.add_argument("--out-prefix")
    p.set_defaults(func=_cmd_rate)

    for name, func, what in (("vc", _cmd_vc, "VC bounds"), ("weights", _cmd_weights, "model weights")):
        p = sub.add_parser(name, help=f"print the {what} of the configured menu as CSV")
        p.add_argument("config")
        p.add_argument("--out")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # ConfigError and invalid menu or model values alike
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
