"""Command-line entry point.

    pmsam bench   [--runs 20]                 all twelve benchmarks at their reference settings
    pmsam run     --function f1 --algorithm pmsam
    pmsam compare                             logical time of MA vs PMSAM
    pmsam trace                               phase/tick log of the n=20, m=4 scenario
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import clock as clk
from .config import from_flat, parse_config, to_flat
from .errors import ConfigurationError, ContractViolation
from .harness import (
    ExperimentSpec,
    compare_time,
    emit_convergence_csv,
    emit_report_json,
    emit_summary_csv,
    emit_timing_csv,
    run_experiment,
    reference_overrides,
)
from .membrane import run_pmsam
from .objective import builtin_ids, get_objective

SUBCOMMANDS = ("bench", "run", "compare", "trace")
COMPARE_N_VALUES = (20, 40, 80, 160)
TRACE_OVERRIDES = {"n": 20, "m": 4, "n_max": 1}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigurationError(message)


@dataclass
class CliConfig:
    subcommand: str
    config_path: str | None = None
    overrides: list[str] = field(default_factory=list)
    output_dir: str = "."
    seed: int | None = None
    function: str | None = None
    algorithm: str | None = None
    runs: int | None = None
    workers: int = 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pmsam", description="Membrane-parallel Monkey Algorithm experiments")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", dest="config_path", metavar="PATH")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE")
        p.add_argument("--out", dest="output_dir", default=".", metavar="DIR")
        p.add_argument("--seed", type=int)
        p.add_argument("--function", metavar="ID")
        p.add_argument("--algorithm", choices=("ma", "pmsam", "both"))
        p.add_argument("--runs", type=int)
        p.add_argument("--workers", type=int, default=1)
    return parser


def parse_args(argv=None) -> CliConfig:
    ns = build_parser().parse_args(argv)
    return CliConfig(**vars(ns))


def _base_config(cli: CliConfig):
    config = parse_config(cli.config_path, cli.overrides)
    if cli.seed is not None:
        config = replace(config, seed=cli.seed)
    return config


def _functions(cli: CliConfig, default):
    if cli.function is None:
        return list(default)
    get_objective(cli.function)
    return [cli.function.lower()]


def _experiment(cli: CliConfig, bench: bool):
    config = _base_config(cli)
    if bench:
        fids = _functions(cli, builtin_ids())
        per_function = {f: reference_overrides(f) for f in fids if f in builtin_ids()}
        algorithm, runs = cli.algorithm or "both", cli.runs or 20
    else:
        fids = _functions(cli, ["f1"])
        per_function = {}
        algorithm, runs = cli.algorithm or "pmsam", cli.runs or 1
    # validate every per-function configuration before any run starts
    for fid in fids:
        from_flat(per_function.get(fid, {}), config)
    return ExperimentSpec(fids, algorithm, config, runs, config.seed, per_function)


def _out_dir(cli: CliConfig) -> Path:
    out = Path(cli.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_experiment(cli: CliConfig, bench: bool) -> int:
    spec = _experiment(cli, bench)
    rows, reports = run_experiment(spec, workers=cli.workers)
    out = _out_dir(cli)
    emit_summary_csv(rows, out / "summary.csv")
    emit_convergence_csv(reports, out / "convergence.csv")
    emit_report_json(rows, reports, out / "report.json", spec)
    for row in rows:
        print(f"{row.function_id:>4} {row.algorithm:>5}  m={row.m:<3} n={row.n:<4} "
              f"P_c={row.P_c:<4} mean={row.mean:.6g} variance={row.variance:.6g}")
    return 0


def cmd_compare(cli: CliConfig) -> int:
    config = _base_config(cli)
    fid = _functions(cli, ["f1"])[0]
    rows = compare_time(list(COMPARE_N_VALUES), config.membranes, config.ma,
                        function_id=fid, seed=config.seed)
    out = _out_dir(cli)
    emit_timing_csv(rows, out / "timing.csv")
    for row in rows:
        print(f"n={row.n:<4} ma={row.ma_ticks:<10} pmsam={row.pmsam_ticks:<8} "
              f"measured_ma={row.measured_ma} measured_pmsam={row.measured_pmsam}")
    return 0


def trace_log(function_id: str = "f1", config=None, model: clk.TickModel = clk.DEFAULT_MODEL):
    """Phase log of the n=20, m=4 single-iteration scenario."""
    config = from_flat(TRACE_OVERRIDES, config)
    log = []
    report = run_pmsam(get_objective(function_id, config.ma.d), config, model, log=log)
    return log, report


def cmd_trace(cli: CliConfig) -> int:
    config = _base_config(cli)
    fid = _functions(cli, ["f1"])[0]
    log, report = trace_log(fid, config)
    print("t\tmembranes\tphase")
    for ev in log:
        print(f"{ev.t}\t{ev.membranes}\t{ev.phase}")
    print(f"# closed form {clk.pmsam_ticks(20, 4, from_flat(TRACE_OVERRIDES, config).ma, function_id=fid)}"
          f" ticks, measured {report.ticks}")
    return 0


def dispatch(cli: CliConfig) -> int:
    if cli.runs is not None and cli.runs < 1:
        raise ConfigurationError("--runs must be at least 1", key="runs")
    if cli.subcommand == "bench":
        return cmd_experiment(cli, bench=True)
    if cli.subcommand == "run":
        return cmd_experiment(cli, bench=False)
    if cli.subcommand == "compare":
        return cmd_compare(cli)
    return cmd_trace(cli)


def main(argv=None) -> int:
    try:
        return dispatch(parse_args(argv))
    except (ConfigurationError, ContractViolation, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"pmsam: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
