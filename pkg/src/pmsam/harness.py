"""Repeated seeded runs, summary statistics and report files."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import clock as clk
from .config import to_flat
from .errors import ConfigurationError
from .membrane import PmsamConfig, run_pmsam
from .monkey import run_ma
from .objective import get_objective
from .report import RunReport

REPORT_VERSION = 1
ALGORITHMS = ("ma", "pmsam")

# function -> (m, n, P_c, published PMSAM mean, variance, MA mean, variance) over 20 runs
REFERENCE_SETTINGS = {
    "f1": (10, 60, 50, 1.65013e-2, 3.3460e-9, 3.617e-2, 3.3414e-8),
    "f2": (20, 100, 50, 2.741e-4, 1.231e-5, 4.921e-4, 3.342e-7),
    "f3": (5, 100, 50, 4.027e-3, 1.0049e-7, 1.371e-4, 4.2231e-7),
    "f4": (20, 60, 30, 1.5407e-2, 2.4010e-5, 4.568e-2, 3.766e-7),
    "f5": (10, 60, 30, 0.02601, 2.2471e-2, 0.5381, 0.015471),
    "f6": (5, 100, 100, -396.045, 7184.83, -403.14, 9517.729),
    "f7": (5, 60, 50, 1.6010e-2, 1.0283e-7, 3.022e-3, 1.741e-10),
    "f8": (20, 60, 50, 0.0127, 0.006796, 0.0703, 0.001341),
    "f9": (20, 60, 50, 0.2504, 3.1094e-6, 0.0532, 1.0588e-6),
    "f10": (10, 100, 100, 1.0071, 2.02048, 1.0933, 2.61087),
    "f11": (10, 100, 30, 1.3701e-3, 2.3410, 1.706e-2, 1.306e-8),
    "f12": (20, 100, 100, 0.00474, 3.0202, 0.0721, 3.01491),
}


def reference_overrides(function_id: str) -> dict:
    m, n, pc = REFERENCE_SETTINGS[function_id][:3]
    return {"m": m, "n": n, "climb_number": pc}


@dataclass
class ExperimentSpec:
    function_ids: list[str]
    algorithm: str = "pmsam"
    config: PmsamConfig = field(default_factory=PmsamConfig)
    runs: int = 20
    base_seed: int = 0
    # function id -> {"m": .., "n": .., "climb_number": ..}
    per_function: dict[str, dict] = field(default_factory=dict)

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigurationError("runs must be at least 1", key="runs")
        if self.algorithm not in ALGORITHMS + ("both",):
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}", key="algorithm")
        for fid in self.function_ids:
            get_objective(fid)

    @property
    def algorithms(self) -> tuple[str, ...]:
        return ALGORITHMS if self.algorithm == "both" else (self.algorithm,)

    def config_for(self, function_id: str, seed: int) -> PmsamConfig:
        over = self.per_function.get(function_id, {})
        ma_over = {("cyclic_number" if k == "n_max" else k): v for k, v in over.items() if k != "m"}
        ma = replace(self.config.ma, **ma_over)
        return replace(self.config, ma=ma, membranes=over.get("m", self.config.membranes),
                       seed=seed)


@dataclass
class SummaryRow:
    function_id: str
    algorithm: str
    m: int
    n: int
    P_c: int
    mean: float
    variance: float


def mean_variance(values) -> tuple[float, float]:
    """Sample mean and unbiased sample variance; one value has variance 0."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("no values to summarise")
    mean = float(np.mean(x))
    var = float(np.var(x, ddof=1)) if x.size > 1 else 0.0
    return mean, var


def run_single(function_id: str, algorithm: str, config: PmsamConfig,
               model: clk.TickModel = clk.DEFAULT_MODEL) -> RunReport:
    desc = get_objective(function_id, config.ma.d)
    if algorithm == "ma":
        return run_ma(desc, config.ma, config.seed, model)
    return run_pmsam(desc, config, model)


def _run_task(task):
    return run_single(*task)


def run_experiment(spec: ExperimentSpec, workers: int = 1,
                   model: clk.TickModel = clk.DEFAULT_MODEL):
    """Run every (function, algorithm, seed) and summarise per (function, algorithm).

    Seeds are ``base_seed + k`` for ``k < runs``. Returns ``(rows, reports)``.
    """
    tasks = [
        (fid, algo, spec.config_for(fid, spec.base_seed + k), model)
        for fid in spec.function_ids
        for algo in spec.algorithms
        for k in range(spec.runs)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_task, tasks))
    else:
        reports = [_run_task(t) for t in tasks]

    rows = []
    for fid in spec.function_ids:
        for algo in spec.algorithms:
            cfg = spec.config_for(fid, spec.base_seed)
            best = [r.best_value for r in reports if r.function_id == fid and r.algorithm == algo]
            mean, var = mean_variance(best)
            rows.append(SummaryRow(fid, algo, cfg.membranes if algo == "pmsam" else 1,
                                   cfg.ma.n, cfg.ma.climb_number, mean, var))
    return rows, reports


def _fmt(x: float) -> str:
    return repr(float(x))


def _sort_key(report: RunReport):
    fid = report.function_id
    num = int(fid[1:]) if fid[:1] == "f" and fid[1:].isdigit() else 10**6
    return (num, fid, report.algorithm, report.seed)


def emit_convergence_csv(reports, path) -> Path:
    if not reports:
        raise ValueError("no reports to emit")
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["function", "algorithm", "seed", "iteration", "best_value"])
        for r in sorted(reports, key=_sort_key):
            for iteration, value in r.trace:
                w.writerow([r.function_id, r.algorithm, r.seed, iteration, _fmt(value)])
    return path


def emit_summary_csv(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["function", "algorithm", "m", "n", "P_c", "mean", "variance"])
        for row in rows:
            w.writerow([row.function_id, row.algorithm, row.m, row.n, row.P_c,
                        _fmt(row.mean), _fmt(row.variance)])
    return path


@dataclass
class TimingRow:
    n: int
    m: int
    ma_ticks: int
    pmsam_ticks: int
    pmsam_climb_ticks: int
    measured_ma: int | None = None
    measured_pmsam: int | None = None


def compare_time(n_values, m: int, params, model: clk.TickModel = clk.DEFAULT_MODEL,
                 function_id: str = "f1", measure: bool = True, seed: int = 0):
    """Logical ticks of one outer cycle of MA and PMSAM for each population size.

    With ``measure`` the engines are also run for one cycle and their clocks
    reported next to the closed forms.
    """
    if not n_values:
        raise ConfigurationError("need at least one population size")
    rows = []
    for n in n_values:
        if n < m:
            raise ConfigurationError(f"population size {n} is smaller than m={m}", key="n")
        p = replace(params, n=n, cyclic_number=1)
        row = TimingRow(
            n=n,
            m=m,
            ma_ticks=clk.ma_ticks(n, p, model, function_id),
            pmsam_ticks=clk.pmsam_ticks(n, m, p, model, function_id),
            pmsam_climb_ticks=clk.pmsam_ticks(n, m, p, model, function_id, phase="climb"),
        )
        if measure:
            desc = get_objective(function_id, p.d)
            row.measured_ma = run_ma(desc, p, seed, model).ticks
            row.measured_pmsam = run_pmsam(
                desc, PmsamConfig(ma=p, membranes=m, seed=seed), model).ticks
        rows.append(row)
    return rows


def emit_timing_csv(rows, path) -> Path:
    path = Path(path)
    names = list(TimingRow.__dataclass_fields__)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in rows:
            w.writerow(["" if getattr(row, k) is None else getattr(row, k) for k in names])
    return path


def _report_dict(r: RunReport) -> dict:
    # wall time is left out so the document is reproducible byte for byte
    return {
        "function_id": r.function_id,
        "algorithm": r.algorithm,
        "seed": int(r.seed),
        "best_value": float(r.best_value),
        "best_position": [float(x) for x in r.best_position],
        "iterations_used": int(r.iterations_used),
        "ticks": int(r.ticks),
        "stop_reason": r.stop_reason,
        "ledger": {k: int(v) for k, v in sorted(r.ledger.items())},
    }


def spec_echo(spec: ExperimentSpec | None) -> dict:
    if spec is None:
        return {}
    return {
        "function_ids": list(spec.function_ids),
        "algorithm": spec.algorithm,
        "runs": spec.runs,
        "base_seed": spec.base_seed,
        "config": to_flat(spec.config),
        "per_function": {k: dict(v) for k, v in spec.per_function.items()},
    }


def emit_report_json(rows, reports, path, spec: ExperimentSpec | None = None) -> Path:
    doc = {
        "report_version": REPORT_VERSION,
        "experiment": spec_echo(spec),
        "summary": [asdict(row) for row in rows],
        "runs": [_report_dict(r) for r in sorted(reports, key=_sort_key)],
    }
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def load_report_json(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("report_version") != REPORT_VERSION:
        raise ValueError(f"unsupported report version {doc.get('report_version')!r}")
    doc["summary"] = [SummaryRow(**row) for row in doc["summary"]]
    return doc
