"""Experiment harness: repeated GA runs per (instance, operator) and reports."""

from __future__ import annotations

import csv
import io
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

from .crossover import OPERATORS
from .errors import ContractViolation
from .ga import GAConfig, GAResult, run_ga
from .instance import Instance, load_tsplib

# Optimal tour lengths of the benchmark instances (TSPLIB).
KNOWN_OPTIMA = {
    "eil51": 426,
    "berlin52": 7542,
    "eil101": 629,
    "kroa100": 21282,
    "kroa200": 29368,
    "a280": 2579,
    "lin318": 42029,
}

CSV_COLUMNS = (
    "instance", "operator", "runs",
    "best", "best_q", "avg", "avg_q", "worst", "worst_q",
    "avg_loops", "avg_secs",
)


class ExperimentError(Exception):
    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("experiment cannot start:\n  " + "\n  ".join(self.problems))


def quality(cost: float, optimum: int) -> float:
    """Percent excess of ``cost`` over ``optimum``."""
    if optimum <= 0:
        raise ContractViolation(f"optimum must be positive, got {optimum}")
    return (cost - optimum) / optimum * 100.0


def known_optimum(instance_name: str) -> Optional[int]:
    key = Path(instance_name).name.lower()
    if key.endswith(".tsp"):
        key = key[:-4]
    return KNOWN_OPTIMA.get(key)


@dataclass
class ExperimentSpec:
    instances: list
    operators: list
    runs: int = 30
    ga: GAConfig = field(default_factory=GAConfig)
    base_seed: int = 0
    output: Optional[str] = None
    jobs: int = 1
    record_time: bool = True

    def __post_init__(self):
        if self.runs < 1:
            raise ContractViolation("runs must be >= 1")

    def seed_for(self, run_index: int) -> int:
        return self.base_seed + run_index


@dataclass
class RunReport:
    instance: str
    operator: str
    runs: int
    best_length: int
    average_length: float
    worst_length: int
    best_quality: Optional[float]
    average_quality: Optional[float]
    worst_quality: Optional[float]
    avg_outer_loops: float
    avg_time: float
    lengths: list = field(default_factory=list, repr=False)

    @classmethod
    def aggregate(cls, instance: str, operator: str, results: Sequence[GAResult], optimum: Optional[int]):
        lengths = [r.best_length for r in results]
        best, worst = min(lengths), max(lengths)
        avg = statistics.fmean(lengths)
        q = (lambda v: quality(v, optimum)) if optimum else (lambda v: None)
        return cls(
            instance=instance,
            operator=operator,
            runs=len(results),
            best_length=best,
            average_length=avg,
            worst_length=worst,
            best_quality=q(best),
            average_quality=q(avg),
            worst_quality=q(worst),
            avg_outer_loops=statistics.fmean(r.outer_loops for r in results),
            avg_time=statistics.fmean(r.wall_time for r in results),
            lengths=lengths,
        )


def _resolve(path: str, tsplib_dir: Optional[str]) -> Path:
    p = Path(path)
    if p.exists() or tsplib_dir is None:
        return p
    for cand in (Path(tsplib_dir) / path, Path(tsplib_dir) / f"{path}.tsp"):
        if cand.exists():
            return cand
    return Path(tsplib_dir) / path


def load_instances(paths, tsplib_dir=None) -> list[Instance]:
    """Load every file, collecting all failures before raising."""
    loaded, problems = [], []
    for path in paths:
        p = _resolve(path, tsplib_dir)
        try:
            inst = load_tsplib(p)
        except OSError as exc:
            problems.append(f"{path}: cannot read ({exc.strerror or exc})")
            continue
        except ValueError as exc:
            problems.append(f"{path}: {exc}")
            continue
        loaded.append(replace(inst, known_optimum=known_optimum(inst.name) or known_optimum(p.stem)))
    if problems:
        raise ExperimentError(problems)
    return loaded


def _one_run(args):
    inst, cfg = args
    return run_ga(inst, cfg)


def run_experiment(
    spec: ExperimentSpec,
    tsplib_dir: Optional[str] = None,
    instances: Optional[list] = None,
    progress: Optional[Callable[[str], None]] = None,
) -> list[RunReport]:
    """Run ``spec.runs`` GA runs per (instance, operator) and aggregate.

    Run ``k`` uses seed ``base_seed + k``. Instances may be passed in
    directly; otherwise ``spec.instances`` are loaded from disk.
    """
    problems = [f"unknown operator {op!r}; valid operators: {', '.join(sorted(OPERATORS))}"
                for op in spec.operators if op.lower() not in OPERATORS]
    if instances is None:
        try:
            instances = load_instances(spec.instances, tsplib_dir)
        except ExperimentError as exc:
            problems += exc.problems
    if problems:
        raise ExperimentError(problems)

    reports = []
    pool = ProcessPoolExecutor(max_workers=spec.jobs) if spec.jobs > 1 else None
    try:
        for inst in instances:
            for op in spec.operators:
                cfgs = [replace(spec.ga, operator=op.lower(), seed=spec.seed_for(k)) for k in range(spec.runs)]
                jobs = [(inst, c) for c in cfgs]
                results = list(pool.map(_one_run, jobs)) if pool else [_one_run(j) for j in jobs]
                if not spec.record_time:
                    for r in results:
                        r.wall_time = 0.0
                report = RunReport.aggregate(inst.name, op.lower(), results, inst.known_optimum)
                reports.append(report)
                if progress is not None:
                    progress(format_row(report))
    finally:
        if pool is not None:
            pool.shutdown()

    if spec.output:
        write_csv(reports, spec.output)
    return reports


def _fmt_q(q):
    return "" if q is None else f"{q:.2f}"


def csv_text(reports: Sequence[RunReport], with_time: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([
            r.instance, r.operator, r.runs,
            r.best_length, _fmt_q(r.best_quality),
            f"{r.average_length:.2f}", _fmt_q(r.average_quality),
            r.worst_length, _fmt_q(r.worst_quality),
            f"{r.avg_outer_loops:.2f}",
            f"{r.avg_time:.4f}" if with_time else "",
        ])
    return buf.getvalue()


def write_csv(reports: Sequence[RunReport], path, with_time: bool = True) -> None:
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(reports, with_time))


def _cell(length, q, decimals=0):
    s = f"{length:.{decimals}f}" if decimals else str(length)
    return s if q is None else f"{s}({q:.2f}%)"


def format_row(r: RunReport) -> str:
    return (f"{r.instance:<10} {r.operator:<15} {_cell(r.best_length, r.best_quality):>18} "
            f"{_cell(r.average_length, r.average_quality, 1):>20} {_cell(r.worst_length, r.worst_quality):>18} "
            f"{r.avg_outer_loops:>8.1f} {r.avg_time:>10.3f}")


def format_table(reports: Sequence[RunReport]) -> str:
    head = (f"{'problem':<10} {'crossover':<15} {'best (quality)':>18} {'average (quality)':>20} "
            f"{'worst (quality)':>18} {'loops':>8} {'avg secs':>10}")
    return "\n".join([head, "-" * len(head)] + [format_row(r) for r in reports])
