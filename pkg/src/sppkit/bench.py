"""Benchmark harness: random solvable instances, timed solves, CSV + summary.

Runtime is wall-clock around ``solve_spp`` only; generation and I/O are not
counted.  Instance ``i`` (in row order) uses seed ``config.seed + i``, so
single- and multi-initial runs over the same config are seed-matched.
"""

from __future__ import annotations

import csv
import io
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction

from .generate import SplitMix64, TvParams, sample_solvable
from .ilp import SolverConfig, Status, solve_spp

CSV_HEADER = ["instance_id", "states", "events", "initials", "mode", "status",
              "cost", "iterations", "cuts", "runtime_ms"]

_STATUS = {
    Status.OPTIMAL: "optimal",
    Status.INFEASIBLE: "infeasible",
    Status.ITERATION_LIMIT: "iteration_limit",
    Status.RESOURCE_LIMIT: "resource_limit",
    Status.TIME_LIMIT: "timeout",
}


@dataclass(frozen=True)
class BenchConfig:
    states: tuple[int, ...] = (100, 500)
    alphabet: tuple[int, ...] = (2, 3)
    runs: int = 10
    density_min: float = 0.8
    density_max: float = 5.0
    seed: int = 0
    single_initial: bool = False
    workers: int = 0  # 0 means all available cores
    chi: bool = False
    lo: int = 1
    hi: int = 10
    init_density: float = 0.001
    accept_density: float = 0.01
    max_retries: int = 100
    max_iters: int = 5000
    cut_strategy: str = "all"
    timeout_ms: float | None = None


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    states: int
    events: int
    initials: int
    mode: str
    status: str
    cost: int | None
    iterations: int
    cuts: int
    runtime_ms: int

    def row(self) -> list:
        return ["" if v is None else v for v in asdict(self).values()]


@dataclass(frozen=True)
class BenchSummary:
    states: int
    alphabet: int
    median_ms: float
    p95_ms: float
    n_runs: int

    def cell(self) -> str:
        return f"{self.median_ms / 1000:.3f} [{self.p95_ms / 1000:.3f}]"


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_bench_config(text: str) -> BenchConfig:
    """Read ``key = value`` lines; lists are comma separated."""
    types = {f.name: f.type for f in fields(BenchConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "mode":
            if value not in ("validity", "chi"):
                raise ValueError(f"line {lineno}: mode must be validity or chi")
            values["chi"] = value == "chi"
            continue
        if key not in types:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        kind = types[key]
        try:
            if kind.startswith("tuple"):
                values[key] = tuple(int(v) for v in value.split(",") if v.strip())
            elif kind == "bool":
                values[key] = _parse_bool(value)
            elif kind == "int":
                values[key] = int(value)
            elif kind == "str":
                values[key] = value
            elif value.lower() == "none":
                values[key] = None
            else:
                values[key] = float(value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {exc}") from None
    return BenchConfig(**values)


@dataclass(frozen=True)
class _Job:
    instance_id: str
    params: TvParams
    config: BenchConfig = field(repr=False)


def plan_jobs(config: BenchConfig) -> list[_Job]:
    jobs = []
    index = 0
    for q in config.states:
        for k in config.alphabet:
            for run in range(config.runs):
                seed = config.seed + index
                # density drawn uniformly, rounded to 3 decimals so it is exactly representable
                u = SplitMix64(seed ^ 0xD1B54A32D192ED03).random()
                density = config.density_min + u * (config.density_max - config.density_min)
                density = Fraction(round(density * 1000), 1000)
                density = min(density, Fraction(q))
                init = 0 if config.single_initial else config.init_density
                params = TvParams(q, k, density, init, config.accept_density, seed)
                jobs.append(_Job(f"q{q}_k{k}_r{run:03d}", params, config))
                index += 1
    return jobs


def run_job(job: _Job) -> BenchRecord:
    cfg = job.config
    mode = "chi" if cfg.chi else "validity"
    p = job.params
    try:
        inst, _ = sample_solvable(p, cfg.lo, cfg.hi, cfg.max_retries, chi=cfg.chi)
    except Exception as exc:  # per-run failures become rows
        return BenchRecord(job.instance_id, p.states, p.alphabet, 0, mode,
                           f"error:{type(exc).__name__}", None, 0, 0, 0)
    solver = SolverConfig(cfg.chi, cfg.max_iters, cfg.cut_strategy, time_limit_ms=cfg.timeout_ms)
    try:
        rep = solve_spp(inst, solver)
    except Exception as exc:
        return BenchRecord(job.instance_id, len(inst.states), len(inst.events), len(inst.initial),
                           mode, f"error:{type(exc).__name__}", None, 0, 0, 0)
    cost = rep.cost if rep.status is Status.OPTIMAL else None
    return BenchRecord(job.instance_id, len(inst.states), len(inst.events), len(inst.initial),
                       mode, _STATUS[rep.status], cost, rep.iterations, rep.cuts,
                       int(round(rep.wall_time_ms)))


def bench_run(config: BenchConfig) -> list[BenchRecord]:
    jobs = plan_jobs(config)
    workers = config.workers or os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= 1:
        return [run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(run_job, jobs))


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return list(reader)


def nearest_rank(values, pct: float) -> float:
    ordered = sorted(values)
    if not ordered:
        raise ValueError("no values")
    rank = max(1, math.ceil(pct / 100 * len(ordered)))
    return ordered[rank - 1]


def summarize(records) -> list[BenchSummary]:
    """Median and nearest-rank p95 runtime per (states, alphabet) group.

    Groups come from the instance id so that the alphabet is the generated
    one even for rows that failed before solving.
    """
    groups: dict[tuple[int, int], list[int]] = {}
    for rec in records:
        q, k = _group_of(rec.instance_id)
        groups.setdefault((q, k), []).append(rec.runtime_ms)
    return [BenchSummary(q, k, float(statistics.median(ms)), float(nearest_rank(ms, 95)), len(ms))
            for (q, k), ms in sorted(groups.items())]


def _group_of(instance_id: str) -> tuple[int, int]:
    q, k, _ = instance_id.split("_")
    return int(q[1:]), int(k[1:])


def format_summary(summary) -> str:
    """Table with one row per state count and one column per alphabet size:
    ``median [p95]`` in seconds."""
    alphabets = sorted({s.alphabet for s in summary})
    by_key = {(s.states, s.alphabet): s for s in summary}
    lines = ["states | " + " | ".join(f"k={k}" for k in alphabets)]
    for q in sorted({s.states for s in summary}):
        cells = [by_key[(q, k)].cell() if (q, k) in by_key else "-" for k in alphabets]
        lines.append(f"{q} | " + " | ".join(cells))
    return "\n".join(lines) + "\n"
