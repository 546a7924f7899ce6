"""Benchmark harness: seeded suites, CSV records, solved-over-time series."""

from __future__ import annotations

import csv
import io
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

from .core import Status
from .instances import InstanceSpec
from .solver import solve_problem

CSV_VERSION = "# qubitcp-bench v1"
CACTUS_VERSION = "# qubitcp-cactus v1"
COLUMNS = ["instance", "q", "L", "topology", "variant", "mode", "status", "objective", "depth", "time_ms", "nodes"]
TIMING_COLUMNS = ("time_ms",)


@dataclass(frozen=True)
class BenchRecord:
    instance: str
    q: int
    L: int
    topology: str
    variant: str
    mode: str
    status: str
    objective: Optional[int]
    depth: Optional[int]
    time_ms: float
    nodes: int


@dataclass(frozen=True)
class RunSpec:
    instance: InstanceSpec
    variant: str
    mode: str
    dummy_count: int = 4
    strategy: str = "ascent"
    time_limit: Optional[float] = None


def suite(
    sizes: Iterable[int],
    count: int,
    topology: str = "linear",
    seed_base: int = 0,
    layers: Optional[int] = None,
) -> list[InstanceSpec]:
    """Square instances per size; instance i uses seed seed_base + i."""
    return [
        InstanceSpec(q, layers or q, topology, seed_base + i)
        for q in sizes
        for i in range(count)
    ]


def run_one(spec: RunSpec) -> BenchRecord:
    inst = spec.instance
    started = time.perf_counter()
    try:
        problem = inst.problem(variant=spec.variant, mode=spec.mode, dummy_count=spec.dummy_count)
        outcome = solve_problem(problem, spec.strategy, spec.time_limit)
        status = outcome.status.value
        best = outcome.best
        nodes = outcome.stats.nodes
    except Exception as exc:  # recorded per row; the suite carries on
        status, best, nodes = f"error:{type(exc).__name__}", None, 0
    elapsed = (time.perf_counter() - started) * 1000.0
    return BenchRecord(
        instance=inst.name,
        q=inst.qubit_count,
        L=inst.layer_count,
        topology=inst.topology if inst.topology == "linear" else f"lattice{inst.rows}x{inst.cols}",
        variant=spec.variant,
        mode=spec.mode,
        status=status,
        objective=None if best is None else best.objective,
        depth=None if best is None else best.depth,
        time_ms=round(elapsed, 3),
        nodes=nodes,
    )


def run_suite(specs: list[RunSpec], jobs: int = 1) -> list[BenchRecord]:
    if jobs <= 1:
        return [run_one(s) for s in specs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(run_one, specs))


def records_to_csv(records: Iterable[BenchRecord], timing: bool = True) -> str:
    columns = [c for c in COLUMNS if timing or c not in TIMING_COLUMNS]
    buf = io.StringIO()
    buf.write(CSV_VERSION + "\n")
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: ("" if v is None else v) for k, v in asdict(rec).items()})
    return buf.getvalue()


def cactus_series(records: Iterable[BenchRecord]) -> dict[str, list[tuple[float, int]]]:
    """Per configuration, (time_ms, instances solved to optimality by then)."""
    out: dict[str, list[tuple[float, int]]] = {}
    for rec in records:
        key = f"{rec.variant}/{rec.mode}"
        out.setdefault(key, [])
        if rec.status == Status.OPTIMAL.value:
            out[key].append(rec.time_ms)
    return {
        key: [(t, i) for i, t in enumerate(sorted(times), start=1)]
        for key, times in out.items()
    }


def cactus_to_csv(series: dict[str, list[tuple[float, int]]]) -> str:
    lines = [CACTUS_VERSION, "config,time_ms,solved"]
    for key in sorted(series):
        lines += [f"{key},{t},{n}" for t, n in series[key]]
    return "\n".join(lines) + "\n"


def depth_table(records: Iterable[BenchRecord]) -> list[tuple[str, int, int, float, int]]:
    """(topology, q, L, mean depth, solved count) per size over optimal runs."""
    groups: dict[tuple[str, int, int], list[int]] = {}
    for rec in records:
        if rec.status == Status.OPTIMAL.value:
            groups.setdefault((rec.topology, rec.q, rec.L), []).append(rec.depth)
    return [
        (topo, q, L, statistics.fmean(depths), len(depths))
        for (topo, q, L), depths in sorted(groups.items())
    ]


def format_depth_table(rows) -> str:
    lines = [f"{'topology':<14}{'size':>8}{'avg depth':>11}{'solved':>8}"]
    for topo, q, L, mean, n in rows:
        lines.append(f"{topo:<14}{f'{q}x{L}':>8}{mean:>11.2f}{n:>8}")
    return "\n".join(lines)
