"""Acceptance criteria, one test each; every test reports a PASS/FAIL line."""

import random
import statistics
import time
from functools import lru_cache

from qubitcp.core import Status
from qubitcp.instances import InstanceSpec
from qubitcp.oracle import oracle_optimal
from qubitcp.solver import solve_problem
from qubitcp.verifier import verify

from conftest import ACCEPTANCE_LINES, worked_problem, single_move_mutation

INSTANCE_BUDGET = 60.0  # seconds per instance


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] AC{number} {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@lru_cache(maxsize=None)
def solved(spec: InstanceSpec, mode: str = "faithful", variant=None):
    kw = {"mode": mode}
    if variant:
        kw["variant"] = variant
    problem = spec.problem(**kw)
    started = time.perf_counter()
    out = solve_problem(problem, time_limit=INSTANCE_BUDGET)
    return problem, out, time.perf_counter() - started


def oracle_suite():
    """(spec, mode) over q in {3,4}, path and 2x2 lattice, L in {2,3,4}, 25 seeds."""
    cases = []
    for q, topo in ((3, "linear"), (4, "linear"), (4, "lattice")):
        for L in (2, 3, 4):
            for seed in range(25):
                for mode in ("faithful", "swap_only"):
                    cases.append((InstanceSpec(q, L, topo, seed), mode))
    return cases


CLASS1 = [InstanceSpec(q, q, "linear", s) for q in (4, 5, 6, 7) for s in range(10)]
DEPTH_TARGETS = {
    ("linear", 4): 6.1,
    ("linear", 5): 6.2,
    ("linear", 6): 10.9,
    ("linear", 7): 12.4,
    ("lattice", 4): 4.0,
    ("lattice", 6): 6.5,
}
FRESH_SEEDS = range(1000, 1020)
DOMINANCE = (
    [(4, 4, s) for s in range(8)]
    + [(6, 6, s) for s in range(8)]
    + [(8, 4, s) for s in range(6)]
    + [(9, 3, s) for s in range(4)]
    + [(10, 3, s) for s in range(4)]
)


def test_ac1_worked_example():
    results = []
    for variant in ("linear", "general"):
        for mode in ("faithful", "swap_only"):
            started = time.perf_counter()
            out = solve_problem(worked_problem(variant=variant, mode=mode, dummy_count=4))
            elapsed = time.perf_counter() - started
            results.append((variant, mode, out.status, out.best.objective, out.best.depth, elapsed))
    ok = all(s is Status.OPTIMAL and o == 1 and d == 3 and t < 1.0 for _, _, s, o, d, t in results)
    slowest = max(r[-1] for r in results)
    report(1, "worked example", ok, f"4 configurations objective 1 depth 3, slowest {slowest * 1000:.1f} ms")


def test_ac2_oracle_equivalence():
    started = time.perf_counter()
    mismatches = []
    cases = oracle_suite()
    for spec, mode in cases:
        problem = spec.problem(mode=mode)
        out = solve_problem(problem)
        expected = oracle_optimal(problem).optimum
        got = out.best.objective if out.status is Status.OPTIMAL else None
        if got != expected:
            mismatches.append((spec.name, mode, got, expected))
    elapsed = time.perf_counter() - started
    ok = not mismatches and elapsed < 120
    report(2, "oracle equivalence", ok, f"{len(cases)} cases, {len(mismatches)} mismatches, {elapsed:.1f} s")


def test_ac3_class1_linear():
    unsolved = []
    slowest = 0.0
    for spec in CLASS1:
        _, out, elapsed = solved(spec)
        slowest = max(slowest, elapsed)
        if out.status is not Status.OPTIMAL or elapsed > INSTANCE_BUDGET:
            unsolved.append(spec.name)
    report(
        3,
        "class-1 linear",
        not unsolved,
        f"{len(CLASS1) - len(unsolved)}/{len(CLASS1)} optimal, slowest {slowest:.1f} s",
    )


def test_ac4_depth_statistics():
    parts = []
    ok = True
    for (topo, q), target in DEPTH_TARGETS.items():
        depths = []
        for seed in FRESH_SEEDS:
            _, out, _ = solved(InstanceSpec(q, q, topo, seed))
            if out.status is Status.OPTIMAL:
                depths.append(out.best.depth)
        mean = statistics.fmean(depths) if depths else float("nan")
        good = len(depths) == len(FRESH_SEEDS) and abs(mean - target) <= 0.25 * target
        ok &= good
        parts.append(f"{topo} {q}x{q} {mean:.2f} vs {target}")
    report(4, "depth statistics", ok, "; ".join(parts))


def test_ac5_lattice_dominates_linear():
    worse = []
    checked = 0
    for q, L, seed in DOMINANCE:
        _, lin, _ = solved(InstanceSpec(q, L, "linear", seed))
        _, lat, _ = solved(InstanceSpec(q, L, "lattice", seed))
        if lin.status is not Status.OPTIMAL or lat.status is not Status.OPTIMAL:
            worse.append((q, L, seed, "unsolved"))
            continue
        checked += 1
        if lat.best.objective > lin.best.objective:
            worse.append((q, L, seed, lat.best.objective, lin.best.objective))
    report(5, "lattice <= linear", not worse and checked >= 30, f"{checked} pairs checked, {len(worse)} violations")


def test_ac6_flags_preserve_optimum():
    differing = []
    cases = oracle_suite()
    for spec, mode in cases:
        base = spec.problem(mode=mode)
        values = set()
        for sym in (True, False):
            for front in (True, False):
                out = solve_problem(base.replace(symmetry_breaking=sym, frontload_dominance=front))
                values.add(out.best.objective if out.best else None)
        if len(values) != 1:
            differing.append((spec.name, mode, values))
    report(6, "flag invariance", not differing, f"{len(cases)} cases x 4 flag settings, {len(differing)} differ")


def test_ac7_mutations_rejected():
    rng = random.Random(2024)
    sources = []
    for spec, mode in oracle_suite()[::9]:
        problem = spec.problem(mode=mode)
        out = solve_problem(problem)
        if out.best is not None:
            sources.append((problem, out.best))
    false_accepts = 0
    named = 0
    for _ in range(100):
        problem, best = rng.choice(sources)
        assert verify(problem, best) == []
        mutated, _ = single_move_mutation(best, rng)
        violations = verify(problem, mutated)
        if not violations:
            false_accepts += 1
        elif all(v.kind.value for v in violations):
            named += 1
    report(7, "mutation suite", false_accepts == 0 and named == 100, f"100 mutations, {named} rejected, {false_accepts} accepted")


def test_ac8_depth_identity():
    checked = 0
    broken = []
    specs = list(CLASS1) + [InstanceSpec(q, q, t, s) for (t, q) in DEPTH_TARGETS for s in FRESH_SEEDS]
    specs += [InstanceSpec(q, L, t, s) for q, L, s in DOMINANCE for t in ("linear", "lattice")]
    for spec in specs:
        problem, out, _ = solved(spec)
        if out.best is None:
            continue
        checked += 1
        if out.best.depth != problem.circuit.depth + out.best.objective or verify(problem, out.best):
            broken.append(spec.name)
    for spec, mode in oracle_suite():
        problem = spec.problem(mode=mode)
        out = solve_problem(problem)
        if out.best is not None:
            checked += 1
            if out.best.depth != problem.circuit.depth + out.best.objective:
                broken.append(spec.name)
    report(8, "depth identity", not broken and checked > 0, f"{checked} solved instances, {len(broken)} violations")
