"""Check a compiled circuit against the routing semantics.

Deliberately written from the problem definition alone; nothing here is
shared with the constraint model or the engine.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import CompiledCircuit, DummyLayer, GateLayer, Mode, RoutingProblem, StructureError


class ViolationKind(str, enum.Enum):
    NOT_BIJECTION = "NotBijection"
    GATE_NOT_ADJACENT = "GateNotAdjacent"
    ILLEGAL_MOVE = "IllegalMove"
    ILLEGAL_GATE_TRANSITION = "IllegalGateTransition"
    NOT_INVOLUTION = "NotInvolution"
    OBJECTIVE_MISMATCH = "ObjectiveMismatch"
    BUDGET_EXCEEDED = "BudgetExceeded"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    layer: int  # 1-based timeline layer; for transitions, the layer they leave
    detail: str

    def __str__(self) -> str:
        return f"{self.kind.value} at layer {self.layer}: {self.detail}"


def verify(problem: RoutingProblem, compiled: CompiledCircuit) -> list[Violation]:
    """All violations found; an empty list means the circuit is valid."""
    graph = problem.graph
    circuit = problem.circuit
    entries = problem.timeline.entries
    placements = compiled.placements
    n = graph.node_count
    if len(placements) != len(entries):
        raise StructureError(f"expected {len(entries)} placements, got {len(placements)}")
    out: list[Violation] = []

    def flag(kind, layer, detail):
        out.append(Violation(kind, layer + 1, detail))

    valid = []
    for ell, pos in enumerate(placements):
        ok = len(pos) == circuit.qubit_count and sorted(pos) == list(range(1, n + 1))
        if not ok:
            seen: dict[int, int] = {}
            clashes = []
            for q, v in enumerate(pos, start=1):
                if v in seen:
                    clashes.append(f"q{seen[v]} and q{q} on node {v}")
                seen[v] = q
            bad = [v for v in pos if not 1 <= v <= n]
            detail = "; ".join(clashes) or f"nodes {bad or list(pos)} are not a bijection"
            flag(ViolationKind.NOT_BIJECTION, ell, detail)
        valid.append(ok)

    for ell, entry in enumerate(entries):
        if isinstance(entry, GateLayer) and valid[ell]:
            pos = placements[ell]
            for p, q in circuit.layers[entry.index]:
                if not graph.adjacent(pos[p - 1], pos[q - 1]):
                    flag(
                        ViolationKind.GATE_NOT_ADJACENT,
                        ell,
                        f"gate ({p},{q}) on nodes {pos[p - 1]},{pos[q - 1]}",
                    )

    moved_layers = []
    for ell in range(len(entries) - 1):
        if not (valid[ell] and valid[ell + 1]):
            continue
        before, after = placements[ell], placements[ell + 1]
        for q in range(1, circuit.qubit_count + 1):
            a, b = before[q - 1], after[q - 1]
            if a != b and not graph.adjacent(a, b):
                flag(ViolationKind.ILLEGAL_MOVE, ell, f"q{q} jumps {a}->{b}")
        entry = entries[ell]
        if isinstance(entry, GateLayer):
            for p, q in circuit.layers[entry.index]:
                a, b = before[p - 1], before[q - 1]
                moved = (after[p - 1], after[q - 1])
                if moved not in ((a, b), (b, a)):
                    flag(
                        ViolationKind.ILLEGAL_GATE_TRANSITION,
                        ell,
                        f"gate ({p},{q}) on {a},{b} neither stays nor swaps: now {moved[0]},{moved[1]}",
                    )
        elif before != after:
            moved_layers.append(ell)
        if problem.mode is Mode.SWAP_ONLY:
            holder = {v: q for q, v in enumerate(before, start=1)}
            for q in range(1, circuit.qubit_count + 1):
                a, b = before[q - 1], after[q - 1]
                if a == b:
                    continue
                other = holder[b]
                if after[other - 1] != a:
                    flag(
                        ViolationKind.NOT_INVOLUTION,
                        ell,
                        f"q{q} moves {a}->{b} but q{other} does not move {b}->{a}",
                    )

    if all(valid):
        objective = len(moved_layers)
        if objective != compiled.objective:
            flag(
                ViolationKind.OBJECTIVE_MISMATCH,
                len(entries) - 1,
                f"reported objective {compiled.objective}, recomputed {objective}",
            )
        if compiled.depth != circuit.depth + compiled.objective:
            flag(
                ViolationKind.OBJECTIVE_MISMATCH,
                len(entries) - 1,
                f"reported depth {compiled.depth} != {circuit.depth} + {compiled.objective}",
            )
        per_block: dict[int, int] = {}
        for ell in moved_layers:
            block = entries[ell].block
            per_block[block] = per_block.get(block, 0) + 1
        for block, used in sorted(per_block.items()):
            if used > problem.dummy_count:
                first = next(i for i, e in enumerate(entries) if isinstance(e, DummyLayer) and e.block == block)
                flag(ViolationKind.BUDGET_EXCEEDED, first, f"block {block} uses {used} rounds")
        if compiled.objective > problem.max_objective:
            flag(
                ViolationKind.BUDGET_EXCEEDED,
                len(entries) - 1,
                f"objective {compiled.objective} exceeds {problem.max_objective} dummy layers",
            )
    return out
