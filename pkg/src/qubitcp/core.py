"""Domain types for depth-optimal qubit assignment and SWAP routing.

Qubit and node ids are 1-based everywhere in this package. A placement is a
tuple ``pos`` with ``pos[q - 1]`` the node holding logical qubit ``q``.
"""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

Gate = tuple[int, int]
Placement = tuple[int, ...]


class StructureError(ValueError):
    """Raised when inputs violate a structural invariant."""


class Variant(str, enum.Enum):
    LINEAR = "linear"
    GENERAL = "general"


class Mode(str, enum.Enum):
    FAITHFUL = "faithful"
    SWAP_ONLY = "swap_only"


class Status(str, enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class HardwareGraph:
    node_count: int
    edges: frozenset[frozenset[int]]

    def __init__(self, node_count: int, edges: Iterable[Sequence[int]]):
        if node_count < 1:
            raise StructureError("node_count must be positive")
        normalized = set()
        for edge in edges:
            i, j = (int(v) for v in edge)
            if i == j:
                raise StructureError(f"self-loop on node {i}")
            if not (1 <= i <= node_count and 1 <= j <= node_count):
                raise StructureError(f"edge {{{i},{j}}} out of range 1..{node_count}")
            key = frozenset((i, j))
            if key in normalized:
                raise StructureError(f"duplicate edge {{{i},{j}}}")
            normalized.add(key)
        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "edges", frozenset(normalized))
        if not self.is_connected():
            raise StructureError("hardware graph is not connected")

    @property
    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    def arcs(self) -> frozenset[tuple[int, int]]:
        """Both orientations of every edge."""
        out = set()
        for edge in self.edges:
            i, j = sorted(edge)
            out.add((i, j))
            out.add((j, i))
        return frozenset(out)

    def neighbors(self, node: int) -> frozenset[int]:
        return frozenset(j for e in self.edges if node in e for j in e if j != node)

    def adjacent(self, i: int, j: int) -> bool:
        return frozenset((i, j)) in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(tuple(sorted(e)) for e in self.edges)

    def is_connected(self) -> bool:
        adj: dict[int, list[int]] = {v: [] for v in self.nodes}
        for edge in self.edges:
            i, j = tuple(edge)
            adj[i].append(j)
            adj[j].append(i)
        seen = {1}
        queue = deque([1])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.node_count

    def distances(self) -> list[list[int]]:
        """All-pairs hop counts, indexed [i][j] by 1-based node id (row 0 unused)."""
        n = self.node_count
        adj: dict[int, list[int]] = {v: [] for v in self.nodes}
        for edge in self.edges:
            i, j = tuple(edge)
            adj[i].append(j)
            adj[j].append(i)
        table = [[0] * (n + 1)]
        for src in self.nodes:
            row = [-1] * (n + 1)
            row[src] = 0
            queue = deque([src])
            while queue:
                v = queue.popleft()
                for w in adj[v]:
                    if row[w] < 0:
                        row[w] = row[v] + 1
                        queue.append(w)
            table.append(row)
        return table

    def is_path(self) -> bool:
        """True iff the edges are exactly {i, i+1} for i = 1..n-1."""
        expected = {frozenset((i, i + 1)) for i in range(1, self.node_count)}
        return self.edges == expected


@dataclass(frozen=True)
class LogicalCircuit:
    qubit_count: int
    layers: tuple[tuple[Gate, ...], ...]

    def __init__(self, qubit_count: int, layers: Iterable[Iterable[Sequence[int]]]):
        if qubit_count < 1:
            raise StructureError("qubit_count must be positive")
        frozen = []
        for index, layer in enumerate(layers, start=1):
            gates = []
            used: set[int] = set()
            for gate in layer:
                p, q = (int(v) for v in gate)
                if p == q:
                    raise StructureError(f"layer {index}: gate on a single qubit {p}")
                for v in (p, q):
                    if not 1 <= v <= qubit_count:
                        raise StructureError(f"layer {index}: qubit {v} out of range")
                    if v in used:
                        raise StructureError(f"layer {index}: qubit {v} used twice")
                    used.add(v)
                gates.append((p, q))
            if not gates:
                raise StructureError(f"layer {index} is empty")
            frozen.append(tuple(gates))
        if not frozen:
            raise StructureError("circuit has no layers")
        object.__setattr__(self, "qubit_count", qubit_count)
        object.__setattr__(self, "layers", tuple(frozen))

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gate_count(self) -> int:
        return sum(len(layer) for layer in self.layers)


@dataclass(frozen=True)
class GateLayer:
    index: int  # 0-based into circuit.layers


@dataclass(frozen=True)
class DummyLayer:
    block: int  # 1-based; sits between gate layers `block` and `block + 1`
    position: int  # 1-based within its block


LayerEntry = Union[GateLayer, DummyLayer]


@dataclass(frozen=True)
class LayerTimeline:
    entries: tuple[LayerEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> LayerEntry:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def gate_positions(self) -> list[int]:
        return [i for i, e in enumerate(self.entries) if isinstance(e, GateLayer)]

    def dummy_positions(self) -> list[int]:
        return [i for i, e in enumerate(self.entries) if isinstance(e, DummyLayer)]

    def blocks(self) -> list[list[int]]:
        """Timeline indices of each dummy block, in order."""
        out: dict[int, list[int]] = {}
        for i, e in enumerate(self.entries):
            if isinstance(e, DummyLayer):
                out.setdefault(e.block, []).append(i)
        return [out[b] for b in sorted(out)]


def expand_timeline(circuit: LogicalCircuit, dummy_count: int) -> LayerTimeline:
    if dummy_count < 0:
        raise StructureError("dummy_count must be non-negative")
    entries: list[LayerEntry] = []
    for index in range(circuit.depth):
        if index:
            entries.extend(DummyLayer(index, k) for k in range(1, dummy_count + 1))
        entries.append(GateLayer(index))
    return LayerTimeline(tuple(entries))


@dataclass(frozen=True)
class RoutingProblem:
    circuit: LogicalCircuit
    graph: HardwareGraph
    dummy_count: int = 4
    variant: Variant = Variant.GENERAL
    mode: Mode = Mode.FAITHFUL
    symmetry_breaking: bool = True
    frontload_dominance: bool = True

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.circuit.qubit_count != self.graph.node_count:
            raise StructureError(
                f"|Q|={self.circuit.qubit_count} differs from |V|={self.graph.node_count}"
            )
        if self.dummy_count < 0:
            raise StructureError("dummy_count must be non-negative")
        if self.variant is Variant.LINEAR and not self.graph.is_path():
            raise StructureError("linear variant requires a path graph with edges {i,i+1}")

    @property
    def timeline(self) -> LayerTimeline:
        return expand_timeline(self.circuit, self.dummy_count)

    @property
    def max_objective(self) -> int:
        return self.dummy_count * (self.circuit.depth - 1)

    def replace(self, **changes) -> "RoutingProblem":
        fields = dict(
            circuit=self.circuit,
            graph=self.graph,
            dummy_count=self.dummy_count,
            variant=self.variant,
            mode=self.mode,
            symmetry_breaking=self.symmetry_breaking,
            frontload_dominance=self.frontload_dominance,
        )
        fields.update(changes)
        return RoutingProblem(**fields)


def _moved(before: Placement, after: Placement) -> bool:
    return tuple(before) != tuple(after)


def objective_of(problem: RoutingProblem, placements: Sequence[Placement]) -> int:
    """Number of dummy layers whose outgoing transition moves some qubit."""
    timeline = problem.timeline
    if len(placements) != len(timeline):
        raise StructureError(
            f"expected {len(timeline)} placements, got {len(placements)}"
        )
    return sum(
        1
        for i, entry in enumerate(timeline.entries[:-1])
        if isinstance(entry, DummyLayer) and _moved(placements[i], placements[i + 1])
    )


def depth_of(problem: RoutingProblem, placements: Sequence[Placement]) -> int:
    return problem.circuit.depth + objective_of(problem, placements)


def movement_cycles(before: Placement, after: Placement) -> list[tuple[int, ...]]:
    """Node cycles of the movement before -> after, 2-cycles being SWAPs.

    A cycle (a, b, c) means the qubit at a goes to b, the one at b to c, and
    the one at c back to a.
    """
    step = {b: a for b, a in zip(before, after) if b != a}
    cycles = []
    seen: set[int] = set()
    for start in sorted(step):
        if start in seen:
            continue
        cycle = [start]
        seen.add(start)
        node = step[start]
        while node != start:
            if node in seen or node not in step:
                raise StructureError("movement is not a permutation of nodes")
            cycle.append(node)
            seen.add(node)
            node = step[node]
        cycles.append(tuple(cycle))
    return cycles


@dataclass(frozen=True)
class SwapRound:
    after_layer: int  # 1-based gate layer the round follows
    pairs: tuple[tuple[int, int], ...]
    cycles: tuple[tuple[int, ...], ...] = ()  # rotations longer than 2 (Faithful mode only)


@dataclass(frozen=True)
class CompiledCircuit:
    placements: tuple[Placement, ...]
    objective: int
    depth: int

    @classmethod
    def from_placements(
        cls, problem: RoutingProblem, placements: Sequence[Sequence[int]]
    ) -> "CompiledCircuit":
        frozen = tuple(tuple(int(v) for v in p) for p in placements)
        objective = objective_of(problem, frozen)
        return cls(frozen, objective, problem.circuit.depth + objective)

    def swap_schedule(self, problem: RoutingProblem) -> list[SwapRound]:
        """Used SWAP rounds; idle dummy layers are compacted away."""
        rounds = []
        for i, entry in enumerate(problem.timeline.entries[:-1]):
            if not isinstance(entry, DummyLayer):
                continue
            cycles = movement_cycles(self.placements[i], self.placements[i + 1])
            if not cycles:
                continue
            rounds.append(
                SwapRound(
                    after_layer=entry.block,
                    pairs=tuple(c for c in cycles if len(c) == 2),
                    cycles=tuple(c for c in cycles if len(c) > 2),
                )
            )
        return rounds


@dataclass
class SearchStats:
    nodes: int = 0
    propagations: int = 0
    failures: int = 0
    wall_time: float = 0.0


@dataclass
class SolveOutcome:
    status: Status
    best: Optional[CompiledCircuit] = None
    lower_bound: int = 0
    stats: SearchStats = field(default_factory=SearchStats)

    def __post_init__(self):
        if self.status is Status.OPTIMAL and (
            self.best is None or self.best.objective != self.lower_bound
        ):
            raise StructureError("optimal outcome needs best.objective == lower_bound")
        if self.status is Status.INFEASIBLE and self.best is not None:
            raise StructureError("infeasible outcome cannot carry a solution")


# JSON I/O ------------------------------------------------------------------


def problem_to_dict(problem: RoutingProblem) -> dict:
    return {
        "qubits": problem.circuit.qubit_count,
        "layers": [[list(g) for g in layer] for layer in problem.circuit.layers],
        "graph": {
            "nodes": problem.graph.node_count,
            "edges": [list(e) for e in problem.graph.sorted_edges()],
        },
        "dummy_count": problem.dummy_count,
        "variant": problem.variant.value,
        "mode": problem.mode.value,
    }


def problem_from_dict(data: dict, **overrides) -> RoutingProblem:
    try:
        circuit = LogicalCircuit(data["qubits"], data["layers"])
        graph = HardwareGraph(data["graph"]["nodes"], data["graph"]["edges"])
    except (KeyError, TypeError) as exc:
        raise StructureError(f"malformed problem: {exc}") from exc
    fields = dict(
        dummy_count=data.get("dummy_count", 4),
        variant=data.get("variant", "general"),
        mode=data.get("mode", "faithful"),
    )
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return RoutingProblem(circuit, graph, **fields)


def solution_to_dict(
    problem: RoutingProblem, status: Status, compiled: Optional[CompiledCircuit]
) -> dict:
    out: dict = {"status": Status(status).value}
    if compiled is None:
        out.update(objective=None, depth=None, placements=None, swaps=[])
        return out
    swaps = []
    for rnd in compiled.swap_schedule(problem):
        item: dict = {"after_layer": rnd.after_layer, "pairs": [list(p) for p in rnd.pairs]}
        if rnd.cycles:
            item["cycles"] = [list(c) for c in rnd.cycles]
        swaps.append(item)
    out.update(
        objective=compiled.objective,
        depth=compiled.depth,
        placements=[list(p) for p in compiled.placements],
        swaps=swaps,
    )
    return out


def solution_from_dict(data: dict) -> tuple[Status, Optional[CompiledCircuit]]:
    """Read a solution without recomputing its objective (the verifier does that)."""
    status = Status(data["status"])
    if data.get("placements") is None:
        return status, None
    compiled = CompiledCircuit(
        tuple(tuple(int(v) for v in p) for p in data["placements"]),
        int(data["objective"]),
        int(data["depth"]),
    )
    return status, compiled


def load_json(path: Union[str, Path]) -> dict:
    with open(path) as fh:
        return json.load(fh)


def dump_json(data: dict, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
