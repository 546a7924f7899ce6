"""Constraint networks for the routing problem.

Position variable ``x[q][l]`` is the node of qubit ``q`` at timeline layer
``l``; flag ``z[l]`` (dummy layers only) is 1 when the transition out of
``l`` moves anything. The objective is the number of raised flags.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import (
    CompiledCircuit,
    DummyLayer,
    GateLayer,
    HardwareGraph,
    Mode,
    RoutingProblem,
    StructureError,
    Variant,
)
from .engine import Store, mask_of, post
from .instances import gen_lattice_topology


class VariantMismatch(StructureError):
    pass


@dataclass(frozen=True)
class Constraint:
    kind: str
    args: tuple

    def describe(self, names: Sequence[str]) -> str:
        def show(arg):
            if isinstance(arg, int):
                return names[arg]
            if isinstance(arg, (tuple, list)) and all(isinstance(a, int) for a in arg):
                return "[" + ", ".join(names[a] for a in arg) + "]"
            return f"<{len(arg)} tuples>"

        return f"{self.kind}({', '.join(show(a) for a in self.args)})"


@dataclass(frozen=True)
class CPModel:
    problem: RoutingProblem
    names: tuple[str, ...]
    domains: tuple[int, ...]
    constraints: tuple[Constraint, ...]
    layer_vars: tuple[tuple[tuple[int, ...], Optional[int]], ...]
    gate_layers: tuple[int, ...]

    @property
    def flag_vars(self) -> tuple[int, ...]:
        return tuple(z for _, z in self.layer_vars if z is not None)

    @property
    def position_vars(self) -> tuple[int, ...]:
        return tuple(x for xs, _ in self.layer_vars for x in xs)

    def x(self, qubit: int, layer: int) -> int:
        return self.layer_vars[layer][0][qubit - 1]

    def gate_pairs(self) -> dict[int, tuple[tuple[int, int], ...]]:
        """Gates of each gate layer, keyed by timeline index."""
        timeline = self.problem.timeline
        return {ell: self.problem.circuit.layers[timeline[ell].index] for ell in self.gate_layers}

    def new_store(self, strong_alldiff: bool = True) -> Store:
        store = Store(self.domains)
        for c in self.constraints:
            if c.kind == "alldifferent":
                post(store, c.kind, *c.args, strong_alldiff)
            else:
                post(store, c.kind, *c.args)
        return store

    def decode(self, values: Sequence[int]) -> CompiledCircuit:
        placements = [tuple(values[x] for x in xs) for xs, _ in self.layer_vars]
        return CompiledCircuit.from_placements(self.problem, placements)

    def with_constraints(self, extra: Sequence[Constraint]) -> "CPModel":
        return dataclasses.replace(self, constraints=self.constraints + tuple(extra))

    def dump(self) -> str:
        """One line per constraint, variables named x[q][l] and z[l]."""
        lines = [f"var {n} in {{{','.join(map(str, _values(d)))}}}" for n, d in zip(self.names, self.domains)]
        lines += [c.describe(self.names) for c in self.constraints]
        lines.append("minimize sum(" + ", ".join(self.names[z] for z in self.flag_vars) + ")")
        return "\n".join(lines)


def _values(mask: int) -> list[int]:
    return [v for v in range(mask.bit_length()) if mask >> v & 1]


def _skeleton(problem: RoutingProblem):
    """Variables, per-layer alldifferent and flag links."""
    circuit = problem.circuit
    timeline = problem.timeline
    n = problem.graph.node_count
    names: list[str] = []
    domains: list[int] = []
    node_mask = mask_of(range(1, n + 1))
    layer_vars = []
    for ell, entry in enumerate(timeline, start=1):
        xs = []
        for q in range(1, circuit.qubit_count + 1):
            xs.append(len(names))
            names.append(f"x[{q}][{ell}]")
            domains.append(node_mask)
        z = None
        if isinstance(entry, DummyLayer):
            z = len(names)
            names.append(f"z[{ell}]")
            domains.append(0b11)
        layer_vars.append((tuple(xs), z))

    cons: list[Constraint] = []
    for xs, _ in layer_vars:
        cons.append(Constraint("alldifferent", (xs,)))
    for ell, entry in enumerate(timeline.entries[:-1]):
        xs, z = layer_vars[ell]
        nxt = layer_vars[ell + 1][0]
        if isinstance(entry, DummyLayer):
            cons.append(Constraint("movement_flag", (z, xs, nxt)))
        if problem.mode is Mode.SWAP_ONLY:
            cons.append(Constraint("involution", (xs, nxt)))
    gate_layers = tuple(i for i, e in enumerate(timeline) if isinstance(e, GateLayer))
    return names, domains, cons, layer_vars, gate_layers


def _gates_with_successor(problem: RoutingProblem, layer_vars):
    """(p, q, gate timeline index) for gates not on the final layer."""
    for ell, entry in enumerate(problem.timeline.entries[:-1]):
        if isinstance(entry, GateLayer):
            for p, q in problem.circuit.layers[entry.index]:
                yield p, q, ell


def build_linear_model(problem: RoutingProblem) -> CPModel:
    if problem.variant is not Variant.LINEAR or not problem.graph.is_path():
        raise VariantMismatch("linear model needs the linear variant on a path graph")
    names, domains, cons, layer_vars, gate_layers = _skeleton(problem)
    for ell in gate_layers:
        xs = layer_vars[ell][0]
        for p, q in problem.circuit.layers[problem.timeline[ell].index]:
            cons.append(Constraint("abs_eq_one", (xs[p - 1], xs[q - 1])))
    for ell in range(len(layer_vars) - 1):
        xs, nxt = layer_vars[ell][0], layer_vars[ell + 1][0]
        for a, b in zip(xs, nxt):
            cons.append(Constraint("abs_le_one", (a, b)))
    for p, q, ell in _gates_with_successor(problem, layer_vars):
        xs, nxt = layer_vars[ell][0], layer_vars[ell + 1][0]
        cons.append(Constraint("abs_le_one", (xs[p - 1], nxt[q - 1])))
        cons.append(Constraint("abs_le_one", (xs[q - 1], nxt[p - 1])))
    return CPModel(problem, tuple(names), tuple(domains), tuple(cons), tuple(layer_vars), gate_layers)


def build_general_model(problem: RoutingProblem) -> CPModel:
    if not problem.graph.is_connected():
        raise StructureError("hardware graph is not connected")
    names, domains, cons, layer_vars, gate_layers = _skeleton(problem)
    graph = problem.graph
    arcs = tuple(sorted(graph.arcs()))
    moves = tuple(sorted(set(arcs) | {(i, i) for i in graph.nodes}))
    for ell in gate_layers:
        xs = layer_vars[ell][0]
        for p, q in problem.circuit.layers[problem.timeline[ell].index]:
            cons.append(Constraint("allowed_pairs", (xs[p - 1], xs[q - 1], arcs)))
    for ell in range(len(layer_vars) - 1):
        xs, nxt = layer_vars[ell][0], layer_vars[ell + 1][0]
        for a, b in zip(xs, nxt):
            cons.append(Constraint("allowed_pairs", (a, b, moves)))
    for p, q, ell in _gates_with_successor(problem, layer_vars):
        xs, nxt = layer_vars[ell][0], layer_vars[ell + 1][0]
        cons.append(
            Constraint("gate_persistence", (xs[p - 1], xs[q - 1], nxt[p - 1], nxt[q - 1]))
        )
    return CPModel(problem, tuple(names), tuple(domains), tuple(cons), tuple(layer_vars), gate_layers)


def graph_reflection(graph: HardwareGraph) -> Optional[dict[int, int]]:
    """An involutive, non-trivial automorphism of the graph, if one is known.

    Recognizes rows x cols lattices (paths being 1 x n) and uses the
    left-right mirror; otherwise tries the label reversal k -> n + 1 - k.
    """
    n = graph.node_count
    for rows in range(1, int(n**0.5) + 1):
        if n % rows or n // rows < 2:
            continue
        cols = n // rows
        if gen_lattice_topology(rows, cols).edges == graph.edges:
            return {
                (r - 1) * cols + c: (r - 1) * cols + (cols + 1 - c)
                for r in range(1, rows + 1)
                for c in range(1, cols + 1)
            }
    flip = {k: n + 1 - k for k in graph.nodes}
    if all(frozenset(flip[v] for v in e) in graph.edges for e in graph.edges):
        return flip
    return None


def add_symmetry_breaking(model: CPModel) -> CPModel:
    """Keep one representative per mirror orbit for one first-layer qubit."""
    problem = model.problem
    sigma = graph_reflection(problem.graph)
    if sigma is None or all(k == v for k, v in sigma.items()):
        return model
    anchor = min(problem.circuit.layers[0][0])
    allowed = mask_of(v for v in problem.graph.nodes if v <= sigma[v])
    domains = list(model.domains)
    var = model.x(anchor, model.gate_layers[0])
    domains[var] &= allowed
    return dataclasses.replace(model, domains=tuple(domains))


def add_frontload_dominance(model: CPModel) -> CPModel:
    """Within a dummy block, active SWAP rounds come before idle ones."""
    extra = []
    for block in model.problem.timeline.blocks():
        flags = [model.layer_vars[ell][1] for ell in block]
        for a, b in zip(flags, flags[1:]):
            extra.append(Constraint("at_least", (a, b)))
    return model.with_constraints(extra)


def add_lookahead_bounds(model: CPModel) -> CPModel:
    """Implied constraints: enough active rounds before each later gate layer."""
    problem = model.problem
    timeline = problem.timeline
    circuit = problem.circuit
    dist = problem.graph.distances()
    extra = []
    for ell, (xs, _) in enumerate(model.layer_vars):
        targets = []
        flags = []
        free_steps = 0  # every qubit may step once per gate transition
        for later in range(ell, len(timeline)):
            entry = timeline[later]
            if isinstance(entry, GateLayer) and later > ell:
                gates = tuple((p - 1, q - 1, 2 * free_steps) for p, q in circuit.layers[entry.index])
                targets.append((tuple(flags), gates))
            if isinstance(entry, GateLayer):
                free_steps += 1
            else:
                flags.append(model.layer_vars[later][1])
        if targets:
            extra.append(Constraint("lookahead_bound", (xs, tuple(targets), model.flag_vars, dist)))
    return model.with_constraints(extra)


def build_model(problem: RoutingProblem) -> CPModel:
    if problem.variant is Variant.LINEAR:
        model = build_linear_model(problem)
    else:
        model = build_general_model(problem)
    if problem.symmetry_breaking:
        model = add_symmetry_breaking(model)
    if problem.frontload_dominance:
        model = add_frontload_dominance(model)
    return add_lookahead_bounds(model)
