"""Brute-force optimum for small instances.

A dynamic program over placements at each gate layer. It uses only the
problem definition (graph, gates, dummy count, mode) and none of the
constraint machinery, so it can certify the solver.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .core import HardwareGraph, Mode, Placement, RoutingProblem

NODE_CAP = 6
LAYER_CAP = 6

NodePerm = tuple[int, ...]  # perm[i - 1] is where the token on node i goes


class OracleCapExceeded(ValueError):
    pass


def enumerate_transitions(
    graph: HardwareGraph, mode: Mode = Mode.FAITHFUL, cap: int = NODE_CAP
) -> set[NodePerm]:
    """Node permutations one routing round can realize, identity included.

    SwapOnly rounds are matchings of the graph. Faithful rounds are all
    bijections sending every node to itself or a neighbor.
    """
    n = graph.node_count
    if n > cap:
        raise OracleCapExceeded(f"{n} nodes exceeds cap {cap}")
    mode = Mode(mode)
    adj = {v: {v} for v in graph.nodes}
    for e in graph.edges:
        i, j = tuple(e)
        adj[i].add(j)
        adj[j].add(i)
    out: set[NodePerm] = set()
    if mode is Mode.SWAP_ONLY:
        edges = graph.sorted_edges()
        for r in range(len(edges) + 1):
            for chosen in itertools.combinations(edges, r):
                touched = [v for e in chosen for v in e]
                if len(set(touched)) != len(touched):
                    continue
                perm = list(range(1, n + 1))
                for i, j in chosen:
                    perm[i - 1], perm[j - 1] = j, i
                out.add(tuple(perm))
        return out

    def extend(node: int, used: set, acc: list):
        if node > n:
            out.add(tuple(acc))
            return
        for target in sorted(adj[node] - used):
            used.add(target)
            acc.append(target)
            extend(node + 1, used, acc)
            acc.pop()
            used.discard(target)

    extend(1, set(), [])
    return out


def _compose(second: NodePerm, first: NodePerm) -> NodePerm:
    return tuple(second[first[i] - 1] for i in range(len(first)))


def _within_rounds(rounds: set[NodePerm], n: int, limit: int):
    """Minimal round count (<= limit) for every reachable node permutation.

    Returns ({perm: count}, {perm: (previous perm, round)}) for witnesses.
    """
    identity = tuple(range(1, n + 1))
    moves = [r for r in rounds if r != identity]
    best = {identity: 0}
    parent: dict[NodePerm, tuple[NodePerm, NodePerm]] = {}
    frontier = deque([identity])
    while frontier:
        perm = frontier.popleft()
        if best[perm] == limit:
            continue
        for r in moves:
            nxt = _compose(r, perm)
            if nxt not in best:
                best[nxt] = best[perm] + 1
                parent[nxt] = (perm, r)
                frontier.append(nxt)
    return best, parent


def _stays_or_swaps(perm: NodePerm, a: int, b: int) -> bool:
    return (perm[a - 1], perm[b - 1]) in ((a, b), (b, a))


def _apply(perm: NodePerm, pos: Placement) -> Placement:
    return tuple(perm[v - 1] for v in pos)


@dataclass(frozen=True)
class OracleResult:
    optimum: Optional[int]  # None: infeasible within the dummy budget
    placements: Optional[tuple[Placement, ...]]  # witness over the full timeline


def oracle_optimal(
    problem: RoutingProblem, node_cap: int = NODE_CAP, layer_cap: int = LAYER_CAP
) -> OracleResult:
    graph = problem.graph
    circuit = problem.circuit
    n = graph.node_count
    if n > node_cap:
        raise OracleCapExceeded(f"{n} nodes exceeds cap {node_cap}")
    if circuit.depth > layer_cap:
        raise OracleCapExceeded(f"{circuit.depth} layers exceeds cap {layer_cap}")
    K = problem.dummy_count
    rounds = enumerate_transitions(graph, problem.mode, node_cap)
    reach, reach_parent = _within_rounds(rounds, n, K)

    def compliant(pos: Placement, layer) -> bool:
        return all(graph.adjacent(pos[p - 1], pos[q - 1]) for p, q in layer)

    layer0 = circuit.layers[0]
    # state: placement at a gate layer -> (cost, back pointer)
    states: dict[Placement, tuple[int, Optional[tuple]]] = {
        pos: (0, None)
        for pos in itertools.permutations(range(1, n + 1))
        if compliant(pos, layer0)
    }
    history = [states]
    for b in range(circuit.depth - 1):
        gates = circuit.layers[b]
        after_merge: dict[Placement, tuple[int, Placement]] = {}
        for pos, (cost, _) in states.items():
            # one free round: gate pairs stay or swap, idle qubits move as usual
            for perm in rounds:
                if not all(_stays_or_swaps(perm, pos[p - 1], pos[q - 1]) for p, q in gates):
                    continue
                key = _apply(perm, pos)
                if key not in after_merge or after_merge[key][0] > cost:
                    after_merge[key] = (cost, pos)
        target = circuit.layers[b + 1]
        nxt: dict[Placement, tuple[int, Optional[tuple]]] = {}
        for mid, (cost, origin) in after_merge.items():
            for perm, used in reach.items():
                pos = _apply(perm, mid)
                total = cost + used
                if pos in nxt and nxt[pos][0] <= total:
                    continue
                if compliant(pos, target):
                    nxt[pos] = (total, (origin, mid, perm))
        states = nxt
        history.append(states)
        if not states:
            return OracleResult(None, None)
    best_pos = min(states, key=lambda p: (states[p][0], p))
    optimum = states[best_pos][0]
    return OracleResult(optimum, _witness(history, best_pos, reach_parent, K))


def _witness(history, last: Placement, reach_parent, K: int) -> tuple[Placement, ...]:
    segments = []  # per block, newest first: dummy placements then the gate layer
    pos = last
    for b in range(len(history) - 1, 0, -1):
        origin, mid, perm = history[b][pos][1]
        steps = []
        while perm in reach_parent:
            perm, r = reach_parent[perm]
            steps.append(r)
        dummies = [mid]
        for r in reversed(steps):
            dummies.append(_apply(r, dummies[-1]))
        # active rounds first, idle dummy layers repeat the final placement
        block = (dummies + [dummies[-1]] * K)[:K]
        segments.append(block + [pos])
        pos = origin
    out = [pos]
    for segment in reversed(segments):
        out.extend(segment)
    return tuple(out)
