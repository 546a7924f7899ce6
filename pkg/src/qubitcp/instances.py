"""Device topologies and random square benchmark circuits.

Circuits are drawn with numpy's PCG64 bit generator: layer ``l`` uses
``Generator(PCG64(seed)).permutation`` called ``l`` times in sequence, so the
same seed always yields the same circuit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import HardwareGraph, LogicalCircuit, RoutingProblem, StructureError

LATTICE_DIMS = {4: (2, 2), 6: (2, 3), 8: (2, 4), 9: (3, 3), 10: (2, 5)}


def gen_linear_topology(n: int) -> HardwareGraph:
    if n < 2:
        raise StructureError(f"linear array needs at least 2 nodes, got {n}")
    return HardwareGraph(n, [(i, i + 1) for i in range(1, n)])


def gen_lattice_topology(rows: int, cols: int) -> HardwareGraph:
    """Grid graph; node (r, c) has id (r - 1) * cols + c."""
    if rows < 1 or cols < 2:
        raise StructureError(f"degenerate lattice {rows}x{cols}")
    edges = []
    for r in range(1, rows + 1):
        for c in range(1, cols + 1):
            node = (r - 1) * cols + c
            if c < cols:
                edges.append((node, node + 1))
            if r < rows:
                edges.append((node, node + cols))
    return HardwareGraph(rows * cols, edges)


def lattice_dims(n: int) -> tuple[int, int]:
    """Default (rows, cols) for an n-node lattice, rows <= cols."""
    if n in LATTICE_DIMS:
        return LATTICE_DIMS[n]
    best = None
    for rows in range(2, int(n**0.5) + 1):
        if n % rows == 0:
            best = (rows, n // rows)
    if best is None:
        raise StructureError(f"no rectangular lattice with {n} nodes")
    return best


def pair_permutation(perm: Sequence[int]) -> tuple[tuple[int, int], ...]:
    """Group consecutive entries into gates; an odd leftover stays idle."""
    return tuple((int(perm[i]), int(perm[i + 1])) for i in range(0, len(perm) - 1, 2))


def gen_square_circuit(q: int, layers: Optional[int] = None, seed: int = 0) -> LogicalCircuit:
    if q < 2:
        raise StructureError("need at least 2 qubits")
    layers = q if layers is None else layers
    rng = np.random.Generator(np.random.PCG64(seed))
    return LogicalCircuit(
        q, [pair_permutation(rng.permutation(q) + 1) for _ in range(layers)]
    )


@dataclass(frozen=True)
class InstanceSpec:
    qubit_count: int
    layer_count: int
    topology: str = "linear"  # "linear" or "lattice"
    seed: int = 0
    rows: Optional[int] = None
    cols: Optional[int] = None

    def __post_init__(self):
        if self.topology not in ("linear", "lattice"):
            raise StructureError(f"unknown topology {self.topology!r}")
        if self.topology == "lattice":
            if self.rows is None or self.cols is None:
                rows, cols = lattice_dims(self.qubit_count)
                object.__setattr__(self, "rows", rows)
                object.__setattr__(self, "cols", cols)
            if self.rows * self.cols != self.qubit_count:
                raise StructureError("lattice rows*cols must equal qubit_count")

    @property
    def name(self) -> str:
        topo = self.topology if self.topology == "linear" else f"lattice{self.rows}x{self.cols}"
        return f"q{self.qubit_count}_l{self.layer_count}_{topo}_s{self.seed}"

    def graph(self) -> HardwareGraph:
        if self.topology == "linear":
            return gen_linear_topology(self.qubit_count)
        return gen_lattice_topology(self.rows, self.cols)

    def circuit(self) -> LogicalCircuit:
        return gen_square_circuit(self.qubit_count, self.layer_count, self.seed)

    def problem(self, **kwargs) -> RoutingProblem:
        kwargs.setdefault("variant", "linear" if self.topology == "linear" else "general")
        return RoutingProblem(self.circuit(), self.graph(), **kwargs)
