"""Depth-optimal qubit assignment and SWAP routing with a finite-domain solver."""

from .core import (
    CompiledCircuit,
    HardwareGraph,
    LogicalCircuit,
    Mode,
    RoutingProblem,
    SolveOutcome,
    Status,
    StructureError,
    Variant,
)
from .instances import InstanceSpec, gen_lattice_topology, gen_linear_topology, gen_square_circuit
from .oracle import oracle_optimal
from .solver import solve_escalating, solve_problem
from .verifier import verify

__version__ = "0.1.0"

__all__ = [
    "CompiledCircuit",
    "HardwareGraph",
    "InstanceSpec",
    "LogicalCircuit",
    "Mode",
    "RoutingProblem",
    "SolveOutcome",
    "Status",
    "StructureError",
    "Variant",
    "gen_lattice_topology",
    "gen_linear_topology",
    "gen_square_circuit",
    "oracle_optimal",
    "solve_escalating",
    "solve_problem",
    "verify",
]
