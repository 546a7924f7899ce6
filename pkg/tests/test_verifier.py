import random

import pytest

from qubitcp.core import CompiledCircuit, LogicalCircuit, RoutingProblem, StructureError
from qubitcp.instances import gen_lattice_topology, gen_linear_topology
from qubitcp.solver import solve_problem
from qubitcp.verifier import ViolationKind, verify

from conftest import worked_problem, single_move_mutation

A = (1, 2, 3, 4)
B = (1, 3, 2, 4)


def kinds(problem, placements, objective=None):
    compiled = CompiledCircuit.from_placements(problem, placements)
    if objective is not None:
        compiled = CompiledCircuit(compiled.placements, objective, problem.circuit.depth + objective)
    return {v.kind for v in verify(problem, compiled)}


def test_worked_solution_is_valid(worked):
    assert kinds(worked, [A, A, B, B, B, B]) == set()


def test_not_bijection(worked):
    assert ViolationKind.NOT_BIJECTION in kinds(worked, [A, A, (1, 1, 2, 4), B, B, B])


def test_gate_not_adjacent(worked):
    assert ViolationKind.GATE_NOT_ADJACENT in kinds(worked, [A] * 6)


def test_illegal_move(worked):
    assert ViolationKind.ILLEGAL_MOVE in kinds(worked, [A, A, (4, 2, 3, 1), B, B, B])


def test_gate_pair_must_stay_or_swap():
    circuit = LogicalCircuit(3, [[(1, 2)], [(1, 2)]])
    p = RoutingProblem(circuit, gen_linear_topology(3), dummy_count=1)
    found = kinds(p, [(1, 2, 3), (1, 3, 2), (1, 3, 2)])
    assert ViolationKind.ILLEGAL_GATE_TRANSITION in found


def test_idle_qubits_may_move_at_gate_transition():
    circuit = LogicalCircuit(4, [[(1, 2)], [(1, 2)]])
    for mode in ("faithful", "swap_only"):
        p = RoutingProblem(circuit, gen_linear_topology(4), dummy_count=1, mode=mode)
        assert kinds(p, [(1, 2, 3, 4), (2, 1, 4, 3), (2, 1, 4, 3)]) == set()


def test_merged_swap_is_legal():
    circuit = LogicalCircuit(3, [[(1, 2)], [(1, 3)]])
    p = RoutingProblem(circuit, gen_linear_topology(3), dummy_count=1)
    assert kinds(p, [(1, 2, 3), (2, 1, 3), (2, 1, 3)]) == set()


def test_rotation_rejected_in_swap_only():
    square = gen_lattice_topology(2, 2)
    circuit = LogicalCircuit(4, [[(1, 2), (3, 4)], [(1, 2), (3, 4)]])
    rotated = (2, 4, 1, 3)
    for mode, bad in (("faithful", False), ("swap_only", True)):
        p = RoutingProblem(circuit, square, dummy_count=1, mode=mode)
        found = kinds(p, [(1, 2, 3, 4), (1, 2, 3, 4), rotated])
        assert (ViolationKind.NOT_INVOLUTION in found) is bad


def test_objective_mismatch(worked):
    assert ViolationKind.OBJECTIVE_MISMATCH in kinds(worked, [A, A, B, B, B, B], objective=2)


def test_budget_exceeded():
    p = worked_problem(dummy_count=1)
    # claims objective 2 with one dummy layer
    found = kinds(p, [A, B, B], objective=2)
    assert ViolationKind.BUDGET_EXCEEDED in found


def test_length_mismatch_is_structural(worked):
    with pytest.raises(StructureError):
        verify(worked, CompiledCircuit((A,), 0, 2))


def test_reports_every_violation(worked):
    found = kinds(worked, [A, A, (1, 1, 2, 4), (4, 3, 2, 1), B, B])
    assert len(found) >= 2


def test_mutations_are_rejected():
    rng = random.Random(5)
    p = worked_problem(variant="general")
    best = solve_problem(p).best
    for _ in range(30):
        mutated, _ = single_move_mutation(best, rng)
        assert verify(p, mutated)
