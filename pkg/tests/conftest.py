import pytest

from qubitcp.core import LogicalCircuit, RoutingProblem
from qubitcp.instances import gen_lattice_topology, gen_linear_topology

WORKED_LAYERS = [[(1, 2), (3, 4)], [(1, 3), (2, 4)]]


def worked_problem(**kw):
    kw.setdefault("variant", "linear")
    return RoutingProblem(LogicalCircuit(4, WORKED_LAYERS), gen_linear_topology(4), **kw)


@pytest.fixture
def worked():
    return worked_problem()


@pytest.fixture
def square():
    return gen_lattice_topology(2, 2)


def single_move_mutation(compiled, rng):
    """Move one qubit at one timeline layer to a different node."""
    from qubitcp.core import CompiledCircuit

    placements = [list(p) for p in compiled.placements]
    layer = rng.randrange(len(placements))
    qubit = rng.randrange(len(placements[layer]))
    n = len(placements[layer])
    old = placements[layer][qubit]
    placements[layer][qubit] = rng.choice([v for v in range(1, n + 1) if v != old])
    frozen = tuple(tuple(p) for p in placements)
    return CompiledCircuit(frozen, compiled.objective, compiled.depth), (layer, qubit)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
