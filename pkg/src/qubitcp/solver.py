"""Model + engine + verifier, wired together."""

from __future__ import annotations

import logging
from typing import Optional

from .core import RoutingProblem, SolveOutcome, Status
from .engine import Limits, solve
from .model import build_model
from .verifier import verify

LOG = logging.getLogger(__name__)


class VerificationError(RuntimeError):
    """The solver produced a circuit the verifier rejects (always a bug)."""


def solve_problem(
    problem: RoutingProblem,
    strategy: str = "ascent",
    time_limit: Optional[float] = None,
    node_limit: Optional[int] = None,
    state_cache: bool = True,
) -> SolveOutcome:
    model = build_model(problem)
    outcome = solve(model, strategy, Limits(time_limit, node_limit), state_cache=state_cache)
    if outcome.best is not None:
        violations = verify(problem, outcome.best)
        if violations:
            raise VerificationError("; ".join(str(v) for v in violations))
    return outcome


def solve_escalating(
    problem: RoutingProblem, max_dummy_count: int, **kwargs
) -> tuple[RoutingProblem, SolveOutcome]:
    """Re-solve with one more dummy layer per block while infeasible."""
    while True:
        outcome = solve_problem(problem, **kwargs)
        if outcome.status is not Status.INFEASIBLE or problem.dummy_count >= max_dummy_count:
            return problem, outcome
        LOG.info("infeasible with K=%d, retrying with K=%d", problem.dummy_count, problem.dummy_count + 1)
        problem = problem.replace(dummy_count=problem.dummy_count + 1)
