"""Branch-coverage fitness, optionally restricted to target-rooted call chains."""

from __future__ import annotations

from typing import Iterable

from ..interp import ExecLimits, ExecutionTrace, attributed_events, execute_test
from ..lang.ast import BranchGoalId
from ..lang.checker import CheckedProgram
from ..testmodel.statements import TestCase


def normalize(d: float) -> float:
    return d / (d + 1.0)


def goal_distances(
    trace: ExecutionTrace,
    target: str,
    goals: Iterable[BranchGoalId],
    attributed: bool,
) -> dict[BranchGoalId, float]:
    """Per-goal distance in [0, 1].

    0 when an event takes the goal's arm, ``0.5 + 0.5 * norm(d)`` when the
    predicate was reached (``d`` the smallest observed distance to the arm),
    and 1 when the predicate was never reached.
    """
    events = attributed_events(trace, target) if attributed else trace.events
    taken = set()
    closest: dict[BranchGoalId, float] = {}
    for e in events:
        if e.goal.method != target:
            continue
        taken.add(e.goal)
        opposite = BranchGoalId(e.goal.method, e.goal.index, e.goal.arm.flip())
        d = closest.get(opposite)
        if d is None or e.distance < d:
            closest[opposite] = e.distance
    out = {}
    for g in goals:
        if g in taken:
            out[g] = 0.0
        elif g in closest:
            out[g] = 0.5 + 0.5 * normalize(closest[g])
        else:
            out[g] = 1.0
    return out


def evaluate_fitness(
    test: TestCase,
    program: CheckedProgram,
    target: str,
    goals: list[BranchGoalId],
    attributed: bool,
    limits: ExecLimits = ExecLimits(),
):
    """Execute ``test`` and score it against ``goals`` (lower is better).

    Returns ``(fitness, covered_goals, distances, trace)``. Faulting runs are
    scored on the events recorded before the fault.
    """
    trace = execute_test(program, test, limits)
    distances = goal_distances(trace, target, goals, attributed)
    covered = frozenset(g for g, d in distances.items() if d == 0.0)
    return sum(distances.values()), covered, distances, trace
