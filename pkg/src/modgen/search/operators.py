"""Selection, crossover and mutation over single test cases."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ..lang.ast import BranchGoalId
from ..testmodel.cluster import ClusterMode, TestCluster
from ..testmodel.ops import (
    Saturated,
    enforce_target_suffix,
    modify_statement,
    random_statement_insertion,
    type_repair,
)
from ..testmodel.statements import TestCase, rename_statement

INSERT_ALPHA = 0.5


@dataclass
class Individual:
    test: TestCase
    fitness: float = math.inf
    covered: frozenset = frozenset()
    distances: dict[BranchGoalId, float] = field(default_factory=dict)
    eval_count: int = 0

    def copy(self) -> "Individual":
        return Individual(self.test, self.fitness, self.covered, dict(self.distances), self.eval_count)

    def __len__(self) -> int:
        return len(self.test)


def select(population: list[Individual], tournament_size: int, rng) -> Individual:
    """Tournament selection: lowest fitness wins, then shorter test, then rng."""
    contenders = [rng.choice(population) for _ in range(max(1, tournament_size))]
    best_key = min((c.fitness, len(c.test)) for c in contenders)
    tied = [c for c in contenders if (c.fitness, len(c.test)) == best_key]
    return tied[0] if len(tied) == 1 else rng.choice(tied)


def split_points(j: float, n1: int, n2: int) -> tuple[int, int]:
    return math.ceil(j * n1), math.ceil(j * n2)


def splice(p1: TestCase, p2: TestCase, j: float) -> tuple[TestCase, TestCase]:
    """Raw single-point crossover at relative position ``j`` before repair.

    Variables of the borrowed tail are renamed apart so that references into
    the discarded head of the other parent become dangling.
    """
    c1, c2 = split_points(j, len(p1), len(p2))
    o1 = p1.statements[:c1] + _renamed(p2.statements[c2:], "x")
    o2 = p2.statements[:c2] + _renamed(p1.statements[c1:], "y")
    return TestCase(o1), TestCase(o2)


def _renamed(stmts, tag: str):
    names = set()
    for s in stmts:
        for _, arg, _ in s.slots():
            if hasattr(arg, "name"):
                names.add(arg.name)
        if s.var is not None:
            names.add(s.var)
    mapping = {n: f"{tag}_{n}" for n in names}
    return tuple(rename_statement(s, mapping) for s in stmts)


def _finish(test: TestCase, cluster: TestCluster, rng) -> TestCase:
    test = type_repair(test, cluster, rng).canonical()
    if cluster.mode is ClusterMode.EMOTE:
        test = enforce_target_suffix(test, cluster.target, cluster, rng)
    return test


def crossover(p1: Individual, p2: Individual, cluster: TestCluster, rng,
              length_cap: int = 60, j: Optional[float] = None) -> tuple[Individual, Individual]:
    if j is None:
        j = rng.random()
    raw1, raw2 = splice(p1.test, p2.test, j)
    out = []
    for raw, parent in ((raw1, p1), (raw2, p2)):
        try:
            child = _finish(raw, cluster, rng)
        except Saturated:
            child = parent.test
        if len(child) > length_cap:
            child = parent.test
        out.append(Individual(child))
    return out[0], out[1]


def mutate(ind: Individual, cluster: TestCluster, rng, mutation_rate: Optional[float] = None,
           length_cap: int = 60) -> Individual:
    """Delete, change and insert phases, each applied with probability 1/3.

    Within the delete and change phases every statement is picked
    independently with ``mutation_rate`` (default 1/len).
    """
    test = ind.test
    n = len(test)
    rate = mutation_rate if mutation_rate is not None else (1.0 / n if n else 1.0)

    if n and rng.random() < 1 / 3:
        keep = [s for s in test.statements if rng.random() >= rate]
        if len(keep) != n:
            try:
                test = type_repair(TestCase(tuple(keep)), cluster, rng)
            except Saturated:
                test = ind.test

    if len(test) and rng.random() < 1 / 3:
        for i in range(len(test)):
            if i < len(test) and rng.random() < rate:
                try:
                    test = modify_statement(test, i, cluster, rng)
                except Saturated:
                    pass

    if rng.random() < 1 / 3 or not len(test):
        count = 0
        while len(test) < length_cap and rng.random() < INSERT_ALPHA ** count:
            try:
                test = random_statement_insertion(test, cluster, rng)
            except Saturated:
                break
            count += 1

    if cluster.mode is ClusterMode.EMOTE:
        try:
            test = enforce_target_suffix(test, cluster.target, cluster, rng)
        except Saturated:
            test = ind.test
    if len(test) > length_cap:
        test = ind.test
    return Individual(test)
