"""The generational evolutionary search for one target method."""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..interp import ExecLimits
from ..lang.ast import BranchGoalId
from ..lang.checker import CheckedProgram
from ..testmodel.cluster import ClusterMode, TestCluster, build_cluster
from ..testmodel.ops import Saturated, enforce_target_suffix, random_statement_insertion
from ..testmodel.statements import TestCase
from .fitness import evaluate_fitness
from .operators import Individual, crossover, mutate, select

log = logging.getLogger(__name__)


@dataclass
class SearchConfig:
    population_size: int = 50
    budget_seconds: float = 10.0
    seed: int = 1
    mutation_rate: Optional[float] = None  # None: 1/len(test)
    crossover_rate: float = 0.75
    tournament_size: int = 4
    elite_count: int = 2
    max_test_length: int = 40
    length_cap: int = 60
    mode: ClusterMode = ClusterMode.EMOTE
    attributed_fitness: Optional[bool] = None
    max_generations: Optional[int] = None  # test hook: deterministic stop
    timeline_interval: float = 1.0
    stop_when_covered: bool = True
    nested_attribution: bool = False
    limits: ExecLimits = field(default_factory=ExecLimits)

    def __post_init__(self):
        if self.mode is ClusterMode.EMOTE:
            self.attributed_fitness = True
        elif self.mode is ClusterMode.STRICT:
            self.attributed_fitness = False
        elif self.attributed_fitness is None:
            self.attributed_fitness = False
        if self.nested_attribution:
            raise NotImplementedError("re-rooting attribution at nested target frames")
        if self.population_size < 1 or self.tournament_size < 1:
            raise ValueError("population and tournament sizes must be positive")
        if not 0 <= self.elite_count <= self.population_size:
            raise ValueError("elite_count must lie in [0, population_size]")


@dataclass
class TimelineSample:
    t: float
    covered: int
    pct: float


@dataclass
class GoalLedger:
    goals: list[BranchGoalId]
    best_distance: dict[BranchGoalId, float] = field(default_factory=dict)
    covered_by: dict[BranchGoalId, TestCase] = field(default_factory=dict)
    covered_at: dict[BranchGoalId, float] = field(default_factory=dict)

    def __post_init__(self):
        for g in self.goals:
            self.best_distance.setdefault(g, 1.0)

    def update(self, ind: Individual, t: float) -> bool:
        """Fold one evaluation into the archive; True if a new goal got covered."""
        new = False
        for g, d in ind.distances.items():
            if d < self.best_distance[g]:
                self.best_distance[g] = d
            if d == 0.0 and g not in self.covered_by:
                self.covered_by[g] = ind.test
                self.covered_at[g] = t
                new = True
        return new

    @property
    def covered(self) -> set[BranchGoalId]:
        return set(self.covered_by)

    @property
    def uncovered(self) -> list[BranchGoalId]:
        return [g for g in self.goals if g not in self.covered_by]

    def coverage_pct(self) -> float:
        if not self.goals:
            return 100.0
        return 100.0 * len(self.covered_by) / len(self.goals)


@dataclass
class SearchResult:
    target: str
    mode: ClusterMode
    ledger: GoalLedger
    timeline: list[TimelineSample]
    evaluations: int = 0
    generations: int = 0
    elapsed: float = 0.0
    diagnostics: list[str] = field(default_factory=list)
    population: list[Individual] = field(default_factory=list)
    evaluated: list[TestCase] = field(default_factory=list)

    @property
    def best_suite(self) -> list[TestCase]:
        suite = []
        for g in sorted(self.ledger.covered_by):
            t = self.ledger.covered_by[g]
            if t not in suite:
                suite.append(t)
        return suite

    @property
    def covered_goals(self) -> set[BranchGoalId]:
        return self.ledger.covered


def initial_population(cluster: TestCluster, config: SearchConfig, rng) -> list[Individual]:
    """Random tests built by repeated insertion up to a per-test random length."""
    population = []
    for _ in range(config.population_size):
        length = rng.randint(1, config.max_test_length)
        test = TestCase()
        while len(test) < length:
            test = random_statement_insertion(test, cluster, rng)
        if cluster.mode is ClusterMode.EMOTE:
            test = enforce_target_suffix(test, cluster.target, cluster, rng)
        population.append(Individual(test))
    return population


class _Search:
    def __init__(self, program, cluster, goals, config, clock, record_evaluated):
        self.program = program
        self.cluster = cluster
        self.target = cluster.target.qualified
        self.goals = goals
        self.config = config
        self.clock = clock
        self.start = clock()
        self.ledger = GoalLedger(goals)
        self.active = list(goals)
        self.evaluations = 0
        self.record_evaluated = record_evaluated
        self.evaluated: list[TestCase] = []

    def elapsed(self) -> float:
        return self.clock() - self.start

    def evaluate(self, ind: Individual):
        fitness, covered, distances, _ = evaluate_fitness(
            ind.test, self.program, self.target, self.goals,
            self.config.attributed_fitness, self.config.limits,
        )
        ind.covered = covered
        ind.distances = distances
        ind.eval_count += 1
        self.evaluations += 1
        if self.record_evaluated:
            self.evaluated.append(ind.test)
        if self.ledger.update(ind, self.elapsed()):
            self.active = self.ledger.uncovered
        ind.fitness = sum(distances[g] for g in self.active)

    def rescore(self, population: list[Individual]):
        # fitness only counts goals the archive has not covered yet
        for ind in population:
            ind.fitness = sum(ind.distances[g] for g in self.active)


def _rank_key(ind: Individual):
    return (ind.fitness, len(ind.test))


def evolve(
    program: CheckedProgram,
    target_class: str,
    target_method: str,
    config: SearchConfig,
    clock: Callable[[], float] = time.monotonic,
    record_evaluated: bool = False,
    on_generation: Optional[Callable[[int, list[Individual], GoalLedger], None]] = None,
) -> SearchResult:
    """Evolve tests for one target method until the budget runs out.

    The sequence of generated individuals depends only on ``config.seed``;
    the wall clock decides only when the loop stops.
    """
    rng = random.Random(config.seed)
    cluster = build_cluster(program, target_class, target_method, config.mode)
    method = program.method(target_class, target_method)
    goals = method.branch_goals
    search = _Search(program, cluster, goals, config, clock, record_evaluated)
    result = SearchResult(cluster.target.qualified, config.mode, search.ledger, [])

    try:
        population = initial_population(cluster, config, rng)
    except Saturated as exc:
        result.diagnostics.append(f"saturated cluster: {exc}")
        result.timeline.append(TimelineSample(0.0, 0, search.ledger.coverage_pct()))
        return result

    for ind in population:
        search.evaluate(ind)
    search.rescore(population)

    interval = config.timeline_interval
    result.timeline.append(
        TimelineSample(0.0, len(search.ledger.covered_by), search.ledger.coverage_pct())
    )
    next_sample = interval
    generation = 0

    def done() -> bool:
        if config.max_generations is not None and generation >= config.max_generations:
            return True
        if config.max_generations is None and search.elapsed() >= config.budget_seconds:
            return True
        return config.stop_when_covered and not search.active

    while not done():
        population.sort(key=_rank_key)
        offspring = [ind.copy() for ind in population[: config.elite_count]]
        while len(offspring) < config.population_size:
            p1 = select(population, config.tournament_size, rng)
            p2 = select(population, config.tournament_size, rng)
            if rng.random() < config.crossover_rate:
                o1, o2 = crossover(p1, p2, cluster, rng, config.length_cap)
            else:
                o1, o2 = Individual(p1.test), Individual(p2.test)
            for child in (o1, o2):
                child = mutate(child, cluster, rng, config.mutation_rate, config.length_cap)
                search.evaluate(child)
                offspring.append(child)
        population = offspring[: config.population_size]
        search.rescore(population)
        generation += 1
        if on_generation is not None:
            on_generation(generation, population, search.ledger)
        now = search.elapsed()
        while now >= next_sample:
            result.timeline.append(
                TimelineSample(next_sample, _covered_by(search.ledger, next_sample),
                               _pct(search.ledger, next_sample))
            )
            next_sample += interval

    elapsed = search.elapsed()
    final = TimelineSample(elapsed, len(search.ledger.covered_by), search.ledger.coverage_pct())
    if generation and elapsed > result.timeline[-1].t:
        result.timeline.append(final)
    result.evaluations = search.evaluations
    result.generations = generation
    result.elapsed = elapsed
    result.population = population
    result.evaluated = search.evaluated
    log.debug("%s %s: %d/%d goals after %d generations", result.target, config.mode.value,
              len(search.ledger.covered_by), len(goals), generation)
    return result


def _covered_by(ledger: GoalLedger, t: float) -> int:
    return sum(1 for at in ledger.covered_at.values() if at <= t)


def _pct(ledger: GoalLedger, t: float) -> float:
    if not ledger.goals:
        return 100.0
    return 100.0 * _covered_by(ledger, t) / len(ledger.goals)
