from .engine import GoalLedger, SearchConfig, SearchResult, TimelineSample, evolve, initial_population
from .fitness import evaluate_fitness, goal_distances, normalize
from .operators import Individual, crossover, mutate, select, splice, split_points

__all__ = [
    "GoalLedger",
    "Individual",
    "SearchConfig",
    "SearchResult",
    "TimelineSample",
    "crossover",
    "evaluate_fitness",
    "evolve",
    "goal_distances",
    "initial_population",
    "mutate",
    "normalize",
    "select",
    "splice",
    "split_points",
]
