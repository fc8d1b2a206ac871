"""Per-target runs and the STRICT-versus-EMOTE comparison."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence

from ..lang import LangError
from ..search import SearchConfig, evolve
from ..testmodel.cluster import ClusterMode, UnknownTarget
from .corpus import CorpusEntry, Target, load_entry

log = logging.getLogger(__name__)

DESK_BUDGET = 10.0
PAPER_BUDGET = 120.0
DEFAULT_SEEDS = (1, 2, 3)
COMPARED_MODES = (ClusterMode.STRICT, ClusterMode.EMOTE)


@dataclass
class BenchConfig:
    budget_seconds: float = DESK_BUDGET
    population_size: int = 50
    max_generations: Optional[int] = None
    jobs: int = 1
    timeline_interval: float = 1.0


@dataclass
class RunRecord:
    file: str
    cls: str
    method: str
    mode: str
    seed: int
    budget_seconds: float
    branch_total: int
    branch_covered: int
    coverage_pct: float
    timeline: list[tuple[float, int, float]] = field(default_factory=list)
    covered_goals: list[str] = field(default_factory=list)
    covered_at: dict[str, float] = field(default_factory=dict)
    evaluations: int = 0
    generations: int = 0
    elapsed: float = 0.0
    error: Optional[str] = None

    @property
    def target(self) -> str:
        return f"{self.cls}.{self.method}"

    def sort_key(self):
        return (self.file, self.cls, self.method, self.mode, self.seed)


def coverage_pct(covered: float, total: int) -> float:
    return 100.0 if total == 0 else 100.0 * covered / total


def search_config(mode: ClusterMode, seed: int, config: BenchConfig) -> SearchConfig:
    return SearchConfig(
        population_size=config.population_size,
        budget_seconds=config.budget_seconds,
        seed=seed,
        mode=mode,
        max_generations=config.max_generations,
        timeline_interval=config.timeline_interval,
    )


def run_target(entry: CorpusEntry, target: Target, mode: ClusterMode, seed: int,
               config: BenchConfig = BenchConfig()) -> RunRecord:
    """One search for one target; failures come back as a flagged record."""
    base = dict(file=entry.name, cls=target.cls, method=target.method, mode=mode.value,
                seed=seed, budget_seconds=config.budget_seconds)
    try:
        method = entry.program.method(target.cls, target.method)
    except (KeyError, LookupError):
        method = None
    if method is None:
        return RunRecord(**base, branch_total=0, branch_covered=0, coverage_pct=0.0,
                         error=f"unknown target {target}")
    total = len(method.branch_goals)
    try:
        result = evolve(entry.program, target.cls, target.method, search_config(mode, seed, config))
    except UnknownTarget as exc:
        return RunRecord(**base, branch_total=total, branch_covered=0, coverage_pct=0.0, error=str(exc))
    covered = len(result.covered_goals)
    return RunRecord(
        **base,
        branch_total=total,
        branch_covered=covered,
        coverage_pct=coverage_pct(covered, total),
        timeline=[(s.t, s.covered, s.pct) for s in result.timeline],
        covered_goals=sorted(str(g) for g in result.covered_goals),
        covered_at={str(g): t for g, t in sorted(result.ledger.covered_at.items())},
        evaluations=result.evaluations,
        generations=result.generations,
        elapsed=result.elapsed,
        error="; ".join(result.diagnostics) or None,
    )


@lru_cache(maxsize=None)
def _cached_entry(path: str) -> CorpusEntry:
    return load_entry(path)


def _run_job(job) -> RunRecord:
    path, target, mode, seed, config = job
    try:
        entry = _cached_entry(path)
    except (OSError, LangError) as exc:
        return RunRecord(Path(path).stem, target.cls, target.method, mode.value, seed,
                         config.budget_seconds, 0, 0, 0.0, error=str(exc))
    return run_target(entry, target, mode, seed, config)


# --- comparison report ----------------------------------------------------------


@dataclass
class TargetRow:
    file: str
    cls: str
    method: str
    pattern: str
    branches: int
    strict_covered: float
    strict_pct: float
    emote_covered: float
    emote_pct: float
    delta: float
    failed: bool = False
    strict_time_to_coverage: float = 0.0
    emote_time_to_coverage: float = 0.0

    @property
    def target(self) -> str:
        return f"{self.cls}.{self.method}"


@dataclass
class Aggregate:
    name: str
    branches: int
    strict_covered: float
    strict_pct: float
    emote_covered: float
    emote_pct: float
    delta: float


@dataclass
class ComparisonReport:
    seeds: list[int]
    budget_seconds: float
    records: list[RunRecord] = field(default_factory=list)
    rows: list[TargetRow] = field(default_factory=list)
    aggregates: list[Aggregate] = field(default_factory=list)
    total: Optional[Aggregate] = None
    heatmap: dict[str, dict[str, int]] = field(default_factory=dict)
    timeline: list[tuple[float, str, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ComparisonReport":
        return cls(
            seeds=list(data["seeds"]),
            budget_seconds=data["budget_seconds"],
            records=[RunRecord(**{**r, "timeline": [tuple(s) for s in r["timeline"]]})
                     for r in data["records"]],
            rows=[TargetRow(**r) for r in data["rows"]],
            aggregates=[Aggregate(**a) for a in data["aggregates"]],
            total=Aggregate(**data["total"]) if data.get("total") else None,
            heatmap={k: dict(v) for k, v in data["heatmap"].items()},
            timeline=[tuple(t) for t in data["timeline"]],
        )

    def records_for(self, mode: ClusterMode, cls: str, method: str) -> list[RunRecord]:
        return [r for r in self.records if r.mode == mode.value and r.cls == cls and r.method == method]


HEATMAP_BINS = ["0"] + [f"{10 * i}-{10 * (i + 1)}" for i in range(10)] + ["100"]


def heatmap_bin(pct: float) -> str:
    """Exact 0 and exact 100 get edge bins; the rest fall into deciles."""
    if pct <= 0.0:
        return "0"
    if pct >= 100.0:
        return "100"
    i = min(int(pct // 10), 9)
    return HEATMAP_BINS[i + 1]


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def _aggregate(name: str, rows: list[TargetRow]) -> Aggregate:
    branches = sum(r.branches for r in rows)
    sc = sum(r.strict_covered for r in rows)
    ec = sum(r.emote_covered for r in rows)
    sp, ep = coverage_pct(sc, branches), coverage_pct(ec, branches)
    return Aggregate(name, branches, sc, sp, ec, ep, ep - sp)


def coverage_at(timeline: list[tuple[float, int, float]], t: float) -> float:
    """Step-function lookup: coverage percent of the last sample at or before t."""
    pct = timeline[0][2] if timeline else 0.0
    for ts, _, p in timeline:
        if ts <= t + 1e-9:
            pct = p
        else:
            break
    return pct


def mean_timeline(records: list[RunRecord], budget: float, interval: float = 1.0):
    out = []
    steps = int(math.floor(budget / interval + 1e-9))
    for mode in COMPARED_MODES:
        runs = [r for r in records if r.mode == mode.value and r.error is None and r.timeline]
        if not runs:
            continue
        for k in range(steps + 1):
            t = k * interval
            out.append((t, mode.value, _mean([coverage_at(r.timeline, t) for r in runs])))
    return out


def time_to_coverage(r: RunRecord) -> float:
    """Seconds until the run's last newly covered goal (0 if none)."""
    return max(r.covered_at.values(), default=0.0)


def _is_failure(r: RunRecord) -> bool:
    # a saturated cluster is a legitimate outcome, not a harness failure
    return r.error is not None and not r.error.startswith("saturated")


def build_report(entries: list[CorpusEntry], records: list[RunRecord], seeds: Sequence[int],
                 budget: float) -> ComparisonReport:
    records = sorted(records, key=RunRecord.sort_key)
    report = ComparisonReport(list(seeds), budget, records)
    by_key: dict[tuple, list[RunRecord]] = {}
    for r in records:
        by_key.setdefault((r.file, r.cls, r.method, r.mode), []).append(r)
    heat = {s: {e: 0 for e in HEATMAP_BINS} for s in HEATMAP_BINS}
    for entry in sorted(entries, key=lambda e: e.name):
        file_rows = []
        for t in entry.targets:
            strict = by_key.get((entry.name, t.cls, t.method, "strict"), [])
            emote = by_key.get((entry.name, t.cls, t.method, "emote"), [])
            branches = len(entry.program.method(t.cls, t.method).branch_goals)
            failed = len(strict) != len(seeds) or len(emote) != len(seeds) or any(
                _is_failure(r) for r in strict + emote)
            sc = round(_mean([r.branch_covered for r in strict]), 2)
            ec = round(_mean([r.branch_covered for r in emote]), 2)
            sp, ep = coverage_pct(sc, branches), coverage_pct(ec, branches)
            row = TargetRow(entry.name, t.cls, t.method, entry.pattern.value, branches,
                            sc, sp, ec, ep, ep - sp, failed,
                            _mean([time_to_coverage(r) for r in strict]),
                            _mean([time_to_coverage(r) for r in emote]))
            file_rows.append(row)
            heat[heatmap_bin(sp)][heatmap_bin(ep)] += 1
        report.rows.extend(file_rows)
        report.aggregates.append(_aggregate(entry.name, file_rows))
    report.total = _aggregate("TOTAL", report.rows)
    report.heatmap = heat
    report.timeline = mean_timeline(records, budget)
    return report


def compare_modes(entries: list[CorpusEntry], seeds: Sequence[int] = DEFAULT_SEEDS,
                  config: BenchConfig = BenchConfig()) -> ComparisonReport:
    """Run every target of every entry under STRICT and EMOTE for each seed."""
    if not seeds:
        raise ValueError("at least one seed is required")
    jobs = [(str(e.file), t, mode, seed, config)
            for e in entries for t in e.targets for mode in COMPARED_MODES for seed in seeds]
    if config.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(config.jobs, os.cpu_count() or 1)) as pool:
            records = list(pool.map(_run_job, jobs))
    else:
        records = [_run_job(j) for j in jobs]
    for r in records:
        if r.error:
            log.warning("%s %s %s seed %d: %s", r.file, r.target, r.mode, r.seed, r.error)
    return build_report(entries, records, seeds, config.budget_seconds)
