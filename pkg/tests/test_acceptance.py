"""Acceptance checks, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line before asserting, so
``pytest -v -s`` (or the captured output of a failure) shows the verdict.
The corpus-wide runs are shared through session fixtures.
"""

import random
import time

import pytest

from modgen.bench import BenchConfig, compare_modes, enumerate_reachable, load_corpus
from modgen.interp import attributed_events, execute_test
from modgen.lang.ast import INT, STR
from modgen.search import (
    Individual,
    SearchConfig,
    crossover,
    evaluate_fitness,
    evolve,
    initial_population,
    mutate,
)
from modgen.testmodel import (
    ClusterMode,
    Construct,
    CtorDesc,
    Invoke,
    Lit,
    MethodDesc,
    TestCase,
    build_cluster,
    invokes,
    validate,
)
from modgen.testmodel.ops import Saturated

SEEDS = (1, 2, 3)
DESK_BUDGET = 10.0
LONG_BUDGET = 30.0
EARLY_CUTOFF = 20.0
JOBS = 4
TRIALS = 1000

MIN_DELTA_POINTS = 5.0
MAX_RUNTIME_SECONDS = 15 * 60
MIN_EARLY_SHARE = 0.90


def report_line(capsys, number: int, ok: bool, detail: str):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def desk_run(corpus):
    start = time.monotonic()
    report = compare_modes(corpus, SEEDS, BenchConfig(budget_seconds=DESK_BUDGET, jobs=JOBS))
    return report, time.monotonic() - start


@pytest.fixture(scope="session")
def long_run(corpus):
    return compare_modes(corpus, SEEDS, BenchConfig(budget_seconds=LONG_BUDGET, jobs=JOBS))


class TestCoverage:
    def test_1_consistency_state_init(self, desk_run, capsys):
        report, _ = desk_run
        got = {}
        for mode in (ClusterMode.STRICT, ClusterMode.EMOTE):
            recs = report.records_for(mode, "Consistency", "checkConsistency")
            got[mode.value] = sorted((r.seed, r.branch_covered, r.branch_total) for r in recs)
        ok = (got["strict"] == [(s, 1, 12) for s in SEEDS]
              and got["emote"] == [(s, 12, 12) for s in SEEDS])
        report_line(capsys, 1, ok, f"Consistency.checkConsistency (seed, covered, total) {got}")
        assert ok

    def test_2_album_attribution(self, album, capsys):
        test = TestCase((
            Construct("a", CtorDesc("Album", ()), ()),
            Invoke("p", "a", MethodDesc("Album", "getPrice", (STR,), INT), (Lit("$5a"),)),
        ))
        target = "Album.stripString"
        goals = album.method("Album", "stripString").branch_goals
        trace = execute_test(album, test)
        attributed = attributed_events(trace, target)
        _, unattributed, _, _ = evaluate_fitness(test, album, target, goals, False)
        ok = attributed == [] and len(unattributed) > 0
        report_line(capsys, 2, ok, f"attributed events {len(attributed)}, "
                                   f"unattributed covered {sorted(map(str, unattributed))}")
        assert ok

    def test_3_corpus_delta_and_runtime(self, desk_run, capsys):
        report, seconds = desk_run
        t = report.total
        ok = t.delta >= MIN_DELTA_POINTS and seconds <= MAX_RUNTIME_SECONDS
        report_line(capsys, 3, ok, f"{t.branches} branches, strict {t.strict_pct:.2f}% "
                                   f"emote {t.emote_pct:.2f}% delta {t.delta:+.2f} points, "
                                   f"wall {seconds:.0f} s at {JOBS} jobs")
        assert ok

    def test_4_public_field_target(self, desk_run, capsys):
        report, _ = desk_run
        pcts = {m.value: [r.coverage_pct for r in report.records_for(m, "Artists", "getArtist")]
                for m in (ClusterMode.STRICT, ClusterMode.EMOTE)}
        ok = all(len(v) == len(SEEDS) and all(p == 100.0 for p in v) for v in pcts.values())
        report_line(capsys, 4, ok, f"Artists.getArtist coverage per seed {pcts}")
        assert ok

    def test_5_matches_oracle(self, desk_run, corpus, capsys):
        report, _ = desk_run
        entries = {e.name: e for e in corpus}
        oracles = {}
        checked, mismatches, refused = 0, [], set()
        for r in report.records:
            key = (r.file, r.cls, r.method, r.mode)
            if key not in oracles:
                oracles[key] = enumerate_reachable(entries[r.file].program, r.cls, r.method,
                                                   ClusterMode(r.mode))
            oracle = oracles[key]
            if not oracle.admitted:
                refused.add(key)
                continue
            checked += 1
            want = sorted(str(g) for g in oracle.reachable)
            if sorted(r.covered_goals) != want:
                mismatches.append((r.target, r.mode, r.seed, r.covered_goals, want))
        ok = checked > 0 and not mismatches
        report_line(capsys, 5, ok, f"{checked} runs checked against enumeration, "
                                   f"{len(refused)} target/mode pairs over the cap, "
                                   f"mismatches {mismatches}")
        assert ok

    def test_7_coverage_front_loaded(self, long_run, capsys):
        shares = []
        for seed in SEEDS:
            eventually = early = 0
            for r in long_run.records:
                if r.seed != seed:
                    continue
                eventually += len(r.covered_at)
                early += sum(1 for at in r.covered_at.values() if at <= EARLY_CUTOFF)
            shares.append(early / eventually if eventually else 1.0)
        mean = sum(shares) / len(shares)
        ok = mean >= MIN_EARLY_SHARE
        report_line(capsys, 7, ok, f"share covered by {EARLY_CUTOFF:g} s of {LONG_BUDGET:g} s "
                                   f"per seed {[round(s, 4) for s in shares]}, mean {mean:.4f}")
        assert ok


# --- operator properties ----------------------------------------------------


def _clusters(corpus, mode):
    out = []
    for entry in corpus:
        for t in entry.targets:
            cluster = build_cluster(entry.program, t.cls, t.method, mode)
            try:
                initial_population(cluster, SearchConfig(mode=mode, population_size=1, elite_count=0),
                                   random.Random(0))
            except Saturated:
                continue
            out.append((entry.program, cluster))
    return out


def _random_individual(cluster, rng):
    cfg = SearchConfig(mode=cluster.mode, population_size=1, elite_count=0,
                       max_test_length=12)
    return initial_population(cluster, cfg, rng)[0]


def _strict_allowed(s, cluster) -> bool:
    el = getattr(s, "element", None)
    return el is None or el in cluster.elements


class TestOperatorProperties:
    def test_6_operator_properties(self, corpus, capsys):
        violations: dict[str, int] = {}
        trials: dict[str, int] = {}

        def check(name, ok):
            trials[name] = trials.get(name, 0) + 1
            if not ok:
                violations[name] = violations.get(name, 0) + 1

        rng = random.Random(2024)
        emote = _clusters(corpus, ClusterMode.EMOTE)
        strict = _clusters(corpus, ClusterMode.STRICT)
        both = emote + strict

        for _ in range(TRIALS):
            program, cluster = rng.choice(both)
            p1, p2 = _random_individual(cluster, rng), _random_individual(cluster, rng)
            o1, o2 = crossover(p1, p2, cluster, rng, j=0.0)
            check("crossover j=0 swaps parents", o1.test == p2.test and o2.test == p1.test)
            o1, o2 = crossover(p1, p2, cluster, rng, j=1.0)
            check("crossover j=1 keeps parents", o1.test == p1.test and o2.test == p2.test)

        for _ in range(TRIALS):
            program, cluster = rng.choice(both)
            p1, p2 = _random_individual(cluster, rng), _random_individual(cluster, rng)
            kids = crossover(p1, p2, cluster, rng)
            kids += (mutate(p1, cluster, rng),)
            check("offspring and mutants type-check",
                  all(validate(k.test, program) == [] for k in kids))

        for program, cluster in emote:
            for _ in range(TRIALS // len(emote) + 1):
                p = _random_individual(cluster, rng)
                kids = crossover(p, _random_individual(cluster, rng), cluster, rng)
                kids += (mutate(p, cluster, rng),)
                for k in kids:
                    check("EMOTE offspring end with the target",
                          len(k.test) > 0 and invokes(k.test.statements[-1], cluster.target))

        for program, cluster in strict:
            for _ in range(TRIALS // len(strict) + 1):
                p = _random_individual(cluster, rng)
                kids = crossover(p, _random_individual(cluster, rng), cluster, rng)
                kids += (mutate(p, cluster, rng),)
                for k in kids:
                    check("STRICT tests stay in the whitelist",
                          all(_strict_allowed(s, cluster) for s in k.test))

        for trial in range(TRIALS):
            program, cluster = both[trial % len(both)]

            def lineage(seed):
                r = random.Random(seed)
                a, b = _random_individual(cluster, r), _random_individual(cluster, r)
                c, _ = crossover(a, b, cluster, r)
                return [a.test, b.test, mutate(c, cluster, r).test]

            check("same seed, same individuals", lineage(trial) == lineage(trial))

        # whole searches: every evaluated individual and every archive step
        consistency = next(e for e in corpus if e.name == "consistency").program
        for mode in (ClusterMode.EMOTE, ClusterMode.STRICT):
            cluster = build_cluster(consistency, "Consistency", "checkConsistency", mode)
            for seed in range(11, 22):
                archive = []
                cfg = SearchConfig(mode=mode, seed=seed, population_size=20, max_generations=50,
                                   stop_when_covered=False)
                result = evolve(consistency, "Consistency", "checkConsistency", cfg,
                                record_evaluated=True,
                                on_generation=lambda g, pop, ledger: archive.append(
                                    dict(ledger.best_distance)))
                if seed == 11:
                    again = evolve(consistency, "Consistency", "checkConsistency", cfg,
                                   record_evaluated=True)
                    check("same seed, same search", result.evaluated == again.evaluated)
                for t in result.evaluated:
                    if mode is ClusterMode.EMOTE:
                        check("EMOTE evaluated individuals end with the target",
                              invokes(t.statements[-1], cluster.target))
                    else:
                        check("STRICT evaluated individuals stay in the whitelist",
                              all(_strict_allowed(s, cluster) for s in t))
                for prev, cur in zip(archive, archive[1:]):
                    check("archive distances never increase", all(cur[g] <= prev[g] for g in prev))

        total = sum(violations.values())
        ok = total == 0
        detail = ", ".join(f"{k} {violations.get(k, 0)}/{n}" for k, n in trials.items())
        report_line(capsys, 6, ok, f"violations: {detail}")
        assert ok
