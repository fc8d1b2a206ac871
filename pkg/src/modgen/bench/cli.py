"""Command-line entry point: ``modgen run | compare | list``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional

from ..interp import execute_test
from ..lang import LangError
from ..search import SearchConfig, evolve
from ..testmodel.cluster import ClusterMode, UnknownTarget
from .corpus import default_corpus_dir, load_corpus, load_entry
from .harness import DEFAULT_SEEDS, DESK_BUDGET, PAPER_BUDGET, BenchConfig, compare_modes, coverage_pct
from .report import ReportError, emit_reports

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_IO = 2


def _default_seed() -> int:
    raw = os.environ.get("MODGEN_SEED")
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"modgen: MODGEN_SEED must be an integer, got {raw!r}")


def _seeds(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}")


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected on or off")
    return text == "on"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modgen", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="evolve tests for one target method")
    run.add_argument("--file", required=True, type=Path)
    run.add_argument("--class", dest="cls", required=True)
    run.add_argument("--method", required=True)
    run.add_argument("--mode", choices=[m.value for m in ClusterMode], default="emote")
    run.add_argument("--budget-secs", type=float, default=DESK_BUDGET)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--attributed", type=_on_off, default=None, metavar="on|off")
    run.add_argument("--dump-trace", action="store_true")
    run.add_argument("--out", type=Path, required=True)

    cmp_ = sub.add_parser("compare", help="compare STRICT and EMOTE over a corpus")
    cmp_.add_argument("--corpus", type=Path, default=None)
    cmp_.add_argument("--seeds", type=_seeds, default=list(DEFAULT_SEEDS))
    cmp_.add_argument("--budget-secs", type=float, default=None)
    cmp_.add_argument("--paper-scale", action="store_true", help=f"{PAPER_BUDGET:g} s per method")
    cmp_.add_argument("--jobs", type=int, default=1)
    cmp_.add_argument("--out", type=Path, required=True)

    ls = sub.add_parser("list", help="list targets and branch counts")
    ls.add_argument("--file", required=True, type=Path)
    return parser


def _diagnostics(exc: LangError, path: Path) -> str:
    return "\n".join(d.format(str(path)) for d in exc.diagnostics)


def cmd_run(args) -> int:
    try:
        entry = load_entry(args.file)
    except OSError as exc:
        print(f"modgen: {args.file}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except LangError as exc:
        print(_diagnostics(exc, args.file), file=sys.stderr)
        return EXIT_DIAGNOSTICS

    mode = ClusterMode(args.mode)
    if args.attributed is not None and mode is not ClusterMode.WHOLE:
        print(f"modgen: --attributed is fixed by --mode {mode.value}; ignoring", file=sys.stderr)
    seed = args.seed if args.seed is not None else _default_seed()
    config = SearchConfig(budget_seconds=args.budget_secs, seed=seed, mode=mode,
                          attributed_fitness=args.attributed)
    try:
        result = evolve(entry.program, args.cls, args.method, config)
    except UnknownTarget as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS

    total = len(result.ledger.goals)
    covered = len(result.covered_goals)
    record = {
        "file": str(args.file),
        "target": result.target,
        "mode": mode.value,
        "seed": seed,
        "budget_seconds": args.budget_secs,
        "attributed": config.attributed_fitness,
        "branch_total": total,
        "branch_covered": covered,
        "coverage_pct": coverage_pct(covered, total),
        "covered_goals": sorted(str(g) for g in result.covered_goals),
        "covered_at": {str(g): t for g, t in sorted(result.ledger.covered_at.items())},
        "evaluations": result.evaluations,
        "generations": result.generations,
        "diagnostics": result.diagnostics,
        "timeline": [asdict(s) for s in result.timeline],
    }
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "run.json").write_text(json.dumps(record, indent=2), encoding="utf-8")
        suite = "\n\n".join(t.serialize() for t in result.best_suite)
        (args.out / "tests.txt").write_text(suite + "\n", encoding="utf-8")
        if args.dump_trace:
            parts = [f"## test {i}\n{execute_test(entry.program, t).dump()}"
                     for i, t in enumerate(result.best_suite)]
            (args.out / "trace.txt").write_text("\n".join(parts) + "\n", encoding="utf-8")
    except OSError as exc:
        print(f"modgen: {exc.filename or args.out}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{result.target} [{mode.value}] {covered}/{total} branches "
          f"({record['coverage_pct']:.2f}%) in {result.evaluations} evaluations")
    for d in result.diagnostics:
        print(f"note: {d}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args) -> int:
    corpus = args.corpus if args.corpus is not None else default_corpus_dir()
    try:
        entries = load_corpus(corpus)
    except OSError as exc:
        print(f"modgen: {exc}", file=sys.stderr)
        return EXIT_IO
    except LangError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    if not args.seeds:
        print("modgen: at least one seed is required", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    budget = args.budget_secs if args.budget_secs is not None else (
        PAPER_BUDGET if args.paper_scale else DESK_BUDGET)
    report = compare_modes(entries, args.seeds, BenchConfig(budget_seconds=budget, jobs=args.jobs))
    try:
        emit_reports(report, args.out)
    except ReportError as exc:
        print(f"modgen: {exc}", file=sys.stderr)
        return EXIT_IO
    t = report.total
    print(f"{len(report.rows)} targets, {t.branches} branches: strict {t.strict_pct:.2f}% "
          f"emote {t.emote_pct:.2f}% delta {t.delta:+.2f} points")
    return EXIT_DIAGNOSTICS if any(r.failed for r in report.rows) else EXIT_OK


def cmd_list(args) -> int:
    try:
        entry = load_entry(args.file)
    except OSError as exc:
        print(f"modgen: {args.file}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except LangError as exc:
        print(_diagnostics(exc, args.file), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    print(f"# pattern: {entry.pattern.value}")
    for t in entry.targets:
        print(f"{t.qualified}\t{len(entry.program.method(t.cls, t.method).branch_goals)}")
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "compare": cmd_compare, "list": cmd_list}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
