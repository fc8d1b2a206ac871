"""Pattern corpus, comparison harness, oracle and report emitters."""

from .corpus import CorpusEntry, Pattern, Target, default_corpus_dir, discover_targets, load_corpus, load_entry
from .harness import (
    Aggregate,
    BenchConfig,
    ComparisonReport,
    RunRecord,
    TargetRow,
    build_report,
    compare_modes,
    heatmap_bin,
    run_target,
)
from .oracle import OracleResult, enumerate_reachable
from .report import ReportError, emit_reports, load_report

__all__ = [
    "Aggregate", "BenchConfig", "ComparisonReport", "CorpusEntry", "OracleResult", "Pattern",
    "ReportError", "RunRecord", "Target", "TargetRow", "build_report", "compare_modes",
    "default_corpus_dir", "discover_targets", "emit_reports", "enumerate_reachable",
    "heatmap_bin", "load_corpus", "load_entry", "load_report", "run_target",
]
