"""CSV and JSON emitters for comparison reports."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .harness import HEATMAP_BINS, ComparisonReport


class ReportError(OSError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise ReportError(f"{path}: {exc.strerror or exc}") from exc


def emit_reports(report: ComparisonReport, out_dir: Path | str) -> list[Path]:
    """Write comparison, summary, timeline, heatmap and JSON files to ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"{out}: {exc.strerror or exc}") from exc

    paths = []
    p = out / "comparison.csv"
    _write_csv(p, ["file", "class", "method", "pattern", "branches", "strict_covered", "strict_pct",
                   "emote_covered", "emote_pct", "delta", "strict_time_to_coverage",
                   "emote_time_to_coverage", "failed"],
               [[r.file, r.cls, r.method, r.pattern, r.branches, _fmt(r.strict_covered),
                 _fmt(r.strict_pct), _fmt(r.emote_covered), _fmt(r.emote_pct), _fmt(r.delta),
                 _fmt(r.strict_time_to_coverage), _fmt(r.emote_time_to_coverage),
                 "yes" if r.failed else "no"] for r in report.rows])
    paths.append(p)

    p = out / "summary.csv"
    aggregates = list(report.aggregates) + ([report.total] if report.total else [])
    _write_csv(p, ["file", "branches", "strict_covered", "strict_pct", "emote_covered",
                   "emote_pct", "delta"],
               [[a.name, a.branches, _fmt(a.strict_covered), _fmt(a.strict_pct),
                 _fmt(a.emote_covered), _fmt(a.emote_pct), _fmt(a.delta)] for a in aggregates])
    paths.append(p)

    p = out / "timeline.csv"
    _write_csv(p, ["t", "mode", "coverage_pct"],
               [[_fmt(t), mode, _fmt(pct)] for t, mode, pct in report.timeline])
    paths.append(p)

    p = out / "heatmap.csv"
    _write_csv(p, ["strict_bin", "emote_bin", "count"],
               [[s, e, report.heatmap.get(s, {}).get(e, 0)] for s in HEATMAP_BINS for e in HEATMAP_BINS])
    paths.append(p)

    p = out / "report.json"
    try:
        p.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
    except OSError as exc:
        raise ReportError(f"{p}: {exc.strerror or exc}") from exc
    paths.append(p)
    return paths


def load_report(path: Path | str) -> ComparisonReport:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ReportError(f"{path}: {exc.strerror or exc}") from exc
    return ComparisonReport.from_dict(data)
