"""Plain-text, JSON and CSV renderings of reports and traces.

Display precision mirrors the assessment stages: 1 dp exploitability scores,
2 dp normalized and aggregate scores, 4 dp activations. JSON carries full
precision.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Sequence

from .assessment import AssessmentReport, ComparisonReport
from .fcm import IterationTrace


def _table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines)


def format_trace(trace: IterationTrace, decimals: int = 4) -> str:
    headers = ["It", *trace.concepts]
    rows = [
        [str(i), *(f"{a:.{decimals}f}" for a in state)]
        for i, state in enumerate(trace.states, start=1)
    ]
    return _table(headers, rows)


def trace_csv(trace: IterationTrace) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["iteration", *trace.concepts])
    for i, state in enumerate(trace.states, start=1):
        writer.writerow([i, *(repr(a) for a in state)])
    return buffer.getvalue()


def format_report(report: AssessmentReport, include_trace: bool = False) -> str:
    sections = [f"Scenario: {report.scenario_name}    attacker: {report.attacker_id}    target: {report.target_id}"]

    cve_rows = [
        [
            c.vuln_id,
            c.cve_id,
            c.asset_id,
            c.original_vector.render(),
            f"{c.original_score:.1f}",
            c.modified_vector.render(modified=True),
            f"{c.modified_score:.1f}",
            f"{c.vulnerability_score:.2f}",
        ]
        for c in report.per_cve
    ]
    sections.append(
        "Vulnerability scores\n"
        + _table(["ID", "CVE", "Asset", "Original", "E", "Modified", "ME", "Score"], cve_rows)
    )

    asset_rows = [
        [
            a.asset_id,
            str(len(a.inputs)),
            a.relation.value.upper() if a.relation else "N/A",
            ", ".join(f"{s:.2f}" for s in a.inputs),
            f"{a.value:.2f}",
        ]
        for a in report.per_asset
    ]
    sections.append(
        "Asset aggregation\n"
        + _table(["Asset", "CVEs", "Relation", "Inputs", "Value"], asset_rows)
    )

    if include_trace:
        sections.append("Iteration trace\n" + format_trace(report.trace))

    status = "converged" if report.converged else "did NOT converge"
    tv = report.target_value
    sections.append(
        f"Result: {status} after {report.iterations_used} iterations\n"
        f"target {report.target_id}: {tv.unit:.4f} (unit)   "
        f"{tv.ten:.2f} (0-10)   {tv.cvss39:.2f} (0-3.9)"
    )
    return "\n\n".join(sections) + "\n"


def report_json(report: AssessmentReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def format_comparison(cmp: ComparisonReport) -> str:
    rows = [
        [
            v.name,
            f"{v.value:.4f}",
            f"{v.absolute_reduction:.4f}",
            f"{v.percent_reduction:.2f}",
        ]
        for v in cmp.variants
    ]
    header = (
        f"Baseline: {cmp.baseline_name}    target: {cmp.target_id}    "
        f"value: {cmp.baseline_value:.4f}\n\n"
    )
    return header + _table(["Scenario", "Value", "Reduction", "Reduction (%)"], rows) + "\n"


def comparison_json(cmp: ComparisonReport) -> str:
    return json.dumps(cmp.to_dict(), indent=2) + "\n"


def comparison_csv(cmp: ComparisonReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["scenario", "value", "absolute_reduction", "percent_reduction"])
    writer.writerow([cmp.baseline_name, repr(cmp.baseline_value), "0", "0.00"])
    for v in cmp.variants:
        writer.writerow([v.name, repr(v.value), repr(v.absolute_reduction), f"{v.percent_reduction:.2f}"])
    return buffer.getvalue()
