"""Table formatting for metric reports: CSV, Markdown, JSON.

Columns follow the reporting convention Utility, Worst, Gap, EqOdd, DP.
Percent cells are formatted at two decimals with the interpreter's
round-half-to-even float formatting; "mean +/- std" cells use the same
precision on both sides and re-parse losslessly at that precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

METRIC_COLUMNS = ("utility", "worst", "gap", "eqodd", "dp")
_PM = "±"  # plus-minus sign


def fmt_value(value: float, units: str) -> str:
    if units == "percent":
        return f"{value * 100:.2f}"
    return f"{value:.4f}"


def fmt_mean_std(mean: float, std: float, units: str, n: int) -> str:
    if n == 1:
        return fmt_value(mean, units)
    return f"{fmt_value(mean, units)} {_PM} {fmt_value(std, units)}"


def parse_mean_std(cell: str) -> tuple[float, float]:
    """Invert fmt_mean_std; a plain number means std 0."""
    if _PM in cell:
        left, right = cell.split(_PM, 1)
        return float(left.strip()), float(right.strip())
    return float(cell.strip()), 0.0


@dataclass(frozen=True)
class ReportRow:
    method: str
    dataset: str
    split: str
    utility_kind: str
    n_seeds: int
    metrics: dict[str, tuple[float, float]]  # name -> (mean, std), fractions
    warnings: tuple[str, ...] = ()

    def sort_key(self) -> tuple:
        return (self.dataset, self.method, self.split)


_HEADER = ["method", "dataset", "split", "utility_kind", "n_seeds"]


def rows_to_csv(rows: list[ReportRow], units: str) -> str:
    lines = [",".join(_HEADER + list(METRIC_COLUMNS) + ["warnings"])]
    for row in sorted(rows, key=ReportRow.sort_key):
        cells = [row.method, row.dataset, row.split, row.utility_kind, str(row.n_seeds)]
        for name in METRIC_COLUMNS:
            mean, std = row.metrics[name]
            cells.append(fmt_mean_std(mean, std, units, row.n_seeds))
        warn = "; ".join(row.warnings)
        if "," in warn or '"' in warn:
            warn = '"' + warn.replace('"', '""') + '"'
        cells.append(warn)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def rows_to_markdown(rows: list[ReportRow], units: str) -> str:
    header = [
        "Method", "Dataset", "Split", "Utility kind", "Seeds",
        "Utility", "Worst", "Gap", "EqOdd", "DP",
    ]
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for row in sorted(rows, key=ReportRow.sort_key):
        cells = [row.method, row.dataset, row.split, row.utility_kind, str(row.n_seeds)]
        for name in METRIC_COLUMNS:
            mean, std = row.metrics[name]
            cells.append(fmt_mean_std(mean, std, units, row.n_seeds))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[ReportRow]) -> str:
    payload = []
    for row in sorted(rows, key=ReportRow.sort_key):
        payload.append(
            {
                "method": row.method,
                "dataset": row.dataset,
                "split": row.split,
                "utility_kind": row.utility_kind,
                "n_seeds": row.n_seeds,
                "metrics": {
                    name: {"mean": row.metrics[name][0], "std": row.metrics[name][1]}
                    for name in METRIC_COLUMNS
                },
                "warnings": list(row.warnings),
            }
        )
    return json.dumps(payload, indent=2) + "\n"
