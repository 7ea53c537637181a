"""Overall and per-type tables rendered as percentages with two decimals."""

from __future__ import annotations

from typing import List, Sequence, Tuple

from .corpus import ENTITY_TYPES
from .metrics import MetricsReport

OVERALL_ROWS = ("Accuracy", "Precision", "Recall", "F1")
MISSING = "-"


def pct(value: float) -> str:
    return f"{100 * value:.2f}"


def overall_table(reports: Sequence[MetricsReport], average: str) -> List[List[str]]:
    rows = []
    for name in OVERALL_ROWS:
        cells = []
        for r in reports:
            agg = r.micro if average == "micro" else r.weighted
            value = {
                "Accuracy": r.token_accuracy,
                "Precision": agg.precision,
                "Recall": agg.recall,
                "F1": agg.f1,
            }[name]
            cells.append(pct(value))
        rows.append([name, *cells])
    return rows


def type_table(reports: Sequence[MetricsReport]) -> List[List[str]]:
    rows = []
    for t in ENTITY_TYPES:
        cells = [pct(r.per_type[t].f1) if t in r.per_type else MISSING for r in reports]
        rows.append([t, *cells])
    return rows


def tables(names: Sequence[str], reports: Sequence[MetricsReport]) -> List[Tuple[str, List[str], List[List[str]]]]:
    if len(names) != len(reports):
        raise ValueError("one column name per metrics report is required")
    return [
        ("Overall performance (micro average)", ["Metric", *names], overall_table(reports, "micro")),
        ("Overall performance (weighted average)", ["Metric", *names], overall_table(reports, "weighted")),
        ("Tag-wise F1", ["Tag", *names], type_table(reports)),
    ]


def render_markdown(names: Sequence[str], reports: Sequence[MetricsReport]) -> str:
    out = []
    for title, header, rows in tables(names, reports):
        out.append(f"## {title}\n")
        out.append("| " + " | ".join(header) + " |")
        out.append("|" + "|".join(["---"] + ["---:"] * (len(header) - 1)) + "|")
        for row in rows:
            out.append("| " + " | ".join(row) + " |")
        out.append("")
    return "\n".join(out)


def render_tsv(names: Sequence[str], reports: Sequence[MetricsReport]) -> str:
    blocks = []
    for title, header, rows in tables(names, reports):
        lines = [f"# {title}", "\t".join(header)]
        lines.extend("\t".join(row) for row in rows)
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)
