"""Text renderings of dominance results: DOT Hasse diagrams and summary tables."""

from typing import Optional

from .dominance import DominanceRelation, HasseDiagram, hasse_edges
from .models import Report


def _quote(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(rel: DominanceRelation, diagram: Optional[HasseDiagram] = None) -> str:
    """DOT digraph of the Hasse diagram, edges pointing from dominator to dominated."""
    diagram = diagram or hasse_edges(rel)
    labels = diagram.labels
    lines = ["digraph dominance {"]
    lines += [f"  {_quote(label)};" for label in labels]
    lines += [f"  {_quote(labels[a])} -> {_quote(labels[b])};" for a, b in diagram.edges]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _names(names: list[str]) -> str:
    return ", ".join(names) if names else "-"


def format_summary(report: Report) -> str:
    """Plain-text table of the choice sets at every delta."""
    rows = [("delta", "max", "und")]
    for entry in report.deltas:
        rows.append((f"{entry.delta:.6g}", _names(entry.maximal), _names(entry.undominated)))
    widths = [max(len(row[k]) for row in rows) for k in range(3)]
    table = [
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ]

    lines = [
        f"delta_max = {report.delta_max:.12g}"
        + (" (boundary)" if report.delta_max_at_boundary else ""),
        f"uno = {{{_names(report.uniformly_optimal)}}}",
        f"par = {{{_names(report.pareto_front)}}}",
        "",
        *table,
    ]
    marginal = [
        f"  delta={entry.delta:.6g}: " + ", ".join(f"{a}>{b}" for a, b in entry.marginal)
        for entry in report.deltas
        if entry.marginal
    ]
    if marginal:
        lines += ["", "marginal verdicts:", *marginal]
    oracle = [entry for entry in report.deltas if entry.oracle is not None]
    if oracle:
        lines += ["", "oracle (corroborated/contradicted/confirmed/unconfirmed):"]
        lines += [
            f"  delta={entry.delta:.6g}: {entry.oracle.corroborated}/{entry.oracle.contradicted}"
            f"/{entry.oracle.confirmed}/{entry.oracle.unconfirmed}"
            for entry in oracle
        ]
    if not report.positive_support:
        lines += ["", "note: some extreme point gives a state probability zero"]
    return "\n".join(lines)
