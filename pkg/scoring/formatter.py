"""
Formatter for the scoring module
Formats benchmark distribution summaries into text
"""
import logging
from typing import Any, Dict

# Configure logging
logger = logging.getLogger(__name__)


def _group_line(title: str, group: Dict[str, Any]) -> str:
    purity = group.get("purity")
    purity_text = f"{purity * 100:.1f}%" if purity is not None else "n/a"
    return (f"{title}: {group['rows']} rows "
            f"(positive {group['positive']}, negative {group['negative']}, purity {purity_text})")


def format_benchmark_report(report: Dict[str, Any], title: str = "SXI++ Distribution w.r.t Outcomes") -> str:
    """
    Format a benchmark_report() summary as plain text

    Args:
        report: Output of scoring.scores.benchmark_report
        title: Heading line

    Returns:
        Formatted text report
    """
    lines = [
        title,
        "=" * len(title),
        f"Benchmark (average SXI++ score): {report['benchmark']:.6f}",
        f"Orientation: {'+1' if report['orientation'] > 0 else '-1'}",
        f"Outcomes: {report['pct_positive']:.1f}% positive / {report['pct_negative']:.1f}% negative "
        f"of {report['n_rows']} rows",
        _group_line("At/above benchmark", report["at_or_above_benchmark"]),
        _group_line("Below benchmark", report["below_benchmark"]),
        f"Flagged rows: {report['flagged']}",
    ]
    accuracy = report.get("delineation_accuracy")
    if accuracy is not None:
        lines.append(f"Delineation accuracy: {accuracy * 100:.2f}%")
    return "\n".join(lines)
