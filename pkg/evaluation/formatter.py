"""
Formatter for the evaluation module
Formats metric tables into text and Excel workbooks
"""
import logging
from typing import Any, Dict, List, Optional

import pandas as pd

from utils.report_util import ensure_parent

# Configure logging
logger = logging.getLogger(__name__)

AUC_METRIC = "auc"


def format_value(metric: str, value: Optional[float]) -> str:
    """Ratios as percentages with two decimals, AUC as a two-decimal fraction"""
    if value is None:
        return "n/a"
    if metric == AUC_METRIC:
        return f"{value:.2f}"
    return f"{value * 100:.2f}"


def format_cell(row: Dict[str, Any]) -> str:
    """Point estimate with its interval, e.g. '99.99 (99.98 - 100.00)'"""
    point = format_value(row["metric"], row["point"])
    if row["point"] is None or row["low"] is None:
        return point
    return f"{point} ({format_value(row['metric'], row['low'])} - {format_value(row['metric'], row['high'])})"


def describe_dataset(descriptor: Dict[str, Any]) -> str:
    """Header like '50,000 (Sepsis: 1000, No Sepsis: 49000)'"""
    positives = descriptor.get("positives")
    negatives = descriptor.get("negatives")
    text = f"{descriptor['n_rows']:,}"
    if positives is not None and negatives is not None:
        text += f" (Sepsis: {positives}, No Sepsis: {negatives})"
    return text


def format_evaluation(evaluation: Dict[str, Any], title: str = "Evaluation") -> str:
    """
    Render one evaluate_dataset() block as text

    Args:
        evaluation: Output of evaluation.report.evaluate_dataset
        title: Heading line

    Returns:
        Formatted text report
    """
    lines = [f"{title}: {describe_dataset(evaluation['dataset'])}"]
    width = max(len(row["label"]) for row in evaluation["rows"])
    for row in evaluation["rows"]:
        lines.append(f"  {row['label']:<{width}}  {format_cell(row)}")
    cm = evaluation["confusion"]
    lines.append(f"  Confusion: TP={cm['tp']} TN={cm['tn']} FP={cm['fp']} FN={cm['fn']}")
    sxi = evaluation["sxi"]
    sxi_auc = "n/a" if sxi["auc"] is None else f"{sxi['auc']:.4f}"
    lines.append(f"  SXI++ score AUC: {sxi_auc}; flag accuracy: {sxi['delineation_accuracy'] * 100:.2f}%")
    return "\n".join(lines)


def comparison_frame(case: Dict[str, Any]) -> pd.DataFrame:
    """
    Table layout for one experiment case: one row per metric, one column per unseen set

    Baseline columns (user-supplied numbers) follow the computed ones.
    """
    columns: Dict[str, List[str]] = {}
    labels = [row["label"] for row in case["columns"][0]["evaluation"]["rows"]]
    for column in case["columns"]:
        header = f"{column['name']} {describe_dataset(column['evaluation']['dataset'])}"
        columns[header] = [format_cell(row) for row in column["evaluation"]["rows"]]
    for name, values in sorted(case.get("baselines", {}).items()):
        columns[name] = [str(values.get(row["metric"], "")) for row in case["columns"][0]["evaluation"]["rows"]]
    frame = pd.DataFrame(columns, index=labels)
    frame.index.name = "Metric"
    return frame


def format_comparison(cases: List[Dict[str, Any]]) -> str:
    """Render every experiment case as a text table"""
    blocks = []
    for case in cases:
        frame = comparison_frame(case)
        header = f"{case['name']}: trained on {describe_dataset(case['train'])}"
        blocks.append(header + "\n" + "=" * len(header) + "\n" + frame.to_string())
    return "\n\n".join(blocks)


def export_comparison_excel(cases: List[Dict[str, Any]], path: str) -> Optional[str]:
    """
    Write one sheet per case to an .xlsx workbook

    Args:
        cases: Experiment cases as produced by run_experiment
        path: Output workbook path

    Returns:
        The path written, or None on failure
    """
    try:
        ensure_parent(path)
        with pd.ExcelWriter(path, engine="openpyxl") as writer:
            for case in cases:
                # Excel max sheet name length is 31
                comparison_frame(case).to_excel(writer, sheet_name=case["name"][:31])
        logger.info(f"Saved experiment workbook to {path}")
        return path
    except Exception as e:
        logger.error(f"Error creating Excel: {e}", exc_info=True)
        return None
