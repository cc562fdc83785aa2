"""
Formatter for the insights module
Renders decision paths and adjustment policies into text and JSON
"""
import logging
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from insights.adjust import AdjustmentPolicy
from insights.paths import RulePath
from scoring.scores import BenchmarkView, ScoreSet

# Configure logging
logger = logging.getLogger(__name__)


def format_threshold(value: float) -> str:
    return f"{value:g}"


def render_rule(path: RulePath, class_names: Sequence[str] = ("No Sepsis", "Sepsis")) -> str:
    """
    Conjunction in the 'SBP > 220 AND 42 ≤ Age ≤ 72 → Sepsis' style

    A feature bounded on both sides renders as 'a ≤ F ≤ b'; the JSON keeps the
    exact comparators ('>' below, '<=' above).
    """
    outcome = class_names[path.leaf_class]
    if not path.conditions:
        return f"(all rows) → {outcome}"
    parts = []
    for name, lower, upper in path.intervals():
        if lower is not None and upper is not None:
            parts.append(f"{format_threshold(lower)} ≤ {name} ≤ {format_threshold(upper)}")
        elif lower is not None:
            parts.append(f"{name} > {format_threshold(lower)}")
        else:
            parts.append(f"{name} ≤ {format_threshold(upper)}")
    return " AND ".join(parts) + f" → {outcome}"


def _path_lines(title: str, path: RulePath, class_names: Sequence[str], prior: float) -> list:
    lines = [title, f"  Rule: {render_rule(path, class_names)}"]
    if not path.conditions:
        lines.append(f"  Prior-rate rule: {prior * 100:.1f}% of training rows are {class_names[path.leaf_class]}")
    lines.append(f"  Purity: {path.purity * 100:.2f}%  Coverage: {path.coverage} rows  (tree {path.tree})")
    return lines


def render_recommendations(path: RulePath, policy: AdjustmentPolicy, scores: Union[ScoreSet, BenchmarkView],
                           counter_path: Optional[RulePath] = None,
                           feature_signs: Optional[Mapping[str, int]] = None,
                           class_names: Sequence[str] = ("No Sepsis", "Sepsis"),
                           prior_rates: Tuple[float, float] = (0.0, 0.0)) -> Tuple[str, Dict[str, Any]]:
    """
    Text and JSON insights report

    Args:
        path: Best path for the requested class
        policy: Adjustment percentages that produced the forest's training data
        scores: Analysed rows with their benchmark; a BenchmarkView when the benchmark comes from training
        counter_path: Best path for the opposite class, if any
        feature_signs: Weight sign per feature
        class_names: Display names of classes 0 and 1
        prior_rates: Share of training rows in class 0 and class 1

    Returns:
        (text, payload) carrying the same thresholds
    """
    signs = dict(feature_signs or {})
    adjustments = {name: policy.multiplier(int(np.sign(sign))) for name, sign in sorted(signs.items())}
    flagged = float(scores.flags.mean()) if scores.flags.size else 0.0
    source = getattr(scores, "benchmark_source", "rows")

    lines = ["SXI++ Actionable Insights", "========================="]
    lines += _path_lines(f"Target pathway ({class_names[path.leaf_class]})", path, class_names,
                         prior_rates[path.leaf_class])
    if counter_path is not None:
        lines += _path_lines(f"Counter pathway ({class_names[counter_path.leaf_class]})", counter_path,
                             class_names, prior_rates[counter_path.leaf_class])
    lines.append(f"Adjustment: +{policy.p_up * 100:.1f}% / -{policy.p_down * 100:.1f}% "
                 f"(score-target correlation {policy.correlation_sign:+d})")
    for name, factor in adjustments.items():
        if factor != 1.0:
            lines.append(f"  {name}: x{factor:g}")
    lines.append(f"Benchmark SXI++ score ({source}): {scores.benchmark:.6f} (orientation {scores.orientation:+d}); "
                 f"{flagged * 100:.1f}% of rows at or beyond it")

    payload = {
        "target_path": {**path.to_dict(), "rule": render_rule(path, class_names)},
        "counter_path": None if counter_path is None else {**counter_path.to_dict(),
                                                           "rule": render_rule(counter_path, class_names)},
        "policy": policy.to_dict(),
        "adjustments": adjustments,
        "benchmark": scores.benchmark,
        "benchmark_source": source,
        "orientation": scores.orientation,
        "flagged_share": flagged,
        "prior_rates": list(prior_rates),
    }
    return "\n".join(lines), payload
