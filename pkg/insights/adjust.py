"""
Percentage-based feature adjustment
"""
import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Mapping

import numpy as np

from tabular.data import DataTable
from utils.errors import ConfigError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AdjustmentPolicy:
    p_up: float = 0.10
    p_down: float = 0.10
    correlation_sign: int = 1

    def __post_init__(self):
        if not (0 <= self.p_up < 1 and 0 <= self.p_down < 1):
            raise ConfigError(f"p_up and p_down must be in [0, 1), got {self.p_up}, {self.p_down}")
        if self.correlation_sign not in (1, -1):
            raise ConfigError(f"correlation_sign must be +1 or -1, got {self.correlation_sign}")

    def multiplier(self, weight_sign: int) -> float:
        """
        Factor applied to a feature whose weight has the given sign

        +1 correlation: positive weights x(1 + p_up), negative weights x(1 - p_down).
        -1 correlation: positive weights x(1 - p_down), negative weights x(1 + p_up).
        """
        if weight_sign == 0:
            return 1.0
        if weight_sign * self.correlation_sign > 0:
            return 1.0 + self.p_up
        return 1.0 - self.p_down

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def adjust_features(table: DataTable, feature_signs: Mapping[str, int], policy: AdjustmentPolicy) -> DataTable:
    """
    Scale feature columns by the policy multiplier of their weight sign

    Columns without a sign (and the target and identifiers) are left untouched.

    Args:
        table: Imputed table
        feature_signs: Feature name -> sign of its weight (+1, -1 or 0)
        policy: Percentages and the score/target correlation sign

    Returns:
        New DataTable with the adjusted values
    """
    frame = table.frame.copy()
    features = set(table.feature_names)
    adjusted = 0
    for name, sign in feature_signs.items():
        if name not in features:
            continue
        factor = policy.multiplier(int(np.sign(sign)))
        if factor != 1.0:
            frame[name] = frame[name].astype(float) * factor
            adjusted += 1
    logger.info(f"Adjusted {adjusted} features (p_up={policy.p_up}, p_down={policy.p_down}, "
                f"sign={policy.correlation_sign:+d})")
    return table.with_frame(frame)
