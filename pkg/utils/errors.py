"""
Exception hierarchy for the SXI++ pipeline
Each error class carries the CLI exit code it maps to
"""
from typing import Optional


class SxiError(Exception):
    """Base class for every error raised on purpose by the pipeline"""
    exit_code = 3


class ConfigError(SxiError, ValueError):
    """Invalid configuration document or command-line arguments"""
    exit_code = 1


class DataError(SxiError, ValueError):
    """Malformed input data or a violated precondition on tables and labels"""
    exit_code = 2


class ArtifactError(SxiError):
    """Model artifact cannot be trusted: checksum, schema version or missing columns"""
    exit_code = 2


class TrainingError(SxiError):
    """Numerical failure during network training or hyperparameter search"""

    def __init__(self, message: str, epoch: Optional[int] = None):
        if epoch is not None:
            message = f"{message} (epoch {epoch})"
        super().__init__(message)
        self.epoch = epoch


class StageError(SxiError):
    """Wraps a failure inside train_pipeline with the name of the stage that raised it"""

    def __init__(self, stage: str, error: Exception):
        super().__init__(f"stage '{stage}' failed: {error}")
        self.stage = stage
        self.exit_code = getattr(error, "exit_code", 3)
