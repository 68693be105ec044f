"""Custom exceptions."""
from typing import List, Optional


class NewsRecError(Exception):
    """Base exception for the recommendation pipeline."""

    def __init__(
        self,
        message: str,
        error_type: str = "runtime_error",
        param: Optional[str] = None,
        code: Optional[str] = None,
        exit_code: int = 1,
    ):
        self.message = message
        self.error_type = error_type
        self.param = param
        self.code = code
        self.exit_code = exit_code
        super().__init__(message)

    def to_dict(self) -> dict:
        return {
            "error": {
                "message": self.message,
                "type": self.error_type,
                "param": self.param,
                "code": self.code,
            }
        }


class ParseError(NewsRecError):
    """Malformed line in a MIND TSV file."""

    def __init__(self, message: str, line_number: int, source: str = "tsv"):
        self.line_number = line_number
        self.source = source
        super().__init__(
            message=f"{source} line {line_number}: {message}",
            error_type="parse_error",
            param=source,
            code="malformed_line",
            exit_code=3,
        )


class ConfigurationError(NewsRecError):
    """Invalid configuration or usage."""

    def __init__(self, message: str, param: Optional[str] = None):
        super().__init__(
            message=message,
            error_type="configuration_error",
            param=param,
            code="invalid_config",
            exit_code=2,
        )


class LlmClientError(NewsRecError):
    """LLM backend call failed."""

    def __init__(self, message: str, transient: bool = False, code: Optional[str] = None):
        self.transient = transient
        super().__init__(
            message=message,
            error_type="llm_error",
            code=code or ("llm_transient" if transient else "llm_error"),
            exit_code=4,
        )


class DescriptionGenerationError(NewsRecError):
    """A category description could not be produced."""

    def __init__(
        self,
        message: str,
        key: Optional[str] = None,
        attempts: int = 0,
        failures: Optional[List["DescriptionGenerationError"]] = None,
    ):
        self.key = key
        self.attempts = attempts
        self.failures = failures or []
        super().__init__(
            message=message,
            error_type="generation_error",
            param=key,
            code="description_failed",
            exit_code=4,
        )

    @property
    def failed_keys(self) -> List[str]:
        if self.failures:
            return [f.key for f in self.failures if f.key]
        return [self.key] if self.key else []


class MissingDescriptionError(NewsRecError):
    """A category key has no cached description."""

    def __init__(self, key: str):
        self.key = key
        super().__init__(
            message=f"No generated description cached for category '{key}'",
            error_type="missing_artifact",
            param=key,
            code="missing_description",
            exit_code=5,
        )


class TrainingError(NewsRecError):
    """Training could not proceed."""

    def __init__(self, message: str, code: Optional[str] = None):
        super().__init__(
            message=message,
            error_type="training_error",
            code=code or "training_failed",
            exit_code=6,
        )


class CheckpointError(NewsRecError):
    """Checkpoint missing, incomplete, or inconsistent with its sidecar."""

    def __init__(self, message: str, param: Optional[str] = None):
        super().__init__(
            message=message,
            error_type="checkpoint_error",
            param=param,
            code="bad_checkpoint",
            exit_code=7,
        )


class MetricError(NewsRecError):
    """Ranking metric undefined for the given labels."""

    def __init__(self, message: str):
        super().__init__(
            message=message,
            error_type="metric_error",
            code="undefined_metric",
            exit_code=1,
        )
