"""Pydantic schemas."""
from newsrec.schemas.descriptions import CategoryDescription, PromptPair
from newsrec.schemas.manifest import RunManifest
from newsrec.schemas.metrics import MetricReport
from newsrec.schemas.mind import DatasetStats, Impression, NewsArticle
from newsrec.schemas.training import (
    Arch,
    CompositionMode,
    EpochRecord,
    ModelConfig,
    PlmChoice,
    TrainReport,
)

__all__ = [
    "CategoryDescription",
    "PromptPair",
    "RunManifest",
    "MetricReport",
    "DatasetStats",
    "Impression",
    "NewsArticle",
    "Arch",
    "CompositionMode",
    "EpochRecord",
    "ModelConfig",
    "PlmChoice",
    "TrainReport",
]
