"""Experiment configuration and training reports."""
from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class CompositionMode(str, Enum):
    """What the news encoder reads for each article."""

    TITLE_ONLY = "title"
    TITLE_TEMPLATE = "template"
    TITLE_GENERATED = "generated"


class Arch(str, Enum):
    """User-encoder family."""

    NAML = "naml"
    NRMS = "nrms"
    NPA = "npa"


class PlmChoice(str, Enum):
    DISTILBERT = "distilbert-base"
    BERT = "bert-base"
    TOY = "toy"


PRETRAINED_IDS = {
    PlmChoice.DISTILBERT: "distilbert-base-uncased",
    PlmChoice.BERT: "bert-base-uncased",
    PlmChoice.TOY: "toy-bert",
}


class ModelConfig(BaseModel):
    """Architecture choice plus every training hyperparameter."""

    model_config = ConfigDict(use_enum_values=False, extra="forbid")

    arch: Arch = Arch.NAML
    plm_name: PlmChoice = PlmChoice.DISTILBERT
    mode: CompositionMode = CompositionMode.TITLE_GENERATED

    d_news: int = Field(default=256, ge=1)
    attn_hidden: int = Field(default=200, ge=1)
    n_heads: int = Field(default=8, ge=1)
    user_embed_dim: int = Field(default=100, ge=1)

    history_len: int = Field(default=50, ge=1)
    k_negatives: int = Field(default=4, ge=1)
    lr: float = Field(default=1e-4, gt=0.0)
    weight_decay: float = Field(default=0.01, ge=0.0)
    batch_size: int = Field(default=128, ge=1)
    epochs: int = Field(default=3, ge=1)
    grad_clip_norm: float = Field(default=1.0, gt=0.0)
    max_len_title: int = Field(default=96, ge=4)
    max_len_augmented: int = Field(default=160, ge=4)
    seed: int = 42
    num_workers: int = Field(default=0, ge=0)

    # Share of training samples scored as the unseen user, so its NPA embedding gets trained.
    fallback_user_rate: float = Field(default=0.05, ge=0.0, lt=1.0)

    # Fast mode: keep the PLM weights fixed.
    freeze_plm: bool = False

    # Shape of the randomly initialised stand-in encoder (plm_name = toy).
    toy_hidden: int = Field(default=64, ge=8)
    toy_layers: int = Field(default=2, ge=1)
    toy_heads: int = Field(default=2, ge=1)

    @model_validator(mode="after")
    def check_shapes(self) -> "ModelConfig":
        if self.arch == Arch.NRMS and self.d_news % self.n_heads != 0:
            raise ValueError(
                f"d_news ({self.d_news}) must be divisible by n_heads ({self.n_heads}) for nrms"
            )
        if self.plm_name == PlmChoice.TOY and self.toy_hidden % self.toy_heads != 0:
            raise ValueError("toy_hidden must be divisible by toy_heads")
        return self

    @property
    def max_len(self) -> int:
        if self.mode == CompositionMode.TITLE_ONLY:
            return self.max_len_title
        return self.max_len_augmented

    @property
    def pretrained_id(self) -> str:
        return PRETRAINED_IDS[self.plm_name]


class EpochRecord(BaseModel):
    epoch: int
    mean_loss: float
    n_samples: int
    n_batches: int
    wall_time_s: float
    seed: int


class TrainReport(BaseModel):
    """Outcome of one training run."""

    epochs: List[EpochRecord] = Field(default_factory=list)
    n_samples: int = 0
    skipped_impressions: int = 0
    wall_time_s: float = 0.0
    seed: int = 0
    optimizer: Dict[str, Any] = Field(default_factory=dict)
    deviations: List[str] = Field(default_factory=list)
    checkpoints: List[str] = Field(default_factory=list)

    @property
    def losses(self) -> List[float]:
        return [e.mean_loss for e in self.epochs]
