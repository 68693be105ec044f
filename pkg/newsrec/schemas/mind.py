"""MIND catalog and click-log records."""
from datetime import datetime
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

# Reference statistics of the full MIND split.
REFERENCE_STATS = {
    "n_users": 94057,
    "n_news": 65238,
    "n_impressions": 230117,
    "n_clicks": 347727,
}


class NewsArticle(BaseModel):
    """One catalog entry of news.tsv."""

    news_id: str = Field(min_length=1)
    category: str = Field(min_length=1)
    subcategory: str = Field(min_length=1)
    title: str
    abstract: Optional[str] = None
    url: Optional[str] = None
    # Entity columns are carried as opaque strings and never interpreted.
    title_entities: Optional[str] = None
    abstract_entities: Optional[str] = None

    @field_validator("category", "subcategory")
    @classmethod
    def normalize_taxonomy(cls, v: str) -> str:
        v = v.strip().lower()
        if not v:
            raise ValueError("category fields must be non-empty")
        return v

    @field_validator("title")
    @classmethod
    def require_title(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("title must be non-empty")
        return v


class Impression(BaseModel):
    """One serving event of behaviors.tsv."""

    impression_id: str
    user_id: str
    timestamp: datetime
    history: List[str] = Field(default_factory=list)
    candidates: List[Tuple[str, int]]

    @field_validator("candidates")
    @classmethod
    def validate_candidates(cls, v: List[Tuple[str, int]]) -> List[Tuple[str, int]]:
        if not v:
            raise ValueError("impression must have at least one candidate")
        for news_id, label in v:
            if label not in (0, 1):
                raise ValueError(f"label for {news_id} must be 0 or 1, got {label}")
        return v

    @property
    def positives(self) -> List[str]:
        return [n for n, label in self.candidates if label == 1]

    @property
    def negatives(self) -> List[str]:
        return [n for n, label in self.candidates if label == 0]

    @property
    def labels(self) -> List[int]:
        return [label for _, label in self.candidates]


class DatasetStats(BaseModel):
    """Counts reported for a catalog plus click log."""

    n_users: int = Field(ge=0)
    n_news: int = Field(ge=0)
    n_impressions: int = Field(ge=0)
    n_clicks: int = Field(ge=0)

    def compare_reference(self) -> Dict[str, Dict[str, int]]:
        """Fields whose value differs from REFERENCE_STATS."""
        ours = self.model_dump()
        return {
            name: {"observed": ours[name], "reference": expected}
            for name, expected in REFERENCE_STATS.items()
            if ours[name] != expected
        }

    def to_text(self) -> str:
        """key: value lines for terminal output."""
        return "\n".join(f"{name}: {value}" for name, value in self.model_dump().items())
