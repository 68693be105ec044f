"""Run provenance record."""
from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class RunManifest(BaseModel):
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    input_digests: Dict[str, str] = Field(default_factory=dict)
    seed: Optional[int] = None
    started_at: datetime
    finished_at: Optional[datetime] = None
    outputs: List[str] = Field(default_factory=list)
    status: str = "running"
