"""JSON-file store for generated category descriptions."""
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterator, Optional, Union

from pydantic import ValidationError

from newsrec.core.exceptions import ConfigurationError
from newsrec.schemas.descriptions import CategoryDescription

logger = logging.getLogger(__name__)


class DescriptionCache:
    """Map of category key to ``CategoryDescription`` backed by one JSON document.

    The file is a JSON object ``key -> {text, generator_model,
    prompt_fingerprint, word_count}`` written with sorted keys. Writes go
    through a temp file and ``os.replace`` so a crash never leaves a torn file.
    """

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self.path = Path(path) if path is not None else None
        self.entries: Dict[str, CategoryDescription] = {}

    @classmethod
    def load(cls, path: Union[str, Path], missing_ok: bool = True) -> "DescriptionCache":
        cache = cls(path)
        if not cache.path.exists():
            if not missing_ok:
                raise ConfigurationError(f"Description cache not found: {path}", param="cache")
            return cache
        try:
            raw = json.loads(cache.path.read_text(encoding="utf-8"))
            for key, entry in raw.items():
                cache.entries[key] = CategoryDescription(key=key, **entry)
        except (json.JSONDecodeError, ValidationError, TypeError) as e:
            raise ConfigurationError(f"Corrupt description cache {path}: {e}", param="cache")
        logger.debug("[DescriptionCache] Loaded %d entries from %s", len(cache.entries), path)
        return cache

    def save(self) -> None:
        if self.path is None:
            return
        payload = {key: self.entries[key].to_cache_entry() for key in sorted(self.entries)}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".descriptions-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=True)
                f.write("\n")
            os.replace(tmp, self.path)
        except Exception:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def get(self, key: str) -> Optional[CategoryDescription]:
        return self.entries.get(key)

    def put(self, description: CategoryDescription) -> None:
        self.entries[description.key] = description

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[CategoryDescription]:
        return iter(self.entries.values())
