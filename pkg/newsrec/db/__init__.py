"""Persistent stores."""
from newsrec.db.description_cache import DescriptionCache

__all__ = ["DescriptionCache"]
