"""Core module."""
from newsrec.core.config import settings

__all__ = ["settings"]
