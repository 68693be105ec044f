"""Logging setup."""
import logging
import sys
from typing import Optional

from newsrec.core.config import settings

LOGGER_NAME = "newsrec"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """Attach one stream handler to the package logger. Safe to call twice."""
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel((level or settings.log_level).upper())
    if not any(getattr(h, "_newsrec", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._newsrec = True  # type: ignore[attr-defined]
        logger.addHandler(handler)
    return logger
