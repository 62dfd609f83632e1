"""
LSCM Toolkit - Logging

Single stderr sink for loguru.
"""

import os
import sys
from typing import Optional

from loguru import logger

LOG_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan> - {message}"


def configure_logging(level: Optional[str] = None) -> str:
    """
    Replace loguru's default sink.

    The level is ``level`` when given, else ``LSCM_LOG_LEVEL``, else INFO.

    Returns:
        The level in effect.
    """
    level = (level or os.getenv("LSCM_LOG_LEVEL") or "INFO").upper()
    logger.remove()
    logger.add(sys.stderr, level=level, format=LOG_FORMAT)
    return level
