from pathlib import Path
from typing import Optional
import sys

from loguru import logger

_FORMAT = ("<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
           "<level>{level: <8}</level> | "
           "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
           "<level>{message}</level>")


def setup_logging(level: str = "INFO", log_file: Optional[Path] = None):
    """One stderr sink at ``level``; with ``log_file`` also a DEBUG file sink for the run."""
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=_FORMAT)
    if log_file is not None:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(log_file, level="DEBUG", format=_FORMAT, colorize=False, mode="w")
    return logger
