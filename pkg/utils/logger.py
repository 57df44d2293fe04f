"""
Logging configuration

This module provides:
- setup_logger(): returns a configured stdlib logger (root logger when no name)
- Logger: small wrapper class used by the pipeline and the CLI
"""

import logging
import logging.handlers
from datetime import datetime
from typing import Optional

from config import LOGS_DIR, LOG_LEVEL, LOG_MAX_BYTES, LOG_BACKUP_COUNT


def setup_logger(name: Optional[str] = None) -> logging.Logger:
    """Setup logger with file and console handlers.

    With no name the root logger is configured, so module loggers created
    with logging.getLogger(__name__) share the same handlers.
    """
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)

    # Avoid duplicate handlers if setup_logger called multiple times
    if getattr(logger, "_l96_configured", False):
        return logger

    LOGS_DIR.mkdir(parents=True, exist_ok=True)

    # File handler - rotating log
    log_file = LOGS_DIR / f"l96_closure_{datetime.now().strftime('%Y-%m-%d')}.log"
    file_handler = logging.handlers.RotatingFileHandler(
        log_file,
        maxBytes=LOG_MAX_BYTES,
        backupCount=LOG_BACKUP_COUNT
    )
    file_handler.setLevel(logging.DEBUG)

    # Console handler
    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, str(LOG_LEVEL).upper(), logging.INFO))

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    file_handler.setFormatter(formatter)
    console_handler.setFormatter(formatter)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)

    logger._l96_configured = True
    return logger


class Logger:
    """Thin wrapper used by orchestration code.

    Handlers are attached to the root logger only once, by setup_logger() in
    main(); the wrapper itself just names the channel.
    """

    def __init__(self, name: str = __name__):
        self._logger = logging.getLogger(name)

    def debug(self, msg: str):
        self._logger.debug(msg)

    def info(self, msg: str):
        self._logger.info(msg)

    def warning(self, msg: str):
        self._logger.warning(msg)

    def error(self, msg: str):
        self._logger.error(msg)

    def exception(self, msg: str):
        self._logger.exception(msg)
