"""Logging setup."""

import logging
from logging.handlers import RotatingFileHandler

from uav_coverage.infra.settings import settings

LOG_FORMAT = "%(levelname)s %(asctime)s %(message)s"
DATE_FORMAT = "%Y-%m-%dT%H:%M:%S"
APP_LOGGER = "uav_coverage"

_handlers: list[logging.Handler] = []


def setup_logging(level: str | None = None, console_level: int = logging.ERROR):
    """
    Configure the rotating action log and the error console.

    Calling it again replaces the handlers installed by the previous call.

    Args:
        level: overrides the configured log_level (e.g. "DEBUG")
        console_level: threshold of the stderr handler
    """
    log_dir = settings.log_dir
    log_dir.mkdir(parents=True, exist_ok=True)

    log_file = log_dir / settings.get("log_file")
    log_level = getattr(logging, (level or settings.get("log_level", "INFO")).upper())
    max_bytes = int(settings.get("log_max_size_mb", 10) * 1024 * 1024)
    backup_count = settings.get("log_backup_count", 5)

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    file_handler = RotatingFileHandler(
        log_file,
        maxBytes=max_bytes,
        backupCount=backup_count,
        encoding="utf-8",
    )
    file_handler.setFormatter(formatter)
    file_handler.setLevel(log_level)

    # stdout carries command output
    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler.setLevel(console_level)

    root_logger = logging.getLogger()
    for handler in _handlers:
        root_logger.removeHandler(handler)
        handler.close()
    _handlers[:] = [file_handler, console_handler]

    root_logger.setLevel(log_level)
    for handler in _handlers:
        root_logger.addHandler(handler)

    app_logger = logging.getLogger(APP_LOGGER)
    app_logger.setLevel(log_level)
    return app_logger


def get_logger(name: str = APP_LOGGER) -> logging.Logger:
    """Get a logger under the application namespace."""
    if name != APP_LOGGER and not name.startswith(f"{APP_LOGGER}."):
        name = f"{APP_LOGGER}.{name}"
    return logging.getLogger(name)
