# ============================================================================
# LOGGING CONFIGURATION
# ============================================================================
# This file configures the application logging system.
# Every module imports the shared `logger`; the CLI calls setup_logging()
# once to attach handlers. Logs go to stderr because stdout carries JSON.

import logging
import sys
from typing import List, Optional

from pythonjsonlogger import jsonlogger

TEXT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
JSON_FORMAT = "%(asctime)s %(name)s %(levelname)s %(message)s"

# Named logger for the application, used by rounding/, datasets/ and cli/
logger = logging.getLogger("specround")


def setup_logging(
    level: str = "INFO", fmt: str = "text", log_file: Optional[str] = None
) -> logging.Logger:
    """Attach handlers to the application logger

    Calling it again replaces the previous handlers, so tests and repeated
    CLI invocations in one process do not duplicate output.

    Args:
        level: Logging level name (DEBUG, INFO, WARNING, ...)
        fmt: "text" for the plain format, "json" for structured records
        log_file: Optional path that receives a copy of every record

    Returns:
        The configured application logger
    """
    formatter: logging.Formatter
    if fmt == "json":
        formatter = jsonlogger.JsonFormatter(JSON_FORMAT)
    else:
        formatter = logging.Formatter(TEXT_FORMAT)

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    for handler in handlers:
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    logger.setLevel(level.upper())
    logger.propagate = False
    return logger
