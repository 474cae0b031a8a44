"""
Logging setup for the stirlingblocks package.

Library modules only call ``logging.getLogger(__name__)``; the CLI calls
``configure_logging`` once. Records go to standard error so standard output
stays reserved for data.
"""

import json
import logging
import sys
from datetime import datetime, timezone
from typing import Optional, TextIO

PACKAGE_LOGGER = "stirlingblocks"

_RESERVED = set(vars(logging.LogRecord("", 0, "", 0, "", (), None))) | {"message", "asctime"}


class StructuredFormatter(logging.Formatter):
    """One JSON object per record, with any ``extra`` fields merged in"""

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "ts": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "msg": record.getMessage(),
        }
        for key, value in vars(record).items():
            if key not in _RESERVED and not key.startswith("_"):
                payload[key] = value
        if record.exc_info:
            payload["exc"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str)


PLAIN_FORMAT = "%(levelname)s %(name)s: %(message)s"


def configure_logging(level: str = "WARNING", fmt: str = "plain", stream: Optional[TextIO] = None) -> logging.Logger:
    """
    Install a single stderr handler on the package logger.

    Calling it again replaces the previous handler rather than stacking one.
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(logger.handlers):
        if getattr(handler, "_stirlingblocks", False):
            logger.removeHandler(handler)
    handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
    handler.setFormatter(StructuredFormatter() if fmt == "structured" else logging.Formatter(PLAIN_FORMAT))
    handler._stirlingblocks = True  # type: ignore[attr-defined]
    logger.addHandler(handler)
    logger.setLevel(level.upper())
    logger.propagate = False
    return logger
