"""Logging setup for the command line; library modules only call getLogger."""

import logging

PACKAGE_LOGGER = "completedcoh"

_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}


def configure_logging(verbose=0):
    """Attach one stream handler to the package logger (idempotent)."""
    logger = logging.getLogger(PACKAGE_LOGGER)
    level = _LEVELS.get(min(max(verbose, 0), 2))
    logger.setLevel(level)
    if not any(getattr(h, "_completedcoh", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(name)s:%(levelname)s:%(message)s"))
        handler._completedcoh = True
        logger.addHandler(handler)
    return logger
