import logging

LOGGER_NAME = "opisd_bench"
PREFIX = "[OPISD Bench]"

logger = logging.getLogger(LOGGER_NAME)


def configure_logging(verbosity=0):
    """Attach a single stream handler to the package logger; safe to call repeatedly."""
    level = {-1: logging.WARNING, 0: logging.INFO}.get(verbosity, logging.DEBUG)
    if verbosity < -1:
        level = logging.ERROR
    logger.setLevel(level)
    if not any(getattr(h, "_opisd", False) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
        handler._opisd = True
        logger.addHandler(handler)


def log_debug(msg):
    logger.debug(f"{PREFIX} {msg}")


def log_info(msg):
    logger.info(f"{PREFIX} {msg}")


def log_warning(msg):
    logger.warning(f"{PREFIX} {msg}")


def log_error(msg):
    logger.error(f"{PREFIX} {msg}")
