"""
Logging setup shared by the esr-osc commands.

Records go to stderr; stdout is reserved for CSV.
"""

import logging
import sys

LOG_FORMAT = '[%(asctime)s] [%(levelname)s] [%(name)s] %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
QUIET_LOGGERS = ('numpy', 'scipy', 'concurrent.futures')


def resolve_log_level(verbose: bool = False, debug: bool = False) -> int:
    """Map the --verbose/--debug flags to a logging level."""
    if debug:
        return logging.DEBUG
    if verbose:
        return logging.INFO
    return logging.ERROR


def setup_logging(level: int = logging.INFO):
    """
    Configure the root logger for a command run.

    Replaces any handlers installed by a previous call, so a command can
    lower the level once its config file has been read.

    Args:
        level: Logging level
    """
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    handler.setLevel(level)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()
    root_logger.addHandler(handler)

    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.ERROR)

    # esrosc warnings only surface with --verbose or --debug
    logging.getLogger('esrosc').setLevel(level if level <= logging.INFO else logging.ERROR)
