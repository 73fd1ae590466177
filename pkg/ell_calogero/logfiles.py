"""Module handling the application log files"""

import os
import sys
import logging
from logging.handlers import TimedRotatingFileHandler


_LOGGER = logging.getLogger('ell_calogero')

_DEFAULT_LOG_NAME = 'ell_calogero'
_DEFAULT_LOG_DIR = 'log'
_DEFAULT_LOG_FORMAT = '[%(asctime)s] [%(module)s] [%(levelname)s] %(message)s'
_DEFAULT_LOG_LEVEL = 'INFO'


def start(debug=False, log_dir=None):
    """Create the application log, returns the log file name."""
    log_level = 'DEBUG' if debug else _DEFAULT_LOG_LEVEL
    log_dir = log_dir or _DEFAULT_LOG_DIR

    filename = os.path.abspath(os.path.join(os.path.expanduser(log_dir), _DEFAULT_LOG_NAME + '.log'))
    os.makedirs(os.path.dirname(filename), exist_ok=True)

    # main() may run several times in one process (tests), start from a clean slate
    for handler in list(_LOGGER.handlers):
        _LOGGER.removeHandler(handler)
        handler.close()

    # Change log files at midnight
    handler = TimedRotatingFileHandler(filename, when='midnight', interval=1, backupCount=10)
    handler.suffix = "%Y-%m-%d"
    handler.setLevel(log_level)
    handler.setFormatter(logging.Formatter(_DEFAULT_LOG_FORMAT))
    _LOGGER.addHandler(handler)

    # stdout carries the results, console logging goes to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(logging.Formatter(_DEFAULT_LOG_FORMAT))
    _LOGGER.addHandler(console_handler)
    _LOGGER.setLevel(log_level)

    _LOGGER.debug(f"Created application log {filename}")
    return filename


def stop():
    """Flush and detach the handlers installed by start()."""
    for handler in list(_LOGGER.handlers):
        handler.flush()
        _LOGGER.removeHandler(handler)
        handler.close()
