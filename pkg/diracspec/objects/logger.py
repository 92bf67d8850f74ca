import logging
import os
import sys

LOGGER_NAME = 'diracspec'
LEVEL_ENV = 'DIRACSPEC_LOG_LEVEL'
FORMAT = '%(asctime)s %(levelname)s %(message)s'


def _level_names() -> dict:
    # logging.getLevelNamesMapping exists only on Python >= 3.11
    if hasattr(logging, 'getLevelNamesMapping'):
        return logging.getLevelNamesMapping()
    return dict(logging._nameToLevel)


def _render(message: str, fields: dict) -> str:
    if not fields:
        return message
    return message + ' ' + ' '.join(f'{key}={value}' for key, value in fields.items())


class Logger(object):
    """
    Process-wide handle on the 'diracspec' logger. Silent until activate() is
    called; the CLI does that for --verbose. Keyword arguments of the message
    methods are appended as key=value pairs.
    """
    __instance = None
    DISABLED = True

    def __init__(self):
        if Logger.__instance is not None:
            raise RuntimeError('use Logger.get_instance()')
        self.logger = logging.getLogger(LOGGER_NAME)
        self.logger.propagate = False
        self.handler: logging.Handler | None = None
        Logger.__instance = self

    @staticmethod
    def get_instance() -> 'Logger':
        if Logger.__instance is None:
            Logger()
        return Logger.__instance

    @staticmethod
    def activate(level: str | None = None, stream=None) -> None:
        """
        Start emitting at the given level (default DIRACSPEC_LOG_LEVEL, else INFO) to stream (default stderr).
        """
        self = Logger.get_instance()
        level = (level or os.environ.get(LEVEL_ENV) or 'INFO').upper()
        if level not in _level_names():
            raise ValueError(f'unknown log level {level!r}')
        if self.handler is not None:
            self.logger.removeHandler(self.handler)
        self.handler = logging.StreamHandler(stream or sys.stderr)
        self.handler.setFormatter(logging.Formatter(FORMAT))
        self.logger.addHandler(self.handler)
        self.logger.setLevel(level)
        Logger.DISABLED = False

    @staticmethod
    def deactivate() -> None:
        self = Logger.get_instance()
        if self.handler is not None:
            self.logger.removeHandler(self.handler)
            self.handler = None
        Logger.DISABLED = True

    def _emit(self, level: int, message: str, fields: dict) -> None:
        if not Logger.DISABLED:
            self.logger.log(level, _render(message, fields))

    def warn(self, message: str, **fields) -> None:
        self._emit(logging.WARNING, message, fields)

    def error(self, message: str, **fields) -> None:
        self._emit(logging.ERROR, message, fields)

    def log(self, message: str, **fields) -> None:
        self._emit(logging.INFO, message, fields)

    def debug(self, message: str, **fields) -> None:
        self._emit(logging.DEBUG, message, fields)
