# -*- coding: utf-8 -*-

from beans_logging import Logger, LoggerLoader

from .config import config


logger_loader = LoggerLoader(config=config.logger, auto_config_file=False)
logger: Logger = logger_loader.load()


__all__ = [
    "logger_loader",
    "logger",
]
