# -*- coding: utf-8 -*-

import os

from onion_config import ConfigLoader
from beans_logging import logger

from .core.configs import MainConfig


_CONFIGS_DIR = os.getenv(
    "BLAB_CONFIGS_DIR",
    os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs"),
)


config: MainConfig
try:
    _config_loader = ConfigLoader(config_schema=MainConfig, configs_dirs=[_CONFIGS_DIR])
    ## Main config object:
    config: MainConfig = _config_loader.load()
except Exception:
    logger.exception("Failed to load config:")
    raise SystemExit(1)


__all__ = ["config"]
