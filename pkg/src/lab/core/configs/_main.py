# -*- coding: utf-8 -*-

import os

from pydantic import Field, field_validator, ValidationInfo
from pydantic_settings import SettingsConfigDict

from beans_logging import LoggerConfigPM

from lab.core.constants import ENV_PREFIX, ENV_PREFIX_LAB
from ._base import FrozenBaseConfig
from ._lab import LabConfig


# Main config schema:
class MainConfig(FrozenBaseConfig):
    lab: LabConfig = Field(default_factory=LabConfig)
    logger: LoggerConfigPM = Field(default_factory=LoggerConfigPM)

    @field_validator("logger")
    @classmethod
    def _check_logger(cls, val: LoggerConfigPM, info: ValidationInfo) -> LoggerConfigPM:
        if "lab" in info.data:
            if not val.app_name:
                val.app_name = info.data["lab"].slug
            elif "{lab_slug}" in val.app_name:
                val.app_name = val.app_name.format(lab_slug=info.data["lab"].slug)

        _logs_dir_env = f"{ENV_PREFIX_LAB}LOGS_DIR"
        if _logs_dir_env in os.environ:
            val.file.logs_dir = os.getenv(_logs_dir_env)

        return val

    model_config = SettingsConfigDict(env_prefix=ENV_PREFIX, env_nested_delimiter="__")


__all__ = ["MainConfig"]
