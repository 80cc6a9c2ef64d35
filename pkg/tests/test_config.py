# -*- coding: utf-8 -*-

from lab.config import config
from lab.core.configs import MainConfig


def test_config_sections():
    assert set(MainConfig.model_fields) == {"lab", "logger"}
    assert config.lab.slug == "beurling-lab"
    assert config.logger.app_name == "beurling-lab"
    assert config.lab.search.restarts == 8
    assert config.lab.tolerances.isometry == 1e-12
