# -*- coding: utf-8 -*-

import math
import logging

import pytest
from hypothesis import settings, HealthCheck

from lab.resources.field import service as field_service
from lab.resources.field.schemas import GridSpecPM


logger = logging.getLogger(__name__)

settings.register_profile(
    "lab",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("lab")


@pytest.fixture(scope="session", autouse=True)
def setup_and_teardown():
    # Equivalent of setUp
    logger.info("Setting up...")

    yield  # This is where the testing happens!

    # Equivalent of tearDown
    logger.info("Tearing down!")


@pytest.fixture(scope="session")
def torus() -> GridSpecPM:
    return field_service.make_grid(n=32, length=2 * math.pi, periodic=True)


@pytest.fixture(scope="session")
def square() -> GridSpecPM:
    return field_service.make_grid(n=32, length=1.0, periodic=False, origin=complex(-0.5, -0.5))


@pytest.fixture(scope="session")
def small_square() -> GridSpecPM:
    return field_service.make_grid(n=16, length=1.0, periodic=False, origin=complex(-0.5, -0.5))
