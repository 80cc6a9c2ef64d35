# -*- coding: utf-8 -*-

from enum import Enum


ENV_PREFIX = "BLAB_"
ENV_PREFIX_LAB = f"{ENV_PREFIX}LAB_"

DIMENSION = 2


class WarnEnum(str, Enum):
    ERROR = "ERROR"
    ALWAYS = "ALWAYS"
    DEBUG = "DEBUG"
    IGNORE = "IGNORE"


class BackendEnum(str, Enum):
    spectral = "spectral"
    quadrature_direct = "quadrature_direct"
    quadrature_fft = "quadrature_fft"

    @property
    def is_quadrature(self) -> bool:
        return self != BackendEnum.spectral


class SymbolClassEnum(str, Enum):
    constant = "constant"
    bmo_log = "bmo_log"
    holder = "holder"
    lr_bump = "lr_bump"
    step = "step"
    random = "random"


class BumpShapeEnum(str, Enum):
    gaussian = "gaussian"
    bump = "bump"


class ExperimentEnum(str, Enum):
    identities = "identities"
    regimes = "regimes"
    lowerbound = "lowerbound"
    jacobian = "jacobian"
    sparse = "sparse"
    scaling = "scaling"


__all__ = [
    "ENV_PREFIX",
    "ENV_PREFIX_LAB",
    "DIMENSION",
    "WarnEnum",
    "BackendEnum",
    "SymbolClassEnum",
    "BumpShapeEnum",
    "ExperimentEnum",
]
