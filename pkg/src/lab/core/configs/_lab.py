# -*- coding: utf-8 -*-

from pydantic import Field, constr, field_validator, ValidationInfo
from pydantic_settings import SettingsConfigDict

from lab.core.constants import ENV_PREFIX_LAB
from ._base import BaseConfig


class TolerancesConfig(BaseConfig):
    fundamental: float = Field(default=1e-10, gt=0)
    isometry: float = Field(default=1e-12, gt=0)
    adjoint: float = Field(default=1e-10, gt=0)
    duality: float = Field(default=1e-12, gt=0)
    polarization: float = Field(default=1e-13, gt=0)
    jacobian: float = Field(default=1e-8, gt=0)
    jacobian_integral: float = Field(default=1e-10, gt=0)
    backend_agreement: float = Field(default=1e-12, gt=0)
    crw_identity: float = Field(default=1e-10, gt=0)
    dual_weights: float = Field(default=1e-12, gt=0)
    mean_zero: float = Field(default=1e-10, gt=0)
    sparse_lp_max: float = Field(default=10.0, gt=1)

    model_config = SettingsConfigDict(env_prefix=f"{ENV_PREFIX_LAB}TOLERANCES_")


class SearchConfig(BaseConfig):
    restarts: int = Field(default=8, ge=1, le=10_000)
    steps: int = Field(default=30, ge=0, le=10_000)
    rel_tol: float = Field(default=1e-3, ge=0, lt=1)

    model_config = SettingsConfigDict(env_prefix=f"{ENV_PREFIX_LAB}SEARCH_")


class QuadratureConfig(BaseConfig):
    direct_max_cells: int = Field(default=128, ge=8, le=4096)
    row_block: int = Field(default=8, ge=1, le=4096)

    model_config = SettingsConfigDict(env_prefix=f"{ENV_PREFIX_LAB}QUADRATURE_")


class LabConfig(BaseConfig):
    name: constr(strip_whitespace=True) = Field(default="Beurling Lab", min_length=2, max_length=128)  # type: ignore
    slug: constr(strip_whitespace=True) = Field(default="", max_length=128)  # type: ignore
    workers: int = Field(default=1, ge=1, le=256)
    fft_workers: int = Field(default=1, ge=1, le=256)
    stopping_lambda: float = Field(default=2.0, ge=2.0)
    tolerances: TolerancesConfig = Field(default_factory=TolerancesConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)

    @field_validator("slug")
    @classmethod
    def _check_slug(cls, val: str, info: ValidationInfo) -> str:
        if (not val) and ("name" in info.data):
            val = (
                info.data["name"]
                .lower()
                .strip()
                .replace(" ", "-")
                .replace("_", "-")
                .replace(".", "-")
            )

        return val

    model_config = SettingsConfigDict(env_prefix=ENV_PREFIX_LAB)


__all__ = [
    "TolerancesConfig",
    "SearchConfig",
    "QuadratureConfig",
    "LabConfig",
]
