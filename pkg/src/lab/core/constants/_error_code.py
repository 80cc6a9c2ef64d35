# -*- coding: utf-8 -*-

from enum import Enum
from typing import Union, Optional, Any

from pydantic import BaseModel, Field, constr


class ErrorCodePM(BaseModel):
    code: constr(strip_whitespace=True) = Field(..., min_length=3, max_length=36)  # type: ignore
    name: constr(strip_whitespace=True) = Field(..., min_length=3, max_length=64)  # type: ignore
    exit_code: int = Field(..., ge=0, le=255)
    message: constr(strip_whitespace=True) = Field(..., min_length=1, max_length=256)  # type: ignore
    description: Optional[constr(strip_whitespace=True)] = Field(  # type: ignore
        default=None, max_length=1024
    )
    detail: Any = Field(default=None)


class ErrorCodeEnum(Enum):
    INTERNAL_ERROR = ErrorCodePM(
        code="1_00000",
        name="INTERNAL_ERROR",
        exit_code=1,
        message="Unexpected internal error!",
        description="The run stopped on an error that is not part of the lab contract.",
    )
    INVARIANT_FAILED = ErrorCodePM(
        code="2_00000",
        name="INVARIANT_FAILED",
        exit_code=2,
        message="Invariant check failed!",
        description="At least one identity or invariant exceeded its tolerance.",
    )
    ALL_ZERO_OSCILLATION = ErrorCodePM(
        code="2_01000",
        name="ALL_ZERO_OSCILLATION",
        exit_code=2,
        message="All cube oscillations are zero!",
        description="The symbol is constant on the root cube, nothing to certify.",
    )
    CONFIG_INVALID = ErrorCodePM(
        code="3_00000",
        name="CONFIG_INVALID",
        exit_code=3,
        message="Invalid experiment config!",
        description="The config document failed validation.",
    )
    GRID_INVALID = ErrorCodePM(
        code="3_01000",
        name="GRID_INVALID",
        exit_code=3,
        message="Invalid grid specification!",
        description="Grid size must be a power of two in [8, 4096] and length must be positive.",
    )
    GRID_MISMATCH = ErrorCodePM(
        code="3_01001",
        name="GRID_MISMATCH",
        exit_code=3,
        message="Fields live on different grids!",
    )
    BACKEND_GRID_MISMATCH = ErrorCodePM(
        code="3_01002",
        name="BACKEND_GRID_MISMATCH",
        exit_code=3,
        message="Backend does not match the grid type!",
        description="Spectral backend requires a periodic grid, quadrature backends a bounded grid.",
    )
    EXPONENT_MISMATCH = ErrorCodePM(
        code="3_02000",
        name="EXPONENT_MISMATCH",
        exit_code=3,
        message="Exponents do not fit this regime!",
    )
    NON_ZERO_MEAN = ErrorCodePM(
        code="3_03000",
        name="NON_ZERO_MEAN",
        exit_code=3,
        message="Field has a non-zero mean!",
        description="Only mean-zero fields are d-bar images on the torus.",
    )
    SINGULAR_SAMPLE = ErrorCodePM(
        code="3_04000",
        name="SINGULAR_SAMPLE",
        exit_code=3,
        message="Symbol is singular at a grid node!",
    )

    @classmethod
    def get_by_code(cls, code: str) -> Union["ErrorCodeEnum", None]:
        for _error_code_enum in ErrorCodeEnum:
            if _error_code_enum.value.code == code:
                return _error_code_enum
        return None

    @classmethod
    def get_by_name(cls, name: str) -> Union["ErrorCodeEnum", None]:
        for _error_code_enum in ErrorCodeEnum:
            if _error_code_enum.value.name == name:
                return _error_code_enum
        return None


__all__ = ["ErrorCodePM", "ErrorCodeEnum"]
