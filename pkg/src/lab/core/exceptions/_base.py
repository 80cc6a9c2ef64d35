# -*- coding: utf-8 -*-

from typing import Any, Optional

from lab.core.constants import ErrorCodeEnum


class BaseLabError(Exception):
    """Base exception class for lab errors with custom error codes.

    Inherits:
        Exception: Exception class from Python.
    """

    error_enum: ErrorCodeEnum = ErrorCodeEnum.INTERNAL_ERROR

    def __init__(
        self,
        message: Optional[str] = None,
        error_enum: Optional[ErrorCodeEnum] = None,
        description: Optional[str] = None,
        detail: Any = None,
    ):
        """Constructor method for BaseLabError class.

        Args:
            message     (Optional[str]          , optional): Error message. Defaults to the error code message.
            error_enum  (Optional[ErrorCodeEnum], optional): Error code enum. Defaults to the class error code.
            description (Optional[str]          , optional): Error description. Defaults to None.
            detail      (Any                    , optional): Error detail. Defaults to None.
        """

        if error_enum:
            self.error_enum = error_enum

        _error = self.error_enum.value.model_dump()
        if not message:
            message = _error.get("message")

        if description:
            _error["description"] = description

        if detail is not None:
            _error["detail"] = detail

        self.message: str = message
        self.error: dict = _error
        super().__init__(message)

    @property
    def exit_code(self) -> int:
        return self.error_enum.value.exit_code


class GridSpecError(BaseLabError, ValueError):
    """Class for catching invalid grid specification errors.

    Inherits:
        BaseLabError: Base lab error class.
        ValueError  : ValueError class from Python.
    """

    error_enum = ErrorCodeEnum.GRID_INVALID


class GridMismatchError(BaseLabError, ValueError):
    """Class for catching operations on fields sampled on different grids."""

    error_enum = ErrorCodeEnum.GRID_MISMATCH


class BackendGridMismatchError(BaseLabError, ValueError):
    """Class for catching backend and grid type mismatch errors."""

    error_enum = ErrorCodeEnum.BACKEND_GRID_MISMATCH


class ExponentMismatchError(BaseLabError, ValueError):
    """Class for catching exponents outside of the requested regime."""

    error_enum = ErrorCodeEnum.EXPONENT_MISMATCH


class NonZeroMeanError(BaseLabError, ValueError):
    """Class for catching fields that are not d-bar images on the torus."""

    error_enum = ErrorCodeEnum.NON_ZERO_MEAN


class SingularSampleError(BaseLabError, ValueError):
    """Class for catching symbols that blow up at a grid node."""

    error_enum = ErrorCodeEnum.SINGULAR_SAMPLE


class AllZeroOscillationError(BaseLabError, ValueError):
    """Class for catching sparse families without any oscillation."""

    error_enum = ErrorCodeEnum.ALL_ZERO_OSCILLATION


class InvariantFailureError(BaseLabError):
    """Class for catching failed identity or invariant checks."""

    error_enum = ErrorCodeEnum.INVARIANT_FAILED


class ConfigError(BaseLabError, ValueError):
    """Class for catching experiment config errors."""

    error_enum = ErrorCodeEnum.CONFIG_INVALID


__all__ = [
    "BaseLabError",
    "GridSpecError",
    "GridMismatchError",
    "BackendGridMismatchError",
    "ExponentMismatchError",
    "NonZeroMeanError",
    "SingularSampleError",
    "AllZeroOscillationError",
    "InvariantFailureError",
    "ConfigError",
]
