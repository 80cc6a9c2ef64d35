# -*- coding: utf-8 -*-

import math
from typing import Any, Optional, Tuple, Union
from typing_extensions import Self

import numpy as np
from pydantic import (
    Field,
    ConfigDict,
    field_validator,
    model_validator,
    ValidationInfo,
)

from lab.core.constants import DIMENSION
from lab.core.schemas import BasePM, ArrayBasePM, ComplexPM, ExtFloatPM
from lab.core.exceptions import GridMismatchError
from lab.core import utils

from .constants import MIN_GRID_N, MAX_GRID_N


class GridSpecPM(BasePM):
    n: int = Field(
        ...,
        ge=MIN_GRID_N,
        le=MAX_GRID_N,
        title="Samples per axis",
        description="Number of samples per axis, power of two.",
        examples=[128],
    )
    length: float = Field(
        ...,
        gt=0,
        allow_inf_nan=False,
        title="Side length",
        description="Physical side length L of the square domain.",
        examples=[2 * math.pi],
    )
    periodic: bool = Field(
        default=True,
        title="Periodic",
        description="Torus (spectral backend) or bounded square (quadrature backends).",
        examples=[True],
    )
    origin: ComplexPM = Field(
        default=0j,
        title="Origin",
        description="Complex coordinate of the lower-left corner.",
        examples=[[-0.5, -0.5]],
    )

    model_config = ConfigDict(frozen=True)

    @field_validator("n")
    @classmethod
    def _check_n(cls, val: int) -> int:
        if not utils.validator.is_power_of_two(val):
            raise ValueError(f"Grid size n must be a power of two, got: {val}!")
        return val

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def cell_area(self) -> float:
        return self.h**2

    @property
    def area(self) -> float:
        return self.length**2

    @property
    def center(self) -> complex:
        return self.origin + complex(self.length, self.length) / 2

    def axis(self) -> Tuple[np.ndarray, np.ndarray]:
        """Node coordinates along each axis.

        Torus nodes sit at `origin + h*j`, bounded-square nodes at the cell centers
        `origin + h*(j + 1/2)`.

        Returns:
            Tuple[np.ndarray, np.ndarray]: x1 coordinates and x2 coordinates, each of shape (n,).
        """

        _shift = 0.0 if self.periodic else 0.5
        _steps = (np.arange(self.n, dtype=np.float64) + _shift) * self.h
        return self.origin.real + _steps, self.origin.imag + _steps

    def coords(self) -> Tuple[np.ndarray, np.ndarray]:
        """Meshed coordinates; axis 0 runs along x2 and axis 1 along x1."""

        _x1, _x2 = self.axis()
        return np.meshgrid(_x1, _x2, indexing="xy")

    def nodes(self) -> np.ndarray:
        _x1, _x2 = self.coords()
        return _x1 + 1j * _x2


def _check_samples(val: Any, grid: Optional[GridSpecPM]) -> np.ndarray:
    _samples = np.array(val, dtype=np.complex128, copy=True)
    if grid is not None:
        _shape = (grid.n, grid.n)
        if _samples.shape != _shape:
            if _samples.size == grid.n**2:
                _samples = _samples.reshape(_shape)
            else:
                raise ValueError(
                    f"Sample count {_samples.size} doesn't match grid size {grid.n}x{grid.n}!"
                )

    if not np.all(np.isfinite(_samples)):
        raise ValueError("Field samples must be finite!")

    _samples.setflags(write=False)
    return _samples


class ComplexFieldPM(ArrayBasePM):
    grid: GridSpecPM = Field(..., title="Grid", description="Sampling grid.")
    samples: np.ndarray = Field(
        ...,
        title="Samples",
        description="Complex samples of shape (n, n); axis 0 is x2, axis 1 is x1.",
    )

    @field_validator("samples", mode="before")
    @classmethod
    def _check_samples(cls, val: Any, info: ValidationInfo) -> np.ndarray:
        return _check_samples(val=val, grid=info.data.get("grid"))

    def _like(self, samples: np.ndarray) -> "ComplexFieldPM":
        return ComplexFieldPM(grid=self.grid, samples=samples)

    def _operand(self, other: Union["ComplexFieldPM", complex, float, int]) -> Any:
        if isinstance(other, ComplexFieldPM):
            if other.grid != self.grid:
                raise GridMismatchError(
                    detail={
                        "left": self.grid.model_dump(mode="json"),
                        "right": other.grid.model_dump(mode="json"),
                    }
                )
            return other.samples

        return other

    def __add__(self, other) -> "ComplexFieldPM":
        return self._like(self.samples + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other) -> "ComplexFieldPM":
        return self._like(self.samples - self._operand(other))

    def __rsub__(self, other) -> "ComplexFieldPM":
        return self._like(self._operand(other) - self.samples)

    def __mul__(self, other) -> "ComplexFieldPM":
        return self._like(self.samples * self._operand(other))

    __rmul__ = __mul__

    def __neg__(self) -> "ComplexFieldPM":
        return self._like(-self.samples)

    def conj(self) -> "ComplexFieldPM":
        return self._like(np.conj(self.samples))

    def abs(self) -> "ComplexFieldPM":
        return self._like(np.abs(self.samples))

    @property
    def real(self) -> "ComplexFieldPM":
        return self._like(self.samples.real)

    @property
    def imag(self) -> "ComplexFieldPM":
        return self._like(self.samples.imag)

    def is_real(self) -> bool:
        return bool(np.all(self.samples.imag == 0.0))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples)))


class VectorField2PM(ArrayBasePM):
    u1: ComplexFieldPM = Field(..., title="First component", description="Real field u1.")
    u2: ComplexFieldPM = Field(..., title="Second component", description="Real field u2.")

    @model_validator(mode="after")
    def _check_all(self) -> Self:
        if self.u1.grid != self.u2.grid:
            raise ValueError("Both components of a vector field must share one grid!")

        if (not self.u1.is_real()) or (not self.u2.is_real()):
            raise ValueError("Vector field components must be real-valued!")

        return self

    @property
    def grid(self) -> GridSpecPM:
        return self.u1.grid

    def to_complex(self) -> ComplexFieldPM:
        """The bijection u = (u1, u2) <-> u1 + i u2."""

        return ComplexFieldPM(grid=self.grid, samples=self.u1.samples + 1j * self.u2.samples)

    @classmethod
    def from_complex(cls, field: ComplexFieldPM) -> "VectorField2PM":
        return cls(
            u1=ComplexFieldPM(grid=field.grid, samples=field.samples.real),
            u2=ComplexFieldPM(grid=field.grid, samples=field.samples.imag),
        )


class ExponentTriplePM(BasePM):
    p: float = Field(..., gt=1, allow_inf_nan=False, title="p", description="Domain exponent.")
    q: float = Field(..., gt=1, allow_inf_nan=False, title="q", description="Target exponent.")
    p_dual: float = Field(..., title="p'", description="Conjugate of p.")
    q_dual: float = Field(..., title="q'", description="Conjugate of q.")
    r: Optional[ExtFloatPM] = Field(
        default=None,
        title="r",
        description="1/r = 1/q - 1/p when p > q; inf when p = q; undefined (null) when p < q.",
    )
    r_dual: Optional[ExtFloatPM] = Field(default=None, title="r'", description="Conjugate of r.")
    p_star: ExtFloatPM = Field(
        ..., title="p*", description="Sobolev exponent, 1/p* = (1/p - 1/d)_+ with d = 2."
    )
    alpha: Optional[float] = Field(
        default=None, title="alpha", description="d(1/p - 1/q) when p < q."
    )

    model_config = ConfigDict(frozen=True)

    @property
    def regime(self) -> str:
        """Boundedness regime of the commutator: `bmo`, `holder`, `constant` or `lr`."""

        if self.p == self.q:
            return "bmo"

        if self.p > self.q:
            return "lr"

        if (self.alpha is not None) and (self.alpha <= 1.0):
            return "holder"

        return "constant"

    @property
    def dimension(self) -> int:
        return DIMENSION


__all__ = [
    "GridSpecPM",
    "ComplexFieldPM",
    "VectorField2PM",
    "ExponentTriplePM",
]
