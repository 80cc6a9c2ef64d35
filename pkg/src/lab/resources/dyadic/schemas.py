# -*- coding: utf-8 -*-

from typing import Any, Dict, List, Optional, Tuple
from typing_extensions import Self

import numpy as np
from pydantic import Field, ConfigDict, model_validator

from lab.core.schemas import BasePM, ArrayBasePM, ComplexPM
from lab.core import utils
from lab.resources.field.schemas import GridSpecPM

from .utils import mask_to_runs


class GridCubePM(BasePM):
    """Grid-aligned square block of `cells` x `cells` grid cells."""

    row0: int = Field(..., ge=0, title="First row", description="First row (x2 index).")
    col0: int = Field(..., ge=0, title="First column", description="First column (x1 index).")
    cells: int = Field(..., ge=1, title="Cells per side")

    model_config = ConfigDict(frozen=True)

    @property
    def rows(self) -> slice:
        return slice(self.row0, self.row0 + self.cells)

    @property
    def cols(self) -> slice:
        return slice(self.col0, self.col0 + self.cells)

    @property
    def count(self) -> int:
        return self.cells**2

    def block(self, samples: np.ndarray) -> np.ndarray:
        return samples[self.rows, self.cols]

    def side(self, grid: GridSpecPM) -> float:
        return self.cells * grid.h

    def area(self, grid: GridSpecPM) -> float:
        return self.count * grid.cell_area

    def nodes(self, grid: GridSpecPM) -> np.ndarray:
        return grid.nodes()[self.rows, self.cols]

    def center(self, grid: GridSpecPM) -> complex:
        """Geometric center of the block (mean of its nodes)."""

        _x1, _x2 = grid.axis()
        _c1 = 0.5 * (_x1[self.col0] + _x1[self.col0 + self.cells - 1])
        _c2 = 0.5 * (_x2[self.row0] + _x2[self.row0 + self.cells - 1])
        return complex(_c1, _c2)

    def contains(self, other: "GridCubePM") -> bool:
        return (
            (self.row0 <= other.row0)
            and (self.col0 <= other.col0)
            and (other.row0 + other.cells <= self.row0 + self.cells)
            and (other.col0 + other.cells <= self.col0 + self.cells)
        )

    def fits(self, grid: GridSpecPM) -> bool:
        return (self.row0 + self.cells <= grid.n) and (self.col0 + self.cells <= grid.n)


class DyadicCubePM(BasePM):
    level: int = Field(..., ge=0, title="Level", description="Bisection depth below the root.")
    index: Tuple[int, int] = Field(
        ..., title="Index", description="Position (j1, j2) among the level's cubes."
    )
    root: GridCubePM = Field(..., title="Root", description="Root cube Q0.")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_all(self) -> Self:
        if not utils.validator.is_power_of_two(self.root.cells):
            raise ValueError(f"Root cube side must be a power of two cells, got: {self.root.cells}!")

        if self.root.cells < (1 << self.level):
            raise ValueError(f"Level {self.level} is finer than a single cell!")

        _count = 1 << self.level
        if not all(0 <= _j < _count for _j in self.index):
            raise ValueError(f"Index {self.index} out of range for level {self.level}!")

        return self

    @property
    def cells(self) -> int:
        return self.root.cells >> self.level

    @property
    def block(self) -> GridCubePM:
        return GridCubePM(
            row0=self.root.row0 + self.index[1] * self.cells,
            col0=self.root.col0 + self.index[0] * self.cells,
            cells=self.cells,
        )

    @property
    def key(self) -> Tuple[int, int, int]:
        return (self.level, self.index[0], self.index[1])

    def children(self) -> List["DyadicCubePM"]:
        if self.cells == 1:
            return []

        _j1, _j2 = self.index
        return [
            DyadicCubePM(level=self.level + 1, index=(2 * _j1 + _a, 2 * _j2 + _c), root=self.root)
            for _c in (0, 1)
            for _a in (0, 1)
        ]

    def parent(self) -> Optional["DyadicCubePM"]:
        if self.level == 0:
            return None
        return DyadicCubePM(
            level=self.level - 1, index=(self.index[0] // 2, self.index[1] // 2), root=self.root
        )

    def is_within(self, other: "DyadicCubePM") -> bool:
        if (other.root != self.root) or (self.level < other.level):
            return False

        _shift = self.level - other.level
        return (self.index[0] >> _shift, self.index[1] >> _shift) == other.index

    def center(self, grid: GridSpecPM) -> complex:
        return self.block.center(grid)

    def side(self, grid: GridSpecPM) -> float:
        return self.block.side(grid)

    def area(self, grid: GridSpecPM) -> float:
        return self.block.area(grid)


class SparseFamilyPM(ArrayBasePM):
    grid: GridSpecPM = Field(..., title="Grid")
    root: DyadicCubePM = Field(..., title="Root cube Q0")
    stopping_lambda: float = Field(..., ge=1, title="Stopping threshold Lambda")
    cubes: List[DyadicCubePM] = Field(..., min_length=1, title="Cubes in canonical order")
    means: List[ComplexPM] = Field(..., title="Means <b>_Q")
    a_q: List[float] = Field(..., title="Oscillations a_Q")
    masks: List[np.ndarray] = Field(
        ..., title="Major subsets E(Q)", description="Boolean masks local to each cube."
    )
    lambdas: Optional[List[float]] = Field(default=None, title="Dual weights lambda_Q")

    @model_validator(mode="after")
    def _check_all(self) -> Self:
        _size = len(self.cubes)
        if (len(self.means) != _size) or (len(self.a_q) != _size) or (len(self.masks) != _size):
            raise ValueError("Per-cube lists of a sparse family must have equal lengths!")

        if (self.lambdas is not None) and (len(self.lambdas) != _size):
            raise ValueError("Dual weights must have one value per cube!")

        for _cube, _mask in zip(self.cubes, self.masks):
            if _mask.shape != (_cube.cells, _cube.cells):
                raise ValueError(f"Mask shape {_mask.shape} doesn't match cube {_cube.key}!")

        return self

    def __len__(self) -> int:
        return len(self.cubes)

    def areas(self) -> np.ndarray:
        return np.array([_cube.area(self.grid) for _cube in self.cubes], dtype=np.float64)

    def major_fractions(self) -> List[float]:
        return [float(np.count_nonzero(_mask)) / _mask.size for _mask in self.masks]

    def depth(self) -> int:
        return max(_cube.level for _cube in self.cubes)

    def with_lambdas(self, lambdas: List[float]) -> "SparseFamilyPM":
        return SparseFamilyPM(
            grid=self.grid,
            root=self.root,
            stopping_lambda=self.stopping_lambda,
            cubes=self.cubes,
            means=self.means,
            a_q=self.a_q,
            masks=self.masks,
            lambdas=lambdas,
        )

    def to_json(self, include_masks: bool = False) -> Dict[str, Any]:
        """Serializable view: one entry per cube with level, index, a_Q, lambda_Q and
        |E(Q)|/|Q|; masks optionally as run-length encoded [start, length] cell runs."""

        _fractions = self.major_fractions()
        _entries = []
        for _i, _cube in enumerate(self.cubes):
            _entry = {
                "level": _cube.level,
                "index": list(_cube.index),
                "a_Q": self.a_q[_i],
                "lambda_Q": None if self.lambdas is None else self.lambdas[_i],
                "major_fraction": _fractions[_i],
            }
            if include_masks:
                _entry["mask_runs"] = mask_to_runs(self.masks[_i])
            _entries.append(_entry)

        return {
            "root": self.root.block.model_dump(mode="json"),
            "stopping_lambda": self.stopping_lambda,
            "size": len(self.cubes),
            "depth": self.depth(),
            "cubes": _entries,
        }


class DominationReportPM(BasePM):
    ok: bool = Field(..., title="Domination bound holds")
    c_emp: float = Field(..., ge=0, title="Empirical constant", description="max LHS/RHS over cells.")
    bound: float = Field(..., title="Bound", description="2^d Lambda + 1.")


class SparseCheckPM(BasePM):
    size: int = Field(..., ge=1)
    depth: int = Field(..., ge=0)
    dyadic: bool = Field(..., title="Every cube is dyadic in D(Q0)")
    disjoint: bool = Field(..., title="Major subsets are pairwise disjoint")
    min_major_fraction: float = Field(..., title="min |E(Q)|/|Q|")
    major_ok: bool = Field(..., title="|E(Q)| >= 1/2 |Q| for every cube")
    carleson: float = Field(..., title="Carleson packing constant")
    carleson_ok: bool = Field(..., title="Carleson constant <= 2")

    @property
    def ok(self) -> bool:
        return self.dyadic and self.disjoint and self.major_ok and self.carleson_ok


class DualWeightsPM(BasePM):
    r: float = Field(..., gt=1)
    lambdas: List[float] = Field(..., title="lambda_Q")
    big_a: float = Field(..., ge=0, title="A = sum |Q| a_Q^r")
    normalization_residual: float = Field(..., ge=0, title="|sum |Q| lambda^r' - 1|")
    pairing_residual: float = Field(
        ..., ge=0, title="|sum |Q| lambda a - A^(1/r)| / A^(1/r)"
    )


class MeanLimitReportPM(BasePM):
    constant: ComplexPM = Field(..., title="Extrapolated limit of <b>_Q")
    ladder: List[GridCubePM] = Field(..., title="Nested cubes, largest first")
    means: List[ComplexPM] = Field(..., title="Means <b>_Q along the ladder")
    increments: List[float] = Field(..., title="Cauchy increments |<b>_Q_k - <b>_Q_k+1|")


__all__ = [
    "GridCubePM",
    "DyadicCubePM",
    "SparseFamilyPM",
    "DominationReportPM",
    "SparseCheckPM",
    "DualWeightsPM",
    "MeanLimitReportPM",
]
