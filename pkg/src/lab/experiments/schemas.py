# -*- coding: utf-8 -*-

import math
from typing import Any, Dict, List, Optional, Tuple

from pydantic import Field, field_validator

from lab.core.constants import BackendEnum, ExperimentEnum, SymbolClassEnum
from lab.core.schemas import BasePM, StrictBasePM, ComplexPM, ExtFloatPM
from lab.core import utils
from lab.resources.field.constants import MIN_GRID_N, MAX_GRID_N
from lab.resources.norms.schemas import SymbolSpecPM

from .constants import PERIODIC_DEFAULTS


def _check_grid_n(val: int) -> int:
    if (not utils.validator.is_power_of_two(val)) or (val < MIN_GRID_N) or (MAX_GRID_N < val):
        raise ValueError(
            f"Grid size must be a power of two in [{MIN_GRID_N}, {MAX_GRID_N}], got: {val}!"
        )
    return val


def _check_exponent(val: float) -> float:
    if not utils.validator.is_lebesgue_exponent(val):
        raise ValueError(f"Exponent must be in (1, inf), got: {val}!")
    return val


def _default_regime_symbols() -> List[SymbolSpecPM]:
    return [
        SymbolSpecPM(kind=SymbolClassEnum.constant),
        SymbolSpecPM(kind=SymbolClassEnum.holder, alpha=0.5, window=0.45),
        SymbolSpecPM(kind=SymbolClassEnum.bmo_log, window=0.45),
        SymbolSpecPM(kind=SymbolClassEnum.lr_bump, scale=0.15),
    ]


def _default_sparse_corpus() -> List[SymbolSpecPM]:
    return [
        SymbolSpecPM(kind=SymbolClassEnum.constant),
        SymbolSpecPM(kind=SymbolClassEnum.step),
        SymbolSpecPM(kind=SymbolClassEnum.holder, alpha=0.5, window=0.45),
        SymbolSpecPM(kind=SymbolClassEnum.bmo_log, window=0.45),
        SymbolSpecPM(kind=SymbolClassEnum.lr_bump, scale=0.15),
        SymbolSpecPM(kind=SymbolClassEnum.random, seed=1, band=4),
    ]


class GridConfigPM(StrictBasePM):
    n: int = Field(default=64, title="Samples per axis", examples=[128])
    length: Optional[float] = Field(
        default=None,
        gt=0,
        allow_inf_nan=False,
        title="Side length",
        description="Defaults to 2 pi on the torus and 1 on the bounded square.",
    )
    periodic: Optional[bool] = Field(
        default=None,
        title="Periodic",
        description="Defaults to the grid type of the experiment.",
    )
    origin: Optional[ComplexPM] = Field(
        default=None,
        title="Origin",
        description="Lower-left corner. Defaults to 0 on the torus and a centered square otherwise.",
    )

    @field_validator("n")
    @classmethod
    def _check_n(cls, val: int) -> int:
        return _check_grid_n(val)


class ExponentsConfigPM(StrictBasePM):
    p: float = Field(default=4.0, title="Domain exponent p")
    q: float = Field(default=2.0, title="Target exponent q")

    @field_validator("p", "q")
    @classmethod
    def _check_exponents(cls, val: float) -> float:
        return _check_exponent(val)


class IdentitiesConfigPM(StrictBasePM):
    band: int = Field(default=6, ge=1, title="Band of the random test fields")
    trials: int = Field(default=20, ge=1, title="Random maps for the Jacobian checks")
    agreement_n: int = Field(default=32, title="Bounded grid size for backend agreement")
    kernel_trials: int = Field(default=1000, ge=1)
    convergence_ladder: List[int] = Field(
        default=[32, 64, 128], title="Grid sizes of the disk-indicator refinement study"
    )
    min_order: Optional[float] = Field(
        default=None,
        gt=0,
        title="Minimum convergence order",
        description="Adds a check on the observed order of the disk-indicator study when set.",
    )

    @field_validator("agreement_n")
    @classmethod
    def _check_agreement_n(cls, val: int) -> int:
        return _check_grid_n(val)

    @field_validator("convergence_ladder")
    @classmethod
    def _check_ladder(cls, val: List[int]) -> List[int]:
        return [_check_grid_n(_n) for _n in val]


class RegimesConfigPM(StrictBasePM):
    pairs: List[Tuple[float, float]] = Field(
        default=[(2.0, 2.0), (2.0, 4.0), (4.0 / 3.0, 16.0), (4.0, 2.0)],
        min_length=1,
        title="(p, q) pairs",
    )
    symbols: List[SymbolSpecPM] = Field(default_factory=_default_regime_symbols, min_length=1)
    ladder: List[int] = Field(default=[32, 64], min_length=1, title="Grid sizes")
    min_cells: int = Field(default=2, ge=1, title="Smallest cube side for the witness bounds")

    @field_validator("pairs")
    @classmethod
    def _check_pairs(cls, val: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        return [(_check_exponent(_p), _check_exponent(_q)) for _p, _q in val]

    @field_validator("ladder")
    @classmethod
    def _check_ladder(cls, val: List[int]) -> List[int]:
        return [_check_grid_n(_n) for _n in val]


class LowerboundConfigPM(StrictBasePM):
    stopping_lambda: Optional[float] = Field(default=None, ge=2, title="Stopping threshold")


class JacobianConfigPM(StrictBasePM):
    p: float = Field(
        default=1.0,
        ge=1,
        allow_inf_nan=False,
        title="Jacobian exponent",
        description="Ju in L^p, commutator on L^2p -> L^(2p)'.",
    )
    band: int = Field(default=4, ge=1)
    trials: int = Field(default=8, ge=1)


class ScalingConfigPM(StrictBasePM):
    lambdas: List[float] = Field(default=[1.0, 2.0, 4.0, 8.0, 16.0], min_length=2)
    band: int = Field(default=3, ge=1)
    offset: float = Field(
        default=50.0,
        allow_inf_nan=False,
        title="Translation of u",
        description="Constant added to both components, so ||u||_2p dominates ||grad u||_2p.",
    )
    drift_tol: float = Field(default=0.01, gt=0)
    slope_tol: float = Field(default=0.1, gt=0)

    @field_validator("lambdas")
    @classmethod
    def _check_lambdas(cls, val: List[float]) -> List[float]:
        if any((not math.isfinite(_lam)) or (_lam <= 0) for _lam in val):
            raise ValueError(f"Scaling factors must be positive and finite, got: {val}!")
        return val


class SparseConfigPM(StrictBasePM):
    corpus: List[SymbolSpecPM] = Field(default_factory=_default_sparse_corpus, min_length=1)
    stopping_lambda: Optional[float] = Field(default=None, ge=2, title="Stopping threshold")
    r: float = Field(default=2.0, title="Dual weight exponent")
    lp_exponents: List[float] = Field(default=[4.0 / 3.0, 2.0, 4.0], min_length=1)
    lp_draws: int = Field(default=20, ge=1, title="Random weight draws per family")

    @field_validator("r")
    @classmethod
    def _check_r(cls, val: float) -> float:
        return _check_exponent(val)

    @field_validator("lp_exponents")
    @classmethod
    def _check_lp_exponents(cls, val: List[float]) -> List[float]:
        if any((not math.isfinite(_p)) or (_p < 1) for _p in val):
            raise ValueError(f"Exponents must be finite and >= 1, got: {val}!")
        return val


class ExperimentConfigPM(StrictBasePM):
    experiment: ExperimentEnum = Field(..., title="Experiment")
    grid: GridConfigPM = Field(default_factory=GridConfigPM)
    exponents: ExponentsConfigPM = Field(default_factory=ExponentsConfigPM)
    symbol: SymbolSpecPM = Field(
        default_factory=lambda: SymbolSpecPM(kind=SymbolClassEnum.lr_bump, scale=0.15)
    )
    samples: int = Field(default=64, ge=1, title="Sign samples M")
    seed: int = Field(default=0, ge=0, title="Seed")
    backend: Optional[BackendEnum] = Field(
        default=None,
        title="Backend",
        description="Defaults to spectral on the torus and quadrature_fft on the bounded square.",
    )
    output_dir: str = Field(default="outputs", min_length=1, max_length=1024)
    identities: IdentitiesConfigPM = Field(default_factory=IdentitiesConfigPM)
    regimes: RegimesConfigPM = Field(default_factory=RegimesConfigPM)
    lowerbound: LowerboundConfigPM = Field(default_factory=LowerboundConfigPM)
    jacobian: JacobianConfigPM = Field(default_factory=JacobianConfigPM)
    scaling: ScalingConfigPM = Field(default_factory=ScalingConfigPM)
    sparse: SparseConfigPM = Field(default_factory=SparseConfigPM)

    @property
    def periodic(self) -> bool:
        if self.grid.periodic is None:
            return PERIODIC_DEFAULTS[self.experiment]
        return self.grid.periodic


class CheckPM(BasePM):
    name: str = Field(..., min_length=1, title="Check name")
    value: ExtFloatPM = Field(..., title="Observed value")
    bound: ExtFloatPM = Field(..., title="Tolerance or threshold")
    upper: bool = Field(default=True, title="value <= bound when true, value >= bound otherwise")
    passed: bool = Field(..., title="Passed")


class ExperimentResultPM(BasePM):
    experiment: ExperimentEnum = Field(..., title="Experiment")
    config: ExperimentConfigPM = Field(..., title="Resolved config")
    constants: Dict[str, Any] = Field(default_factory=dict, title="Constant choices of the code")
    checks: List[CheckPM] = Field(default_factory=list, title="Checks")
    summary: Dict[str, Any] = Field(default_factory=dict, title="Results")
    tables: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict, exclude=True)

    @property
    def ok(self) -> bool:
        return all(_check.passed for _check in self.checks)

    @property
    def failed(self) -> List[str]:
        return [_check.name for _check in self.checks if not _check.passed]


__all__ = [
    "GridConfigPM",
    "ExponentsConfigPM",
    "IdentitiesConfigPM",
    "RegimesConfigPM",
    "LowerboundConfigPM",
    "JacobianConfigPM",
    "ScalingConfigPM",
    "SparseConfigPM",
    "ExperimentConfigPM",
    "CheckPM",
    "ExperimentResultPM",
]
