# -*- coding: utf-8 -*-

from typing import List, Optional
from typing_extensions import Self

from pydantic import Field, ConfigDict, model_validator

from lab.core.constants import SymbolClassEnum, BumpShapeEnum
from lab.core.schemas import BasePM, ArrayBasePM, ComplexPM, ExtFloatPM
from lab.resources.field.schemas import ComplexFieldPM


class SymbolSpecPM(BasePM):
    kind: SymbolClassEnum = Field(
        ...,
        alias="class",
        title="Symbol class",
        description="constant, bmo_log, holder, lr_bump, step or random.",
        examples=["holder"],
    )
    value: ComplexPM = Field(
        default=1.0,
        title="Constant value",
        description="Value of a `constant` symbol.",
        examples=[[1.0, 0.0]],
    )
    offset: ComplexPM = Field(
        default=0j,
        title="Offset",
        description="Constant added to the sampled symbol.",
        examples=[[3.0, 0.0]],
    )
    amplitude: float = Field(default=1.0, allow_inf_nan=False, title="Amplitude")
    alpha: Optional[float] = Field(
        default=None,
        gt=0,
        le=1,
        title="Holder exponent",
        description="Exponent of |x - center|^alpha, required for `holder`.",
        examples=[0.5],
    )
    shape: BumpShapeEnum = Field(
        default=BumpShapeEnum.gaussian,
        title="Bump shape",
        description="Gaussian exp(-|x-c|^2/scale^2) or compactly supported bump of radius `scale`.",
    )
    scale: float = Field(default=1.0, gt=0, allow_inf_nan=False, title="Bump scale")
    center: ComplexPM = Field(default=0j, title="Center", examples=[[0.0, 0.0]])
    window: Optional[float] = Field(
        default=None,
        gt=0,
        allow_inf_nan=False,
        title="Window radius",
        description="Smooth cutoff: 1 inside half the radius, 0 outside the radius.",
        examples=[0.45],
    )
    clamp: bool = Field(
        default=True,
        title="Clamp",
        description="Clamp |x - center| at one grid cell for `bmo_log`.",
    )
    seed: int = Field(default=0, ge=0, title="Seed", description="Seed of a `random` symbol.")
    band: int = Field(default=4, ge=1, title="Band", description="Band of a `random` symbol.")

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    @model_validator(mode="after")
    def _check_all(self) -> Self:
        if (self.kind == SymbolClassEnum.holder) and (self.alpha is None):
            raise ValueError("Holder symbol requires an exponent `alpha` in (0, 1]!")

        return self


class OpNormEstimatePM(ArrayBasePM):
    value: float = Field(
        ...,
        ge=0,
        title="Certified lower bound",
        description="||[b,S] witness_v||_q / ||witness_v||_p as computed.",
    )
    witness_v: ComplexFieldPM = Field(..., title="Witness field")
    p: ExtFloatPM = Field(..., title="Domain exponent")
    q: ExtFloatPM = Field(..., title="Target exponent")
    iterations: int = Field(..., ge=0, title="Ascent steps", description="Total over restarts.")
    restarts: int = Field(..., ge=1, title="Restarts")
    seed: int = Field(..., title="Base seed")
    history: List[float] = Field(
        ..., title="Running maximum", description="Best value after each restart."
    )


class UpperEnvelopePM(BasePM):
    value: float = Field(..., ge=0, title="Envelope ||b||_r (C_p + C_q)")
    b_norm: float = Field(..., ge=0, title="||b||_r")
    c_p: float = Field(..., ge=0, title="Bound on ||S||_p")
    c_q: float = Field(..., ge=0, title="Bound on ||S||_q")
    probe_p: float = Field(..., ge=0, title="Largest probe ratio in L^p")
    probe_q: float = Field(..., ge=0, title="Largest probe ratio in L^q")


__all__ = [
    "SymbolSpecPM",
    "OpNormEstimatePM",
    "UpperEnvelopePM",
]
