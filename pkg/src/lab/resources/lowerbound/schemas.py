# -*- coding: utf-8 -*-

from typing import List, Optional
from typing_extensions import Self

from pydantic import Field, model_validator

from lab.core.schemas import BasePM, ArrayBasePM, ComplexPM, ExtFloatPM
from lab.resources.field.schemas import ComplexFieldPM
from lab.resources.dyadic.schemas import GridCubePM

from .constants import WITNESS_PAIRS


class WitnessTriplePM(ArrayBasePM):
    cube: GridCubePM = Field(..., title="Cube Q")
    mean: ComplexPM = Field(..., title="Mean <b>_Q")
    lhs: float = Field(..., ge=0, title="Integral of |b - <b>_Q| over Q")
    sigma: ComplexFieldPM = Field(
        ..., title="Phase", description="Unimodular on Q, 0 off Q; sigma (b - <b>_Q) = |b - <b>_Q|."
    )
    f: List[ComplexFieldPM] = Field(
        ..., min_length=WITNESS_PAIRS, max_length=WITNESS_PAIRS, title="Fields f_1, f_2, f_3"
    )
    g: List[ComplexFieldPM] = Field(
        ..., min_length=WITNESS_PAIRS, max_length=WITNESS_PAIRS, title="Fields g_1, g_2, g_3"
    )
    bound_const: float = Field(..., ge=0, title="max of |f_i| + |g_i| over i and Q")

    @model_validator(mode="after")
    def _check_all(self) -> Self:
        _grid = self.sigma.grid
        if any(_field.grid != _grid for _field in (*self.f, *self.g)):
            raise ValueError("Witness fields must share one grid!")

        return self


class LowerBoundPM(BasePM):
    value: float = Field(..., ge=0, title="Certified lower bound")
    cube: Optional[GridCubePM] = Field(default=None, title="Witness cube")
    oscillation: float = Field(..., ge=0, title="Mean oscillation on the witness cube")
    witness_factor: Optional[float] = Field(
        default=None, title="sum_i ||f_i||_p ||g_i||_q' on the witness cube"
    )
    alpha: float = Field(default=0.0, title="Holder exponent d (1/p - 1/q)")
    residual: float = Field(
        default=0.0, ge=0, title="Witness identity residual on the witness cube"
    )


class PipelineSamplePM(BasePM):
    sample: int = Field(..., ge=0)
    component: int = Field(..., ge=1, le=WITNESS_PAIRS)
    pairing: ComplexPM = Field(..., title="Integral of G [b,S] F")
    norm_f: float = Field(..., ge=0, title="||F||_p")
    norm_g: float = Field(..., ge=0, title="||G||_q'")
    ratio: float = Field(..., ge=0, title="|pairing| / (||G||_q' ||F||_p)")


class PipelineReportPM(BasePM):
    p: ExtFloatPM = Field(..., title="Domain exponent")
    q: ExtFloatPM = Field(..., title="Target exponent")
    r: ExtFloatPM = Field(..., title="Exponent with 1/q = 1/r + 1/p")
    lr_local: float = Field(..., ge=0, title="||b - <b>_Q0||_{L^r(Q0)}")
    certified_lb: float = Field(..., ge=0, title="Best realized ratio")
    mc_mean: float = Field(..., title="Mean over signs of the summed pairings (real part)")
    mc_imag_mean: float = Field(default=0.0, title="Mean of the imaginary parts")
    mc_stderr: float = Field(..., ge=0, title="Standard error of mc_mean")
    target: float = Field(..., ge=0, title="sum_Q lambda_Q times the integral of |b - <b>_Q| over Q")
    samples: int = Field(..., ge=1, title="Sign samples M")
    seed: int = Field(..., title="Seed")
    family_size: int = Field(default=1, ge=1)
    depth: int = Field(default=0, ge=0)
    holder_p: float = Field(default=0.0, ge=0, title="||sum lambda^(r'/p) 1_Q||_p")
    holder_q_dual: float = Field(default=0.0, ge=0, title="||sum lambda^(r'/q') 1_Q||_q'")
    k_emp: ExtFloatPM = Field(default=0.0, title="lr_local / certified_lb")
    dual_residual: float = Field(default=0.0, ge=0, title="Largest dual-weight identity residual")
    rows: List[PipelineSamplePM] = Field(default_factory=list, exclude=True)


__all__ = [
    "WitnessTriplePM",
    "LowerBoundPM",
    "PipelineSamplePM",
    "PipelineReportPM",
]
