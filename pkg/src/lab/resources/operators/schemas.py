# -*- coding: utf-8 -*-

import math

from pydantic import Field, ConfigDict

from lab.core.schemas import BasePM, ComplexPM


class KernelSpecPM(BasePM):
    scale: float = Field(
        default=1.0,
        allow_inf_nan=False,
        title="Kernel scale",
        description="Multiple of the Beurling kernel -1/(pi (x-y)^2); 0 is the zero kernel.",
        examples=[1.0],
    )
    c_upper: float = Field(
        default=1.0 / math.pi,
        ge=0,
        title="Size constant",
        description="Claimed bound |K(x,y)| <= c_upper / |x-y|^2.",
        examples=[1.0 / math.pi],
    )
    c_lower: float = Field(
        default=1.0 / math.pi,
        ge=0,
        title="Non-degeneracy constant",
        description="Claimed bound |K(x,y)| >= c_lower / |x-y|^2.",
        examples=[1.0 / math.pi],
    )

    model_config = ConfigDict(frozen=True)


class KernelBoundsReportPM(BasePM):
    spec: KernelSpecPM = Field(..., title="Kernel spec")
    trials: int = Field(..., ge=1, title="Trials")
    seed: int = Field(..., title="Seed")
    min_weighted: float = Field(..., title="min |K(x,y)| |x-y|^2 over the samples")
    max_weighted: float = Field(..., title="max |K(x,y)| |x-y|^2 over the samples")
    size_ok: bool = Field(..., title="Size bound holds")
    nondegenerate: bool = Field(..., title="Non-degeneracy bound holds with a positive constant")


class JacobianPairingPM(BasePM):
    direct: ComplexPM = Field(
        ..., title="Direct form", description="Integral of b (Sv conj(Sw) - v conj(w))."
    )
    commutator: ComplexPM = Field(
        ..., title="Commutator form", description="Integral of conj(Sw) [b,S] v."
    )
    residual: float = Field(
        ..., ge=0, title="Residual", description="|direct - commutator| relative to ||b||_inf ||v||_2 ||w||_2."
    )


__all__ = [
    "KernelSpecPM",
    "KernelBoundsReportPM",
    "JacobianPairingPM",
]
