# -*- coding: utf-8 -*-

import math
from typing import Any

from typing_extensions import Annotated
from pydantic import BaseModel, ConfigDict, BeforeValidator, PlainSerializer


def _to_complex(val: Any) -> Any:
    if isinstance(val, (list, tuple)):
        if len(val) != 2:
            raise ValueError(f"Complex value must be a [re, im] pair, got: {val}!")
        return complex(float(val[0]), float(val[1]))

    if isinstance(val, dict) and ("re" in val) and ("im" in val):
        return complex(float(val["re"]), float(val["im"]))

    if isinstance(val, (int, float)):
        return complex(val)

    return val


## Complex numbers travel through JSON as [re, im]:
ComplexPM = Annotated[
    complex,
    BeforeValidator(_to_complex),
    PlainSerializer(lambda val: [val.real, val.imag], return_type=list, when_used="json"),
]


def _to_ext_float(val: Any) -> Any:
    if isinstance(val, str) and (val.strip().lower() in ("inf", "+inf", "infinity")):
        return float("inf")

    return val


def _ext_float_to_json(val: float) -> Any:
    if math.isinf(val):
        return "inf" if val > 0 else "-inf"

    return val


## Extended reals (exponents may be infinite) travel through JSON as "inf":
ExtFloatPM = Annotated[
    float,
    BeforeValidator(_to_ext_float),
    PlainSerializer(_ext_float_to_json, when_used="json"),
]


class BasePM(BaseModel):
    pass


class StrictBasePM(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ArrayBasePM(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


__all__ = [
    "ComplexPM",
    "ExtFloatPM",
    "BasePM",
    "StrictBasePM",
    "ArrayBasePM",
]
