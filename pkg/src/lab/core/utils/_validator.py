# -*- coding: utf-8 -*-

import math
from typing import Union

from pydantic import validate_call


@validate_call
def is_power_of_two(val: int) -> bool:
    """Check if the value is a positive power of two.

    Args:
        val (int, required): Value to check.

    Returns:
        bool: True if `val` is 1, 2, 4, 8, ...
    """

    return (val > 0) and ((val & (val - 1)) == 0)


@validate_call
def is_lebesgue_exponent(val: Union[int, float], allow_inf: bool = False) -> bool:
    """Check if the value is an exponent in the open interval (1, inf).

    Args:
        val       (Union[int, float], required): Exponent to check.
        allow_inf (bool             , optional): Accept the infinite sentinel. Defaults to False.

    Returns:
        bool: True if the exponent is admissible.
    """

    if math.isinf(val):
        return allow_inf and (val > 0)

    return (not math.isnan(val)) and (1.0 < val)


__all__ = [
    "is_power_of_two",
    "is_lebesgue_exponent",
]
