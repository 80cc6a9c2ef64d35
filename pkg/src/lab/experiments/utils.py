# -*- coding: utf-8 -*-

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Sequence

import numpy as np

from lab.config import config
from lab.resources.norms.schemas import SymbolSpecPM

from .schemas import CheckPM


def make_check(name: str, value: float, bound: float, upper: bool = True) -> CheckPM:
    """Check `value <= bound` (or `value >= bound` when `upper` is False); NaN never passes."""

    _value = float(value)
    _passed = (_value <= bound) if upper else (bound <= _value)
    return CheckPM(name=name, value=_value, bound=bound, upper=upper, passed=bool(_passed))


def relative(num: float, den: float) -> float:
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x); NaN with fewer than two positive points."""

    _pairs = [(_x, _y) for _x, _y in zip(xs, ys) if (0.0 < _x) and (0.0 < _y)]
    if (len(_pairs) < 2) or (len({_x for _x, _ in _pairs}) < 2):
        return math.nan

    _x = np.log(np.array([_x for _x, _ in _pairs], dtype=np.float64))
    _y = np.log(np.array([_y for _, _y in _pairs], dtype=np.float64))
    return float(np.polyfit(_x, _y, 1)[0])


def map_ordered(func: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
    """Map over independent sweep points on `config.lab.workers` threads, results in input order."""

    _items = list(items)
    if (config.lab.workers <= 1) or (len(_items) <= 1):
        return [func(_item) for _item in _items]

    with ThreadPoolExecutor(max_workers=config.lab.workers) as _executor:
        return list(_executor.map(func, _items))


def symbol_label(index: int, spec: SymbolSpecPM) -> str:
    return f"s{index:02d}_{spec.kind.value}"


def jsonable(val: Any) -> Any:
    """Plain JSON view of report values: complex as [re, im], infinities as strings, NaN as null."""

    if isinstance(val, dict):
        return {str(_key): jsonable(_val) for _key, _val in val.items()}

    if isinstance(val, (list, tuple)):
        return [jsonable(_val) for _val in val]

    if isinstance(val, (bool, np.bool_)):
        return bool(val)

    if isinstance(val, (int, np.integer)):
        return int(val)

    if isinstance(val, (complex, np.complexfloating)):
        return [jsonable(float(val.real)), jsonable(float(val.imag))]

    if isinstance(val, (float, np.floating)):
        _val = float(val)
        if math.isnan(_val):
            return None
        if math.isinf(_val):
            return "inf" if 0 < _val else "-inf"
        return _val

    return val


__all__ = [
    "make_check",
    "relative",
    "loglog_slope",
    "map_ordered",
    "symbol_label",
    "jsonable",
]
