# -*- coding: utf-8 -*-

import math
from functools import lru_cache
from typing import List, NamedTuple, Tuple

import numpy as np

from lab.resources.operators import utils as operators_utils


class WitnessBlocks(NamedTuple):
    mean: complex
    lhs: float
    sigma: np.ndarray
    f: List[np.ndarray]
    g: List[np.ndarray]


def block_lp(values: np.ndarray, s: float, cell_area: float) -> float:
    _abs = np.abs(values)
    _max = float(np.max(_abs)) if _abs.size else 0.0
    if _max == 0.0:
        return 0.0
    return _max * (cell_area * float(np.sum((_abs / _max) ** s))) ** (1.0 / s)


@lru_cache(maxsize=32)
def cube_offsets(cells: int, h: float) -> np.ndarray:
    """Offsets x - z of the cell-center nodes from the center z of a `cells` x `cells` cube."""

    _d = (np.arange(cells, dtype=np.float64) - 0.5 * (cells - 1)) * h
    _d1, _d2 = np.meshgrid(_d, _d, indexing="xy")
    _offsets = _d1 + 1j * _d2
    _offsets.setflags(write=False)
    return _offsets


def witness_profiles(cells: int, h: float) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Witness pairs before the phase: f_i and g_i / sigma on a cube of side l = cells * h.

    Returns:
        Tuple[List[np.ndarray], List[np.ndarray]]: f_1..f_3 and g_1/sigma..g_3/sigma.
    """

    _side = cells * h
    _d = cube_offsets(cells, h)
    _ones = np.ones_like(_d)
    _f = [_ones, _d / _side, (_d / _side) ** 2]
    _g = [
        -(math.pi / _side**2) * _d**2,
        (2.0 * math.pi / _side) * _d,
        -math.pi * _ones,
    ]
    return _f, _g


def witness_blocks(block: np.ndarray, h: float) -> WitnessBlocks:
    """Phase sigma and witness pairs of b restricted to one cube.

    sigma = conj(b - <b>_Q) / |b - <b>_Q| where b differs from its mean, 1 elsewhere, so that
    sigma (b - <b>_Q) = |b - <b>_Q| and sum_i g_i(x) f_i(y) = -(pi / l^2) sigma(x) (x - y)^2.
    """

    _first = block.flat[0]
    if np.all(block == _first):
        _mean = complex(_first)
        _diff = np.zeros_like(block)
    else:
        _mean = complex(np.mean(block))
        _diff = block - _mean

    _abs = np.abs(_diff)
    _nonzero = 0.0 < _abs
    _sigma = np.ones(block.shape, dtype=np.complex128)
    _sigma[_nonzero] = np.conj(_diff[_nonzero]) / _abs[_nonzero]

    _f, _g = witness_profiles(block.shape[0], h)
    return WitnessBlocks(
        mean=_mean,
        lhs=float((h**2) * np.sum(_abs)),
        sigma=_sigma,
        f=_f,
        g=[_gi * _sigma for _gi in _g],
    )


def block_pairing(
    b: np.ndarray, f: np.ndarray, g: np.ndarray, h: float, direct: bool
) -> complex:
    """Bilinear pairing h^2 * sum of g * [b,S]f on one block (no conjugation)."""

    _out = operators_utils.quadrature_commutator(b, f, h, direct=direct)
    return complex((h**2) * np.sum(g * _out))


@lru_cache(maxsize=256)
def witness_factor(cells: int, h: float, p: float, q_dual: float) -> float:
    """sum_i ||f_i||_p ||g_i||_q' on a cube of `cells` cells, which doesn't depend on the phase."""

    _f, _g = witness_profiles(cells, h)
    _area = h**2
    return math.fsum(
        block_lp(_fi, p, _area) * block_lp(_gi, q_dual, _area) for _fi, _gi in zip(_f, _g)
    )


__all__ = [
    "WitnessBlocks",
    "block_lp",
    "cube_offsets",
    "witness_profiles",
    "witness_blocks",
    "block_pairing",
    "witness_factor",
]
