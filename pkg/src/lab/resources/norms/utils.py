# -*- coding: utf-8 -*-

import numpy as np
from scipy import signal


def _flat_bump(t: np.ndarray) -> np.ndarray:
    ## exp(-1/t) for t > 0, 0 otherwise
    _out = np.zeros_like(t)
    _pos = 0.0 < t
    _out[_pos] = np.exp(-1.0 / t[_pos])
    return _out


def smooth_cutoff(rho: np.ndarray) -> np.ndarray:
    """C-infinity cutoff: 1 for rho <= 1/2, 0 for rho >= 1."""

    _s = 2.0 * (np.asarray(rho, dtype=np.float64) - 0.5)
    _a = _flat_bump(1.0 - _s)
    _b = _flat_bump(_s)
    return _a / (_a + _b)


def compact_bump(rho: np.ndarray) -> np.ndarray:
    """exp(1 - 1/(1 - rho^2)) inside the unit disk, 0 outside; equals 1 at the center."""

    _rho = np.asarray(rho, dtype=np.float64)
    _out = np.zeros_like(_rho)
    _inside = _rho < 1.0
    _out[_inside] = np.exp(1.0 - 1.0 / (1.0 - _rho[_inside] ** 2))
    return _out


def duality_map(samples: np.ndarray, s: float, cell_area: float) -> np.ndarray:
    """Norming element of f in L^s: |f|^(s-2) f / ||f||_s^(s-1), unit norm in L^s'.

    Returns zeros for the zero field.
    """

    _abs = np.abs(samples)
    _max = float(np.max(_abs))
    if _max == 0.0:
        return np.zeros_like(samples)

    _scaled = _abs / _max
    _norm = (cell_area * np.sum(_scaled**s)) ** (1.0 / s)
    _weights = np.zeros_like(_scaled)
    _nonzero = 0.0 < _scaled
    _weights[_nonzero] = _scaled[_nonzero] ** (s - 2.0)
    _phase = np.where(_nonzero, samples / np.where(_nonzero, _abs, 1.0), 0.0)
    return _weights * _scaled * _phase / _norm ** (s - 1.0)


def riesz_table(n: int, h: float, alpha: float) -> np.ndarray:
    """|d|^(alpha-2) on all node offsets d of an n x n grid, 0 at the origin."""

    _o = np.arange(-(n - 1), n, dtype=np.float64) * h
    _o1, _o2 = np.meshgrid(_o, _o, indexing="xy")
    _dist = np.hypot(_o1, _o2)
    _table = np.zeros_like(_dist)
    _mask = 0.0 < _dist
    _table[_mask] = _dist[_mask] ** (alpha - 2.0)
    return _table


def riesz_potential(values: np.ndarray, h: float, alpha: float) -> np.ndarray:
    """h^2 * sum over y != x of |x - y|^(alpha-2) values(y) by zero-padded FFT convolution."""

    _n = values.shape[0]
    _table = riesz_table(_n, h, alpha)
    return (h**2) * signal.fftconvolve(_table, values, mode="valid")


def subsample_stride(n: int, max_points: int) -> int:
    _stride = 1
    while max_points < (n // _stride) ** 2:
        _stride *= 2
    return _stride


__all__ = [
    "smooth_cutoff",
    "compact_bump",
    "duality_map",
    "riesz_table",
    "riesz_potential",
    "subsample_stride",
]
