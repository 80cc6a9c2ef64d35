# -*- coding: utf-8 -*-

from functools import lru_cache
from typing import Tuple

import numpy as np
import scipy.fft as sfft

from lab.config import config

from .schemas import GridSpecPM
from .constants import FD_EDGE_STENCIL, FD_NEAR_EDGE_STENCIL, FD_CENTRAL_STENCIL


def fft2(samples: np.ndarray) -> np.ndarray:
    return sfft.fft2(samples, workers=config.lab.fft_workers)


def ifft2(coeffs: np.ndarray) -> np.ndarray:
    return sfft.ifft2(coeffs, workers=config.lab.fft_workers)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=32)
def wavenumbers(grid: GridSpecPM, zero_nyquist: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Angular wavenumbers (xi1, xi2) of the torus, meshed like the samples.

    Args:
        grid         (GridSpecPM, required): Periodic grid.
        zero_nyquist (bool      , required): Zero the unpaired Nyquist wavenumber (odd derivatives).

    Returns:
        Tuple[np.ndarray, np.ndarray]: xi1 varies along axis 1, xi2 along axis 0.
    """

    _k = sfft.fftfreq(grid.n, d=grid.h) * (2.0 * np.pi)
    if zero_nyquist:
        _k[grid.n // 2] = 0.0

    _xi1, _xi2 = np.meshgrid(_k, _k, indexing="xy")
    return _readonly(_xi1), _readonly(_xi2)


@lru_cache(maxsize=32)
def zeta(grid: GridSpecPM, zero_nyquist: bool) -> np.ndarray:
    """Complex frequency zeta = xi1 + i xi2."""

    _xi1, _xi2 = wavenumbers(grid, zero_nyquist)
    return _readonly(_xi1 + 1j * _xi2)


def apply_multiplier(samples: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    return ifft2(fft2(samples) * symbol)


def fd_partial(samples: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Fourth-order finite difference along `axis` with one-sided closures at both edges.

    Args:
        samples (np.ndarray, required): Sample array of shape (n, n).
        h       (float     , required): Grid spacing.
        axis    (int       , required): 1 for d/dx1, 0 for d/dx2.

    Returns:
        np.ndarray: Derivative samples.
    """

    _f = np.moveaxis(np.asarray(samples, dtype=np.complex128), axis, 0)
    _out = np.empty_like(_f)

    _c = FD_CENTRAL_STENCIL
    _out[2:-2] = (
        _c[0] * _f[:-4] + _c[1] * _f[1:-3] + _c[3] * _f[3:-1] + _c[4] * _f[4:]
    )

    _e = FD_EDGE_STENCIL
    _ne = FD_NEAR_EDGE_STENCIL
    _out[0] = sum(_w * _f[_j] for _j, _w in enumerate(_e))
    _out[1] = sum(_w * _f[_j] for _j, _w in enumerate(_ne))
    ## Mirrored closures flip sign:
    _out[-1] = -sum(_w * _f[-1 - _j] for _j, _w in enumerate(_e))
    _out[-2] = -sum(_w * _f[-1 - _j] for _j, _w in enumerate(_ne))

    _out /= 12.0 * h
    return np.moveaxis(_out, 0, axis)


def partial(samples: np.ndarray, grid: GridSpecPM, axis: int) -> np.ndarray:
    """Real partial derivative along `axis`: spectral on the torus, finite differences otherwise."""

    if grid.periodic:
        _xi1, _xi2 = wavenumbers(grid, True)
        _xi = _xi1 if axis == 1 else _xi2
        return apply_multiplier(samples, 1j * _xi)

    return fd_partial(samples=samples, h=grid.h, axis=axis)


__all__ = [
    "fft2",
    "ifft2",
    "wavenumbers",
    "zeta",
    "apply_multiplier",
    "fd_partial",
    "partial",
]
