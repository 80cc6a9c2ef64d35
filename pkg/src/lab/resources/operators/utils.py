# -*- coding: utf-8 -*-

import math
from functools import lru_cache
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from lab.config import config
from lab.resources.field import utils as field_utils


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=16)
def offset_table(m: int, h: float, conjugate: bool = False) -> np.ndarray:
    """Beurling kernel -1/(pi d^2) on all node offsets d = h*(o1 + i o2) of an m x m block.

    Args:
        m         (int  , required): Block size.
        h         (float, required): Grid spacing.
        conjugate (bool , optional): Return the conjugate kernel (adjoint). Defaults to False.

    Returns:
        np.ndarray: Table of shape (2m-1, 2m-1), index [o2 + m - 1, o1 + m - 1], zero at the origin.
    """

    _o = np.arange(-(m - 1), m, dtype=np.float64) * h
    _o1, _o2 = np.meshgrid(_o, _o, indexing="xy")
    _d = _o1 + 1j * _o2
    _table = np.zeros_like(_d)
    _mask = _d != 0
    _table[_mask] = -1.0 / (math.pi * _d[_mask] ** 2)
    if conjugate:
        _table = np.conj(_table)

    return _readonly(_table)


@lru_cache(maxsize=16)
def padded_kernel_fft(m: int, h: float, conjugate: bool = False) -> np.ndarray:
    """Transform of the kernel table wrapped onto a zero-padded 2m x 2m torus."""

    _table = offset_table(m, h, conjugate)
    _kernel = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    _idx = np.arange(-(m - 1), m) % (2 * m)
    _kernel[np.ix_(_idx, _idx)] = _table
    return _readonly(field_utils.fft2(_kernel))


def _row_windows(table: np.ndarray, m: int, row: int) -> np.ndarray:
    ## windows[k2, j1, k1] = K(row - k2, j1 - k1)
    _slab = table[row : row + m][::-1]
    return sliding_window_view(_slab, m, axis=1)[:, :, ::-1]


def _row_blocks(m: int) -> list:
    _block = config.lab.quadrature.row_block
    return [(_start, min(_start + _block, m)) for _start in range(0, m, _block)]


def _map_rows(func, m: int) -> np.ndarray:
    _blocks = _row_blocks(m)
    _workers = config.lab.workers
    if _workers <= 1:
        _parts = [func(_start, _stop) for _start, _stop in _blocks]
    else:
        with ThreadPoolExecutor(max_workers=_workers) as _executor:
            _parts = list(_executor.map(lambda _b: func(*_b), _blocks))

    return np.concatenate(_parts, axis=0)


def direct_apply(v: np.ndarray, h: float, conjugate: bool = False) -> np.ndarray:
    """Dense sum h^2 * sum_{k != j} K(x_j, x_k) v_k, parallel over output rows.

    Args:
        v         (np.ndarray, required): Samples of shape (m, m).
        h         (float     , required): Grid spacing.
        conjugate (bool      , optional): Use the conjugate kernel. Defaults to False.

    Returns:
        np.ndarray: Output samples of shape (m, m).
    """

    _m = v.shape[0]
    _table = offset_table(_m, h, conjugate)

    def _rows(start: int, stop: int) -> np.ndarray:
        _out = np.empty((stop - start, _m), dtype=np.complex128)
        for _j2 in range(start, stop):
            _out[_j2 - start] = np.einsum("kjl,kl->j", _row_windows(_table, _m, _j2), v)
        return _out

    return (h**2) * _map_rows(_rows, _m)


def direct_commutator(
    b: np.ndarray, v: np.ndarray, h: float, conjugate: bool = False
) -> np.ndarray:
    """Combined-form dense commutator h^2 * sum_k (b_j - b_k) K(x_j, x_k) v_k."""

    _m = v.shape[0]
    _table = offset_table(_m, h, conjugate)
    _bv = b * v

    def _rows(start: int, stop: int) -> np.ndarray:
        _out = np.empty((stop - start, _m), dtype=np.complex128)
        for _j2 in range(start, stop):
            _weights = b[_j2][:, None, None] * v[None, :, :] - _bv[None, :, :]
            _out[_j2 - start] = np.einsum(
                "kjl,jkl->j", _row_windows(_table, _m, _j2), _weights
            )
        return _out

    return (h**2) * _map_rows(_rows, _m)


def fft_apply(v: np.ndarray, h: float, conjugate: bool = False) -> np.ndarray:
    """Free-space kernel convolution through a zero-padded 2m x 2m transform."""

    _m = v.shape[0]
    _padded = np.zeros((2 * _m, 2 * _m), dtype=np.complex128)
    _padded[:_m, :_m] = v
    _conv = field_utils.ifft2(field_utils.fft2(_padded) * padded_kernel_fft(_m, h, conjugate))
    return (h**2) * _conv[:_m, :_m]


def quadrature_apply(
    v: np.ndarray, h: float, direct: bool, conjugate: bool = False
) -> np.ndarray:
    if direct:
        return direct_apply(v, h, conjugate)
    return fft_apply(v, h, conjugate)


def quadrature_commutator(
    b: np.ndarray,
    v: np.ndarray,
    h: float,
    direct: bool,
    conjugate: bool = False,
    pivot: Optional[complex] = None,
) -> np.ndarray:
    """Commutator of multiplication by `b` with the quadrature operator on an m x m block.

    The pivot sample is subtracted from `b` first, so constant symbols give an exact zero. The
    dense path sums the combined kernel (b_j - b_k) K(x_j, x_k); the FFT path is the split form
    (b - b0) K(v) - K((b - b0) v), two convolutions of the pivoted symbol.
    """

    if pivot is None:
        pivot = b.flat[0]
    _b = b - pivot
    if direct:
        return direct_commutator(_b, v, h, conjugate)

    return _b * fft_apply(v, h, conjugate) - fft_apply(_b * v, h, conjugate)


__all__ = [
    "offset_table",
    "padded_kernel_fft",
    "direct_apply",
    "direct_commutator",
    "fft_apply",
    "quadrature_apply",
    "quadrature_commutator",
]
