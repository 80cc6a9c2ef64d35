# -*- coding: utf-8 -*-

from typing import Iterator, List, NamedTuple, Optional, Tuple

import numpy as np


def mask_to_runs(mask: np.ndarray) -> List[List[int]]:
    """Run-length encode a boolean mask (row-major) as [start, length] runs of set cells."""

    _flat = np.concatenate(([False], np.asarray(mask, dtype=bool).ravel(), [False]))
    _edges = np.flatnonzero(_flat[1:] != _flat[:-1])
    return [[int(_start), int(_stop - _start)] for _start, _stop in zip(_edges[::2], _edges[1::2])]


def runs_to_mask(runs: List[List[int]], cells: int) -> np.ndarray:
    _flat = np.zeros(cells * cells, dtype=bool)
    for _start, _length in runs:
        _flat[_start : _start + _length] = True
    return _flat.reshape(cells, cells)


def block_means(arr: np.ndarray, size: int) -> np.ndarray:
    """Means over the aligned size x size blocks of a square array whose side is a multiple of `size`."""

    _k = arr.shape[0] // size
    return arr.reshape(_k, size, _k, size).mean(axis=(1, 3))


def upsample(arr: np.ndarray, size: int) -> np.ndarray:
    return np.kron(arr, np.ones((size, size), dtype=arr.dtype))


class BlockStats(NamedTuple):
    cells: int
    row0: np.ndarray
    col0: np.ndarray
    means: np.ndarray
    oscillations: np.ndarray


def _block_stats(samples: np.ndarray, cells: int, shift: Tuple[int, int]) -> BlockStats:
    _n = samples.shape[0]
    _s2, _s1 = shift
    _k2 = (_n - _s2) // cells
    _k1 = (_n - _s1) // cells
    _sub = samples[_s2 : _s2 + _k2 * cells, _s1 : _s1 + _k1 * cells]
    _blocks = _sub.reshape(_k2, cells, _k1, cells)
    _means = _blocks.mean(axis=(1, 3))
    _osc = np.abs(_blocks - _means[:, None, :, None]).mean(axis=(1, 3))
    ## Constant blocks are exact:
    _first = _blocks[:, :1, :, :1]
    _flat = np.all(_blocks == _first, axis=(1, 3))
    _means = np.where(_flat, _first[:, 0, :, 0], _means)
    _osc = np.where(_flat, 0.0, _osc)
    _row0, _col0 = np.meshgrid(
        _s2 + cells * np.arange(_k2), _s1 + cells * np.arange(_k1), indexing="ij"
    )
    return BlockStats(cells, _row0.ravel(), _col0.ravel(), _means.ravel(), _osc.ravel())


def cube_family_stats(
    samples: np.ndarray, min_cells: int = 2, max_cells: Optional[int] = None
) -> Iterator[BlockStats]:
    """Mean and mean oscillation of every cube of the sup family: all dyadic blocks of side
    `min_cells` up to `max_cells`, plus the copies shifted by half a side along x1, x2 and both.

    Args:
        samples   (np.ndarray   , required): Samples of shape (n, n), n a power of two.
        min_cells (int          , optional): Smallest side in cells. Defaults to 2.
        max_cells (Optional[int], optional): Largest side in cells. Defaults to n.

    Yields:
        BlockStats: One batch per (side, shift), sides in increasing order.
    """

    _n = samples.shape[0]
    _largest = _n if max_cells is None else min(_n, max_cells)
    _cells = min_cells
    while _cells <= _largest:
        _half = _cells // 2
        _shifts = [(0, 0)]
        if (0 < _half) and (_cells < _n):
            _shifts += [(0, _half), (_half, 0), (_half, _half)]

        for _shift in _shifts:
            yield _block_stats(samples, _cells, _shift)

        _cells *= 2


__all__ = [
    "mask_to_runs",
    "runs_to_mask",
    "block_means",
    "upsample",
    "BlockStats",
    "cube_family_stats",
]
