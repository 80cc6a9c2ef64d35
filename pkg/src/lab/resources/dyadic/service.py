# -*- coding: utf-8 -*-

import math
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import validate_call, Field
from typing_extensions import Annotated

from lab.config import config
from lab.core.constants import DIMENSION
from lab.core.exceptions import AllZeroOscillationError, ExponentMismatchError
from lab.core import utils as core_utils
from lab.logger import logger
from lab.resources.field.schemas import GridSpecPM, ComplexFieldPM

from .schemas import (
    GridCubePM,
    DyadicCubePM,
    SparseFamilyPM,
    DominationReportPM,
    SparseCheckPM,
    DualWeightsPM,
    MeanLimitReportPM,
)
from . import utils


_ArbitraryConfig = {"arbitrary_types_allowed": True}


@validate_call
def root_cube(grid: GridSpecPM) -> DyadicCubePM:
    """The whole grid as the root cube Q0."""

    return DyadicCubePM(level=0, index=(0, 0), root=GridCubePM(row0=0, col0=0, cells=grid.n))


@validate_call
def centered_ladder(
    grid: GridSpecPM, min_cells: Annotated[int, Field(ge=1)] = 2
) -> List[GridCubePM]:
    """Concentric cubes around the grid center, halving the side from the full domain down
    to `min_cells` cells.

    Args:
        grid      (GridSpecPM, required): Grid.
        min_cells (int       , optional): Smallest side in cells. Defaults to 2.

    Returns:
        List[GridCubePM]: Strictly nested cubes, largest first.
    """

    _ladder = []
    _cells = grid.n
    while min_cells <= _cells:
        _start = (grid.n - _cells) // 2
        _ladder.append(GridCubePM(row0=_start, col0=_start, cells=_cells))
        _cells //= 2

    return _ladder


def _mean_osc(block: np.ndarray) -> Tuple[complex, float]:
    _first = block.flat[0]
    if np.all(block == _first):
        return complex(_first), 0.0

    _mean = complex(np.mean(block))
    return _mean, float(np.mean(np.abs(block - _mean)))


def _fsum_mean(values: np.ndarray) -> complex:
    _first = values.flat[0]
    if np.all(values == _first):
        return complex(_first)

    return complex(math.fsum(values.real.ravel()), math.fsum(values.imag.ravel())) / values.size


@validate_call(config=_ArbitraryConfig)
def mean_and_oscillation(
    b: ComplexFieldPM, cube: Union[DyadicCubePM, GridCubePM]
) -> Tuple[complex, float]:
    """Cell-exact discrete mean <b>_Q and mean oscillation a_Q = mean of |b - <b>_Q| over Q.

    Args:
        b    (ComplexFieldPM                , required): Symbol.
        cube (Union[DyadicCubePM, GridCubePM], required): Cube inside the grid.

    Raises:
        ValueError: If the cube doesn't fit inside the grid.

    Returns:
        Tuple[complex, float]: Mean and oscillation; (c, 0) exactly when b is constant on Q.
    """

    _block = cube.block if isinstance(cube, DyadicCubePM) else cube
    if not _block.fits(b.grid):
        raise ValueError(f"Cube {_block} doesn't fit inside the {b.grid.n}x{b.grid.n} grid!")

    return _mean_osc(_block.block(b.samples))


def _select_stopping_cubes(
    block: np.ndarray, mean: complex, threshold: float
) -> List[Tuple[int, int, int]]:
    """Maximal dyadic subcubes R of the block with mean |b - mean| over R above `threshold`.

    Returns:
        List[Tuple[int, int, int]]: (level offset, i1, i2) of each selected subcube.
    """

    _dev = np.abs(block - mean)
    _m = block.shape[0]
    _covered = np.zeros((_m, _m), dtype=bool)
    _selected = []
    _cells = _m // 2
    _offset = 1
    while 1 <= _cells:
        _means = utils.block_means(_dev, _cells)
        _taken = utils.block_means(_covered.astype(np.float64), _cells) > 0.0
        _hits = (_means > threshold) & (~_taken)
        for _i2, _i1 in np.argwhere(_hits):
            _selected.append((_offset, int(_i1), int(_i2)))

        if np.any(_hits):
            _covered |= utils.upsample(_hits, _cells)

        _cells //= 2
        _offset += 1

    return _selected


@validate_call(config=_ArbitraryConfig)
def sparse_dominate(
    b: ComplexFieldPM,
    root: Optional[DyadicCubePM] = None,
    stopping_lambda: Optional[Annotated[float, Field(ge=2)]] = None,
) -> SparseFamilyPM:
    """Calderon-Zygmund stopping time. For every selected Q, its children in the family are
    the maximal dyadic R inside Q with mean |b - <b>_Q| over R above Lambda * a_Q, and
    E(Q) = Q minus those R. Single-cell cubes have a_Q = 0 and stop the recursion.

    Args:
        b               (ComplexFieldPM         , required): Symbol.
        root            (Optional[DyadicCubePM] , optional): Root cube Q0. Defaults to the whole grid.
        stopping_lambda (Optional[float]        , optional): Threshold Lambda >= 2. Defaults to `config.lab.stopping_lambda`.

    Returns:
        SparseFamilyPM: Cubes in canonical (level, index) order with means, a_Q and masks E(Q).
    """

    if root is None:
        root = root_cube(b.grid)

    if stopping_lambda is None:
        stopping_lambda = config.lab.stopping_lambda

    logger.debug(
        f"Sparse decomposition of a {root.cells}x{root.cells} cube with Lambda={stopping_lambda}..."
    )

    _records: Dict[Tuple[int, int, int], tuple] = {}
    _work: List[DyadicCubePM] = [root]
    while _work:
        _cube = _work.pop()
        _block = _cube.block.block(b.samples)
        _mean, _a = _mean_osc(_block)
        _mask = np.ones((_cube.cells, _cube.cells), dtype=bool)

        if 0.0 < _a:
            for _offset, _i1, _i2 in _select_stopping_cubes(_block, _mean, stopping_lambda * _a):
                _child = DyadicCubePM(
                    level=_cube.level + _offset,
                    index=((_cube.index[0] << _offset) + _i1, (_cube.index[1] << _offset) + _i2),
                    root=_cube.root,
                )
                _cells = _child.cells
                _r0 = _i2 * _cells
                _c0 = _i1 * _cells
                _mask[_r0 : _r0 + _cells, _c0 : _c0 + _cells] = False
                _work.append(_child)

        _mask.setflags(write=False)
        _records[_cube.key] = (_cube, _mean, _a, _mask)

    _keys = sorted(_records.keys())
    _family = SparseFamilyPM(
        grid=b.grid,
        root=root,
        stopping_lambda=stopping_lambda,
        cubes=[_records[_key][0] for _key in _keys],
        means=[_records[_key][1] for _key in _keys],
        a_q=[_records[_key][2] for _key in _keys],
        masks=[_records[_key][3] for _key in _keys],
    )

    logger.debug(f"Sparse family has {len(_family)} cubes, depth {_family.depth()}.")
    return _family


def _local_slices(family: SparseFamilyPM, cube: DyadicCubePM) -> Tuple[slice, slice]:
    _block = cube.block
    _root = family.root.block
    _r0 = _block.row0 - _root.row0
    _c0 = _block.col0 - _root.col0
    return slice(_r0, _r0 + _block.cells), slice(_c0, _c0 + _block.cells)


def domination_bound(stopping_lambda: float) -> float:
    """Pointwise domination constant 2^d Lambda + 1 of the stopping time."""

    return (2**DIMENSION) * stopping_lambda + 1.0


@validate_call(config=_ArbitraryConfig)
def verify_domination(b: ComplexFieldPM, family: SparseFamilyPM) -> DominationReportPM:
    """Check 1_Q0 |b - <b>_Q0| <= C * sum over Q of a_Q 1_Q cell by cell.

    Args:
        b      (ComplexFieldPM, required): Symbol the family was built from.
        family (SparseFamilyPM, required): Output of `sparse_dominate`.

    Returns:
        DominationReportPM: C_emp = max LHS/RHS over cells (0/0 counts as 0) and ok iff C_emp <= 2^d Lambda + 1.
    """

    _root_block = family.root.block.block(b.samples)
    _lhs = np.abs(_root_block - family.means[0])
    if family.a_q[0] == 0.0:
        _lhs = np.zeros_like(_lhs)

    _rhs = np.zeros(_lhs.shape, dtype=np.float64)
    for _cube, _a in zip(family.cubes, family.a_q):
        _rows, _cols = _local_slices(family, _cube)
        _rhs[_rows, _cols] += _a

    _ratios = np.zeros_like(_lhs)
    _positive = _lhs > 0.0
    _covered = _positive & (_rhs > 0.0)
    _ratios[_covered] = _lhs[_covered] / _rhs[_covered]
    _ratios[_positive & (_rhs <= 0.0)] = np.inf

    _c_emp = float(np.max(_ratios)) if _ratios.size else 0.0
    _bound = domination_bound(family.stopping_lambda)
    return DominationReportPM(ok=(_c_emp <= _bound), c_emp=_c_emp, bound=_bound)


@validate_call(config=_ArbitraryConfig)
def carleson_constant(family: SparseFamilyPM) -> float:
    """Packing constant max over R in the family of sum of |Q| over family cubes Q inside R, divided by |R|."""

    _keys = {_cube.key for _cube in family.cubes}
    _packed: Dict[Tuple[int, int, int], int] = {_key: 0 for _key in _keys}
    for _cube in family.cubes:
        _count = _cube.cells**2
        _level, _j1, _j2 = _cube.key
        while 0 <= _level:
            if (_level, _j1, _j2) in _keys:
                _packed[(_level, _j1, _j2)] += _count
            _level, _j1, _j2 = _level - 1, _j1 // 2, _j2 // 2

    return max(
        _packed[_cube.key] / float(_cube.cells**2) for _cube in family.cubes
    )


@validate_call(config=_ArbitraryConfig)
def check_sparse(family: SparseFamilyPM) -> SparseCheckPM:
    """Verify the family: dyadic in D(Q0), pairwise disjoint major subsets with
    |E(Q)| >= |Q|/2 (exact cell counts) and Carleson packing <= 2.

    Args:
        family (SparseFamilyPM, required): Sparse family.

    Returns:
        SparseCheckPM: Check results.
    """

    _dyadic = all(_cube.root == family.root.root for _cube in family.cubes) and (
        family.cubes[0].key == family.root.key
    )

    _cells = family.root.cells
    _occupancy = np.zeros((_cells, _cells), dtype=np.int64)
    _min_fraction = 1.0
    _major_ok = True
    for _cube, _mask in zip(family.cubes, family.masks):
        _rows, _cols = _local_slices(family, _cube)
        _occupancy[_rows, _cols] += _mask
        _count = int(np.count_nonzero(_mask))
        _major_ok = _major_ok and (2 * _count >= _mask.size)
        _min_fraction = min(_min_fraction, _count / _mask.size)

    _carleson = carleson_constant(family)
    return SparseCheckPM(
        size=len(family),
        depth=family.depth(),
        dyadic=_dyadic,
        disjoint=bool(np.max(_occupancy) <= 1),
        min_major_fraction=_min_fraction,
        major_ok=_major_ok,
        carleson=_carleson,
        carleson_ok=(_carleson <= 2.0),
    )


@validate_call(config=_ArbitraryConfig)
def sparse_lp_ratio(
    family: SparseFamilyPM,
    lambdas: List[Annotated[float, Field(ge=0)]],
    p: Annotated[float, Field(ge=1)],
) -> float:
    """Ratio ||sum lambda_Q 1_Q||_p / (sum lambda_Q^p |Q|)^(1/p).

    Args:
        family  (SparseFamilyPM, required): Sparse family.
        lambdas (List[float]   , required): Nonnegative weights, one per cube.
        p       (float         , required): Exponent >= 1.

    Raises:
        ValueError: If the weights don't match the family.

    Returns:
        float: The ratio; 0 when every weight is 0.
    """

    if len(lambdas) != len(family):
        raise ValueError(f"Expected {len(family)} weights, got {len(lambdas)}!")

    _weights = np.asarray(lambdas, dtype=np.float64)
    _max = float(np.max(_weights))
    if _max == 0.0:
        return 0.0

    _weights = _weights / _max
    _cells = family.root.cells
    _sum = np.zeros((_cells, _cells), dtype=np.float64)
    for _cube, _w in zip(family.cubes, _weights):
        _rows, _cols = _local_slices(family, _cube)
        _sum[_rows, _cols] += _w

    _counts = np.array([_cube.cells**2 for _cube in family.cubes], dtype=np.float64)
    _num = float(np.sum(_sum**p))
    _den = float(np.sum(_weights**p * _counts))
    return (_num / _den) ** (1.0 / p)


@validate_call(config=_ArbitraryConfig)
def dual_weights(family: SparseFamilyPM, r: float) -> DualWeightsPM:
    """Dualising weights lambda_Q = a_Q^(r-1) A^(-1/r') with A = sum |Q| a_Q^r, so that
    sum |Q| lambda_Q^r' = 1 and sum |Q| lambda_Q a_Q = A^(1/r).

    Args:
        family (SparseFamilyPM, required): Sparse family with oscillations.
        r      (float         , required): Exponent in (1, inf).

    Raises:
        ExponentMismatchError  : If `r` is not in (1, inf).
        AllZeroOscillationError: If every a_Q is 0.

    Returns:
        DualWeightsPM: Weights, A and the residuals of both identities.
    """

    if not core_utils.validator.is_lebesgue_exponent(r):
        raise ExponentMismatchError(description=f"Exponent r must be in (1, inf), got: {r}!")

    _a = np.asarray(family.a_q, dtype=np.float64)
    _a_max = float(np.max(_a))
    if _a_max == 0.0:
        raise AllZeroOscillationError(
            description="Every cube has zero oscillation, nothing to dualise!"
        )

    _r_dual = r / (r - 1.0)
    _areas = family.areas()
    _scaled = _a / _a_max
    _big_a_scaled = math.fsum(_areas * _scaled**r)
    _lambdas = _scaled ** (r - 1.0) * _big_a_scaled ** (-1.0 / _r_dual)

    _big_a = _big_a_scaled * _a_max**r
    _norm = math.fsum(_areas * _lambdas**_r_dual)
    _pairing = math.fsum(_areas * _lambdas * _a)
    _target = _a_max * _big_a_scaled ** (1.0 / r)
    return DualWeightsPM(
        r=r,
        lambdas=[float(_val) for _val in _lambdas],
        big_a=_big_a,
        normalization_residual=abs(_norm - 1.0),
        pairing_residual=abs(_pairing - _target) / _target,
    )


@validate_call(config=_ArbitraryConfig)
def mean_limit_constant(
    b: ComplexFieldPM, ladder: Optional[List[GridCubePM]] = None
) -> MeanLimitReportPM:
    """Extrapolate c = lim <b>_Q along a nested ladder of cubes.

    With <b>_Q ~ c + I/|Q| for integrable b - c, eliminating I between the two largest cubes
    gives the mean over the shell between them.

    Args:
        b      (ComplexFieldPM           , required): Symbol.
        ladder (Optional[List[GridCubePM]], optional): Strictly nested cubes, largest first. Defaults to `centered_ladder`.

    Raises:
        ValueError: If the ladder is empty or not strictly nested.

    Returns:
        MeanLimitReportPM: Limit, means along the ladder and Cauchy increments.
    """

    if ladder is None:
        ladder = centered_ladder(b.grid)

    if not ladder:
        raise ValueError("Cube ladder is empty!")

    for _outer, _inner in zip(ladder[:-1], ladder[1:]):
        if (not _outer.contains(_inner)) or (_outer.cells <= _inner.cells):
            raise ValueError("Cube ladder must be strictly nested, largest first!")

    _means = [_fsum_mean(_cube.block(b.samples)) for _cube in ladder]
    _increments = [abs(_m0 - _m1) for _m0, _m1 in zip(_means[:-1], _means[1:])]

    if len(ladder) == 1:
        _constant = _means[0]
    else:
        _outer, _inner = ladder[0], ladder[1]
        _shell = _outer.block(b.samples).copy()
        _r0 = _inner.row0 - _outer.row0
        _c0 = _inner.col0 - _outer.col0
        _keep = np.ones(_shell.shape, dtype=bool)
        _keep[_r0 : _r0 + _inner.cells, _c0 : _c0 + _inner.cells] = False
        _constant = _fsum_mean(_shell[_keep])

    return MeanLimitReportPM(
        constant=_constant, ladder=ladder, means=_means, increments=_increments
    )


__all__ = [
    "root_cube",
    "centered_ladder",
    "mean_and_oscillation",
    "sparse_dominate",
    "domination_bound",
    "verify_domination",
    "carleson_constant",
    "check_sparse",
    "sparse_lp_ratio",
    "dual_weights",
    "mean_limit_constant",
]
