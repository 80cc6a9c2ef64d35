# -*- coding: utf-8 -*-

import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import validate_call, Field
from typing_extensions import Annotated

from lab.config import config
from lab.core.constants import BackendEnum
from lab.core.exceptions import (
    AllZeroOscillationError,
    BackendGridMismatchError,
    ExponentMismatchError,
)
from lab.core import utils as core_utils
from lab.logger import logger
from lab.resources.field.schemas import ComplexFieldPM
from lab.resources.operators import service as operators_service
from lab.resources.dyadic import service as dyadic_service
from lab.resources.dyadic import utils as dyadic_utils
from lab.resources.dyadic.schemas import GridCubePM, DyadicCubePM, SparseFamilyPM

from .schemas import WitnessTriplePM, LowerBoundPM, PipelineSamplePM, PipelineReportPM
from .constants import WITNESS_PAIRS
from . import utils


_ArbitraryConfig = {"arbitrary_types_allowed": True}


def _check_quadrature(b: ComplexFieldPM, backend: BackendEnum) -> bool:
    if not backend.is_quadrature:
        raise BackendGridMismatchError(
            description="Witness identities hold for the exact-kernel quadrature backends only!"
        )

    operators_service.check_backend(b.grid, backend)
    return backend == BackendEnum.quadrature_direct


def _grid_cube(b: ComplexFieldPM, cube: Union[DyadicCubePM, GridCubePM]) -> GridCubePM:
    _cube = cube.block if isinstance(cube, DyadicCubePM) else cube
    if not _cube.fits(b.grid):
        raise ValueError(f"Cube {_cube} doesn't fit inside the {b.grid.n}x{b.grid.n} grid!")
    return _cube


def _dual(s: float) -> float:
    return s / (s - 1.0)


def _require_exponent(name: str, val: float) -> None:
    if not core_utils.validator.is_lebesgue_exponent(val):
        raise ExponentMismatchError(description=f"Exponent {name} must be in (1, inf), got: {val}!")


@validate_call(config=_ArbitraryConfig)
def crw_witnesses(
    b: ComplexFieldPM,
    cube: Union[DyadicCubePM, GridCubePM],
    backend: BackendEnum = BackendEnum.quadrature_fft,
) -> WitnessTriplePM:
    """Witness pairs (f_i, g_i) of a cube Q with center z and side l:

        f_1 = 1_Q,              g_1 = -(pi / l^2) (x - z)^2 sigma 1_Q,
        f_2 = (y - z) / l 1_Q,  g_2 = (2 pi / l) (x - z) sigma 1_Q,
        f_3 = ((y - z) / l)^2,  g_3 = -pi sigma 1_Q,

    so that the integral of |b - <b>_Q| over Q equals sum_i of the integral of g_i [b,S] f_i
    for the quadrature operator on the same nodes.

    Args:
        b       (ComplexFieldPM                 , required): Symbol on a bounded grid.
        cube    (Union[DyadicCubePM, GridCubePM], required): Cube Q.
        backend (BackendEnum                    , optional): Quadrature backend. Defaults to `BackendEnum.quadrature_fft`.

    Raises:
        BackendGridMismatchError: If the backend is spectral or the grid is periodic.

    Returns:
        WitnessTriplePM: Phase, pairs and the bound max(|f_i| + |g_i|).
    """

    _check_quadrature(b, backend)
    _cube = _grid_cube(b, cube)
    _blocks = utils.witness_blocks(_cube.block(b.samples), b.grid.h)

    def _embed(block: np.ndarray) -> ComplexFieldPM:
        _samples = np.zeros((b.grid.n, b.grid.n), dtype=np.complex128)
        _samples[_cube.rows, _cube.cols] = block
        return ComplexFieldPM(grid=b.grid, samples=_samples)

    _bound = max(
        float(np.max(np.abs(_fi) + np.abs(_gi))) for _fi, _gi in zip(_blocks.f, _blocks.g)
    )
    return WitnessTriplePM(
        cube=_cube,
        mean=_blocks.mean,
        lhs=_blocks.lhs,
        sigma=_embed(_blocks.sigma),
        f=[_embed(_fi) for _fi in _blocks.f],
        g=[_embed(_gi) for _gi in _blocks.g],
        bound_const=_bound,
    )


def _identity_residual(block: np.ndarray, h: float, direct: bool) -> float:
    _blocks = utils.witness_blocks(block, h)
    if _blocks.lhs == 0.0:
        return 0.0

    _rhs = sum(
        utils.block_pairing(block, _fi, _gi, h, direct) for _fi, _gi in zip(_blocks.f, _blocks.g)
    )
    return abs(_blocks.lhs - _rhs) / _blocks.lhs


@validate_call(config=_ArbitraryConfig)
def crw_identity_residual(
    b: ComplexFieldPM,
    cube: Union[DyadicCubePM, GridCubePM],
    backend: BackendEnum = BackendEnum.quadrature_fft,
) -> float:
    """Relative residual |LHS - RHS| / LHS of the witness identity on Q, 0 when LHS = 0.

    Since f_i vanish off Q, [b,S]f_i on Q only involves the nodes of Q and is evaluated on
    the block.

    Raises:
        BackendGridMismatchError: If the backend is spectral or the grid is periodic.
    """

    _direct = _check_quadrature(b, backend)
    _cube = _grid_cube(b, cube)
    return _identity_residual(_cube.block(b.samples), b.grid.h, _direct)


def _witness_lower(
    b: ComplexFieldPM, p: float, q: float, backend: BackendEnum, min_cells: int
) -> LowerBoundPM:
    _direct = _check_quadrature(b, backend)
    _h = b.grid.h
    _q_dual = _dual(q)
    _alpha = 2.0 * (1.0 / p - 1.0 / q)

    _best = LowerBoundPM(value=0.0, oscillation=0.0, alpha=_alpha)
    for _stats in dyadic_utils.cube_family_stats(b.samples, min_cells=min_cells):
        _i = int(np.argmax(_stats.oscillations))
        _osc = float(_stats.oscillations[_i])
        if _osc == 0.0:
            continue

        _factor = utils.witness_factor(_stats.cells, _h, p, _q_dual)
        _value = _osc * (_stats.cells * _h) ** 2 / _factor
        if _best.value < _value:
            _best = LowerBoundPM(
                value=_value,
                cube=GridCubePM(
                    row0=int(_stats.row0[_i]), col0=int(_stats.col0[_i]), cells=_stats.cells
                ),
                oscillation=_osc,
                witness_factor=_factor,
                alpha=_alpha,
            )

    if _best.cube is not None:
        _residual = _identity_residual(_best.cube.block(b.samples), _h, _direct)
        _best = _best.model_copy(update={"residual": _residual})
        logger.debug(
            f"Witness lower bound {_best.value:.6g} on {_best.cube.cells}-cell cube "
            f"at ({_best.cube.row0}, {_best.cube.col0}), identity residual {_residual:.3g}."
        )

    return _best


@validate_call(config=_ArbitraryConfig)
def bmo_lower(
    b: ComplexFieldPM,
    p: float,
    backend: BackendEnum = BackendEnum.quadrature_fft,
    min_cells: Annotated[int, Field(ge=1)] = 2,
) -> LowerBoundPM:
    """Certified lower bound of ||[b,S]||_{L^p -> L^p} from the witness pairs:

        ||[b,S]|| >= integral over Q of |b - <b>_Q| / sum_i ||f_i||_p ||g_i||_p'

    maximized over all dyadic cubes and their half-shifted copies.

    Args:
        b         (ComplexFieldPM, required): Symbol on a bounded grid.
        p         (float         , required): Exponent in (1, inf).
        backend   (BackendEnum   , optional): Quadrature backend. Defaults to `BackendEnum.quadrature_fft`.
        min_cells (int           , optional): Smallest cube side in cells. Defaults to 2.

    Raises:
        ExponentMismatchError   : If `p` is not in (1, inf).
        BackendGridMismatchError: If the backend is spectral or the grid is periodic.

    Returns:
        LowerBoundPM: Bound with its witness cube and identity residual.
    """

    _require_exponent("p", p)
    return _witness_lower(b, p, p, backend, min_cells)


@validate_call(config=_ArbitraryConfig)
def holder_lower(
    b: ComplexFieldPM,
    p: float,
    q: float,
    backend: BackendEnum = BackendEnum.quadrature_fft,
    min_cells: Annotated[int, Field(ge=1)] = 2,
) -> LowerBoundPM:
    """Certified lower bound of ||[b,S]||_{L^p -> L^q} for p < q. The witness factor scales like
    |Q| r_Q^alpha with alpha = d (1/p - 1/q), so the bound tracks the Holder-type constant
    sup over Q of the mean of |b - <b>_Q| over Q divided by r_Q^alpha.

    Raises:
        ExponentMismatchError   : If `p` or `q` is not in (1, inf) or p >= q.
        BackendGridMismatchError: If the backend is spectral or the grid is periodic.
    """

    _require_exponent("p", p)
    _require_exponent("q", q)
    if q <= p:
        raise ExponentMismatchError(description=f"Holder regime needs p < q, got: p={p}, q={q}!")

    return _witness_lower(b, p, q, backend, min_cells)


@validate_call(config=_ArbitraryConfig)
def random_signs(
    family: Union[SparseFamilyPM, Annotated[int, Field(ge=1)]],
    seed: int = 0,
    samples: Annotated[int, Field(ge=1)] = 1,
) -> np.ndarray:
    """Independent uniform +-1 signs, one row per sample and one column per cube.

    Args:
        family  (Union[SparseFamilyPM, int], required): Sparse family or its size.
        seed    (int                       , optional): Seed of the PCG64 generator. Defaults to 0.
        samples (int                       , optional): Number of sign vectors M. Defaults to 1.

    Returns:
        np.ndarray: Read-only int8 matrix of shape (M, |S|).
    """

    _size = family if isinstance(family, int) else len(family)
    _rng = np.random.Generator(np.random.PCG64(seed))
    _signs = (2 * _rng.integers(0, 2, size=(samples, _size), dtype=np.int8) - 1).astype(np.int8)
    _signs.setflags(write=False)
    return _signs


def _zero_report(p: float, q: float, r: float, samples: int, seed: int) -> PipelineReportPM:
    return PipelineReportPM(
        p=p,
        q=q,
        r=r,
        lr_local=0.0,
        certified_lb=0.0,
        mc_mean=0.0,
        mc_stderr=0.0,
        target=0.0,
        samples=samples,
        seed=seed,
    )


def _assemble(
    shape: Tuple[int, int],
    slices: List[Tuple[slice, slice]],
    blocks: List[np.ndarray],
    coeffs: np.ndarray,
) -> np.ndarray:
    _out = np.zeros(shape, dtype=np.complex128)
    for (_rows, _cols), _block, _coeff in zip(slices, blocks, coeffs):
        _out[_rows, _cols] += _coeff * _block
    return _out


@validate_call(config=_ArbitraryConfig)
def lr_lower_pipeline(
    b: ComplexFieldPM,
    p: float,
    q: float,
    root: Optional[DyadicCubePM] = None,
    samples: Annotated[int, Field(ge=1)] = 64,
    seed: int = 0,
    backend: BackendEnum = BackendEnum.quadrature_fft,
    stopping_lambda: Optional[Annotated[float, Field(ge=2)]] = None,
) -> PipelineReportPM:
    """Lower bound of ||[b,S]||_{L^p -> L^q}, p > q, by ||b - <b>_Q0||_{L^r(Q0)}, 1/q = 1/r + 1/p.

    Steps: sparse family of b on Q0; dual weights lambda_Q for r; witness pairs per cube;
    for each sign sample e and i = 1..3 the fields F = sum e_Q lambda_Q^(r'/p) f_Q^i and
    G = sum e_Q lambda_Q^(r'/q') g_Q^i; pairings of G [b,S] F. Since r'/p + r'/q' = 1, the
    summed pairings have expectation sum_Q lambda_Q times the integral of |b - <b>_Q| over Q.

    Args:
        b               (ComplexFieldPM         , required): Symbol on a bounded grid.
        p               (float                  , required): Domain exponent.
        q               (float                  , required): Target exponent, q < p.
        root            (Optional[DyadicCubePM] , optional): Root cube Q0. Defaults to the whole grid.
        samples         (int                    , optional): Sign samples M. Defaults to 64.
        seed            (int                    , optional): Sign seed. Defaults to 0.
        backend         (BackendEnum            , optional): Quadrature backend. Defaults to `BackendEnum.quadrature_fft`.
        stopping_lambda (Optional[float]        , optional): Stopping threshold. Defaults to `config.lab.stopping_lambda`.

    Raises:
        ExponentMismatchError   : If the exponents are not in (1, inf) or p <= q.
        BackendGridMismatchError: If the backend is spectral or the grid is periodic.

    Returns:
        PipelineReportPM: Report with per-sample rows; all zero when b is constant on Q0.
    """

    _require_exponent("p", p)
    _require_exponent("q", q)
    if p <= q:
        raise ExponentMismatchError(description=f"Lower-bound pipeline needs p > q, got: p={p}, q={q}!")

    _direct = _check_quadrature(b, backend)
    _r = 1.0 / (1.0 / q - 1.0 / p)
    _r_dual = _dual(_r)
    _q_dual = _dual(q)
    _h = b.grid.h
    _area = _h**2

    if root is None:
        root = dyadic_service.root_cube(b.grid)

    _family = dyadic_service.sparse_dominate(b, root=root, stopping_lambda=stopping_lambda)
    try:
        _weights = dyadic_service.dual_weights(_family, _r)
    except AllZeroOscillationError:
        logger.debug("Symbol is constant on the root cube, returning the zero report.")
        return _zero_report(p, q, _r, samples, seed)

    _root_block = root.block
    _b0 = _root_block.block(b.samples)
    _lr_local = utils.block_lp(_b0 - _family.means[0], _r, _area)

    _lambdas = np.asarray(_weights.lambdas, dtype=np.float64)
    _coef_f = _lambdas ** (_r_dual / p)
    _coef_g = _lambdas ** (_r_dual / _q_dual)
    _holder_p = dyadic_service.sparse_lp_ratio(_family, list(_coef_f), p)
    _holder_q = dyadic_service.sparse_lp_ratio(_family, list(_coef_g), _q_dual)

    _slices = []
    _f_blocks: List[List[np.ndarray]] = [[] for _ in range(WITNESS_PAIRS)]
    _g_blocks: List[List[np.ndarray]] = [[] for _ in range(WITNESS_PAIRS)]
    for _cube in _family.cubes:
        _block = _cube.block
        _slices.append(
            (
                slice(_block.row0 - _root_block.row0, _block.row0 - _root_block.row0 + _block.cells),
                slice(_block.col0 - _root_block.col0, _block.col0 - _root_block.col0 + _block.cells),
            )
        )
        _blocks = utils.witness_blocks(_block.block(b.samples), _h)
        for _i in range(WITNESS_PAIRS):
            _f_blocks[_i].append(_blocks.f[_i])
            _g_blocks[_i].append(_blocks.g[_i])

    _target = math.fsum(
        _lam * _a * _cube.area(b.grid)
        for _lam, _a, _cube in zip(_weights.lambdas, _family.a_q, _family.cubes)
    )
    _signs = random_signs(len(_family), seed=seed, samples=samples)
    _shape = _b0.shape

    def _run(sample: int) -> List[PipelineSamplePM]:
        _eps = _signs[sample].astype(np.float64)
        _rows = []
        for _i in range(WITNESS_PAIRS):
            _big_f = _assemble(_shape, _slices, _f_blocks[_i], _eps * _coef_f)
            _big_g = _assemble(_shape, _slices, _g_blocks[_i], _eps * _coef_g)
            _pairing = utils.block_pairing(_b0, _big_f, _big_g, _h, _direct)
            _norm_f = utils.block_lp(_big_f, p, _area)
            _norm_g = utils.block_lp(_big_g, _q_dual, _area)
            _den = _norm_f * _norm_g
            _rows.append(
                PipelineSamplePM(
                    sample=sample,
                    component=_i + 1,
                    pairing=_pairing,
                    norm_f=_norm_f,
                    norm_g=_norm_g,
                    ratio=(abs(_pairing) / _den) if 0.0 < _den else 0.0,
                )
            )
        return _rows

    with ThreadPoolExecutor(max_workers=config.lab.workers) as _executor:
        _results = list(_executor.map(_run, range(samples)))

    _rows = [_row for _sample_rows in _results for _row in _sample_rows]
    _totals = np.array(
        [sum(_row.pairing for _row in _sample_rows) for _sample_rows in _results],
        dtype=np.complex128,
    )
    _mc_mean = float(np.mean(_totals.real))
    _mc_stderr = (
        float(np.std(_totals.real, ddof=1) / math.sqrt(samples)) if 1 < samples else 0.0
    )
    _certified = max(_row.ratio for _row in _rows)
    _k_emp = _lr_local / _certified if 0.0 < _certified else float("inf")

    logger.debug(
        f"Lower-bound pipeline: {len(_family)} cubes, M={samples}, target={_target:.6g}, "
        f"mc_mean={_mc_mean:.6g} +- {_mc_stderr:.3g}, certified={_certified:.6g}, K={_k_emp:.4g}."
    )
    return PipelineReportPM(
        p=p,
        q=q,
        r=_r,
        lr_local=_lr_local,
        certified_lb=_certified,
        mc_mean=_mc_mean,
        mc_imag_mean=float(np.mean(_totals.imag)),
        mc_stderr=_mc_stderr,
        target=_target,
        samples=samples,
        seed=seed,
        family_size=len(_family),
        depth=_family.depth(),
        holder_p=_holder_p,
        holder_q_dual=_holder_q,
        k_emp=_k_emp,
        dual_residual=max(_weights.normalization_residual, _weights.pairing_residual),
        rows=_rows,
    )


__all__ = [
    "crw_witnesses",
    "crw_identity_residual",
    "bmo_lower",
    "holder_lower",
    "random_signs",
    "lr_lower_pipeline",
]
