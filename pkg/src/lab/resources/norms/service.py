# -*- coding: utf-8 -*-

import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from pydantic import validate_call, Field
from scipy import ndimage, optimize
from typing_extensions import Annotated

from lab.config import config
from lab.core.constants import SymbolClassEnum, BumpShapeEnum, BackendEnum
from lab.core.exceptions import (
    GridSpecError,
    ExponentMismatchError,
    SingularSampleError,
)
from lab.core import utils as core_utils
from lab.logger import logger
from lab.resources.field.schemas import GridSpecPM, ComplexFieldPM
from lab.resources.field import service as field_service
from lab.resources.field import utils as field_utils
from lab.resources.operators import service as operators_service
from lab.resources.dyadic import service as dyadic_service
from lab.resources.dyadic import utils as dyadic_utils

from .schemas import SymbolSpecPM, OpNormEstimatePM, UpperEnvelopePM
from .constants import (
    BEURLING_LP_FACTOR,
    PROBE_SEEDS,
    PROBE_BAND,
    PROBE_DISK_RADIUS,
    EXPONENT_RELATION_TOL,
    HOLDER_MAX_POINTS,
    BMO_MIN_CELLS,
)
from . import utils


_ArbitraryConfig = {"arbitrary_types_allowed": True}


def _require_bounded(grid: GridSpecPM, operation: str) -> None:
    if grid.periodic:
        raise GridSpecError(description=f"'{operation}' requires a bounded (non-periodic) grid!")


def _require_exponent(name: str, val: float) -> None:
    if not core_utils.validator.is_lebesgue_exponent(val):
        raise ExponentMismatchError(description=f"Exponent {name} must be in (1, inf), got: {val}!")


@validate_call
def generate_symbol(spec: SymbolSpecPM, grid: GridSpecPM) -> ComplexFieldPM:
    """Sample a symbol of the given class: offset + amplitude * base * window.

    Args:
        spec (SymbolSpecPM, required): Symbol class and parameters.
        grid (GridSpecPM  , required): Grid to sample on.

    Raises:
        SingularSampleError: If `bmo_log` is centered on a node with clamping disabled.

    Returns:
        ComplexFieldPM: Sampled symbol.
    """

    _nodes = grid.nodes()
    _dist = np.abs(_nodes - spec.center)

    if spec.kind == SymbolClassEnum.constant:
        _base = np.full(_nodes.shape, spec.value, dtype=np.complex128)
    elif spec.kind == SymbolClassEnum.bmo_log:
        if spec.clamp:
            _dist = np.maximum(_dist, grid.h)
        elif np.any(_dist == 0.0):
            raise SingularSampleError(
                description=f"Symbol log|x - c| is singular at the node c = {spec.center}!"
            )
        _base = np.log(_dist)
    elif spec.kind == SymbolClassEnum.holder:
        _base = _dist**spec.alpha
    elif spec.kind == SymbolClassEnum.lr_bump:
        if spec.shape == BumpShapeEnum.gaussian:
            _base = np.exp(-((_dist / spec.scale) ** 2))
        else:
            _base = utils.compact_bump(_dist / spec.scale)
    elif spec.kind == SymbolClassEnum.step:
        _base = (_nodes.real > spec.center.real).astype(np.float64)
    else:
        _base = field_service.random_band_limited(
            grid, band=spec.band, seed=spec.seed, mean_zero=False
        ).samples

    _samples = spec.amplitude * _base
    if spec.window is not None:
        _samples = _samples * utils.smooth_cutoff(_dist / spec.window)

    return ComplexFieldPM(grid=grid, samples=spec.offset + _samples)


def _max_oscillation(
    b: ComplexFieldPM, alpha: float, min_cells: int, max_cells: Optional[int] = None
) -> float:
    _best = 0.0
    for _stats in dyadic_utils.cube_family_stats(b.samples, min_cells=min_cells, max_cells=max_cells):
        _radius = 0.5 * _stats.cells * b.grid.h
        _val = float(np.max(_stats.oscillations)) / _radius**alpha
        _best = max(_best, _val)

    return _best


@validate_call(config=_ArbitraryConfig)
def bmo_norm(
    b: ComplexFieldPM, min_cells: Annotated[int, Field(ge=1)] = BMO_MIN_CELLS
) -> float:
    """Sup of the mean oscillation over all dyadic cubes and their half-shifted copies.

    Args:
        b         (ComplexFieldPM, required): Symbol.
        min_cells (int           , optional): Smallest cube side in cells. Defaults to 2.

    Returns:
        float: Discrete BMO norm, 0 iff b is constant on the grid.
    """

    return _max_oscillation(b, 0.0, min_cells)


@validate_call(config=_ArbitraryConfig)
def holder_osc(
    b: ComplexFieldPM,
    alpha: Annotated[float, Field(gt=0, le=1)],
    min_cells: Annotated[int, Field(ge=1)] = BMO_MIN_CELLS,
    max_cells: Optional[Annotated[int, Field(ge=1)]] = None,
) -> float:
    """Campanato-type constant sup over cubes B of mean |b - <b>_B| over B divided by r_B^alpha,
    r_B half the side length. Capping `max_cells` keeps only the small scales, where a symbol
    less regular than alpha shows its divergence under refinement.

    Args:
        b         (ComplexFieldPM, required): Symbol.
        alpha     (float         , required): Exponent in (0, 1].
        min_cells (int           , optional): Smallest cube side in cells. Defaults to 2.
        max_cells (Optional[int] , optional): Largest cube side in cells. Defaults to n.

    Returns:
        float: Oscillation constant.
    """

    return _max_oscillation(b, alpha, min_cells, max_cells)


@validate_call(config=_ArbitraryConfig)
def holder_seminorm(
    b: ComplexFieldPM,
    alpha: Annotated[float, Field(gt=0, le=1)],
    max_points: Annotated[int, Field(ge=4)] = HOLDER_MAX_POINTS,
) -> float:
    """Pointwise seminorm max |b(x) - b(y)| / |x - y|^alpha over node pairs, on a strided
    subset of nodes when the grid has more than `max_points` nodes.
    """

    _stride = utils.subsample_stride(b.grid.n, max_points)
    _z = b.grid.nodes()[::_stride, ::_stride].ravel()
    _v = b.samples[::_stride, ::_stride].ravel()
    _best = 0.0
    for _start in range(0, _z.size, 256):
        _zs = _z[_start : _start + 256, None]
        _vs = _v[_start : _start + 256, None]
        _dist = np.abs(_zs - _z[None, :])
        _diff = np.abs(_vs - _v[None, :])
        _mask = 0.0 < _dist
        if np.any(_mask):
            _best = max(_best, float(np.max(_diff[_mask] / _dist[_mask] ** alpha)))

    return _best


@validate_call(config=_ArbitraryConfig)
def fractional_majorant(f: ComplexFieldPM, alpha: Annotated[float, Field(gt=0, lt=2)]) -> ComplexFieldPM:
    """Discrete fractional integral h^2 * sum over y != x of |x - y|^(alpha-2) |f(y)|.

    Raises:
        GridSpecError: If the grid is periodic.
    """

    _require_bounded(f.grid, "fractional_majorant")
    _samples = utils.riesz_potential(np.abs(f.samples), f.grid.h, alpha)
    return ComplexFieldPM(grid=f.grid, samples=np.maximum(_samples.real, 0.0))


@validate_call(config=_ArbitraryConfig)
def distance_to_constants_lr(b: ComplexFieldPM, r: float) -> Tuple[complex, float]:
    """Distance ||b - c||_r to the constant c = lim <b>_Q extrapolated along the centered ladder.

    Args:
        b (ComplexFieldPM, required): Symbol on a bounded grid.
        r (float         , required): Exponent in (1, inf).

    Raises:
        GridSpecError        : If the grid is periodic.
        ExponentMismatchError: If `r` is not in (1, inf).

    Returns:
        Tuple[complex, float]: Constant c and dist = ||b - c||_r.
    """

    _require_bounded(b.grid, "distance_to_constants_lr")
    _require_exponent("r", r)

    _c = dyadic_service.mean_limit_constant(b).constant
    return _c, field_service.lp_norm(b - _c, r)


@validate_call(config=_ArbitraryConfig)
def best_constant_lr(b: ComplexFieldPM, r: float) -> Tuple[complex, float]:
    """Minimize ||b - c||_r over complex c (Nelder-Mead from the mean-limit constant).

    Raises:
        GridSpecError        : If the grid is periodic.
        ExponentMismatchError: If `r` is not in (1, inf).
    """

    _c0, _d0 = distance_to_constants_lr(b, r)
    _scale = max(b.max_abs(), 1.0)

    def _objective(x: np.ndarray) -> float:
        return field_service.lp_norm(b - complex(x[0], x[1]) * _scale, r) / _scale

    _result = optimize.minimize(
        _objective,
        x0=np.array([_c0.real, _c0.imag]) / _scale,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000},
    )
    _c = complex(_result.x[0], _result.x[1]) * _scale
    _d = field_service.lp_norm(b - _c, r)
    if _d0 <= _d:
        return _c0, _d0

    return _c, _d


def _gaussian_average(f: ComplexFieldPM, width: float) -> np.ndarray:
    if f.grid.periodic:
        _k1, _k2 = field_utils.wavenumbers(f.grid, False)
        _symbol = np.exp(-0.5 * width**2 * (_k1**2 + _k2**2))
        return field_utils.apply_multiplier(f.samples, _symbol).real

    return ndimage.gaussian_filter(f.samples.real, sigma=width / f.grid.h, mode="constant", cval=0.0)


@validate_call(config=_ArbitraryConfig)
def h1_proxy(f: ComplexFieldPM, levels: Optional[Annotated[int, Field(ge=1)]] = None) -> float:
    """Hardy-space proxy: L^1 norm of the maximal Gaussian average sup_k |phi_t * f| over the
    dyadic widths t = L 2^-k, k = 0..levels-1, phi_t the unit-mass Gaussian of width t.
    Not a certified H^1 norm.

    Args:
        f      (ComplexFieldPM, required): Real-valued field.
        levels (Optional[int] , optional): Number of widths. Defaults to log2(n) - 1.

    Raises:
        ValueError: If `f` has a nonzero imaginary part.

    Returns:
        float: Proxy value.
    """

    if not f.is_real():
        raise ValueError("H^1 proxy is defined for real-valued fields only!")

    if levels is None:
        levels = max(int(round(math.log2(f.grid.n))) - 1, 1)

    _sup = np.zeros((f.grid.n, f.grid.n), dtype=np.float64)
    for _k in range(levels):
        _width = f.grid.length * 2.0**-_k
        _sup = np.maximum(_sup, np.abs(_gaussian_average(f, _width)))

    return float(f.grid.cell_area * np.sum(_sup))


def _initial_field(grid: GridSpecPM, seed: int) -> np.ndarray:
    _rng = np.random.Generator(np.random.PCG64(seed))
    _shape = (grid.n, grid.n)
    return _rng.standard_normal(_shape) + 1j * _rng.standard_normal(_shape)


def _ascent(
    b: ComplexFieldPM,
    start: np.ndarray,
    p: float,
    q: float,
    backend: BackendEnum,
    steps: int,
    rel_tol: float,
) -> Tuple[float, np.ndarray, int]:
    """Nonlinear power iteration v <- J_p'([b,S]* J_q([b,S] v)) with L^p normalization.

    Returns:
        Tuple[float, np.ndarray, int]: Best ratio, its witness samples and the steps taken.
    """

    _grid = b.grid
    _p_dual = p / (p - 1.0)

    def _ratio(samples: np.ndarray) -> Tuple[float, np.ndarray]:
        _v = ComplexFieldPM(grid=_grid, samples=samples)
        _norm = field_service.lp_norm(_v, p)
        if _norm == 0.0:
            return 0.0, np.zeros_like(samples)
        _w = operators_service.commutator(b, _v, backend=backend)
        return field_service.lp_norm(_w, q) / _norm, _w.samples

    _v = start
    _best, _w = _ratio(_v)
    _best_v = _v
    _taken = 0
    for _ in range(steps):
        if _best == 0.0:
            break

        _g = utils.duality_map(_w, q, _grid.cell_area)
        _u = operators_service.commutator_adjoint(
            b, ComplexFieldPM(grid=_grid, samples=_g), backend=backend
        ).samples
        _next = utils.duality_map(_u, _p_dual, _grid.cell_area)
        if not np.any(_next):
            break

        _taken += 1
        _val, _w = _ratio(_next)
        _v = _next
        _improved = _val - _best
        if _best < _val:
            _best, _best_v = _val, _next

        if _improved <= rel_tol * _best:
            break

    return _best, _best_v, _taken


@validate_call(config=_ArbitraryConfig)
def opnorm_lower(
    b: ComplexFieldPM,
    p: float,
    q: float,
    backend: BackendEnum = BackendEnum.spectral,
    restarts: Optional[Annotated[int, Field(ge=1)]] = None,
    steps: Optional[Annotated[int, Field(ge=0)]] = None,
    seed: int = 0,
    initial: Optional[ComplexFieldPM] = None,
    rel_tol: Optional[Annotated[float, Field(ge=0)]] = None,
) -> OpNormEstimatePM:
    """Certified lower bound of ||[b,S]||_{L^p -> L^q} by random restarts and duality-map ascent.

    Restart i starts from a PCG64(seed + i) complex Gaussian field (restart 0 from `initial`
    when given). Restarts run on `config.lab.workers` threads; the result doesn't depend on
    scheduling.

    Args:
        b        (ComplexFieldPM          , required): Symbol.
        p        (float                   , required): Domain exponent in (1, inf).
        q        (float                   , required): Target exponent in (1, inf).
        backend  (BackendEnum             , optional): Backend. Defaults to `BackendEnum.spectral`.
        restarts (Optional[int]           , optional): Restarts. Defaults to `config.lab.search.restarts`.
        steps    (Optional[int]           , optional): Ascent steps per restart. Defaults to `config.lab.search.steps`.
        seed     (int                     , optional): Base seed. Defaults to 0.
        initial  (Optional[ComplexFieldPM], optional): Starting field of restart 0. Defaults to None.
        rel_tol  (Optional[float]         , optional): Relative-improvement stop. Defaults to `config.lab.search.rel_tol`.

    Raises:
        ExponentMismatchError   : If `p` or `q` is not in (1, inf).
        BackendGridMismatchError: If the backend doesn't match the grid type.

    Returns:
        OpNormEstimatePM: Best ratio with its witness and the running maximum over restarts.
    """

    _require_exponent("p", p)
    _require_exponent("q", q)
    operators_service.check_backend(b.grid, backend)

    if restarts is None:
        restarts = config.lab.search.restarts

    if steps is None:
        steps = config.lab.search.steps

    if rel_tol is None:
        rel_tol = config.lab.search.rel_tol

    def _run(index: int) -> Tuple[float, np.ndarray, int]:
        if (index == 0) and (initial is not None):
            _start = np.array(initial.samples)
        else:
            _start = _initial_field(b.grid, seed + index)
        return _ascent(b, _start, p, q, backend, steps, rel_tol)

    with ThreadPoolExecutor(max_workers=config.lab.workers) as _executor:
        _results = list(_executor.map(_run, range(restarts)))

    _history: List[float] = []
    _best_index = 0
    for _i, (_val, _, _) in enumerate(_results):
        if _results[_best_index][0] < _val:
            _best_index = _i
        _history.append(_results[_best_index][0])

    _value, _witness, _ = _results[_best_index]
    logger.debug(
        f"Commutator norm L^{p} -> L^{q} lower bound: {_value:.6g} "
        f"(restart {_best_index + 1}/{restarts})."
    )
    return OpNormEstimatePM(
        value=_value,
        witness_v=ComplexFieldPM(grid=b.grid, samples=_witness),
        p=p,
        q=q,
        iterations=sum(_taken for _, _, _taken in _results),
        restarts=restarts,
        seed=seed,
        history=_history,
    )


def _probe_fields(grid: GridSpecPM) -> List[ComplexFieldPM]:
    _probes = [
        field_service.random_band_limited(
            grid, band=min(PROBE_BAND, grid.n // 2 - 1), seed=_seed, mean_zero=False
        )
        for _seed in PROBE_SEEDS
    ]
    _radius = PROBE_DISK_RADIUS * grid.length
    _disk = (np.abs(grid.nodes() - grid.center) <= _radius).astype(np.float64)
    _probes.append(ComplexFieldPM(grid=grid, samples=_disk))
    return _probes


@validate_call(config=_ArbitraryConfig)
def beurling_lp_bound(
    grid: GridSpecPM, s: float, backend: BackendEnum = BackendEnum.spectral
) -> Tuple[float, float]:
    """Bound C_s on ||S||_{L^s -> L^s}: the larger of the known constant 1.575 (max(s, s') - 1)
    and the largest ratio ||Sf||_s / ||f||_s over a fixed probe set.

    Returns:
        Tuple[float, float]: C_s and the largest probe ratio.
    """

    _require_exponent("s", s)
    _s_star = max(s, s / (s - 1.0))
    _probe = 0.0
    for _f in _probe_fields(grid):
        _norm = field_service.lp_norm(_f, s)
        if _norm == 0.0:
            continue
        _sf = operators_service.beurling(_f, backend=backend)
        _probe = max(_probe, field_service.lp_norm(_sf, s) / _norm)

    return max(_probe, BEURLING_LP_FACTOR * (_s_star - 1.0)), _probe


@validate_call(config=_ArbitraryConfig)
def upper_envelope(
    b: ComplexFieldPM,
    p: float,
    q: float,
    r: float,
    backend: BackendEnum = BackendEnum.spectral,
) -> UpperEnvelopePM:
    """Holder envelope ||[b,S]||_{p -> q} <= ||b||_r (C_p + C_q), from ||bf||_q <= ||b||_r ||f||_p.

    Args:
        b       (ComplexFieldPM, required): Symbol.
        p       (float         , required): Domain exponent.
        q       (float         , required): Target exponent, q < p.
        r       (float         , required): Exponent with 1/q = 1/r + 1/p.
        backend (BackendEnum   , optional): Backend. Defaults to `BackendEnum.spectral`.

    Raises:
        ExponentMismatchError: If p <= q or the exponents don't satisfy 1/q = 1/r + 1/p.

    Returns:
        UpperEnvelopePM: Envelope with its factors.
    """

    _require_exponent("p", p)
    _require_exponent("q", q)
    if p <= q:
        raise ExponentMismatchError(
            description=f"Holder envelope needs p > q, got: p={p}, q={q}!"
        )

    if (not (0.0 < r)) or (EXPONENT_RELATION_TOL < abs(1.0 / q - 1.0 / r - 1.0 / p)):
        raise ExponentMismatchError(
            description=f"Exponents must satisfy 1/q = 1/r + 1/p, got: p={p}, q={q}, r={r}!"
        )

    operators_service.check_backend(b.grid, backend)
    _b_norm = field_service.lp_norm(b, r)
    _c_p, _probe_p = beurling_lp_bound(b.grid, p, backend)
    _c_q, _probe_q = beurling_lp_bound(b.grid, q, backend)
    return UpperEnvelopePM(
        value=_b_norm * (_c_p + _c_q),
        b_norm=_b_norm,
        c_p=_c_p,
        c_q=_c_q,
        probe_p=_probe_p,
        probe_q=_probe_q,
    )


@validate_call(config=_ArbitraryConfig)
def opnorm_upper_split(
    b: ComplexFieldPM,
    p: float,
    q: float,
    r: float,
    backend: BackendEnum = BackendEnum.spectral,
) -> float:
    """Value of `upper_envelope`."""

    return upper_envelope(b, p, q, r, backend).value


__all__ = [
    "generate_symbol",
    "bmo_norm",
    "holder_osc",
    "holder_seminorm",
    "fractional_majorant",
    "distance_to_constants_lr",
    "best_constant_lr",
    "h1_proxy",
    "opnorm_lower",
    "beurling_lp_bound",
    "upper_envelope",
    "opnorm_upper_split",
]
