# -*- coding: utf-8 -*-

import os
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import validate_call, ValidationError

from lab.__version__ import __version__
from lab.config import config
from lab.core.constants import BackendEnum, ExperimentEnum, SymbolClassEnum
from lab.core.exceptions import AllZeroOscillationError, ConfigError, ExponentMismatchError
from lab.core import utils as core_utils
from lab.logger import logger
from lab.resources.field.schemas import GridSpecPM, ComplexFieldPM, VectorField2PM
from lab.resources.field import service as field_service
from lab.resources.operators import service as operators_service
from lab.resources.dyadic import service as dyadic_service
from lab.resources.norms.constants import BEURLING_LP_FACTOR
from lab.resources.norms.schemas import SymbolSpecPM
from lab.resources.norms import service as norms_service
from lab.resources.lowerbound.constants import WITNESS_BOUND, PIPELINE_CSV_TABLE
from lab.resources.lowerbound import service as lowerbound_service

from .schemas import ExperimentConfigPM, ExperimentResultPM, CheckPM
from .constants import (
    TORUS_LENGTH,
    SQUARE_LENGTH,
    DISK_DOMAIN_LENGTH,
    DISK_INNER_RADIUS,
    DISK_OUTER_RADIUS,
    DISK_EDGE,
    KERNEL_BOUNDS_TOL,
    ENVELOPE_SLACK,
    MC_STDERR_FACTOR,
    REGIME_STABLE_RTOL,
    REGIME_SLOPE_RTOL,
    REPORT_FILE_SUFFIX,
    CHECKS_TABLE,
    TABLE_SORT_KEYS,
)
from . import utils


## Config loading:
@validate_call
def load_config(
    config_path: Optional[str] = None,
    overrides: Optional[List[str]] = None,
    experiment: Optional[ExperimentEnum] = None,
    output_dir: Optional[str] = None,
) -> ExperimentConfigPM:
    """Load the experiment config: JSON document, then dotted `key=value` overrides, then the
    experiment name and output directory given on the command line.

    Args:
        config_path (Optional[str]           , optional): JSON config file path. Defaults to None.
        overrides   (Optional[List[str]]     , optional): Overrides like `grid.n=64`. Defaults to None.
        experiment  (Optional[ExperimentEnum], optional): Experiment to run. Defaults to None.
        output_dir  (Optional[str]           , optional): Output directory. Defaults to None.

    Raises:
        ConfigError: If the document can't be read or the merged config fails validation.

    Returns:
        ExperimentConfigPM: Validated config.
    """

    _data: Any = {}
    if config_path:
        try:
            _data = core_utils.read_json(config_path)
        except (OSError, ValueError) as err:
            raise ConfigError(description=f"Failed to read config file '{config_path}': {err}")

    if not isinstance(_data, dict):
        raise ConfigError(description="Config document must be a JSON object!")

    try:
        _data = core_utils.deep_merge(_data, core_utils.dotted_to_dict(overrides or []))
    except ValueError as err:
        raise ConfigError(description=str(err))

    if experiment is not None:
        _named = _data.get("experiment", experiment.value)
        if _named != experiment.value:
            raise ConfigError(
                description=f"Config is for experiment '{_named}', not '{experiment.value}'!"
            )
        _data["experiment"] = experiment.value

    if output_dir:
        _data["output_dir"] = output_dir

    try:
        _config = ExperimentConfigPM.model_validate(_data)
    except ValidationError as err:
        raise ConfigError(
            description=f"Invalid experiment config ({err.error_count()} errors): {err}",
            detail=err.errors(include_url=False, include_context=False),
        )

    return _config


## Shared helpers:
def _require_grid_type(cfg: ExperimentConfigPM, periodic: bool) -> None:
    if cfg.periodic != periodic:
        _kind = "periodic" if periodic else "bounded"
        raise ConfigError(description=f"Experiment '{cfg.experiment.value}' needs a {_kind} grid!")


def _make_grid(cfg: ExperimentConfigPM, n: Optional[int] = None, scale: float = 1.0) -> GridSpecPM:
    _periodic = cfg.periodic
    _length = cfg.grid.length
    if _length is None:
        _length = TORUS_LENGTH if _periodic else SQUARE_LENGTH

    _origin = cfg.grid.origin
    if _origin is None:
        _origin = 0j if _periodic else complex(-_length / 2.0, -_length / 2.0)

    return field_service.make_grid(
        n=n or cfg.grid.n, length=_length * scale, periodic=_periodic, origin=_origin * scale
    )


def _resolve_backend(cfg: ExperimentConfigPM) -> BackendEnum:
    _backend = cfg.backend
    if _backend is None:
        _backend = BackendEnum.spectral if cfg.periodic else BackendEnum.quadrature_fft

    if _backend.is_quadrature == cfg.periodic:
        raise ConfigError(
            description=f"Backend '{_backend.value}' doesn't fit a {'periodic' if cfg.periodic else 'bounded'} grid!"
        )

    return _backend


def _clamp_band(band: int, grid: GridSpecPM) -> int:
    return max(min(band, grid.n // 2 - 1), 1)


def _relative_l2(a: ComplexFieldPM, b: ComplexFieldPM) -> float:
    return utils.relative(field_service.lp_norm(a - b, 2.0), field_service.lp_norm(b, 2.0))


def _max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def _nan_to_none(val: Optional[float]) -> Optional[float]:
    if (val is None) or math.isnan(val):
        return None
    return val


def _constants(stopping_lambda: Optional[float] = None) -> Dict[str, Any]:
    _lambda = stopping_lambda or config.lab.stopping_lambda
    return {
        "version": __version__,
        "stopping_lambda": _lambda,
        "domination_bound": dyadic_service.domination_bound(_lambda),
        "witness_bound": WITNESS_BOUND,
        "beurling_lp_factor": BEURLING_LP_FACTOR,
        "tolerances": config.lab.tolerances.model_dump(),
        "search": config.lab.search.model_dump(),
    }


def _make_result(
    cfg: ExperimentConfigPM,
    checks: List[CheckPM],
    summary: Dict[str, Any],
    tables: Optional[Dict[str, List[Dict[str, Any]]]] = None,
    stopping_lambda: Optional[float] = None,
) -> ExperimentResultPM:
    _result = ExperimentResultPM(
        experiment=cfg.experiment,
        config=cfg,
        constants=_constants(stopping_lambda),
        checks=checks,
        summary=summary,
        tables=tables or {},
    )

    if _result.ok:
        logger.success(f"Experiment '{cfg.experiment.value}': all {len(checks)} checks passed.")
    else:
        logger.warning(
            f"Experiment '{cfg.experiment.value}': failed checks {_result.failed}."
        )

    return _result


def _jacobian_trial(
    grid: GridSpecPM, band: int, seed: int
) -> Tuple[Dict[str, Any], ComplexFieldPM, ComplexFieldPM, float]:
    """Jacobian identity and zero-integral residuals for u = (Re h, Im h), h band-limited."""

    _h = field_service.random_band_limited(grid, band=band, seed=seed)
    _u = VectorField2PM.from_complex(_h)
    _ju = operators_service.jacobian(_u)
    _v = field_service.d_bar(_h)

    _grads = [
        field_service.d1(_u.u1),
        field_service.d2(_u.u1),
        field_service.d1(_u.u2),
        field_service.d2(_u.u2),
    ]
    _grad_inf = max(_grad.max_abs() for _grad in _grads)
    _grad_l2_sq = math.fsum(field_service.lp_norm(_grad, 2.0) ** 2 for _grad in _grads)

    _jc = operators_service.jacobian_complex(_v)
    _row = {
        "seed": seed,
        "identity_residual": utils.relative(
            _max_abs(_ju.samples - _jc.samples), _grad_inf**2
        ),
        "integral_residual": utils.relative(abs(field_service.integrate(_ju)), _grad_l2_sq),
    }
    return _row, _v, _ju, _grad_l2_sq


def _disk_refinement(ladder: List[int]) -> Dict[str, Any]:
    """S(1_B) against 0 inside and -1/z^2 outside the unit disk, quadrature FFT backend."""

    _ns = sorted(set(ladder))
    _hs = []
    _errors = []
    for _n in _ns:
        _half = DISK_DOMAIN_LENGTH / 2.0
        _grid = field_service.make_grid(
            n=_n, length=DISK_DOMAIN_LENGTH, periodic=False, origin=complex(-_half, -_half)
        )
        _z = _grid.nodes()
        _r = np.abs(_z)
        _disk = field_service.make_field(_grid, (_r < 1.0).astype(np.float64))
        _out = operators_service.beurling(_disk, BackendEnum.quadrature_fft).samples

        _inner = _r <= DISK_INNER_RADIUS
        _outer = (
            (DISK_OUTER_RADIUS <= _r)
            & (np.abs(_z.real) <= DISK_EDGE)
            & (np.abs(_z.imag) <= DISK_EDGE)
        )
        _hs.append(_grid.h)
        _errors.append(
            max(_max_abs(_out[_inner]), _max_abs(_out[_outer] + 1.0 / _z[_outer] ** 2))
        )

    _ratios = [utils.relative(_e1, _e0) for _e0, _e1 in zip(_errors[:-1], _errors[1:])]
    return {
        "ladder": _ns,
        "h": _hs,
        "errors": _errors,
        "ratios": _ratios,
        "order": utils.loglog_slope(_hs, _errors),
    }


## Runners:
@validate_call
def run_identities(cfg: ExperimentConfigPM) -> ExperimentResultPM:
    """Identity suite: S d_bar = d, isometry, S*S = I, duality, polarization, Jacobian identity,
    zero integral of Ju, quadrature backend agreement, kernel bounds and the disk-indicator
    refinement study.

    Args:
        cfg (ExperimentConfigPM, required): Config on a periodic grid.

    Raises:
        ConfigError: If the grid isn't periodic.

    Returns:
        ExperimentResultPM: Checks with residuals.
    """

    _require_grid_type(cfg, periodic=True)
    _grid = _make_grid(cfg)
    _settings = cfg.identities
    _tol = config.lab.tolerances
    _band = _clamp_band(_settings.band, _grid)
    _seed = cfg.seed
    logger.info(f"Running identity suite on a {_grid.n}x{_grid.n} torus (band {_band})...")

    _h = field_service.random_band_limited(_grid, band=_band, seed=_seed)
    _grad = math.hypot(
        field_service.lp_norm(field_service.d1(_h), 2.0),
        field_service.lp_norm(field_service.d2(_h), 2.0),
    )
    _lhs = operators_service.beurling(field_service.d_bar(_h))
    _fundamental = utils.relative(
        field_service.lp_norm(_lhs - field_service.d(_h), 2.0), _grad
    )

    _v = field_service.random_band_limited(_grid, band=_band, seed=_seed + 1, decay=0.0)
    _sv = operators_service.beurling(_v)
    _v_norm = field_service.lp_norm(_v, 2.0)
    _isometry = utils.relative(abs(field_service.lp_norm(_sv, 2.0) - _v_norm), _v_norm)
    _inverse = _relative_l2(operators_service.beurling_adjoint(_sv), _v)

    _phi = field_service.random_band_limited(_grid, band=_band, seed=_seed + 2, mean_zero=False)
    _psi = field_service.random_band_limited(_grid, band=_band, seed=_seed + 3, mean_zero=False)
    _left = field_service.integrate(_phi * operators_service.beurling_adjoint(_psi).conj())
    _right = field_service.integrate(operators_service.beurling(_phi) * _psi.conj())
    _duality = utils.relative(
        abs(_left - _right),
        field_service.lp_norm(_phi, 2.0) * field_service.lp_norm(_psi, 2.0),
    )

    _a = field_service.random_band_limited(_grid, band=_band, seed=_seed + 4, mean_zero=False)
    _b = field_service.random_band_limited(_grid, band=_band, seed=_seed + 5, mean_zero=False)
    _polarization = utils.relative(
        _max_abs(operators_service.polarize(_a, _b).samples - _a.samples * np.conj(_b.samples)),
        (_a.max_abs() + _b.max_abs()) ** 2,
    )

    _trials = utils.map_ordered(
        lambda _trial: _jacobian_trial(_grid, _band, _seed + 10 + _trial)[0],
        range(_settings.trials),
    )
    _rows = [dict(trial=_i, **_row) for _i, _row in enumerate(_trials)]

    _square = field_service.make_grid(
        n=_settings.agreement_n,
        length=_grid.length,
        periodic=False,
        origin=complex(-_grid.length / 2.0, -_grid.length / 2.0),
    )
    _square_band = _clamp_band(_settings.band, _square)
    _bq = field_service.random_band_limited(_square, band=_square_band, seed=_seed + 6, mean_zero=False)
    _vq = field_service.random_band_limited(_square, band=_square_band, seed=_seed + 7, mean_zero=False)
    _agreement = max(
        _relative_l2(
            operators_service.beurling(_vq, BackendEnum.quadrature_fft),
            operators_service.beurling(_vq, BackendEnum.quadrature_direct),
        ),
        _relative_l2(
            operators_service.commutator(_bq, _vq, BackendEnum.quadrature_fft),
            operators_service.commutator(_bq, _vq, BackendEnum.quadrature_direct),
        ),
    )

    _kernel = operators_service.kernel_bounds_check(trials=_settings.kernel_trials, seed=_seed)
    _kernel_deviation = math.pi * max(
        abs(_kernel.min_weighted - 1.0 / math.pi), abs(_kernel.max_weighted - 1.0 / math.pi)
    )

    _checks = [
        utils.make_check("fundamental_relation", _fundamental, _tol.fundamental),
        utils.make_check("isometry", _isometry, _tol.isometry),
        utils.make_check("adjoint_inverse", _inverse, _tol.adjoint),
        utils.make_check("adjoint_duality", _duality, _tol.duality),
        utils.make_check("polarization", _polarization, _tol.polarization),
        utils.make_check(
            "jacobian_identity", max(_row["identity_residual"] for _row in _rows), _tol.jacobian
        ),
        utils.make_check(
            "jacobian_integral",
            max(_row["integral_residual"] for _row in _rows),
            _tol.jacobian_integral,
        ),
        utils.make_check("backend_agreement", _agreement, _tol.backend_agreement),
        utils.make_check("kernel_bounds", _kernel_deviation, KERNEL_BOUNDS_TOL),
    ]

    _refinement = None
    if 2 <= len(set(_settings.convergence_ladder)):
        _refinement = _disk_refinement(_settings.convergence_ladder)
        _checks.append(utils.make_check("quadrature_refinement", max(_refinement["ratios"]), 1.0))
        if _settings.min_order is not None:
            _checks.append(
                utils.make_check(
                    "quadrature_order", _refinement["order"], _settings.min_order, upper=False
                )
            )

    _summary = {
        "grid": _grid.model_dump(mode="json"),
        "band": _band,
        "agreement_grid": _square.model_dump(mode="json"),
        "kernel_bounds": _kernel.model_dump(mode="json"),
        "quadrature_refinement": _refinement,
    }
    return _make_result(cfg, _checks, _summary, {"jacobian_trials": _rows})


def _regime_point(
    cfg: ExperimentConfigPM, backend: BackendEnum, point: Tuple[Tuple[float, float], int, int]
) -> Dict[str, Any]:
    (_p, _q), _index, _n = point
    _spec = cfg.regimes.symbols[_index]
    _grid = _make_grid(cfg, n=_n)
    _b = norms_service.generate_symbol(_spec, _grid)
    _exponents = field_service.exponents(p=_p, q=_q)

    _search = norms_service.opnorm_lower(_b, _p, _q, backend=backend, seed=cfg.seed)
    _row = {
        "p": _p,
        "q": _q,
        "symbol": utils.symbol_label(_index, _spec),
        "n": _n,
        "h": _grid.h,
        "regime": _exponents.regime,
        "opnorm_lower": _search.value,
        "upper_envelope": None,
        "lr_distance": None,
    }

    if _p == _q:
        _row["lower_kind"] = "bmo"
        _row["lower_bound"] = lowerbound_service.bmo_lower(
            _b, _p, backend=backend, min_cells=cfg.regimes.min_cells
        ).value
    elif _p < _q:
        _row["lower_kind"] = "holder"
        _row["lower_bound"] = lowerbound_service.holder_lower(
            _b, _p, _q, backend=backend, min_cells=cfg.regimes.min_cells
        ).value
    else:
        _report = lowerbound_service.lr_lower_pipeline(
            _b, _p, _q, samples=cfg.samples, seed=cfg.seed, backend=backend
        )
        _constant, _distance = norms_service.distance_to_constants_lr(_b, _report.r)
        _envelope = norms_service.upper_envelope(_b - _constant, _p, _q, _report.r, backend)
        _row["lower_kind"] = "pipeline"
        _row["lower_bound"] = _report.certified_lb
        _row["upper_envelope"] = _envelope.value
        _row["lr_distance"] = _distance

    logger.debug(
        f"Regime point p={_p:g}, q={_q:g}, {_row['symbol']}, n={_n}: "
        f"search={_row['opnorm_lower']:.6g}, {_row['lower_kind']}={_row['lower_bound']:.6g}."
    )
    return _row


def _regime_trends(cfg: ExperimentConfigPM, rows: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
    _trends = []
    for _p, _q in dict.fromkeys(cfg.regimes.pairs):
        _exponents = field_service.exponents(p=_p, q=_q)
        for _index, _spec in enumerate(cfg.regimes.symbols):
            _label = utils.symbol_label(_index, _spec)
            _points = sorted(
                (_row for _row in rows if (_row["p"], _row["q"], _row["symbol"]) == (_p, _q, _label)),
                key=lambda _row: _row["n"],
            )
            _hs = [_row["h"] for _row in _points]

            _expected = None
            if (_p < _q) and (_spec.kind == SymbolClassEnum.holder):
                _expected = _spec.alpha - _exponents.alpha
            elif _spec.kind == SymbolClassEnum.constant:
                _expected = 0.0

            _trends.append(
                {
                    "p": _p,
                    "q": _q,
                    "symbol": _label,
                    "regime": _exponents.regime,
                    "alpha": _exponents.alpha,
                    "points": len(_points),
                    "opnorm_slope": _nan_to_none(
                        utils.loglog_slope(_hs, [_row["opnorm_lower"] for _row in _points])
                    ),
                    "lower_slope": _nan_to_none(
                        utils.loglog_slope(_hs, [_row["lower_bound"] for _row in _points])
                    ),
                    "expected_lower_slope": _expected,
                }
            )

    return _trends


def _regime_trend_checks(
    cfg: ExperimentConfigPM, rows: List[Dict[str, Any]], trends: List[Dict[str, Any]]
) -> List[CheckPM]:
    """Holder-matched lower bounds stay within `REGIME_STABLE_RTOL` between consecutive grids;
    divergent ones (q > p*) follow the expected slope within `REGIME_SLOPE_RTOL`."""

    _kinds = {
        utils.symbol_label(_index, _spec): _spec.kind for _index, _spec in enumerate(cfg.regimes.symbols)
    }
    _checks = []
    for _trend in trends:
        _expected = _trend["expected_lower_slope"]
        if (_kinds[_trend["symbol"]] != SymbolClassEnum.holder) or (_expected is None) or (
            _trend["points"] < 2
        ):
            continue

        _name = f"p{_trend['p']:g}_q{_trend['q']:g}.{_trend['symbol']}"
        if (_trend["regime"] == "holder") and (abs(_expected) <= 1e-12):
            _values = [
                _row["lower_bound"]
                for _row in sorted(rows, key=lambda _row: _row["n"])
                if (_row["p"], _row["q"], _row["symbol"]) == (_trend["p"], _trend["q"], _trend["symbol"])
            ]
            _drift = max(
                utils.relative(abs(_next - _prev), _prev) for _prev, _next in zip(_values[:-1], _values[1:])
            )
            _checks.append(utils.make_check(f"{_name}.grid_stable", _drift, REGIME_STABLE_RTOL))
        elif _trend["regime"] == "constant":
            _slope = math.nan if _trend["lower_slope"] is None else _trend["lower_slope"]
            _checks.append(
                utils.make_check(
                    f"{_name}.lower_slope",
                    utils.relative(abs(_slope - _expected), abs(_expected)),
                    REGIME_SLOPE_RTOL,
                )
            )

    return _checks


@validate_call
def run_regimes(cfg: ExperimentConfigPM) -> ExperimentResultPM:
    """Sweep (p, q) pairs, symbol classes and grid sizes; search lower bound of ||[b,S]||_{p->q}
    next to the witness bound of the regime (bmo for p = q, Holder for p < q, the L^r pipeline
    and Holder envelope for p > q), with log-log trends against h. Constant symbols must give
    exactly 0; Holder symbols are checked for grid stability (matched exponent) or for the
    expected divergence slope (q > p*).

    Raises:
        ConfigError: If the grid is periodic or the backend is spectral.
    """

    _require_grid_type(cfg, periodic=False)
    _backend = _resolve_backend(cfg)
    _settings = cfg.regimes
    _points = [
        (_pair, _index, _n)
        for _pair in dict.fromkeys(_settings.pairs)
        for _index in range(len(_settings.symbols))
        for _n in sorted(set(_settings.ladder))
    ]
    logger.info(f"Running regime sweep over {len(_points)} points...")

    _rows = utils.map_ordered(lambda _point: _regime_point(cfg, _backend, _point), _points)
    _trends = _regime_trends(cfg, _rows)

    _checks = []
    for _index, _spec in enumerate(_settings.symbols):
        if _spec.kind != SymbolClassEnum.constant:
            continue

        _label = utils.symbol_label(_index, _spec)
        _largest = max(
            max(_row["opnorm_lower"], _row["lower_bound"], _row["upper_envelope"] or 0.0)
            for _row in _rows
            if _row["symbol"] == _label
        )
        _checks.append(utils.make_check(f"{_label}.zero_estimates", _largest, 0.0))

    _checks += _regime_trend_checks(cfg, _rows, _trends)

    _summary = {
        "backend": _backend.value,
        "points": len(_rows),
        "trends": _trends,
    }
    return _make_result(cfg, _checks, _summary, {"regimes": _rows, "regime_trends": _trends})


@validate_call
def run_lowerbound(cfg: ExperimentConfigPM) -> ExperimentResultPM:
    """L^r lower-bound pipeline for p > q next to ||b - c||_r and the Holder envelope:
    lr_distance = K certified_lb and certified_lb <= envelope.

    Raises:
        ConfigError          : If the grid is periodic or the backend is spectral.
        ExponentMismatchError: If p <= q.
    """

    _require_grid_type(cfg, periodic=False)
    _p, _q = cfg.exponents.p, cfg.exponents.q
    if _p <= _q:
        raise ExponentMismatchError(
            description=f"Lower-bound experiment needs p > q, got: p={_p}, q={_q}!"
        )

    _backend = _resolve_backend(cfg)
    _grid = _make_grid(cfg)
    _stopping_lambda = cfg.lowerbound.stopping_lambda
    logger.info(
        f"Running L^r lower-bound pipeline on a {_grid.n}x{_grid.n} square (p={_p:g}, q={_q:g}, M={cfg.samples})..."
    )

    _b = norms_service.generate_symbol(cfg.symbol, _grid)
    _report = lowerbound_service.lr_lower_pipeline(
        _b,
        _p,
        _q,
        samples=cfg.samples,
        seed=cfg.seed,
        backend=_backend,
        stopping_lambda=_stopping_lambda,
    )
    _r = _report.r
    _constant, _distance = norms_service.distance_to_constants_lr(_b, _r)
    _best_constant, _best_distance = norms_service.best_constant_lr(_b, _r)
    _envelope = norms_service.upper_envelope(_b - _constant, _p, _q, _r, _backend)

    _k_lower = utils.relative(_distance, _report.certified_lb)
    _k_upper = utils.relative(_distance, _envelope.value)
    _mc_error = abs(_report.mc_mean - _report.target)
    logger.info(
        f"Sandwich: ||b - c||_r = {_distance:.6g}, certified = {_report.certified_lb:.6g} (K = {_k_lower:.4g}), "
        f"envelope = {_envelope.value:.6g}."
    )

    _tol = config.lab.tolerances
    _checks = [
        utils.make_check("dual_weights", _report.dual_residual, _tol.dual_weights),
        utils.make_check(
            "certified_below_envelope",
            _report.certified_lb,
            _envelope.value * (1.0 + ENVELOPE_SLACK),
        ),
    ]
    if 0.0 < _distance:
        _checks.append(
            utils.make_check("certified_positive", _report.certified_lb, math.ulp(0.0), upper=False)
        )

    _rows = [
        {
            "sample": _row.sample,
            "component": _row.component,
            "pairing_re": _row.pairing.real,
            "pairing_im": _row.pairing.imag,
            "norm_f": _row.norm_f,
            "norm_g": _row.norm_g,
            "ratio": _row.ratio,
        }
        for _row in _report.rows
    ]
    _summary = {
        "grid": _grid.model_dump(mode="json"),
        "backend": _backend.value,
        "pipeline": _report.model_dump(mode="json"),
        "mean_limit_constant": _constant,
        "lr_distance": _distance,
        "best_constant": _best_constant,
        "best_distance": _best_distance,
        "envelope": _envelope.model_dump(mode="json"),
        "k_lower": _k_lower,
        "k_upper": _k_upper,
        "mc_error": _mc_error,
        "mc_within_stderr": _mc_error <= MC_STDERR_FACTOR * _report.mc_stderr,
    }
    return _make_result(
        cfg, _checks, _summary, {PIPELINE_CSV_TABLE: _rows}, stopping_lambda=_stopping_lambda
    )


@validate_call
def run_jacobian(cfg: ExperimentConfigPM) -> ExperimentResultPM:
    """Jacobian checks on random maps and the comparison of the norming functional
    sup |integral of b Ju| / ||v||_2p^2 with the search lower bound of ||[b,S]||_{2p -> (2p)'}.

    Raises:
        ConfigError: If the grid isn't periodic or the backend isn't spectral.
    """

    _require_grid_type(cfg, periodic=True)
    _backend = _resolve_backend(cfg)
    _grid = _make_grid(cfg)
    _exponents = field_service.jacobian_exponents(cfg.jacobian.p)
    _two_p = _exponents.p
    _band = _clamp_band(cfg.jacobian.band, _grid)
    _tol = config.lab.tolerances
    logger.info(
        f"Running Jacobian experiment on a {_grid.n}x{_grid.n} torus (commutator L^{_two_p:g} -> L^{_exponents.q:g})..."
    )

    _b = norms_service.generate_symbol(cfg.symbol, _grid)
    _search = norms_service.opnorm_lower(
        _b, _exponents.p, _exponents.q, backend=_backend, seed=cfg.seed
    )

    def _functional(v: ComplexFieldPM) -> Tuple[float, float]:
        _pairing = operators_service.jacobian_pairing(_b, v, v)
        _norm = field_service.lp_norm(v, _two_p)
        return utils.relative(abs(_pairing.commutator), _norm**2), _pairing.residual

    def _trial(trial: int) -> Dict[str, Any]:
        _row, _v, _ju, _grad_l2_sq = _jacobian_trial(_grid, _band, cfg.seed + trial)
        _value, _residual = _functional(_v)
        return dict(
            trial=trial,
            h1_ratio=utils.relative(norms_service.h1_proxy(_ju), _grad_l2_sq),
            pairing_residual=_residual,
            functional=_value,
            **_row,
        )

    _rows = utils.map_ordered(_trial, range(cfg.jacobian.trials))

    _w = _search.witness_v
    _w = _w - field_service.integrate(_w) / _grid.area
    _witness_value, _witness_residual = _functional(_w)
    _norming = max([_witness_value] + [_row["functional"] for _row in _rows])

    _checks = [
        utils.make_check(
            "jacobian_identity", max(_row["identity_residual"] for _row in _rows), _tol.jacobian
        ),
        utils.make_check(
            "jacobian_integral",
            max(_row["integral_residual"] for _row in _rows),
            _tol.jacobian_integral,
        ),
        utils.make_check(
            "pairing_forms",
            max([_witness_residual] + [_row["pairing_residual"] for _row in _rows]),
            _tol.jacobian,
        ),
    ]

    _summary = {
        "grid": _grid.model_dump(mode="json"),
        "exponents": _exponents.model_dump(mode="json"),
        "opnorm_lower": _search.value,
        "opnorm_history": _search.history,
        "norming_functional": _norming,
        "witness_functional": _witness_value,
        "comparability_ratio": utils.relative(_norming, _search.value),
        "h1_ratio_max": max(_row["h1_ratio"] for _row in _rows),
    }
    return _make_result(cfg, _checks, _summary, {"jacobian_trials": _rows})


@validate_call
def run_scaling(cfg: ExperimentConfigPM) -> ExperimentResultPM:
    """Norms of u_lambda(x) = lambda u(x / lambda) on the torus enlarged by lambda:
    ||J u_lambda||_p / ||grad u_lambda||_2p^2 stays constant while
    ||J u_lambda||_p / (||u_lambda||_2p + ||grad u_lambda||_2p)^2 decays like lambda^-2.

    Raises:
        ConfigError: If the grid isn't periodic.
    """

    _require_grid_type(cfg, periodic=True)
    _settings = cfg.scaling
    _p = cfg.exponents.p
    _two_p = 2.0 * _p
    _base = _make_grid(cfg)
    _band = _clamp_band(_settings.band, _base)
    logger.info(f"Running scaling experiment over lambda = {_settings.lambdas} (p={_p:g})...")

    _h = field_service.random_band_limited(_base, band=_band, seed=cfg.seed)
    _u_samples = _h.samples + _settings.offset * (1.0 + 1.0j)

    def _point(lam: float) -> Dict[str, Any]:
        _grid = _make_grid(cfg, scale=lam)
        _u = VectorField2PM.from_complex(field_service.make_field(_grid, lam * _u_samples))
        _ju = operators_service.jacobian(_u)
        _grads = [
            field_service.d1(_u.u1),
            field_service.d2(_u.u1),
            field_service.d1(_u.u2),
            field_service.d2(_u.u2),
        ]
        _grad_abs = np.sqrt(sum(np.abs(_grad.samples) ** 2 for _grad in _grads))
        _grad_norm = field_service.lp_norm(field_service.make_field(_grid, _grad_abs), _two_p)
        _ju_norm = field_service.lp_norm(_ju, _p)
        _u_norm = field_service.lp_norm(_u.to_complex(), _two_p)
        return {
            "lambda": lam,
            "length": _grid.length,
            "ju_norm": _ju_norm,
            "grad_norm_sq": _grad_norm**2,
            "u_norm": _u_norm,
            "homogeneous_ratio": utils.relative(_ju_norm, _grad_norm**2),
            "nonhomogeneous_ratio": utils.relative(_ju_norm, (_u_norm + _grad_norm) ** 2),
        }

    _rows = utils.map_ordered(_point, _settings.lambdas)
    _reference = _rows[0]["homogeneous_ratio"]
    _drift = max(
        abs(utils.relative(_row["homogeneous_ratio"], _reference) - 1.0) for _row in _rows
    )
    _slope = utils.loglog_slope(
        [_row["lambda"] for _row in _rows], [_row["nonhomogeneous_ratio"] for _row in _rows]
    )

    _checks = [
        utils.make_check("homogeneous_drift", _drift, _settings.drift_tol),
        utils.make_check("nonhomogeneous_slope", abs(_slope + 2.0), _settings.slope_tol),
    ]
    _summary = {
        "grid": _base.model_dump(mode="json"),
        "p": _p,
        "homogeneous_drift": _drift,
        "nonhomogeneous_slope": _slope,
        "expected_slope": -2.0,
    }
    return _make_result(cfg, _checks, _summary, {"scaling": _rows})


@validate_call
def run_sparse(cfg: ExperimentConfigPM) -> ExperimentResultPM:
    """Sparse domination over a symbol corpus: family statistics, sparse checks, pointwise
    domination constant, dual-weight residuals and sparse_lp_ratio for random weights.

    Raises:
        ConfigError: If the grid is periodic.
    """

    _require_grid_type(cfg, periodic=False)
    _settings = cfg.sparse
    _grid = _make_grid(cfg)
    _stopping_lambda = _settings.stopping_lambda or config.lab.stopping_lambda
    _tol = config.lab.tolerances
    logger.info(
        f"Running sparse suite on {len(_settings.corpus)} symbols (n={_grid.n}, Lambda={_stopping_lambda:g})..."
    )

    def _family_point(item: Tuple[int, SymbolSpecPM]) -> Dict[str, Any]:
        _index, _spec = item
        _label = utils.symbol_label(_index, _spec)
        _b = norms_service.generate_symbol(_spec, _grid)
        _family = dyadic_service.sparse_dominate(_b, stopping_lambda=_stopping_lambda)
        _check = dyadic_service.check_sparse(_family)
        _domination = dyadic_service.verify_domination(_b, _family)
        try:
            _dual = dyadic_service.dual_weights(_family, _settings.r)
        except AllZeroOscillationError:
            _dual = None

        _rng = np.random.Generator(np.random.PCG64([cfg.seed, _index]))
        _ratios = []
        for _draw in range(_settings.lp_draws):
            _lambdas = list(_rng.uniform(0.0, 1.0, len(_family)))
            for _p in _settings.lp_exponents:
                _ratios.append(
                    {
                        "symbol": _label,
                        "draw": _draw,
                        "p": _p,
                        "ratio": dyadic_service.sparse_lp_ratio(_family, _lambdas, _p),
                    }
                )

        return {
            "label": _label,
            "family": _family,
            "check": _check,
            "domination": _domination,
            "dual": _dual,
            "ratios": _ratios,
        }

    _points = utils.map_ordered(_family_point, list(enumerate(_settings.corpus)))

    _major_bound = 1.0 - 1.0 / _stopping_lambda
    _checks = []
    _families = []
    _ratios = []
    for _point in _points:
        _label = _point["label"]
        _check = _point["check"]
        _domination = _point["domination"]
        _dual = _point["dual"]

        _checks.extend(
            [
                utils.make_check(
                    f"{_label}.dyadic_disjoint", float(not (_check.dyadic and _check.disjoint)), 0.0
                ),
                utils.make_check(
                    f"{_label}.major_fraction", _check.min_major_fraction, _major_bound, upper=False
                ),
                utils.make_check(f"{_label}.carleson", _check.carleson, 2.0),
                utils.make_check(f"{_label}.domination", _domination.c_emp, _domination.bound),
            ]
        )
        if _dual is not None:
            _checks.append(
                utils.make_check(
                    f"{_label}.dual_weights",
                    max(_dual.normalization_residual, _dual.pairing_residual),
                    _tol.dual_weights,
                )
            )

        _families.append(
            {
                "symbol": _label,
                "size": _check.size,
                "depth": _check.depth,
                "min_major_fraction": _check.min_major_fraction,
                "carleson": _check.carleson,
                "c_emp": _domination.c_emp,
                "bound": _domination.bound,
                "dual_normalization_residual": None if _dual is None else _dual.normalization_residual,
                "dual_pairing_residual": None if _dual is None else _dual.pairing_residual,
                "ok": _check.ok and _domination.ok,
            }
        )
        _ratios.extend(_point["ratios"])

    _ratio_range = {}
    for _p in dict.fromkeys(_settings.lp_exponents):
        _values = [_row["ratio"] for _row in _ratios if _row["p"] == _p]
        _ratio_range[f"{_p:g}"] = [min(_values), max(_values)]

    _checks.extend(
        [
            utils.make_check(
                "sparse_lp_ratio_min",
                min(_row["ratio"] * 2.0 ** (1.0 / _row["p"]) for _row in _ratios),
                1.0 - ENVELOPE_SLACK,
                upper=False,
            ),
            utils.make_check(
                "sparse_lp_ratio_max", max(_row["ratio"] for _row in _ratios), _tol.sparse_lp_max
            ),
        ]
    )

    _summary = {
        "grid": _grid.model_dump(mode="json"),
        "r": _settings.r,
        "families": {_point["label"]: _point["family"].to_json() for _point in _points},
        "sparse_lp_ratio_range": _ratio_range,
    }
    return _make_result(
        cfg,
        _checks,
        _summary,
        {"sparse_families": _families, "sparse_lp_ratios": _ratios},
        stopping_lambda=_stopping_lambda,
    )


_RUNNERS = {
    ExperimentEnum.identities: run_identities,
    ExperimentEnum.regimes: run_regimes,
    ExperimentEnum.lowerbound: run_lowerbound,
    ExperimentEnum.jacobian: run_jacobian,
    ExperimentEnum.scaling: run_scaling,
    ExperimentEnum.sparse: run_sparse,
}


@validate_call
def run_experiment(cfg: ExperimentConfigPM) -> ExperimentResultPM:
    return _RUNNERS[cfg.experiment](cfg)


## Report writer:
def build_report(result: ExperimentResultPM) -> Dict[str, Any]:
    """JSON document of a run: resolved config, constant choices, checks and results."""

    return utils.jsonable(
        {
            "experiment": result.experiment.value,
            "ok": result.ok,
            "failed": result.failed,
            "config": result.config.model_dump(mode="json", by_alias=True),
            "constants": result.constants,
            "checks": [_check.model_dump(mode="json") for _check in result.checks],
            "summary": result.summary,
        }
    )


@validate_call
def write_report(result: ExperimentResultPM, output_dir: Optional[str] = None) -> List[str]:
    """Write `<experiment>.json` and one `<experiment>.<table>.csv` per table.

    Args:
        result     (ExperimentResultPM, required): Run result.
        output_dir (Optional[str]     , optional): Output directory. Defaults to `result.config.output_dir`.

    Returns:
        List[str]: Written file paths, JSON first.
    """

    _dir = output_dir or result.config.output_dir
    _name = result.experiment.value
    _json_path = os.path.join(_dir, f"{_name}{REPORT_FILE_SUFFIX}")
    core_utils.write_json(_json_path, build_report(result))
    _paths = [_json_path]

    _tables = {
        CHECKS_TABLE: [
            dict(experiment=_name, **_check.model_dump()) for _check in result.checks
        ],
        **result.tables,
    }
    for _table, _rows in sorted(_tables.items()):
        _path = os.path.join(_dir, f"{_name}.{_table}.csv")
        core_utils.write_csv(_path, table=_table, rows=_rows, sort_by=TABLE_SORT_KEYS[_table])
        _paths.append(_path)

    logger.info(f"Saved '{_name}' report into '{_dir}' ({len(_paths)} files).")
    return _paths


__all__ = [
    "load_config",
    "run_identities",
    "run_regimes",
    "run_lowerbound",
    "run_jacobian",
    "run_scaling",
    "run_sparse",
    "run_experiment",
    "build_report",
    "write_report",
]
