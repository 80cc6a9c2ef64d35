# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lab.core.constants import BackendEnum, SymbolClassEnum
from lab.core.exceptions import ExponentMismatchError, GridSpecError, SingularSampleError
from lab.resources.field import service as field_service
from lab.resources.field.schemas import ComplexFieldPM
from lab.resources.operators import service as operators_service
from lab.resources.dyadic import utils as dyadic_utils
from lab.resources.norms import service as norms_service
from lab.resources.norms import utils as norms_utils
from lab.resources.norms.schemas import SymbolSpecPM


def _bounded(n: int, length: float):
    _half = length / 2.0
    return field_service.make_grid(n=n, length=length, periodic=False, origin=complex(-_half, -_half))


def _symbol(grid, **kwargs) -> ComplexFieldPM:
    return norms_service.generate_symbol(SymbolSpecPM(**kwargs), grid)


def _dense_matrix(grid, apply) -> np.ndarray:
    _size = grid.n**2
    _matrix = np.empty((_size, _size), dtype=np.complex128)
    for _k in range(_size):
        _basis = np.zeros(_size, dtype=np.complex128)
        _basis[_k] = 1.0
        _matrix[:, _k] = apply(ComplexFieldPM(grid=grid, samples=_basis)).samples.ravel()
    return _matrix


def test_symbol_spec():
    _spec = SymbolSpecPM(**{"class": "holder", "alpha": 0.5, "window": 0.45})
    assert _spec.kind == SymbolClassEnum.holder
    _json = _spec.model_dump(mode="json", by_alias=True)
    assert _json["class"] == "holder"
    assert _json["center"] == [0.0, 0.0]
    assert SymbolSpecPM.model_validate(_json) == _spec

    with pytest.raises(ValueError):
        SymbolSpecPM(kind="holder")

    with pytest.raises(ValueError):
        SymbolSpecPM(kind="holder", alpha=1.5)

    with pytest.raises(ValueError):
        SymbolSpecPM(kind="constant", colour="red")


def test_smooth_cutoff():
    _rho = np.array([0.0, 0.25, 0.5, 0.6, 0.75, 0.9, 1.0, 2.0])
    _out = norms_utils.smooth_cutoff(_rho)
    assert np.all(_out[:3] == 1.0)
    assert np.all(_out[-2:] == 0.0)
    assert np.all(np.diff(_out) <= 0.0)
    assert _out[4] == pytest.approx(0.5)


def test_generate_symbol_classes(square, torus):
    _constant = _symbol(square, kind="constant", value=2.5)
    assert np.all(_constant.samples == 2.5)
    assert norms_service.bmo_norm(_constant) == 0.0
    assert norms_service.holder_osc(_constant, 0.5) == 0.0

    _step = _symbol(square, kind="step")
    _x1, _ = square.coords()
    assert np.array_equal(_step.samples.real, (_x1 > 0.0).astype(np.float64))

    _log = _symbol(square, kind="bmo_log", clamp=False)
    assert np.all(np.isfinite(_log.samples))

    _clamped = _symbol(torus, kind="bmo_log")
    assert _clamped.samples[0, 0] == pytest.approx(math.log(torus.h))
    with pytest.raises(SingularSampleError):
        _symbol(torus, kind="bmo_log", clamp=False)

    _bump = _symbol(square, kind="lr_bump", shape="bump", scale=0.25)
    assert float(np.max(_bump.samples.real)) <= 1.0
    assert np.all(_bump.samples[np.abs(square.nodes()) >= 0.25] == 0.0)

    _random = _symbol(torus, kind="random", seed=3, band=2, offset=1.0)
    _again = _symbol(torus, kind="random", seed=3, band=2, offset=1.0)
    assert np.array_equal(_random.samples, _again.samples)

    _windowed = _symbol(square, kind="holder", alpha=0.5, window=0.4)
    assert np.all(_windowed.samples[np.abs(square.nodes()) >= 0.4] == 0.0)


def test_gaussian_lr_norm():
    _grid = _bounded(128, 12.0)
    _gauss = _symbol(_grid, kind="lr_bump", scale=1.0)
    assert field_service.lp_norm(_gauss, 4.0) == pytest.approx((math.pi / 4.0) ** 0.25, rel=1e-8)


def test_bmo_norm_examples(square):
    _step = _symbol(square, kind="step")
    assert norms_service.bmo_norm(_step) == pytest.approx(0.5, rel=1e-14)

    _b = field_service.random_band_limited(field_service.make_grid(n=32, length=2 * math.pi), seed=4)
    _shifted = _b + (3.0 - 2.0j)
    assert norms_service.bmo_norm(_shifted) == pytest.approx(norms_service.bmo_norm(_b), rel=1e-12)
    assert norms_service.holder_osc(_shifted, 0.5) == pytest.approx(
        norms_service.holder_osc(_b, 0.5), rel=1e-12
    )


@pytest.mark.slow
def test_bmo_log_refinement():
    _values = [
        norms_service.bmo_norm(_symbol(_bounded(_n, 1.0), kind="bmo_log", window=0.45))
        for _n in (128, 256)
    ]
    assert 0.0 < _values[0]
    assert abs(_values[1] - _values[0]) <= 0.1 * _values[0]


def test_holder_osc_linear(square):
    _x1, _ = square.coords()
    _linear = field_service.make_field(square, _x1)
    assert norms_service.holder_osc(_linear, 1.0) == pytest.approx(0.5, rel=1e-12)


@pytest.mark.slow
def test_holder_osc_refinement():
    _stable = []
    _diverging = []
    for _n in (128, 256):
        _b = _symbol(_bounded(_n, 1.0), kind="holder", alpha=0.5, window=0.45)
        _stable.append(norms_service.holder_osc(_b, 0.5))
        _diverging.append(norms_service.holder_osc(_b, 0.7, max_cells=4))

    assert abs(_stable[1] - _stable[0]) <= 0.05 * _stable[0]
    ## cubes of side <= 4h around the center: (2h)^(0.5 - 0.7), slope 0.2 in log2(n)
    _slope = math.log2(_diverging[1] / _diverging[0])
    assert 0.15 <= _slope <= 0.25


def test_holder_osc_max_cells(square):
    _b = _symbol(square, kind="holder", alpha=0.5, window=0.45)
    _full = norms_service.holder_osc(_b, 0.7)
    assert norms_service.holder_osc(_b, 0.7, max_cells=square.n) == _full
    assert 0.0 < norms_service.holder_osc(_b, 0.7, max_cells=4) <= _full
    assert {_stats.cells for _stats in dyadic_utils.cube_family_stats(_b.samples, max_cells=4)} == {2, 4}


def test_holder_osc_bounds_every_cube(square):
    _b = _symbol(square, kind="holder", alpha=0.5, window=0.45)
    _constant = norms_service.holder_osc(_b, 0.5)
    for _stats in dyadic_utils.cube_family_stats(_b.samples):
        _radius = 0.5 * _stats.cells * square.h
        assert np.all(_stats.oscillations <= _constant * _radius**0.5 * (1 + 1e-12))


def test_distance_to_constants():
    _grid = _bounded(64, 20.0)
    _c, _dist = norms_service.distance_to_constants_lr(_symbol(_grid, kind="constant", value=5.0), 4.0)
    assert _c == 5.0
    assert _dist == 0.0

    _target = (math.pi / 4.0) ** 0.25
    _c, _dist = norms_service.distance_to_constants_lr(_symbol(_grid, kind="lr_bump"), 4.0)
    assert abs(_c) <= 1e-6
    assert _dist == pytest.approx(_target, rel=1e-5)

    _shifted = _symbol(_grid, kind="lr_bump", offset=3.0)
    _c, _dist = norms_service.distance_to_constants_lr(_shifted, 4.0)
    assert abs(_c - 3.0) <= 1e-6
    assert _dist == pytest.approx(_target, rel=1e-5)

    _best_c, _best_dist = norms_service.best_constant_lr(_shifted, 4.0)
    assert _best_dist <= _dist
    for _c in (3.0, 3.05, 3.1, 3.15, 3.2, 3.1 + 0.05j, _best_c + 1e-3, _best_c - 1e-3j):
        assert _best_dist <= field_service.lp_norm(_shifted - _c, 4.0) * (1 + 1e-12)

    ## stationary point of ||b - c||_4^4: the integral of |b - c|^2 (b - c) vanishes
    _residual = _shifted.samples - _best_c
    _moment = np.sum(np.abs(_residual) ** 2 * _residual)
    assert abs(_moment) <= 1e-5 * np.sum(np.abs(_residual) ** 3)


def test_distance_to_constants_errors(torus, square):
    with pytest.raises(GridSpecError):
        norms_service.distance_to_constants_lr(field_service.constant(torus, 1.0), 2.0)

    with pytest.raises(ExponentMismatchError):
        norms_service.distance_to_constants_lr(field_service.constant(square, 1.0), 1.0)


def test_h1_proxy(torus, square):
    assert norms_service.h1_proxy(field_service.zeros(torus)) == 0.0
    assert norms_service.h1_proxy(field_service.constant(torus, 1.0)) == pytest.approx(
        torus.area, rel=1e-12
    )

    with pytest.raises(ValueError):
        norms_service.h1_proxy(field_service.constant(square, 1j))

    _f = _symbol(square, kind="lr_bump", scale=0.1)
    _values = [norms_service.h1_proxy(_f, levels=_k) for _k in range(1, 5)]
    assert all(_a <= _b for _a, _b in zip(_values[:-1], _values[1:]))


def test_h1_proxy_jacobians(torus):
    _ratios = []
    for _seed in range(10):
        _u1 = field_service.random_band_limited(torus, band=3, seed=2 * _seed, real=True)
        _u2 = field_service.random_band_limited(torus, band=3, seed=2 * _seed + 1, real=True)
        _ju = operators_service.jacobian(field_service.vector_field(_u1, _u2))
        _grad = sum(
            field_service.lp_norm(_partial, 2.0) ** 2
            for _u in (_u1, _u2)
            for _partial in (field_service.d1(_u), field_service.d2(_u))
        )
        _ratios.append(norms_service.h1_proxy(_ju) / _grad)

    assert max(_ratios) <= 5.0
    assert 0.0 < min(_ratios)


def test_duality_map(torus):
    _f = field_service.random_band_limited(torus, seed=9)
    for _s in (1.5, 2.0, 4.0):
        _j = norms_utils.duality_map(_f.samples, _s, torus.cell_area)
        _pairing = torus.cell_area * np.sum(_j * np.conj(_f.samples))
        assert _pairing == pytest.approx(field_service.lp_norm(_f, _s), rel=1e-12)
        _j_field = ComplexFieldPM(grid=torus, samples=_j)
        assert field_service.lp_norm(_j_field, _s / (_s - 1.0)) == pytest.approx(1.0, rel=1e-12)

    assert not np.any(norms_utils.duality_map(np.zeros((4, 4)), 3.0, 1.0))


def test_opnorm_lower_constant(torus):
    _estimate = norms_service.opnorm_lower(field_service.constant(torus, 2.0), 2.0, 2.0, restarts=3)
    assert _estimate.value == 0.0
    assert _estimate.history == [0.0, 0.0, 0.0]


def test_opnorm_lower_plane_wave(torus):
    _x1, _x2 = torus.coords()
    _b = field_service.make_field(torus, np.exp(1j * _x1))
    _witness = field_service.make_field(torus, np.exp(1j * _x2))

    _estimate = norms_service.opnorm_lower(_b, 2.0, 2.0, steps=0, restarts=1, initial=_witness)
    assert _estimate.value == pytest.approx(math.sqrt(2.0), rel=1e-12)

    _estimate = norms_service.opnorm_lower(_b, 2.0, 2.0, restarts=4, steps=50, seed=1)
    assert _estimate.value >= math.sqrt(2.0) - 1e-9


def test_opnorm_lower_dense_svd():
    _grid = field_service.make_grid(n=16, length=2 * math.pi)
    _b = field_service.random_band_limited(_grid, band=3, seed=1, mean_zero=False)
    _matrix = _dense_matrix(_grid, lambda _v: operators_service.commutator(_b, _v))
    _sigma = float(np.linalg.svd(_matrix, compute_uv=False)[0])

    _estimate = norms_service.opnorm_lower(_b, 2.0, 2.0, restarts=50, steps=100, rel_tol=1e-9)
    assert _estimate.value <= _sigma * (1 + 1e-10)
    assert _estimate.value >= 0.98 * _sigma
    assert _estimate.restarts == 50
    assert len(_estimate.history) == 50
    assert all(_a <= _b for _a, _b in zip(_estimate.history[:-1], _estimate.history[1:]))

    _ratio = field_service.lp_norm(
        operators_service.commutator(_b, _estimate.witness_v), 2.0
    ) / field_service.lp_norm(_estimate.witness_v, 2.0)
    assert _ratio == pytest.approx(_estimate.value, rel=1e-12)


def test_opnorm_lower_deterministic(torus):
    _b = field_service.random_band_limited(torus, seed=2, mean_zero=False)
    _first = norms_service.opnorm_lower(_b, 4.0, 2.0, restarts=3, steps=5, seed=11)
    _second = norms_service.opnorm_lower(_b, 4.0, 2.0, restarts=3, steps=5, seed=11)
    assert _first.value == _second.value
    assert _first.history == _second.history

    with pytest.raises(ExponentMismatchError):
        norms_service.opnorm_lower(_b, 1.0, 2.0)


def test_opnorm_upper_split(torus):
    assert norms_service.opnorm_upper_split(field_service.zeros(torus), 4.0, 2.0, 4.0) == 0.0

    _gauss = _symbol(torus, kind="lr_bump", center=torus.center)
    with pytest.raises(ExponentMismatchError):
        norms_service.opnorm_upper_split(_gauss, 2.0, 2.0, 4.0)

    with pytest.raises(ExponentMismatchError):
        norms_service.opnorm_upper_split(_gauss, 4.0, 2.0, 3.0)

    _envelope = norms_service.upper_envelope(_gauss, 4.0, 2.0, 4.0)
    assert _envelope.c_p >= 1.575 * (4.0 - 1.0)
    assert _envelope.value == pytest.approx(_envelope.b_norm * (_envelope.c_p + _envelope.c_q))

    for _seed in range(20):
        _lower = norms_service.opnorm_lower(_gauss, 4.0, 2.0, restarts=1, steps=10, seed=_seed)
        assert _lower.value <= _envelope.value


@given(
    seed=st.integers(min_value=0, max_value=2**31),
    alpha=st.sampled_from([0.25, 0.5, 1.0]),
)
def test_fractional_majorant_dominates_commutator(seed: int, alpha: float):
    _grid = _bounded(16, 1.0)
    _b = field_service.random_band_limited(_grid, band=3, seed=seed, mean_zero=False)
    _f = field_service.random_band_limited(_grid, band=3, seed=seed + 1)

    _lhs = np.abs(operators_service.commutator(_b, _f, backend=BackendEnum.quadrature_direct).samples)
    _seminorm = norms_service.holder_seminorm(_b, alpha, max_points=_grid.n**2)
    _rhs = _seminorm / math.pi * norms_service.fractional_majorant(_f, alpha).samples.real
    assert np.all(_lhs <= _rhs * (1 + 1e-10) + 1e-14)


def test_fractional_majorant_brute_force(small_square):
    _f = field_service.random_band_limited(small_square, band=2, seed=5)
    _z = small_square.nodes().ravel()
    _dist = np.abs(_z[:, None] - _z[None, :])
    _weights = np.zeros_like(_dist)
    _mask = 0.0 < _dist
    _weights[_mask] = _dist[_mask] ** (0.5 - 2.0)
    _expected = small_square.cell_area * (_weights @ np.abs(_f.samples.ravel()))

    _out = norms_service.fractional_majorant(_f, 0.5).samples.real.ravel()
    assert np.max(np.abs(_out - _expected)) <= 1e-10 * np.max(_expected)

    with pytest.raises(GridSpecError):
        norms_service.fractional_majorant(field_service.zeros(field_service.make_grid(n=8, length=1.0)), 0.5)
