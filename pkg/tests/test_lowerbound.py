# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest

from lab.core.constants import BackendEnum
from lab.core.exceptions import BackendGridMismatchError, ExponentMismatchError
from lab.resources.field import service as field_service
from lab.resources.field.schemas import ComplexFieldPM
from lab.resources.operators import service as operators_service
from lab.resources.dyadic import service as dyadic_service
from lab.resources.dyadic.schemas import GridCubePM, DyadicCubePM
from lab.resources.norms import service as norms_service
from lab.resources.norms.schemas import SymbolSpecPM
from lab.resources.lowerbound import service as lowerbound_service
from lab.resources.lowerbound.constants import WITNESS_BOUND


_QUADRATURE = [BackendEnum.quadrature_direct, BackendEnum.quadrature_fft]


def _bounded(n: int, length: float = 1.0):
    _half = length / 2.0
    return field_service.make_grid(n=n, length=length, periodic=False, origin=complex(-_half, -_half))


def _symbol(grid, **kwargs) -> ComplexFieldPM:
    return norms_service.generate_symbol(SymbolSpecPM(**kwargs), grid)


def _random_step(grid, seed: int) -> ComplexFieldPM:
    _rng = np.random.Generator(np.random.PCG64(seed))
    _coarse = _rng.integers(0, 3, size=(4, 4)).astype(np.float64)
    return field_service.make_field(grid, np.kron(_coarse, np.ones((grid.n // 4, grid.n // 4))))


def _linear(grid) -> ComplexFieldPM:
    _x1, _ = grid.coords()
    return field_service.make_field(grid, _x1)


def test_crw_witnesses_linear(small_square):
    _root = dyadic_service.root_cube(small_square)
    _witness = lowerbound_service.crw_witnesses(_linear(small_square), _root)
    assert _witness.lhs == pytest.approx(0.25, rel=1e-14)
    assert abs(_witness.mean) < 1e-15
    assert _witness.bound_const <= WITNESS_BOUND
    assert np.allclose(np.abs(_witness.sigma.samples), 1.0)
    _b = _linear(small_square).samples
    assert np.allclose(_witness.sigma.samples * (_b - _witness.mean), np.abs(_b - _witness.mean))

    for _backend in _QUADRATURE:
        assert lowerbound_service.crw_identity_residual(_linear(small_square), _root, _backend) <= 1e-10


def test_crw_witnesses_full_grid_identity(small_square):
    _b = _random_step(small_square, seed=2)
    _cube = GridCubePM(row0=4, col0=0, cells=8)
    _witness = lowerbound_service.crw_witnesses(_b, _cube, BackendEnum.quadrature_direct)
    _rhs = sum(
        field_service.integrate(
            _gi * operators_service.commutator(_b, _fi, backend=BackendEnum.quadrature_direct)
        )
        for _fi, _gi in zip(_witness.f, _witness.g)
    )
    assert abs(_rhs - _witness.lhs) <= 1e-10 * _witness.lhs

    _outside = np.ones((small_square.n, small_square.n), dtype=bool)
    _outside[_cube.rows, _cube.cols] = False
    for _field in (_witness.sigma, *_witness.f, *_witness.g):
        assert np.all(_field.samples[_outside] == 0.0)


def test_crw_identity_corpus():
    _grid = _bounded(64)
    _corpus = [
        _linear(_grid),
        _random_step(_grid, seed=5),
        _symbol(_grid, kind="holder", alpha=0.5, window=0.45),
        _symbol(_grid, kind="bmo_log", window=0.45),
        _symbol(_grid, kind="lr_bump", scale=0.2),
        field_service.random_band_limited(_grid, band=4, seed=8, mean_zero=False),
    ]
    _root = dyadic_service.root_cube(_grid)
    _cubes = [_root]
    for _ in range(3):
        _cubes = [_child for _cube in _cubes for _child in _cube.children()]
        for _b in _corpus:
            for _cube in _cubes[:: max(len(_cubes) // 8, 1)]:
                _residual = lowerbound_service.crw_identity_residual(_b, _cube)
                assert _residual <= 1e-10


def test_crw_witness_bound():
    _grid = _bounded(32)
    _b = field_service.random_band_limited(_grid, seed=3, mean_zero=False)
    for _cube in dyadic_service.root_cube(_grid).children():
        _witness = lowerbound_service.crw_witnesses(_b, _cube)
        assert _witness.bound_const <= WITNESS_BOUND
        for _fi, _gi in zip(_witness.f, _witness.g):
            assert np.max(np.abs(_fi.samples) + np.abs(_gi.samples)) <= WITNESS_BOUND


def test_crw_constant_and_errors(small_square, torus):
    _constant = field_service.constant(small_square, 4.0 + 1.0j)
    _root = dyadic_service.root_cube(small_square)
    _witness = lowerbound_service.crw_witnesses(_constant, _root)
    assert _witness.lhs == 0.0
    assert lowerbound_service.crw_identity_residual(_constant, _root) == 0.0

    with pytest.raises(BackendGridMismatchError):
        lowerbound_service.crw_witnesses(_constant, _root, BackendEnum.spectral)

    with pytest.raises(BackendGridMismatchError):
        lowerbound_service.crw_witnesses(
            field_service.constant(torus, 1.0), dyadic_service.root_cube(torus)
        )


def test_bmo_lower(square):
    assert lowerbound_service.bmo_lower(field_service.constant(square, 2.0), 2.0).value == 0.0

    _step = _symbol(square, kind="step")
    _lower = lowerbound_service.bmo_lower(_step, 2.0)
    assert 0.0 < _lower.value
    assert _lower.cube is not None
    assert _lower.residual <= 1e-10

    _osc = _lower.value * _lower.witness_factor / (_lower.cube.cells * square.h) ** 2
    assert _osc == pytest.approx(_lower.oscillation)
    assert _lower.oscillation <= 0.5 + 1e-14

    _shifted = lowerbound_service.bmo_lower(_step + 7.0, 2.0)
    assert _shifted.value == pytest.approx(_lower.value, rel=1e-12)

    with pytest.raises(ExponentMismatchError):
        lowerbound_service.bmo_lower(_step, 1.0)


def test_bmo_lower_below_operator_norm(small_square):
    _b = _random_step(small_square, seed=1)
    _lower = lowerbound_service.bmo_lower(_b, 2.0, BackendEnum.quadrature_direct)
    _search = norms_service.opnorm_lower(
        _b, 2.0, 2.0, backend=BackendEnum.quadrature_direct, restarts=4, steps=60, rel_tol=1e-9
    )
    assert _lower.value <= _search.value * 1.02


def test_holder_lower(square):
    assert lowerbound_service.holder_lower(field_service.constant(square, 1.0), 2.0, 4.0).value == 0.0

    with pytest.raises(ExponentMismatchError):
        lowerbound_service.holder_lower(field_service.constant(square, 1.0), 4.0, 2.0)

    with pytest.raises(ExponentMismatchError):
        lowerbound_service.holder_lower(field_service.constant(square, 1.0), 2.0, 2.0)

    _lower = lowerbound_service.holder_lower(_symbol(square, kind="holder", alpha=0.5, window=0.45), 2.0, 8.0)
    assert 0.0 < _lower.value
    assert _lower.alpha == pytest.approx(0.75)


@pytest.mark.slow
def test_holder_lower_refinement():
    ## alpha = 2 (1/p - 1/q) = 0.5 matches the symbol exponent
    _values = [
        lowerbound_service.holder_lower(
            _symbol(_bounded(_n), kind="holder", alpha=0.5, window=0.45), 2.0, 4.0
        ).value
        for _n in (128, 256)
    ]
    assert abs(_values[1] - _values[0]) <= 0.1 * _values[0]


@pytest.mark.slow
def test_holder_lower_divergence():
    ## p = 4/3 and q = 16 give alpha = 2 (3/4 - 1/16) = 1.375 > 1
    _p, _q = 4.0 / 3.0, 16.0
    _alpha = 2.0 * (1.0 / _p - 1.0 / _q)
    _values = [
        lowerbound_service.holder_lower(
            _symbol(_bounded(_n), kind="holder", alpha=0.5, window=0.45), _p, _q
        ).value
        for _n in (128, 256)
    ]
    _slope = math.log2(_values[1] / _values[0])
    assert abs(_slope - (_alpha - 0.5)) <= 0.1


def test_random_signs(square):
    _one = lowerbound_service.random_signs(5, seed=3, samples=1)
    assert _one.shape == (1, 5)
    assert set(np.unique(_one)) <= {-1, 1}

    _first = lowerbound_service.random_signs(8, seed=42, samples=10_000)
    _second = lowerbound_service.random_signs(8, seed=42, samples=10_000)
    assert np.array_equal(_first, _second)
    assert not _first.flags.writeable

    _corr = (_first.astype(np.float64).T @ _first.astype(np.float64)) / _first.shape[0]
    assert np.all(np.diag(_corr) == 1.0)
    assert np.max(np.abs(_corr - np.eye(8))) <= 4.0 / math.sqrt(10_000)

    _family = dyadic_service.sparse_dominate(field_service.random_band_limited(square, seed=1))
    assert lowerbound_service.random_signs(_family, seed=0, samples=3).shape == (3, len(_family))


def test_pipeline_constant(square):
    _report = lowerbound_service.lr_lower_pipeline(field_service.constant(square, 2.0), 4.0, 2.0, samples=4)
    assert _report.lr_local == 0.0
    assert _report.certified_lb == 0.0
    assert _report.target == 0.0
    assert _report.mc_mean == 0.0
    assert _report.r == pytest.approx(4.0)
    assert _report.rows == []


def test_pipeline_errors(square, torus):
    _b = _linear(square)
    with pytest.raises(ExponentMismatchError):
        lowerbound_service.lr_lower_pipeline(_b, 2.0, 4.0)

    with pytest.raises(ExponentMismatchError):
        lowerbound_service.lr_lower_pipeline(_b, 2.0, 2.0)

    with pytest.raises(BackendGridMismatchError):
        lowerbound_service.lr_lower_pipeline(_b, 4.0, 2.0, backend=BackendEnum.spectral)


def test_pipeline_singleton(square):
    _report = lowerbound_service.lr_lower_pipeline(_linear(square), 4.0, 2.0, samples=8, seed=3)
    assert _report.family_size == 1
    assert _report.target == pytest.approx(0.25, rel=1e-12)
    assert _report.mc_mean == pytest.approx(_report.target, rel=1e-10)
    assert _report.mc_stderr <= 1e-12
    assert len(_report.rows) == 8 * 3
    assert _report.dual_residual <= 1e-12
    assert _report.holder_p == pytest.approx(1.0)
    assert 0.0 < _report.certified_lb
    assert _report.k_emp < math.inf


@pytest.mark.slow
def test_pipeline_gaussian():
    _grid = _bounded(64, 4.0)
    _b = _symbol(_grid, kind="lr_bump", scale=0.5)
    _report = lowerbound_service.lr_lower_pipeline(_b, 4.0, 2.0, samples=64, seed=0)
    assert 1 < _report.family_size
    assert abs(_report.mc_mean - _report.target) <= 3.0 * _report.mc_stderr
    assert _report.k_emp <= 100.0
    assert _report.holder_p <= 10.0
    assert _report.holder_q_dual <= 10.0

    _shifted = lowerbound_service.lr_lower_pipeline(_b + 3.0, 4.0, 2.0, samples=64, seed=0)
    assert _shifted.target == pytest.approx(_report.target, rel=1e-10)
    assert _shifted.family_size == _report.family_size


@pytest.mark.slow
def test_pipeline_stderr_rate():
    _grid = _bounded(32, 4.0)
    _b = _symbol(_grid, kind="lr_bump", scale=0.5)
    _ms = [16, 64, 256, 1024]
    _errors = [
        lowerbound_service.lr_lower_pipeline(_b, 4.0, 2.0, samples=_m, seed=1).mc_stderr for _m in _ms
    ]
    _slope = np.polyfit(np.log(_ms), np.log(_errors), 1)[0]
    assert -0.75 <= _slope <= -0.25


def test_pipeline_root_subcube(square):
    _b = field_service.random_band_limited(square, seed=6, mean_zero=False)
    _root = DyadicCubePM(level=1, index=(1, 0), root=dyadic_service.root_cube(square).root)
    _report = lowerbound_service.lr_lower_pipeline(_b, 4.0, 2.0, root=_root, samples=4)
    assert 0.0 < _report.target
    assert _report.dual_residual <= 1e-12
