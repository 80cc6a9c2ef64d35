# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest

from lab.core.constants import BackendEnum
from lab.core.exceptions import BackendGridMismatchError, GridMismatchError, NonZeroMeanError
from lab.resources.field import service as field_service
from lab.resources.field.schemas import ComplexFieldPM, VectorField2PM
from lab.resources.operators import service as operators_service
from lab.resources.operators.schemas import KernelSpecPM


_QUADRATURE = [BackendEnum.quadrature_direct, BackendEnum.quadrature_fft]


def _plane_wave(grid, k1: int, k2: int) -> ComplexFieldPM:
    _x1, _x2 = grid.coords()
    return ComplexFieldPM(grid=grid, samples=np.exp(1j * (k1 * _x1 + k2 * _x2)))


def _random_field(grid, seed: int) -> ComplexFieldPM:
    _rng = np.random.Generator(np.random.PCG64(seed))
    _shape = (grid.n, grid.n)
    return ComplexFieldPM(
        grid=grid, samples=_rng.standard_normal(_shape) + 1j * _rng.standard_normal(_shape)
    )


def _dense_matrix(grid, apply) -> np.ndarray:
    _size = grid.n**2
    _matrix = np.empty((_size, _size), dtype=np.complex128)
    for _k in range(_size):
        _basis = np.zeros(_size, dtype=np.complex128)
        _basis[_k] = 1.0
        _matrix[:, _k] = apply(ComplexFieldPM(grid=grid, samples=_basis)).samples.ravel()
    return _matrix


def _kernel_matrix(grid) -> np.ndarray:
    _z = grid.nodes().ravel()
    _diff = _z[:, None] - _z[None, :]
    _matrix = np.zeros_like(_diff)
    _mask = _diff != 0
    _matrix[_mask] = -1.0 / (math.pi * _diff[_mask] ** 2)
    return grid.cell_area * _matrix


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def test_beurling_plane_waves(torus):
    _w1 = _plane_wave(torus, 1, 0)
    assert np.max(np.abs(operators_service.beurling(_w1).samples - _w1.samples)) < 1e-12

    _w11 = _plane_wave(torus, 1, 1)
    _out = operators_service.beurling(_w11).samples
    assert np.max(np.abs(_out + 1j * _w11.samples)) < 1e-12


def test_beurling_fundamental_relation(torus):
    _h = field_service.random_band_limited(torus, band=8, seed=3)
    _lhs = operators_service.beurling(field_service.d_bar(_h))
    _rhs = field_service.d(_h)
    _grad = math.hypot(
        field_service.lp_norm(field_service.d1(_h), 2.0),
        field_service.lp_norm(field_service.d2(_h), 2.0),
    )
    assert field_service.lp_norm(_lhs - _rhs, 2.0) <= 1e-10 * _grad


def test_beurling_isometry_and_inverse(torus):
    _v = field_service.random_band_limited(torus, band=10, seed=4, decay=0.0)
    _sv = operators_service.beurling(_v)
    _norm = field_service.lp_norm(_v, 2.0)
    assert abs(field_service.lp_norm(_sv, 2.0) - _norm) <= 1e-12 * _norm

    _back = operators_service.beurling_adjoint(_sv)
    assert field_service.lp_norm(_back - _v, 2.0) <= 1e-10 * _norm


def test_beurling_backend_mismatch(torus, square):
    with pytest.raises(BackendGridMismatchError):
        operators_service.beurling(field_service.zeros(square), BackendEnum.spectral)

    for _backend in _QUADRATURE:
        with pytest.raises(BackendGridMismatchError):
            operators_service.beurling(field_service.zeros(torus), _backend)


def test_quadrature_matches_dense_kernel(small_square):
    _matrix = _kernel_matrix(small_square)
    _v = _random_field(small_square, 1)
    _expected = (_matrix @ _v.samples.ravel()).reshape(_v.samples.shape)
    for _backend in _QUADRATURE:
        _out = operators_service.beurling(_v, _backend).samples
        assert _relative(_out, _expected) <= 1e-12


def test_quadrature_backends_agree(square):
    _v = _random_field(square, 2)
    _direct = operators_service.beurling(_v, BackendEnum.quadrature_direct).samples
    _fft = operators_service.beurling(_v, BackendEnum.quadrature_fft).samples
    assert _relative(_fft, _direct) <= 1e-12

    _b = _random_field(square, 3)
    _direct = operators_service.commutator(_b, _v, BackendEnum.quadrature_direct).samples
    _fft = operators_service.commutator(_b, _v, BackendEnum.quadrature_fft).samples
    assert _relative(_fft, _direct) <= 1e-12


def test_adjoint_dense_oracle(small_square):
    _grid = field_service.make_grid(n=16, length=2 * math.pi, periodic=True)
    for _case_grid, _backend in [
        (_grid, BackendEnum.spectral),
        (small_square, BackendEnum.quadrature_direct),
        (small_square, BackendEnum.quadrature_fft),
    ]:
        _forward = _dense_matrix(_case_grid, lambda _f: operators_service.beurling(_f, _backend))
        _adjoint = _dense_matrix(
            _case_grid, lambda _f: operators_service.beurling_adjoint(_f, _backend)
        )
        assert _relative(_adjoint, _forward.conj().T) <= 1e-12


@pytest.mark.parametrize("backend", [BackendEnum.spectral, *_QUADRATURE])
def test_adjoint_duality(backend: BackendEnum, torus, square):
    _grid = torus if backend == BackendEnum.spectral else square
    _phi = _random_field(_grid, 5)
    _psi = _random_field(_grid, 6)
    _lhs = field_service.integrate(_phi * operators_service.beurling_adjoint(_psi, backend).conj())
    _rhs = field_service.integrate(operators_service.beurling(_phi, backend) * _psi.conj())
    _scale = field_service.lp_norm(_phi, 2.0) * field_service.lp_norm(_psi, 2.0)
    assert abs(_lhs - _rhs) <= 1e-12 * _scale


def test_commutator_plane_waves(torus):
    _b = _plane_wave(torus, 1, 0)
    _v = _plane_wave(torus, 0, 1)
    _out = operators_service.commutator(_b, _v).samples
    _expected = complex(-1, 1) * _plane_wave(torus, 1, 1).samples
    assert np.max(np.abs(_out - _expected)) < 1e-12


@pytest.mark.parametrize("backend", [BackendEnum.spectral, *_QUADRATURE])
def test_commutator_constant_symbol_vanishes(backend: BackendEnum, torus, square):
    _grid = torus if backend == BackendEnum.spectral else square
    _b = field_service.constant(_grid, 7.0)
    _out = operators_service.commutator(_b, _random_field(_grid, 8), backend)
    assert np.max(np.abs(_out.samples)) == 0.0


def test_commutator_dense_oracle(small_square):
    _torus = field_service.make_grid(n=16, length=2 * math.pi, periodic=True)
    for _grid, _backend in [
        (_torus, BackendEnum.spectral),
        (small_square, BackendEnum.quadrature_direct),
        (small_square, BackendEnum.quadrature_fft),
    ]:
        _b = _random_field(_grid, 9)
        _v = _random_field(_grid, 10)
        _g = _random_field(_grid, 11)
        _s = _dense_matrix(_grid, lambda _f: operators_service.beurling(_f, _backend))
        _bd = np.diag(_b.samples.ravel())
        _oracle = _bd @ _s - _s @ _bd

        _out = operators_service.commutator(_b, _v, _backend).samples.ravel()
        assert _relative(_out, _oracle @ _v.samples.ravel()) <= 1e-12

        _adj = operators_service.commutator_adjoint(_b, _g, _backend).samples.ravel()
        assert _relative(_adj, _oracle.conj().T @ _g.samples.ravel()) <= 1e-12


def test_commutator_large_offset_symbol(square):
    ## b = 1e6 + 1e-3 g keeps the accuracy of its exactly representable oscillating part
    _v = _random_field(square, 13)
    _large = 1e6 + 1e-3 * _random_field(square, 12)
    _small = ComplexFieldPM(grid=square, samples=_large.samples - 1e6)
    _reference = operators_service.commutator(_small, _v, BackendEnum.quadrature_direct).samples
    assert 0.0 < np.max(np.abs(_reference))
    for _backend in _QUADRATURE:
        _out = operators_service.commutator(_large, _v, _backend).samples
        assert _relative(_out, _reference) <= 1e-10


def test_commutator_grid_mismatch(torus):
    _other = field_service.make_grid(n=16, length=2 * math.pi, periodic=True)
    with pytest.raises(GridMismatchError):
        operators_service.commutator(field_service.zeros(torus), field_service.zeros(_other))


def test_quadrature_disk_indicator_converges():
    _errors = []
    for _n in (32, 128):
        _grid = field_service.make_grid(n=_n, length=4.0, periodic=False, origin=complex(-2, -2))
        _z = _grid.nodes()
        _disk = ComplexFieldPM(grid=_grid, samples=(np.abs(_z) < 1.0).astype(np.float64))
        _out = operators_service.beurling(_disk, BackendEnum.quadrature_fft).samples
        _inner = np.abs(_z) <= 0.5
        _errors.append(float(np.max(np.abs(_out[_inner]))))

    assert _errors[1] < _errors[0]


def test_jacobian_identity_map(square):
    _x1, _x2 = square.coords()
    _u = VectorField2PM(
        u1=ComplexFieldPM(grid=square, samples=_x1), u2=ComplexFieldPM(grid=square, samples=_x2)
    )
    _ju = operators_service.jacobian(_u)
    assert _ju.is_real()
    assert np.max(np.abs(_ju.samples - 1.0)) <= 1e-8


def test_jacobian_diagonal_gradient(torus):
    _x1, _x2 = torus.coords()
    _u = VectorField2PM(
        u1=ComplexFieldPM(grid=torus, samples=np.sin(_x1)),
        u2=ComplexFieldPM(grid=torus, samples=np.sin(_x2)),
    )
    _expected = np.cos(_x1) * np.cos(_x2)
    assert np.max(np.abs(operators_service.jacobian(_u).samples - _expected)) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_jacobian_identity_and_zero_integral(seed: int, torus):
    _h = field_service.random_band_limited(torus, band=6, seed=seed)
    _u = VectorField2PM.from_complex(_h)
    _ju = operators_service.jacobian(_u)

    _grads = [
        field_service.d1(_u.u1),
        field_service.d2(_u.u1),
        field_service.d1(_u.u2),
        field_service.d2(_u.u2),
    ]
    _grad_inf = max(_g.max_abs() for _g in _grads)
    _grad_l2_sq = sum(field_service.lp_norm(_g, 2.0) ** 2 for _g in _grads)

    _jc = operators_service.jacobian_complex(field_service.d_bar(_h))
    assert np.max(np.abs(_ju.samples - _jc.samples)) <= 1e-8 * _grad_inf**2
    assert abs(field_service.integrate(_ju)) <= 1e-10 * _grad_l2_sq


def test_jacobian_complex_examples(torus):
    assert np.max(np.abs(operators_service.jacobian_complex(field_service.zeros(torus)).samples)) == 0.0

    _single = operators_service.jacobian_complex(_plane_wave(torus, 1, 1))
    assert np.max(np.abs(_single.samples)) < 1e-12

    _x1, _x2 = torus.coords()
    _pair = _plane_wave(torus, 1, 0) + _plane_wave(torus, 0, 1)
    _out = operators_service.jacobian_complex(_pair)
    assert np.max(np.abs(_out.samples + 4 * np.cos(_x1 - _x2))) < 1e-12
    assert abs(field_service.integrate(_out)) < 1e-10

    with pytest.raises(NonZeroMeanError):
        operators_service.jacobian_complex(field_service.constant(torus, 1.0))


def test_polarize(torus):
    _one = field_service.constant(torus, 1.0)
    _i = field_service.constant(torus, 1j)
    assert np.max(np.abs(operators_service.polarize(_one, _one).samples - 1.0)) < 1e-15
    assert np.max(np.abs(operators_service.polarize(_one, _i).samples + 1j)) < 1e-15

    _a = _random_field(torus, 12)
    _b = _random_field(torus, 13)
    _residual = np.max(np.abs(operators_service.polarize(_a, _b).samples - _a.samples * np.conj(_b.samples)))
    assert _residual <= 1e-13 * (_a.max_abs() + _b.max_abs()) ** 2


def test_jacobian_pairing_forms_agree(torus):
    _b = field_service.random_band_limited(torus, band=4, seed=14, mean_zero=False)
    _v = field_service.random_band_limited(torus, band=6, seed=15)
    _w = field_service.random_band_limited(torus, band=6, seed=16)
    _pairing = operators_service.jacobian_pairing(_b, _v, _w)
    assert _pairing.residual < 1e-12

    _self = operators_service.jacobian_pairing(_b, _v, _v)
    _ju = operators_service.jacobian_complex(_v)
    assert abs(_self.direct - field_service.integrate(_b * _ju)) < 1e-10 * (
        1 + abs(_self.direct)
    )


def test_kernel_bounds_check():
    _report = operators_service.kernel_bounds_check(trials=200, seed=1)
    assert _report.min_weighted == pytest.approx(1 / math.pi, rel=1e-14)
    assert _report.max_weighted == pytest.approx(1 / math.pi, rel=1e-14)
    assert _report.size_ok and _report.nondegenerate

    _scaled = operators_service.kernel_bounds_check(
        spec=KernelSpecPM(scale=2.0, c_upper=2 / math.pi, c_lower=2 / math.pi), trials=50
    )
    assert _scaled.max_weighted == pytest.approx(2 / math.pi, rel=1e-14)
    assert _scaled.size_ok and _scaled.nondegenerate

    _zero = operators_service.kernel_bounds_check(spec=KernelSpecPM(scale=0.0), trials=10)
    assert _zero.max_weighted == 0.0
    assert not _zero.nondegenerate


@pytest.mark.parametrize("backend", [BackendEnum.spectral, BackendEnum.quadrature_fft])
def test_beurling_benchmark(backend: BackendEnum, benchmark):
    _periodic = backend == BackendEnum.spectral
    _grid = field_service.make_grid(n=256, length=1.0, periodic=_periodic)
    _v = _random_field(_grid, seed=11)

    _sv = benchmark(operators_service.beurling, _v, backend)
    assert _sv.grid == _grid
