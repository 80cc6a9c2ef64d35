# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lab.core.exceptions import AllZeroOscillationError, ExponentMismatchError
from lab.resources.field import service as field_service
from lab.resources.field.schemas import ComplexFieldPM
from lab.resources.dyadic import service as dyadic_service
from lab.resources.dyadic import utils as dyadic_utils
from lab.resources.dyadic.schemas import GridCubePM, DyadicCubePM, SparseFamilyPM


def _random_symbol(grid, seed: int) -> ComplexFieldPM:
    _rng = np.random.Generator(np.random.PCG64(seed))
    _shape = (grid.n, grid.n)
    return ComplexFieldPM(
        grid=grid, samples=_rng.standard_normal(_shape) + 1j * _rng.standard_normal(_shape)
    )


def _two_cube_family() -> SparseFamilyPM:
    _grid = field_service.make_grid(n=8, length=1.0, periodic=False)
    _root = dyadic_service.root_cube(_grid)
    _child = DyadicCubePM(level=1, index=(0, 0), root=_root.root)
    _root_mask = np.ones((8, 8), dtype=bool)
    _root_mask[:4, :4] = False
    return SparseFamilyPM(
        grid=_grid,
        root=_root,
        stopping_lambda=2.0,
        cubes=[_root, _child],
        means=[0j, 0j],
        a_q=[1.0, 2.0],
        masks=[_root_mask, np.ones((4, 4), dtype=bool)],
    )


def test_dyadic_cube_tree():
    _root = GridCubePM(row0=0, col0=0, cells=8)
    _cube = DyadicCubePM(level=2, index=(3, 1), root=_root)
    assert _cube.cells == 2
    assert _cube.block == GridCubePM(row0=2, col0=6, cells=2)
    assert _cube.parent().key == (1, 1, 0)
    assert _cube.is_within(_cube.parent())
    assert not _cube.parent().is_within(_cube)

    _children = _cube.children()
    assert len(_children) == 4
    assert all(_child.is_within(_cube) for _child in _children)
    assert sum(_child.cells**2 for _child in _children) == _cube.cells**2
    assert DyadicCubePM(level=3, index=(0, 0), root=_root).children() == []

    with pytest.raises(ValueError):
        DyadicCubePM(level=1, index=(2, 0), root=_root)

    with pytest.raises(ValueError):
        DyadicCubePM(level=4, index=(0, 0), root=_root)

    with pytest.raises(ValueError):
        DyadicCubePM(level=0, index=(0, 0), root=GridCubePM(row0=0, col0=0, cells=6))


def test_mask_runs():
    _mask = np.zeros((4, 4), dtype=bool)
    _mask[0, 1:3] = True
    _mask[1:, :] = True
    _mask[2, 0] = False
    _runs = dyadic_utils.mask_to_runs(_mask)
    assert _runs == [[1, 2], [4, 4], [9, 7]]
    assert np.array_equal(dyadic_utils.runs_to_mask(_runs, 4), _mask)
    assert dyadic_utils.mask_to_runs(np.zeros((2, 2), dtype=bool)) == []


def test_mean_and_oscillation(square):
    _root = dyadic_service.root_cube(square)

    _mean, _a = dyadic_service.mean_and_oscillation(field_service.constant(square, 2 - 1j), _root)
    assert _mean == 2 - 1j
    assert _a == 0.0

    _x1, _ = square.coords()
    _half = field_service.make_field(square, (_x1 < 0.0).astype(np.float64))
    _mean, _a = dyadic_service.mean_and_oscillation(_half, _root)
    assert _mean == pytest.approx(0.5, abs=1e-15)
    assert _a == pytest.approx(0.5, abs=1e-15)

    _mean, _a = dyadic_service.mean_and_oscillation(field_service.make_field(square, _x1), _root)
    assert abs(_mean) < 1e-15
    assert _a == pytest.approx(0.25, abs=1e-14)

    with pytest.raises(ValueError):
        dyadic_service.mean_and_oscillation(
            _half, GridCubePM(row0=20, col0=0, cells=16)
        )


def test_sparse_dominate_degenerate(square):
    _family = dyadic_service.sparse_dominate(field_service.constant(square, 3.0))
    assert len(_family) == 1
    assert _family.a_q == [0.0]
    assert bool(np.all(_family.masks[0]))
    _report = dyadic_service.verify_domination(field_service.constant(square, 3.0), _family)
    assert _report.ok
    assert _report.c_emp == 0.0

    _x1, _ = square.coords()
    _half = field_service.make_field(square, (_x1 < 0.0).astype(np.float64))
    _family = dyadic_service.sparse_dominate(_half)
    assert len(_family) == 1
    assert _family.a_q[0] == pytest.approx(0.5)


def test_sparse_dominate_random():
    _grid = field_service.make_grid(n=64, length=1.0, periodic=False)
    _b = _random_symbol(_grid, seed=7)
    _family = dyadic_service.sparse_dominate(_b)

    _check = dyadic_service.check_sparse(_family)
    assert _check.ok
    assert _check.min_major_fraction >= 0.5
    assert _check.carleson <= 2.0
    assert [_cube.key for _cube in _family.cubes] == sorted(_cube.key for _cube in _family.cubes)

    _report = dyadic_service.verify_domination(_b, _family)
    assert _report.bound == 9.0
    assert _report.ok
    assert _report.c_emp <= 9.0


def test_sparse_dominate_linear_and_spike(square):
    _x1, _ = square.coords()
    _linear = field_service.make_field(square, _x1)
    _report = dyadic_service.verify_domination(_linear, dyadic_service.sparse_dominate(_linear))
    assert _report.ok

    _samples = np.zeros((square.n, square.n))
    _samples[5, 21] = 1.0
    _spike = field_service.make_field(square, _samples)
    _family = dyadic_service.sparse_dominate(_spike)
    assert dyadic_service.verify_domination(_spike, _family).ok
    assert dyadic_service.check_sparse(_family).ok

    _deepest = max(_family.cubes, key=lambda _cube: _cube.level)
    assert _deepest.block.contains(GridCubePM(row0=5, col0=21, cells=1))
    assert _deepest.cells <= 2


def test_sparse_dominate_larger_threshold():
    _grid = field_service.make_grid(n=32, length=1.0, periodic=False)
    _family = dyadic_service.sparse_dominate(_random_symbol(_grid, seed=3), stopping_lambda=4.0)
    assert min(_family.major_fractions()) >= 0.75
    assert dyadic_service.check_sparse(_family).ok


@given(
    seed=st.integers(min_value=0, max_value=2**31),
    scale=st.floats(min_value=1e-3, max_value=1e3),
)
def test_sparse_family_properties(seed: int, scale: float):
    _grid = field_service.make_grid(n=16, length=1.0, periodic=False)
    _b = _random_symbol(_grid, seed) * scale
    _family = dyadic_service.sparse_dominate(_b)
    assert dyadic_service.check_sparse(_family).ok
    assert dyadic_service.verify_domination(_b, _family).ok


def test_family_json(square):
    _b = _random_symbol(square, seed=11)
    _family = dyadic_service.sparse_dominate(_b)
    _json = _family.to_json(include_masks=True)
    assert _json["size"] == len(_family)
    assert _json["root"] == {"row0": 0, "col0": 0, "cells": 32}
    for _entry, _mask in zip(_json["cubes"], _family.masks):
        assert _entry["lambda_Q"] is None
        assert np.array_equal(dyadic_utils.runs_to_mask(_entry["mask_runs"], _mask.shape[0]), _mask)

    assert "mask_runs" not in _family.to_json()["cubes"][0]


def test_sparse_lp_ratio(square):
    _singleton = dyadic_service.sparse_dominate(field_service.constant(square, 1.0))
    assert dyadic_service.sparse_lp_ratio(_singleton, [3.0], 2.0) == 1.0
    assert dyadic_service.sparse_lp_ratio(_singleton, [0.0], 2.0) == 0.0

    with pytest.raises(ValueError):
        dyadic_service.sparse_lp_ratio(_singleton, [1.0, 2.0], 2.0)


@pytest.mark.parametrize("p", [4.0 / 3.0, 2.0, 4.0])
def test_sparse_lp_ratio_bounds(square, p: float):
    _rng = np.random.Generator(np.random.PCG64(5))
    for _seed in range(20):
        _family = dyadic_service.sparse_dominate(_random_symbol(square, seed=100 + _seed))
        _lambdas = list(_rng.uniform(0.0, 1.0, size=len(_family)))
        _ratio = dyadic_service.sparse_lp_ratio(_family, _lambdas, p)
        assert 2.0 ** (-1.0 / p) - 1e-12 <= _ratio <= 10.0


def test_dual_weights_two_cubes():
    _weights = dyadic_service.dual_weights(_two_cube_family(), 4.0)
    assert _weights.big_a == pytest.approx(5.0, rel=1e-14)
    assert _weights.lambdas[0] == pytest.approx(5.0 ** (-0.75), rel=1e-14)
    assert _weights.lambdas[1] == pytest.approx(8.0 * 5.0 ** (-0.75), rel=1e-14)
    assert _weights.normalization_residual <= 1e-12
    assert _weights.pairing_residual <= 1e-12


def test_dual_weights_singleton_and_errors(square):
    _family = _two_cube_family()
    _single = SparseFamilyPM(
        grid=_family.grid,
        root=_family.root,
        stopping_lambda=2.0,
        cubes=[_family.root],
        means=[0j],
        a_q=[1.0],
        masks=[np.ones((8, 8), dtype=bool)],
    )
    _weights = dyadic_service.dual_weights(_single, 3.0)
    assert _weights.lambdas == [pytest.approx(1.0, rel=1e-15)]
    assert _weights.normalization_residual <= 1e-15

    _constant = dyadic_service.sparse_dominate(field_service.constant(square, 1.0))
    with pytest.raises(AllZeroOscillationError):
        dyadic_service.dual_weights(_constant, 2.0)

    with pytest.raises(ExponentMismatchError):
        dyadic_service.dual_weights(_family, 1.0)


@pytest.mark.parametrize("r", [1.5, 2.0, 4.0, 8.0])
def test_dual_weights_random(square, r: float):
    _family = dyadic_service.sparse_dominate(_random_symbol(square, seed=21))
    _weights = dyadic_service.dual_weights(_family, r)
    assert _weights.normalization_residual <= 1e-12
    assert _weights.pairing_residual <= 1e-12
    assert _family.with_lambdas(_weights.lambdas).to_json()["cubes"][0]["lambda_Q"] is not None


def test_centered_ladder(square):
    _ladder = dyadic_service.centered_ladder(square)
    assert [_cube.cells for _cube in _ladder] == [32, 16, 8, 4, 2]
    assert all(_outer.contains(_inner) for _outer, _inner in zip(_ladder[:-1], _ladder[1:]))
    assert all(_cube.center(square) == 0j for _cube in _ladder)


def test_mean_limit_constant():
    _grid = field_service.make_grid(n=64, length=20.0, periodic=False, origin=complex(-10, -10))
    _x1, _x2 = _grid.coords()
    _bump = np.exp(-(_x1**2 + _x2**2))

    _report = dyadic_service.mean_limit_constant(field_service.make_field(_grid, _bump))
    assert abs(_report.constant) <= math.pi / 20.0**2
    assert len(_report.increments) == len(_report.ladder) - 1

    _report = dyadic_service.mean_limit_constant(field_service.make_field(_grid, _bump + 3.0))
    assert abs(_report.constant - 3.0) <= math.pi / 20.0**2

    _report = dyadic_service.mean_limit_constant(field_service.make_field(_grid, _x1))
    assert _report.constant == 0j


def test_mean_limit_constant_ladders(square):
    _b = field_service.constant(square, 2.0)
    _single = [GridCubePM(row0=0, col0=0, cells=32)]
    assert dyadic_service.mean_limit_constant(_b, _single).constant == 2.0

    with pytest.raises(ValueError):
        dyadic_service.mean_limit_constant(_b, [])

    with pytest.raises(ValueError):
        dyadic_service.mean_limit_constant(
            _b, [GridCubePM(row0=0, col0=0, cells=8), GridCubePM(row0=0, col0=0, cells=16)]
        )
