# -*- coding: utf-8 -*-

import math

import numpy as np
from pydantic import validate_call, Field
from typing_extensions import Annotated

from lab.config import config
from lab.core.constants import BackendEnum
from lab.core.exceptions import BackendGridMismatchError, GridMismatchError
from lab.logger import logger
from lab.resources.field.schemas import GridSpecPM, ComplexFieldPM, VectorField2PM
from lab.resources.field import service as field_service
from lab.resources.field import utils as field_utils

from .schemas import KernelSpecPM, KernelBoundsReportPM, JacobianPairingPM
from . import utils


_ArbitraryConfig = {"arbitrary_types_allowed": True}


def _beurling_symbol(grid: GridSpecPM) -> np.ndarray:
    """Torus multiplier conj(zeta)/zeta, 0 at zeta = 0."""

    _zeta = field_utils.zeta(grid, False)
    _symbol = np.zeros_like(_zeta)
    _mask = _zeta != 0
    _symbol[_mask] = np.conj(_zeta[_mask]) / _zeta[_mask]
    return _symbol


def check_backend(grid: GridSpecPM, backend: BackendEnum) -> None:
    """Spectral backend needs a torus, quadrature backends need a bounded square.

    Raises:
        BackendGridMismatchError: On any other combination.
    """

    if (backend == BackendEnum.spectral) and (not grid.periodic):
        raise BackendGridMismatchError(
            description="Spectral backend requires a periodic grid (torus)!"
        )

    if backend.is_quadrature and grid.periodic:
        raise BackendGridMismatchError(
            description=f"'{backend.value}' backend requires a bounded (non-periodic) grid!"
        )

    if (backend == BackendEnum.quadrature_direct) and (
        config.lab.quadrature.direct_max_cells < grid.n
    ):
        logger.debug(
            f"Dense quadrature on a {grid.n}x{grid.n} grid is slow, "
            f"'{BackendEnum.quadrature_fft.value}' gives the same values."
        )

    return


def _check_same_grid(a: ComplexFieldPM, b: ComplexFieldPM) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(
            detail={
                "left": a.grid.model_dump(mode="json"),
                "right": b.grid.model_dump(mode="json"),
            }
        )


@validate_call(config=_ArbitraryConfig)
def beurling(v: ComplexFieldPM, backend: BackendEnum = BackendEnum.spectral) -> ComplexFieldPM:
    """Beurling transform S.

    Spectral mode multiplies the Fourier coefficient at zeta = xi1 + i xi2 by conj(zeta)/zeta
    (0 at zeta = 0). Quadrature modes return h^2 * sum_{k != j} K(x_j, x_k) v(x_k) with
    K(x, y) = -1/(pi (x - y)^2).

    Args:
        v       (ComplexFieldPM, required): Input field.
        backend (BackendEnum   , optional): Backend. Defaults to `BackendEnum.spectral`.

    Raises:
        BackendGridMismatchError: If the backend doesn't match the grid type.

    Returns:
        ComplexFieldPM: Sv.
    """

    check_backend(v.grid, backend)
    if backend == BackendEnum.spectral:
        _samples = field_utils.apply_multiplier(v.samples, _beurling_symbol(v.grid))
    else:
        _samples = utils.quadrature_apply(
            v.samples, v.grid.h, direct=(backend == BackendEnum.quadrature_direct)
        )

    return ComplexFieldPM(grid=v.grid, samples=_samples)


@validate_call(config=_ArbitraryConfig)
def beurling_adjoint(
    g: ComplexFieldPM, backend: BackendEnum = BackendEnum.spectral
) -> ComplexFieldPM:
    """Adjoint S* for the pairing integral of phi * conj(psi).

    Args:
        g       (ComplexFieldPM, required): Input field.
        backend (BackendEnum   , optional): Backend. Defaults to `BackendEnum.spectral`.

    Raises:
        BackendGridMismatchError: If the backend doesn't match the grid type.

    Returns:
        ComplexFieldPM: S*g.
    """

    check_backend(g.grid, backend)
    if backend == BackendEnum.spectral:
        _symbol = np.conj(_beurling_symbol(g.grid))
        _samples = field_utils.apply_multiplier(g.samples, _symbol)
    else:
        _samples = utils.quadrature_apply(
            g.samples,
            g.grid.h,
            direct=(backend == BackendEnum.quadrature_direct),
            conjugate=True,
        )

    return ComplexFieldPM(grid=g.grid, samples=_samples)


@validate_call(config=_ArbitraryConfig)
def commutator(
    b: ComplexFieldPM, v: ComplexFieldPM, backend: BackendEnum = BackendEnum.spectral
) -> ComplexFieldPM:
    """Commutator [b,S]v = b Sv - S(bv).

    The pivot sample b[0, 0] is subtracted first, which leaves the commutator unchanged and
    makes it vanish exactly for constant b. The dense quadrature backend uses the combined
    kernel form h^2 * sum_k (b_j - b_k) K(x_j, x_k) v_k; the FFT backend and the spectral one
    use the split form (b - b0) Sv - S((b - b0) v), b0 the pivot, since (b_j - b_k) K is not a
    convolution kernel. Cancellation in the split form scales with the oscillation of b, not
    with its size.

    Args:
        b       (ComplexFieldPM, required): Symbol.
        v       (ComplexFieldPM, required): Input field on the same grid.
        backend (BackendEnum   , optional): Backend. Defaults to `BackendEnum.spectral`.

    Raises:
        GridMismatchError       : If `b` and `v` live on different grids.
        BackendGridMismatchError: If the backend doesn't match the grid type.

    Returns:
        ComplexFieldPM: [b,S]v.
    """

    _check_same_grid(b, v)
    check_backend(v.grid, backend)

    if backend == BackendEnum.spectral:
        _b = b.samples - b.samples[0, 0]
        _symbol = _beurling_symbol(v.grid)
        _samples = _b * field_utils.apply_multiplier(
            v.samples, _symbol
        ) - field_utils.apply_multiplier(_b * v.samples, _symbol)
    else:
        _samples = utils.quadrature_commutator(
            b.samples,
            v.samples,
            v.grid.h,
            direct=(backend == BackendEnum.quadrature_direct),
        )

    return ComplexFieldPM(grid=v.grid, samples=_samples)


@validate_call(config=_ArbitraryConfig)
def commutator_adjoint(
    b: ComplexFieldPM, g: ComplexFieldPM, backend: BackendEnum = BackendEnum.spectral
) -> ComplexFieldPM:
    """Adjoint of the commutator, [b,S]* g = S*(conj(b) g) - conj(b) S*g.

    Args:
        b       (ComplexFieldPM, required): Symbol.
        g       (ComplexFieldPM, required): Input field on the same grid.
        backend (BackendEnum   , optional): Backend. Defaults to `BackendEnum.spectral`.

    Returns:
        ComplexFieldPM: [b,S]* g.
    """

    _check_same_grid(b, g)
    check_backend(g.grid, backend)

    _b_conj = np.conj(b.samples - b.samples[0, 0])
    if backend == BackendEnum.spectral:
        _symbol = np.conj(_beurling_symbol(g.grid))
        _samples = field_utils.apply_multiplier(
            _b_conj * g.samples, _symbol
        ) - _b_conj * field_utils.apply_multiplier(g.samples, _symbol)
    else:
        _samples = -utils.quadrature_commutator(
            _b_conj,
            g.samples,
            g.grid.h,
            direct=(backend == BackendEnum.quadrature_direct),
            conjugate=True,
            pivot=0.0,
        )

    return ComplexFieldPM(grid=g.grid, samples=_samples)


@validate_call(config=_ArbitraryConfig)
def jacobian(u: VectorField2PM) -> ComplexFieldPM:
    """Jacobian determinant d1u1 d2u2 - d2u1 d1u2 (real-valued).

    Args:
        u (VectorField2PM, required): Map u = (u1, u2).

    Returns:
        ComplexFieldPM: Ju with zero imaginary part.
    """

    _grid = u.grid
    _d1u1 = field_utils.partial(u.u1.samples, _grid, axis=1).real
    _d2u1 = field_utils.partial(u.u1.samples, _grid, axis=0).real
    _d1u2 = field_utils.partial(u.u2.samples, _grid, axis=1).real
    _d2u2 = field_utils.partial(u.u2.samples, _grid, axis=0).real
    return ComplexFieldPM(grid=_grid, samples=_d1u1 * _d2u2 - _d2u1 * _d1u2)


@validate_call(config=_ArbitraryConfig)
def jacobian_complex(v: ComplexFieldPM) -> ComplexFieldPM:
    """Complex form of the Jacobian |Sv|^2 - |v|^2 with v = d_bar(u1 + i u2).

    Args:
        v (ComplexFieldPM, required): Mean-zero field on the torus.

    Raises:
        BackendGridMismatchError: If the grid isn't periodic.
        NonZeroMeanError        : If `v` isn't mean-zero.

    Returns:
        ComplexFieldPM: Real-valued |Sv|^2 - |v|^2.
    """

    check_backend(v.grid, BackendEnum.spectral)
    field_service.check_mean_zero(v)

    _sv = beurling(v, BackendEnum.spectral).samples
    return ComplexFieldPM(grid=v.grid, samples=np.abs(_sv) ** 2 - np.abs(v.samples) ** 2)


@validate_call(config=_ArbitraryConfig)
def polarize(a: ComplexFieldPM, b: ComplexFieldPM) -> ComplexFieldPM:
    """Polarization 1/4 * sum over eps in {1, -1, i, -i} of eps |a + eps b|^2, equal to a conj(b)."""

    _check_same_grid(a, b)
    _samples = np.zeros_like(a.samples)
    for _eps in (1.0, -1.0, 1j, -1j):
        _samples = _samples + _eps * np.abs(a.samples + _eps * b.samples) ** 2

    return ComplexFieldPM(grid=a.grid, samples=0.25 * _samples)


@validate_call(config=_ArbitraryConfig)
def jacobian_pairing(b: ComplexFieldPM, v: ComplexFieldPM, w: ComplexFieldPM) -> JacobianPairingPM:
    """Bilinear Jacobian pairing on the torus in its two forms.

    The direct form is the integral of b (Sv conj(Sw) - v conj(w)); with g = conj(Sw) the
    commutator form is the integral of g [b,S]v. They agree for mean-zero `w`; for v = w it is
    the integral of b Ju.

    Args:
        b (ComplexFieldPM, required): Symbol.
        v (ComplexFieldPM, required): Field.
        w (ComplexFieldPM, required): Mean-zero field.

    Returns:
        JacobianPairingPM: Both forms and their relative residual.
    """

    _check_same_grid(b, v)
    _check_same_grid(v, w)
    check_backend(v.grid, BackendEnum.spectral)
    field_service.check_mean_zero(w)

    _sv = beurling(v, BackendEnum.spectral)
    _sw = beurling(w, BackendEnum.spectral)
    _direct = field_service.integrate(b * (_sv * _sw.conj() - v * w.conj()))
    _commutator = field_service.integrate(_sw.conj() * commutator(b, v, BackendEnum.spectral))

    _scale = b.max_abs() * field_service.lp_norm(v, 2.0) * field_service.lp_norm(w, 2.0)
    _residual = 0.0 if _scale == 0.0 else abs(_direct - _commutator) / _scale
    return JacobianPairingPM(direct=_direct, commutator=_commutator, residual=_residual)


@validate_call
def kernel_bounds_check(
    spec: KernelSpecPM = KernelSpecPM(),
    trials: Annotated[int, Field(ge=1)] = 1000,
    seed: int = 0,
) -> KernelBoundsReportPM:
    """Sample random positions y and scales r, take x with |x - y| = r and report the range
    of |K(x, y)| |x - y|^2 against the size and non-degeneracy constants.

    Args:
        spec   (KernelSpecPM, optional): Kernel and claimed constants. Defaults to the Beurling kernel.
        trials (int         , optional): Number of samples. Defaults to 1000.
        seed   (int         , optional): Seed. Defaults to 0.

    Returns:
        KernelBoundsReportPM: Observed min/max and whether both bounds hold.
    """

    _rng = np.random.Generator(np.random.PCG64(seed))
    _y = _rng.uniform(-1.0, 1.0, trials) + 1j * _rng.uniform(-1.0, 1.0, trials)
    _r = 10.0 ** _rng.uniform(-3.0, 3.0, trials)
    _theta = _rng.uniform(0.0, 2.0 * math.pi, trials)
    _x = _y + _r * np.exp(1j * _theta)

    _diff = _x - _y
    _kernel = spec.scale * (-1.0 / (math.pi * _diff**2))
    _weighted = np.abs(_kernel) * np.abs(_diff) ** 2

    _min = float(np.min(_weighted))
    _max = float(np.max(_weighted))
    _rtol = 1e-12
    return KernelBoundsReportPM(
        spec=spec,
        trials=trials,
        seed=seed,
        min_weighted=_min,
        max_weighted=_max,
        size_ok=(_max <= spec.c_upper * (1.0 + _rtol)),
        nondegenerate=(0.0 < _min) and (spec.c_lower * (1.0 - _rtol) <= _min),
    )


__all__ = [
    "check_backend",
    "beurling",
    "beurling_adjoint",
    "commutator",
    "commutator_adjoint",
    "jacobian",
    "jacobian_complex",
    "polarize",
    "jacobian_pairing",
    "kernel_bounds_check",
]
