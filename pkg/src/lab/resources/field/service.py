# -*- coding: utf-8 -*-

import csv
import math
from typing import Optional, Union

import numpy as np
from pydantic import validate_call, Field, ValidationError
from typing_extensions import Annotated

from lab.config import config
from lab.core.exceptions import (
    GridSpecError,
    BackendGridMismatchError,
    ExponentMismatchError,
    NonZeroMeanError,
)
from lab.core import utils as core_utils
from lab.logger import logger

from .schemas import GridSpecPM, ComplexFieldPM, VectorField2PM, ExponentTriplePM
from .constants import (
    MIN_GRID_N,
    MAX_GRID_N,
    FIELD_CSV_HEADER,
    FIELD_CSV_COLUMNS,
    FIELD_CSV_FLOAT_FORMAT,
)
from . import utils


_ArbitraryConfig = {"arbitrary_types_allowed": True}


@validate_call
def make_grid(
    n: int, length: float, periodic: bool = True, origin: complex = 0j
) -> GridSpecPM:
    """Create a validated sampling grid.

    Args:
        n        (int    , required): Samples per axis, power of two in [8, 4096].
        length   (float  , required): Side length L, positive.
        periodic (bool   , optional): Torus or bounded square. Defaults to True.
        origin   (complex, optional): Lower-left corner. Defaults to 0.

    Raises:
        GridSpecError: If `n` is not an admissible power of two or `length` is not positive.

    Returns:
        GridSpecPM: Grid specification.
    """

    if (not core_utils.validator.is_power_of_two(n)) or (not (MIN_GRID_N <= n <= MAX_GRID_N)):
        raise GridSpecError(
            description=f"Grid size n must be a power of two in [{MIN_GRID_N}, {MAX_GRID_N}], got: {n}!"
        )

    if (not math.isfinite(length)) or (length <= 0):
        raise GridSpecError(description=f"Grid length must be positive, got: {length}!")

    try:
        _grid = GridSpecPM(n=n, length=length, periodic=periodic, origin=origin)
    except ValidationError as err:
        raise GridSpecError(description=str(err))

    return _grid


@validate_call(config=_ArbitraryConfig)
def make_field(grid: GridSpecPM, samples: np.ndarray) -> ComplexFieldPM:
    return ComplexFieldPM(grid=grid, samples=samples)


@validate_call(config=_ArbitraryConfig)
def zeros(grid: GridSpecPM) -> ComplexFieldPM:
    return ComplexFieldPM(grid=grid, samples=np.zeros((grid.n, grid.n), dtype=np.complex128))


@validate_call(config=_ArbitraryConfig)
def constant(grid: GridSpecPM, value: complex) -> ComplexFieldPM:
    return ComplexFieldPM(grid=grid, samples=np.full((grid.n, grid.n), value, dtype=np.complex128))


@validate_call(config=_ArbitraryConfig)
def integrate(f: ComplexFieldPM) -> complex:
    """Riemann sum h^2 * sum of samples."""

    return complex(f.grid.cell_area * np.sum(f.samples))


@validate_call(config=_ArbitraryConfig)
def lp_norm(f: ComplexFieldPM, p: float) -> float:
    """L^p norm (h^2 * sum |f|^p)^(1/p), or the max norm for `p = inf`.

    Samples are scaled by their maximum before powering.

    Args:
        f (ComplexFieldPM, required): Field.
        p (float         , required): Exponent, p >= 1 or inf.

    Raises:
        ValueError: If `p < 1` or `p` is NaN.

    Returns:
        float: Norm value.
    """

    if math.isnan(p) or (p < 1):
        raise ValueError(f"L^p exponent must be >= 1 or inf, got: {p}!")

    _abs = np.abs(f.samples)
    _max = float(np.max(_abs))
    if math.isinf(p) or (_max == 0.0):
        return _max

    _sum = float(np.sum((_abs / _max) ** p))
    return _max * (f.grid.cell_area * _sum) ** (1.0 / p)


def _require_periodic(f: ComplexFieldPM, operation: str) -> None:
    if not f.grid.periodic:
        raise BackendGridMismatchError(
            description=f"'{operation}' requires a periodic grid (torus)!"
        )


@validate_call(config=_ArbitraryConfig)
def d1(f: ComplexFieldPM) -> ComplexFieldPM:
    """Partial derivative along x1."""

    return ComplexFieldPM(grid=f.grid, samples=utils.partial(f.samples, f.grid, axis=1))


@validate_call(config=_ArbitraryConfig)
def d2(f: ComplexFieldPM) -> ComplexFieldPM:
    """Partial derivative along x2."""

    return ComplexFieldPM(grid=f.grid, samples=utils.partial(f.samples, f.grid, axis=0))


@validate_call(config=_ArbitraryConfig)
def d(h: ComplexFieldPM) -> ComplexFieldPM:
    """Complex derivative 1/2 (d1 - i d2); multiplies a plane wave by (i/2) conj(zeta).

    Args:
        h (ComplexFieldPM, required): Field; spectral on the torus, fourth-order differences otherwise.

    Returns:
        ComplexFieldPM: The derivative.
    """

    if h.grid.periodic:
        _symbol = 0.5j * np.conj(utils.zeta(h.grid, True))
        return ComplexFieldPM(grid=h.grid, samples=utils.apply_multiplier(h.samples, _symbol))

    _d1 = utils.fd_partial(h.samples, h.grid.h, axis=1)
    _d2 = utils.fd_partial(h.samples, h.grid.h, axis=0)
    return ComplexFieldPM(grid=h.grid, samples=0.5 * (_d1 - 1j * _d2))


@validate_call(config=_ArbitraryConfig)
def d_bar(h: ComplexFieldPM) -> ComplexFieldPM:
    """Complex derivative 1/2 (d1 + i d2); multiplies a plane wave by (i/2) zeta.

    Args:
        h (ComplexFieldPM, required): Field; spectral on the torus, fourth-order differences otherwise.

    Returns:
        ComplexFieldPM: The derivative.
    """

    if h.grid.periodic:
        _symbol = 0.5j * utils.zeta(h.grid, True)
        return ComplexFieldPM(grid=h.grid, samples=utils.apply_multiplier(h.samples, _symbol))

    _d1 = utils.fd_partial(h.samples, h.grid.h, axis=1)
    _d2 = utils.fd_partial(h.samples, h.grid.h, axis=0)
    return ComplexFieldPM(grid=h.grid, samples=0.5 * (_d1 + 1j * _d2))


@validate_call(config=_ArbitraryConfig)
def check_mean_zero(v: ComplexFieldPM, tolerance: Optional[float] = None) -> float:
    """Check that the zero Fourier mode of `v` vanishes relative to its L^2 norm.

    Args:
        v         (ComplexFieldPM, required): Field on the torus.
        tolerance (Optional[float], optional): Relative tolerance. Defaults to `config.lab.tolerances.mean_zero`.

    Raises:
        NonZeroMeanError: If |integral of v| / L > tolerance * ||v||_2.

    Returns:
        float: Relative mean |integral of v| / (L ||v||_2), 0 for the zero field.
    """

    if tolerance is None:
        tolerance = config.lab.tolerances.mean_zero

    _norm = lp_norm(v, 2.0)
    if _norm == 0.0:
        return 0.0

    _relative = abs(integrate(v)) / (v.grid.length * _norm)
    if tolerance < _relative:
        raise NonZeroMeanError(
            description=f"Field mean is not zero: relative mean {_relative:.3e} > {tolerance:.1e}!",
            detail={"relative_mean": _relative, "tolerance": tolerance},
        )

    return _relative


@validate_call(config=_ArbitraryConfig)
def solve_dbar(v: ComplexFieldPM) -> ComplexFieldPM:
    """Invert v = d_bar(h) on the torus with the zero-mean gauge.

    Args:
        v (ComplexFieldPM, required): Mean-zero field on a periodic grid.

    Raises:
        BackendGridMismatchError: If the grid is not periodic.
        NonZeroMeanError        : If the zero Fourier mode doesn't vanish.

    Returns:
        ComplexFieldPM: Zero-mean h with d_bar(h) = v.
    """

    _require_periodic(v, "solve_dbar")
    check_mean_zero(v)

    _symbol = 0.5j * utils.zeta(v.grid, True)
    _inverse = np.zeros_like(_symbol)
    _mask = _symbol != 0
    _inverse[_mask] = 1.0 / _symbol[_mask]
    return ComplexFieldPM(grid=v.grid, samples=utils.apply_multiplier(v.samples, _inverse))


def _dual(s: float) -> float:
    if math.isinf(s):
        return 1.0
    return s / (s - 1.0)


@validate_call
def exponents(p: float, q: float) -> ExponentTriplePM:
    """Derive the exponent bookkeeping for a commutator L^p -> L^q.

    Args:
        p (float, required): Domain exponent in (1, inf).
        q (float, required): Target exponent in (1, inf).

    Raises:
        ExponentMismatchError: If `p` or `q` is outside (1, inf).

    Returns:
        ExponentTriplePM: p', q', r, r', p* and alpha.
    """

    for _name, _val in (("p", p), ("q", q)):
        if not core_utils.validator.is_lebesgue_exponent(_val):
            raise ExponentMismatchError(
                description=f"Exponent {_name} must be in (1, inf), got: {_val}!"
            )

    _r: Optional[float] = None
    _r_dual: Optional[float] = None
    _alpha: Optional[float] = None
    if p > q:
        _r = 1.0 / (1.0 / q - 1.0 / p)
        _r_dual = _dual(_r)
    elif p == q:
        _r = math.inf
        _r_dual = 1.0
    else:
        _alpha = 2.0 * (1.0 / p - 1.0 / q)

    _inv_p_star = max(1.0 / p - 0.5, 0.0)
    _p_star = math.inf if _inv_p_star == 0.0 else 1.0 / _inv_p_star

    return ExponentTriplePM(
        p=p,
        q=q,
        p_dual=_dual(p),
        q_dual=_dual(q),
        r=_r,
        r_dual=_r_dual,
        p_star=_p_star,
        alpha=_alpha,
    )


@validate_call
def jacobian_exponents(p: Annotated[float, Field(ge=1, allow_inf_nan=False)]) -> ExponentTriplePM:
    """Map the Jacobian problem exponent p >= 1 to the commutator pair (2p, (2p)').

    Args:
        p (float, required): Exponent of the Jacobian target space L^p.

    Returns:
        ExponentTriplePM: Exponents of [b, S] : L^{2p} -> L^{(2p)'}.
    """

    _two_p = 2.0 * p
    return exponents(p=_two_p, q=_dual(_two_p))


@validate_call(config=_ArbitraryConfig)
def random_band_limited(
    grid: GridSpecPM,
    band: Annotated[int, Field(ge=1)] = 4,
    seed: int = 0,
    mean_zero: bool = True,
    real: bool = False,
    decay: Annotated[float, Field(ge=0)] = 1.0,
) -> ComplexFieldPM:
    """Random trigonometric polynomial with integer wavenumbers |k1|, |k2| <= `band`,
    periodic with period L on the grid's square.

    Args:
        grid      (GridSpecPM, required): Grid to sample on.
        band      (int       , optional): Highest wavenumber per axis. Defaults to 4.
        seed      (int       , optional): Seed of the PCG64 generator. Defaults to 0.
        mean_zero (bool      , optional): Drop the zero mode. Defaults to True.
        real      (bool      , optional): Keep only the real part. Defaults to False.
        decay     (float     , optional): Coefficient decay (1 + |k|^2)^(-decay). Defaults to 1.0.

    Raises:
        ValueError: If `band` reaches the Nyquist wavenumber n/2.

    Returns:
        ComplexFieldPM: Sampled field.
    """

    if grid.n // 2 <= band:
        raise ValueError(f"Band {band} must be below the Nyquist wavenumber {grid.n // 2}!")

    _rng = np.random.Generator(np.random.PCG64(seed))
    _k = np.arange(-band, band + 1)
    _size = (_k.size, _k.size)
    _coeffs = _rng.standard_normal(_size) + 1j * _rng.standard_normal(_size)
    _k1, _k2 = np.meshgrid(_k, _k, indexing="xy")
    _coeffs *= (1.0 + _k1**2 + _k2**2) ** (-decay)
    if mean_zero:
        _coeffs[band, band] = 0.0

    _x1, _x2 = grid.axis()
    _omega = 2.0 * np.pi / grid.length
    _e1 = np.exp(1j * _omega * np.outer(_x1 - grid.origin.real, _k))
    _e2 = np.exp(1j * _omega * np.outer(_x2 - grid.origin.imag, _k))
    _samples = _e2 @ _coeffs @ _e1.T
    if real:
        _samples = _samples.real

    return ComplexFieldPM(grid=grid, samples=_samples)


@validate_call(config=_ArbitraryConfig)
def vector_field(u1: ComplexFieldPM, u2: ComplexFieldPM) -> VectorField2PM:
    return VectorField2PM(u1=u1.real, u2=u2.real)


def _fmt(val: float) -> str:
    return FIELD_CSV_FLOAT_FORMAT % val


@validate_call(config=_ArbitraryConfig)
def save_field_csv(f: ComplexFieldPM, file_path: str) -> None:
    """Write a field file: grid header line, grid values line, `re,im` column line, then
    row-major samples with 17 significant digits.

    Args:
        f         (ComplexFieldPM, required): Field to save.
        file_path (str           , required): Output CSV path.
    """

    logger.debug(f"Saving {f.grid.n}x{f.grid.n} field into '{file_path}'...")
    with open(file_path, "w", encoding="utf-8", newline="") as _file:
        _writer = csv.writer(_file, lineterminator="\n")
        _writer.writerow(FIELD_CSV_HEADER)
        _writer.writerow(
            [
                f.grid.n,
                _fmt(f.grid.length),
                "true" if f.grid.periodic else "false",
                _fmt(f.grid.origin.real),
                _fmt(f.grid.origin.imag),
            ]
        )
        _writer.writerow(FIELD_CSV_COLUMNS)
        for _val in f.samples.ravel(order="C"):
            _writer.writerow([_fmt(_val.real), _fmt(_val.imag)])

    return


@validate_call
def load_field_csv(file_path: str) -> ComplexFieldPM:
    """Read a field file written by `save_field_csv`.

    Args:
        file_path (str, required): Input CSV path.

    Raises:
        ValueError: If the headers don't match the field file format.

    Returns:
        ComplexFieldPM: Loaded field, bit-exact with the saved one.
    """

    with open(file_path, "r", encoding="utf-8", newline="") as _file:
        _reader = csv.reader(_file)
        _header = next(_reader)
        if _header != FIELD_CSV_HEADER:
            raise ValueError(f"Invalid field file header: {_header}!")

        _n, _length, _periodic, _origin_re, _origin_im = next(_reader)
        _grid = make_grid(
            n=int(_n),
            length=float(_length),
            periodic=(_periodic.strip().lower() == "true"),
            origin=complex(float(_origin_re), float(_origin_im)),
        )

        _columns = next(_reader)
        if _columns != FIELD_CSV_COLUMNS:
            raise ValueError(f"Invalid field file columns: {_columns}!")

        _values = np.array(
            [[float(_re), float(_im)] for _re, _im in _reader], dtype=np.float64
        )

    return ComplexFieldPM(grid=_grid, samples=_values[:, 0] + 1j * _values[:, 1])


__all__ = [
    "make_grid",
    "make_field",
    "zeros",
    "constant",
    "integrate",
    "lp_norm",
    "d1",
    "d2",
    "d",
    "d_bar",
    "check_mean_zero",
    "solve_dbar",
    "exponents",
    "jacobian_exponents",
    "random_band_limited",
    "vector_field",
    "save_field_csv",
    "load_field_csv",
]
