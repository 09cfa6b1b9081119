"""Periodic-box discretization, Fourier multipliers and the singular weight.

The box is ``[-L/2, L/2)^dim`` sampled at ``M`` points per axis. With the
default half-cell offset the nodes sit at ``-L/2 + (j + 1/2) h`` so none of
them is the origin, and ``|x|^-b`` can be sampled without regularization.

Transforms are unnormalized ``numpy.fft``; norms apply the quadrature
weights so that ``s = 0`` Sobolev seminorms coincide with the rectangle-rule
``L^2`` norm.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np

from .rationals import as_fraction

MAGIC = b"IBNL"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIII")
_FLOATS = struct.Struct("<dd")


class SingularityError(ValueError):
    """The unregularized weight was requested on a grid containing the origin."""


@dataclass(frozen=True)
class Grid:
    dim: int
    points: int
    length: float
    offset: bool = True

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"full grids support dim 1..3, got {self.dim}")
        m = self.points
        if not isinstance(m, int) or m < 2 or m & (m - 1):
            raise ValueError(f"points per axis must be a power of two, got {m!r}")
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValueError(f"box length must be positive, got {self.length!r}")
        object.__setattr__(self, "length", float(self.length))

    @property
    def h(self) -> float:
        return self.length / self.points

    @property
    def cell(self) -> float:
        return self.h ** self.dim

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points,) * self.dim

    @cached_property
    def axis(self) -> np.ndarray:
        j = np.arange(self.points, dtype=float)
        shift = 0.5 if self.offset else 0.0
        return -self.length / 2 + (j + shift) * self.h

    @cached_property
    def coords(self) -> Tuple[np.ndarray, ...]:
        """Broadcastable per-axis coordinates (``ij`` indexing, sparse)."""
        return tuple(np.meshgrid(*([self.axis] * self.dim), indexing="ij", sparse=True))

    @cached_property
    def radius(self) -> np.ndarray:
        r2 = sum(c**2 for c in self.coords)
        return np.sqrt(np.broadcast_to(r2, self.shape))

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers ``2 pi k / L`` in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.points, d=self.h)

    @cached_property
    def kvec(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.wavenumbers] * self.dim), indexing="ij", sparse=True))

    @cached_property
    def xi2(self) -> np.ndarray:
        return np.broadcast_to(sum(k**2 for k in self.kvec), self.shape)

    @cached_property
    def symbol(self) -> np.ndarray:
        """``|xi|^4``, the symbol of the biharmonic operator."""
        return self.xi2**2

    def boundary_mask(self) -> np.ndarray:
        """Nodes within one cell of the box boundary."""
        edge = np.zeros(self.points, dtype=bool)
        edge[[0, -1]] = True
        masks = np.meshgrid(*([edge] * self.dim), indexing="ij", sparse=True)
        out = np.zeros(self.shape, dtype=bool)
        for m in masks:
            out = out | m
        return out


@dataclass(frozen=True, eq=False)
class ComplexField:
    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise FloatingPointError("field contains NaN or Inf")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "time", float(self.time))

    def with_values(self, values: np.ndarray, time: float = None) -> "ComplexField":
        return ComplexField(self.grid, values, self.time if time is None else time)

    def scaled(self, c: complex) -> "ComplexField":
        return self.with_values(c * self.values)

    def __sub__(self, other: "ComplexField") -> "ComplexField":
        return self.with_values(self.values - other.values)

    @classmethod
    def zeros(cls, grid: Grid, time: float = 0.0) -> "ComplexField":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128), time)


@dataclass(frozen=True, eq=False)
class WeightField:
    grid: Grid
    b: Fraction
    delta: float
    values: np.ndarray = field(repr=False)

    def scaled(self, c: float) -> "WeightField":
        """The weight times ``c``; ``c = 0`` switches the nonlinearity off."""
        vals = c * self.values
        vals.setflags(write=False)
        return WeightField(self.grid, self.b, self.delta, vals)


def fft(values: np.ndarray) -> np.ndarray:
    return np.fft.fftn(values)


def ifft(values: np.ndarray) -> np.ndarray:
    return np.fft.ifftn(values)


def propagator_symbol(grid: Grid, t: float) -> np.ndarray:
    return np.exp(1j * t * grid.symbol)


def free_propagator(field: ComplexField, t: float) -> ComplexField:
    """Exact linear flow ``e^{it Delta^2}``: multiply by ``exp(i t |xi|^4)``."""
    if not math.isfinite(t):
        raise ValueError(f"propagation time must be finite, got {t!r}")
    if t == 0:
        return field
    out = ifft(propagator_symbol(field.grid, t) * fft(field.values))
    return ComplexField(field.grid, out, field.time + t)


def l2_norm(field: ComplexField) -> float:
    return float(np.sqrt(np.sum(np.abs(field.values) ** 2) * field.grid.cell))


def _plancherel(grid: Grid, uhat: np.ndarray, multiplier2: np.ndarray) -> float:
    n = grid.points**grid.dim
    return float(np.sqrt(np.sum(multiplier2 * np.abs(uhat) ** 2) * grid.cell / n))


def sobolev_seminorm(field: ComplexField, s: float) -> float:
    """Homogeneous ``H^s`` seminorm ``|| |xi|^s u_hat ||`` with discrete Plancherel weights.

    The zero mode carries weight ``0^s`` (``0`` for ``s > 0``, ``1`` for ``s = 0``).

    Raises:
        ValueError: for ``s < 0``.
    """
    s = float(s)
    if s < 0:
        raise ValueError("negative Sobolev index is not supported")
    grid = field.grid
    if s == 0:
        mult = np.ones(grid.shape)
    else:
        mult = grid.xi2**s
    return _plancherel(grid, fft(field.values), mult)


def sobolev_norm(field: ComplexField, s: float) -> float:
    """Inhomogeneous norm ``|| (1 + |xi|^2)^{s/2} u_hat ||``."""
    grid = field.grid
    return _plancherel(grid, fft(field.values), (1 + grid.xi2) ** float(s))


def fractional_derivative(field: ComplexField, s: float) -> ComplexField:
    """``D^s u`` with symbol ``|xi|^s`` (zero mode dropped for ``s > 0``)."""
    s = float(s)
    if s < 0:
        raise ValueError("negative Sobolev index is not supported")
    if s == 0:
        return field
    return field.with_values(ifft(field.grid.xi2 ** (s / 2) * fft(field.values)))


def gradient(field: ComplexField) -> Tuple[np.ndarray, ...]:
    """Spectral partial derivatives, one array per axis."""
    uhat = fft(field.values)
    return tuple(ifft(1j * k * uhat) for k in field.grid.kvec)


def spectral_tail(field: ComplexField, fraction: float = 0.8) -> float:
    """Largest ``|u_hat|`` beyond ``fraction`` of the Nyquist index on any axis, relative to the peak."""
    uhat = np.abs(fft(field.values))
    peak = uhat.max()
    if peak == 0:
        return 0.0
    idx = np.abs(np.fft.fftfreq(field.grid.points) * field.grid.points)
    high1 = idx > fraction * field.grid.points / 2
    high = np.zeros(field.grid.shape, dtype=bool)
    for m in np.meshgrid(*([high1] * field.grid.dim), indexing="ij", sparse=True):
        high = high | m
    return float(uhat[high].max() / peak)


def edge_amplitude(field: ComplexField) -> float:
    """Largest ``|u|`` on the boundary layer relative to the peak."""
    a = np.abs(field.values)
    peak = a.max()
    return 0.0 if peak == 0 else float(a[field.grid.boundary_mask()].max() / peak)


def weight(grid: Grid, b, delta: float = 0.0) -> WeightField:
    """Sample ``(|x|^2 + delta^2)^{-b/2}`` on the fundamental cell (no periodization).

    Raises:
        SingularityError: ``delta == 0`` and a node sits at the origin.
    """
    b = as_fraction(b)
    if b <= 0:
        raise ValueError("b must be positive")
    if delta < 0 or not math.isfinite(delta):
        raise ValueError("delta must be a finite nonnegative number")
    r = grid.radius
    if delta == 0 and np.any(r == 0):
        raise SingularityError("a grid node sits at the origin; use the half-cell offset or delta > 0")
    vals = (r**2 + delta**2) ** (-float(b) / 2)
    vals.setflags(write=False)
    return WeightField(grid, b, float(delta), vals)


def boundary_mass_fraction(field: ComplexField) -> float:
    dens = np.abs(field.values) ** 2
    total = dens.sum()
    if total == 0:
        return 0.0
    return float(dens[field.grid.boundary_mask()].sum() / total)


def dealias(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Zero every mode with ``|k| > M/3`` along any axis (2/3 rule)."""
    k = np.abs(np.fft.fftfreq(grid.points) * grid.points)
    keep1 = k <= grid.points / 3
    keep = np.ones(grid.shape, dtype=bool)
    for m in np.meshgrid(*([keep1] * grid.dim), indexing="ij", sparse=True):
        keep = keep & m
    return ifft(fft(values) * keep)


def fourier_interpolate(field: ComplexField, axes: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate the trigonometric interpolant of ``field`` on a tensor grid.

    ``axes`` gives one 1-D coordinate array per dimension. Points outside the
    box are taken periodically.
    """
    grid = field.grid
    if len(axes) != grid.dim:
        raise ValueError("need one coordinate array per dimension")
    coeffs = fft(field.values) / grid.points**grid.dim
    k = grid.wavenumbers
    x0 = grid.axis[0]
    out = coeffs
    for ax, pts in enumerate(axes):
        basis = np.exp(1j * np.outer(np.asarray(pts, dtype=float) - x0, k))
        out = np.moveaxis(np.tensordot(basis, out, axes=([1], [ax])), 0, ax)
    return out


# ---------------------------------------------------------------------------
# binary field format


def write_field(path: Union[str, Path], field: ComplexField) -> None:
    """Write ``IBNL`` header, box length, time, then little-endian complex128 values (row-major)."""
    g = field.grid
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, g.dim, g.points))
        fh.write(_FLOATS.pack(g.length, field.time))
        fh.write(np.ascontiguousarray(field.values, dtype="<c16").tobytes(order="C"))


def read_field(path: Union[str, Path]) -> ComplexField:
    """Inverse of :func:`write_field`. The half-cell offset is assumed.

    Raises:
        ValueError: bad magic, unsupported version, or truncated payload.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size + _FLOATS.size:
        raise ValueError(f"{path}: file too short for header")
    magic, version, dim, m = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    length, time = _FLOATS.unpack_from(data, _HEADER.size)
    grid = Grid(dim, m, length)
    start = _HEADER.size + _FLOATS.size
    expected = m**dim * 16
    if len(data) - start != expected:
        raise ValueError(f"{path}: expected {expected} payload bytes, found {len(data) - start}")
    vals = np.frombuffer(data, dtype="<c16", offset=start).reshape(grid.shape).astype(np.complex128)
    return ComplexField(grid, vals, time)
