"""Analytic initial data: centered and modulated Gaussians.

Each datum can be re-evaluated exactly at any point set, which the scaling
probes use to build ``mu^p u0(mu x)`` without interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence, Tuple

import numpy as np

from .spectral import ComplexField, Grid


@dataclass(frozen=True)
class Gaussian:
    """``A exp(-|x - c|^2 / (2 sigma^2)) exp(i k . x)``."""

    amplitude: complex = 1.0
    sigma: float = 1.0
    center: Tuple[float, ...] = ()
    wavevector: Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def _vec(self, v: Sequence[float], dim: int) -> Tuple[float, ...]:
        if not v:
            return (0.0,) * dim
        if len(v) != dim:
            raise ValueError(f"expected {dim} components, got {len(v)}")
        return tuple(float(c) for c in v)

    def values(self, coords: Sequence[np.ndarray]) -> np.ndarray:
        dim = len(coords)
        c = self._vec(self.center, dim)
        k = self._vec(self.wavevector, dim)
        r2 = sum((x - ci) ** 2 for x, ci in zip(coords, c))
        phase = sum(ki * x for x, ki in zip(coords, k))
        return self.amplitude * np.exp(-r2 / (2 * self.sigma**2)) * np.exp(1j * phase)

    def gradient(self, coords: Sequence[np.ndarray]) -> Tuple[np.ndarray, ...]:
        dim = len(coords)
        c = self._vec(self.center, dim)
        k = self._vec(self.wavevector, dim)
        u = self.values(coords)
        return tuple((-(x - ci) / self.sigma**2 + 1j * ki) * u for x, ci, ki in zip(coords, c, k))

    def sample(self, grid: Grid, time: float = 0.0) -> ComplexField:
        vals = np.broadcast_to(self.values(grid.coords), grid.shape)
        return ComplexField(grid, np.array(vals, dtype=np.complex128), time)

    def rescaled(self, mu: float, power: float) -> "Gaussian":
        """The datum ``mu^power * u(mu x)``, again a Gaussian."""
        return replace(
            self,
            amplitude=self.amplitude * mu**power,
            sigma=self.sigma / mu,
            center=tuple(c / mu for c in self.center),
            wavevector=tuple(k * mu for k in self.wavevector),
        )

    def times(self, c: complex) -> "Gaussian":
        return replace(self, amplitude=self.amplitude * c)


def band_limited(grid: Grid, rng: np.random.Generator, max_mode: int = 8, envelope: float = None) -> ComplexField:
    """Random data with Fourier support in ``|k| <= max_mode`` (per axis), optionally
    multiplied by a Gaussian envelope of width ``envelope`` (which spreads the band slightly)."""
    m = grid.points
    idx = np.fft.fftfreq(m) * m
    band1 = np.abs(idx) <= max_mode
    band = np.ones(grid.shape, dtype=bool)
    for b in np.meshgrid(*([band1] * grid.dim), indexing="ij", sparse=True):
        band = band & b
    coeffs = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * band
    vals = np.fft.ifftn(coeffs) * m**grid.dim
    if envelope is not None:
        vals = vals * np.exp(-grid.radius**2 / (2 * envelope**2))
    return ComplexField(grid, vals)
