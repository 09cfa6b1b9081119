"""Quadrature Lebesgue norms, mixed space-time norms and finite Strichartz families."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from .pairs import ExponentPair, default_family, is_admissible
from .rationals import Exponent, as_exponent, as_fraction, fmt, is_inf
from .solver import Trajectory
from .spectral import ComplexField

_TIME_TOL = 1e-12


def _as_real_exponent(p) -> float:
    p = as_exponent(p) if not isinstance(p, float) else p
    return math.inf if is_inf(p) else float(p)


def _lp(absvals: np.ndarray, r: float, cell: float, axes=None) -> np.ndarray:
    """``(sum |u|^r cell)^(1/r)`` along ``axes``, scaled by the max to avoid under/overflow."""
    peak = np.max(absvals, axis=axes, keepdims=True)
    if math.isinf(r):
        return np.squeeze(peak, axis=axes) if axes is not None else float(np.max(absvals))
    safe = np.where(peak > 0, peak, 1.0)
    total = np.sum((absvals / safe) ** r, axis=axes, keepdims=True) * cell
    out = np.where(peak > 0, safe * total ** (1.0 / r), 0.0)
    return np.squeeze(out, axis=axes) if axes is not None else float(out.reshape(()))


def lebesgue_norm(field: ComplexField, r) -> float:
    """Rectangle-rule ``L^r`` norm; ``r = inf`` gives the max norm.

    Raises:
        ValueError: ``r < 1``.
    """
    rr = _as_real_exponent(r)
    if not rr >= 1:
        raise ValueError(f"L^r norm needs r >= 1, got {r!r}")
    return float(_lp(np.abs(field.values), rr, field.grid.cell))


@dataclass(frozen=True)
class NormSpec:
    """``L^q_t L^r_x`` over ``window`` (``None`` means the whole trajectory)."""

    q: Exponent
    r: Exponent
    window: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        for name in ("q", "r"):
            v = getattr(self, name)
            v = v if isinstance(v, float) and math.isinf(v) else as_exponent(v)
            if not is_inf(v) and v < 1:
                raise ValueError(f"{name} must be >= 1, got {fmt(v)}")
            object.__setattr__(self, name, v)
        if self.window is not None:
            t0, t1 = self.window
            if not t0 <= t1:
                raise ValueError(f"window start {t0} exceeds end {t1}")


def spatial_norms(traj: Trajectory, r) -> np.ndarray:
    """``||u(t_j)||_{L^r}`` for every sample."""
    rr = _as_real_exponent(r)
    if not rr >= 1:
        raise ValueError(f"L^r norm needs r >= 1, got {r!r}")
    arr = np.abs(traj.stacked())
    axes = tuple(range(1, arr.ndim))
    return np.asarray(_lp(arr, rr, traj.grid.cell, axes=axes), dtype=float)


def _time_norm(times: np.ndarray, values: np.ndarray, q: float) -> float:
    if math.isinf(q):
        return float(np.max(values))
    if len(times) < 2:
        return 0.0
    peak = float(np.max(values))
    if peak == 0:
        return 0.0
    f = (values / peak) ** q
    integral = float(np.sum(0.5 * (f[1:] + f[:-1]) * np.diff(times)))
    return peak * integral ** (1.0 / q)


def _window_mask(traj: Trajectory, window) -> np.ndarray:
    t = traj.times
    if window is None:
        return np.ones(len(t), dtype=bool)
    t0, t1 = window
    if t0 < t[0] - _TIME_TOL or t1 > t[-1] + _TIME_TOL:
        raise ValueError(f"window [{t0}, {t1}] is not inside the trajectory span [{t[0]}, {t[-1]}]")
    mask = (t >= t0 - _TIME_TOL) & (t <= t1 + _TIME_TOL)
    if not mask.any():
        raise ValueError(f"window [{t0}, {t1}] contains no samples")
    return mask


def mixed_norm(traj: Trajectory, spec: NormSpec) -> float:
    """``|| ||u(t)||_{L^r_x} ||_{L^q_t}``: composite trapezoid in time, max for ``q = inf``.

    Raises:
        ValueError: the window is empty or leaves the trajectory span.
    """
    mask = _window_mask(traj, spec.window)
    sub = Trajectory([s for s, m in zip(traj.samples, mask) if m])
    return _time_norm(sub.times, spatial_norms(sub, spec.r), _as_real_exponent(spec.q))


class FamilyKind(str, enum.Enum):
    SUP = "Sup"
    INF_DUAL = "InfDual"


@dataclass(frozen=True)
class StrichartzFamily:
    """Finite surrogate of ``B(H^s)`` (``Sup``) or ``B'(H^-s)`` (``InfDual``).

    For ``InfDual`` the stored pairs are ``H^-s`` admissible and the norm is
    taken in their Hölder conjugates.
    """

    s: Fraction
    pairs: Tuple[ExponentPair, ...]
    kind: FamilyKind = FamilyKind.SUP

    def __post_init__(self):
        s = as_fraction(self.s)
        kind = FamilyKind(self.kind)
        pairs = tuple(self.pairs)
        if not pairs:
            raise ValueError("a Strichartz family needs at least one pair")
        level = s if kind is FamilyKind.SUP else -s
        for p in pairs:
            if not is_admissible(p.q, p.r, level, p.dim):
                raise ValueError(
                    f"pair (q, r) = ({fmt(p.q)}, {fmt(p.r)}) is not H^{fmt(level)} admissible in dim {p.dim}"
                )
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def default(cls, s, dim: int, kind=FamilyKind.SUP, count: int = 5) -> "StrichartzFamily":
        s = as_fraction(s)
        kind = FamilyKind(kind)
        level = s if kind is FamilyKind.SUP else -s
        return cls(s, tuple(default_family(level, dim, count)), kind)

    def exponents(self) -> List[Tuple[Exponent, Exponent]]:
        """The ``(q, r)`` actually normed: the pairs, or their conjugates for ``InfDual``."""
        if self.kind is FamilyKind.SUP:
            return [(p.q, p.r) for p in self.pairs]
        return [p.conjugate for p in self.pairs]


@dataclass(frozen=True)
class StrichartzValue:
    value: float
    attained: Tuple[Exponent, Exponent]
    values: Tuple[float, ...] = field(repr=False)

    def __float__(self) -> float:
        return self.value


def strichartz_norm(traj: Trajectory, family: StrichartzFamily, window=None) -> StrichartzValue:
    """Max (``Sup``) or min (``InfDual``) of the mixed norms over the family."""
    exps = family.exponents()
    vals = tuple(mixed_norm(traj, NormSpec(q, r, window)) for q, r in exps)
    pick = max if family.kind is FamilyKind.SUP else min
    k = pick(range(len(vals)), key=lambda i: vals[i])
    return StrichartzValue(vals[k], exps[k], vals)


def diagonal_pair(dim: int, s=0) -> ExponentPair:
    """The admissible pair with ``q = r = 2(N+4)/(N-2s)``; at ``s = 2`` this is the ``B(I)`` space."""
    s = as_fraction(s)
    if dim - 2 * s <= 0:
        raise ValueError(f"no diagonal pair at s = {fmt(s)} in dim {dim}")
    q = Fraction(2 * (dim + 4)) / (dim - 2 * s)
    return ExponentPair(q, q, s, dim)


def energy_space_surrogate(dim: int) -> ExponentPair:
    """The ``B(I)`` pair for ``N > 4``; in low dimension the ``s = 0`` diagonal pair stands in."""
    return diagonal_pair(dim, 2 if dim > 4 else 0)
