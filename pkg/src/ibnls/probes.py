"""Numerical harnesses for the identities and estimates behind the well-posedness theory.

Each probe returns a small report dataclass with a ``status`` of ``PASS``,
``FAIL`` or ``INFO`` (exploratory runs that make no claim).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .data import Gaussian, band_limited
from .norms import (
    NormSpec,
    StrichartzFamily,
    energy_space_surrogate,
    lebesgue_norm,
    mixed_norm,
    spatial_norms,
    strichartz_norm,
    _time_norm,
)
from .pairs import PreconditionError, gn_exponent_check, hl_exponent_check
from .rationals import INF, as_fraction, fmt
from .regime import ProblemParams, Regime, critical_index
from .solver import SolverConfig, Trajectory, energy, evolve, free_evolution, h2_norm, mass
from .spectral import (
    ComplexField,
    Grid,
    WeightField,
    edge_amplitude,
    fourier_interpolate,
    fractional_derivative,
    gradient,
    l2_norm,
    sobolev_seminorm,
    spectral_tail,
    weight as make_weight,
)

PASS, FAIL, INFO = "PASS", "FAIL", "INFO"


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


class WrongRegimeError(ValueError):
    """The probe only makes sense in a different criticality regime."""


def _require_resolved(f: ComplexField, what: str, tol: float = 0.05):
    tail, edge = spectral_tail(f), edge_amplitude(f)
    if tail > tol:
        raise PreconditionError(f"{what} is not band-resolved on the grid (spectral tail {tail:.2e})")
    if edge > tol:
        raise PreconditionError(f"{what} does not fit in the box (edge amplitude {edge:.2e})")


def scaling_exponent(params: ProblemParams) -> Fraction:
    """``(4 - b)/alpha``, the amplitude exponent of ``u_mu``."""
    return (4 - params.b) / params.alpha


# ---------------------------------------------------------------------------
# conservation


@dataclass
class ConservationReport:
    times: List[float]
    mass: List[float]
    energy: List[float]
    mass_drift: float
    energy_drift: float


def _drift(values: Sequence[float], floor: float = 0.0) -> float:
    v = np.asarray(values, dtype=float)
    ref = abs(v[0])
    dev = float(np.max(np.abs(v - v[0])))
    return dev / ref if ref > floor else dev


def conservation_probe(
    traj: Trajectory, weight: Optional[WeightField] = None, params: Optional[ProblemParams] = None
) -> ConservationReport:
    """Mass and energy histories and their maximal relative deviation from ``t = 0``.

    Uses the values recorded by :func:`~ibnls.solver.evolve` when present;
    otherwise recomputes them, which needs ``params`` (or ``traj.config``).
    Energy drift falls back to the absolute deviation when ``|E[u0]| < 1e-12``.
    """
    times = [s.time for s in traj.samples]
    if len(traj.mass) == len(traj) and len(traj.energy) == len(traj) and weight is None:
        m, e = list(traj.mass), list(traj.energy)
    else:
        cfg = traj.config
        params = params or (cfg.params if cfg else None)
        if params is None:
            raise ValueError("energy needs problem parameters")
        w = weight or (cfg.weight() if cfg else make_weight(traj.grid, params.b))
        m = [mass(s) for s in traj.samples]
        e = [energy(s, w, params) for s in traj.samples]
    return ConservationReport(times, m, e, _drift(m), _drift(e, 1e-12))


# ---------------------------------------------------------------------------
# scaling


@dataclass(frozen=True)
class ScalingCheckConfig:
    mu: float
    s: Fraction = Fraction(0)
    t_probe: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValueError(f"mu must be positive, got {self.mu!r}")
        object.__setattr__(self, "s", as_fraction(self.s))


def static_scaling_check(datum: Gaussian, grid: Grid, params: ProblemParams, cfg: ScalingCheckConfig) -> float:
    """Relative error of ``||u_{0,mu}||_{H^s} = mu^(s - N/2 + (4-b)/alpha) ||u_0||_{H^s}``.

    ``u_{0,mu}(x) = mu^((4-b)/alpha) u_0(mu x)`` is built by re-evaluating the
    analytic datum, never by interpolation.

    Raises:
        PreconditionError: either scale is not resolved on ``grid``.
    """
    if grid.dim != params.dim:
        raise ValueError("grid and equation dimensions differ")
    p = scaling_exponent(params)
    base = datum.sample(grid)
    scaled = datum.rescaled(cfg.mu, float(p)).sample(grid)
    _require_resolved(base, "u0")
    _require_resolved(scaled, "u0 rescaled")
    s = float(cfg.s)
    ref = sobolev_seminorm(base, s)
    if ref == 0:
        raise PreconditionError("reference seminorm vanishes")
    predicted = cfg.mu ** float(cfg.s - Fraction(params.dim, 2) + p) * ref
    return abs(sobolev_seminorm(scaled, s) - predicted) / ref


@dataclass
class DynamicScalingReport:
    error: float
    base: Trajectory
    scaled: Trajectory


def dynamic_scaling_check(
    datum: Gaussian,
    params: ProblemParams,
    cfg: ScalingCheckConfig,
    solver_cfg: SolverConfig,
    *,
    matched: bool = True,
    scale_weight: float = 1.0,
) -> DynamicScalingReport:
    """Compare the run from ``u_{0,mu}`` at ``t_probe`` with ``mu^p u(mu^4 t_probe, mu x)``.

    The base run uses ``solver_cfg`` up to ``mu^4 t_probe``. With ``matched`` the
    scaled run uses the box ``L/mu`` at the same ``M`` (equal resolution relative
    to the data) and the same ``dt``, so the mismatch measures the time error of
    the base run at steps ``dt`` against ``mu^4 dt``. Otherwise the scaled run
    shares the base grid. Either way the base state is evaluated at ``mu x_j``
    through its trigonometric interpolant, taken as zero outside its box.

    ``scale_weight = 0`` switches the nonlinearity off in both runs.
    """
    grid = solver_cfg.grid
    mu, p = cfg.mu, float(scaling_exponent(params))
    if cfg.t_probe <= 0:
        raise ValueError("t_probe must be positive")
    sgrid = Grid(grid.dim, grid.points, grid.length / mu, grid.offset) if matched else grid
    u0 = datum.sample(grid)
    v0 = datum.rescaled(mu, p).sample(sgrid)
    _require_resolved(u0, "u0")
    _require_resolved(v0, "u0 rescaled")
    base_cfg = replace(solver_cfg, params=params, t_end=mu**4 * cfg.t_probe)
    scaled_cfg = replace(solver_cfg, params=params, grid=sgrid, t_end=cfg.t_probe)
    base = evolve(u0, base_cfg, weight=base_cfg.weight().scaled(scale_weight))
    scaled = evolve(v0, scaled_cfg, weight=scaled_cfg.weight().scaled(scale_weight))
    pts = [mu * sgrid.axis] * grid.dim
    image = mu**p * fourier_interpolate(base.samples[-1], pts)
    inside = np.abs(mu * sgrid.axis) < grid.length / 2
    mask = np.ones(grid.shape, dtype=bool)
    for m in np.meshgrid(*([inside] * grid.dim), indexing="ij", sparse=True):
        mask = mask & m
    image = np.where(mask, image, 0)
    target = scaled.samples[-1].values
    err = np.linalg.norm(target - image) / np.linalg.norm(target)
    return DynamicScalingReport(float(err), base, scaled)


# ---------------------------------------------------------------------------
# pointwise nonlinear estimates


@dataclass
class PointwiseReport:
    alpha: Fraction
    samples: int
    max_ratio: float
    min_ratio: float
    bound: float
    status: str


def _g(z: np.ndarray, alpha: float) -> np.ndarray:
    return np.abs(z) ** alpha * z


def pointwise_estimate_probe(
    alpha, samples: int, rng: Optional[np.random.Generator] = None, radius: float = 10.0
) -> PointwiseReport:
    """Largest ``||z|^a z - |w|^a w| / ((|z|^a + |w|^a)|z - w|)`` over random pairs in a disk.

    One percent of the pairs (at least one) are axis anchors ``(z, 0)``, where the
    ratio is exactly 1. Coincident pairs are skipped.
    """
    a = as_fraction(alpha)
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    rng = rng or np.random.default_rng(0)
    af = float(a)

    def disk(n):
        r = radius * np.sqrt(rng.random(n))
        return r * np.exp(2j * np.pi * rng.random(n))

    n_anchor = max(1, samples // 100)
    z = disk(samples)
    w = disk(samples)
    w[:n_anchor] = 0
    keep = z != w
    z, w = z[keep], w[keep]
    num = np.abs(_g(z, af) - _g(w, af))
    den = (np.abs(z) ** af + np.abs(w) ** af) * np.abs(z - w)
    ratio = num / den
    hi, lo = float(ratio.max()), float(ratio.min())
    bound = af + 1
    ok = 1 - 1e-12 <= hi <= bound * (1 + 1e-12)
    return PointwiseReport(a, int(keep.sum()), hi, lo, bound, _status(ok))


@dataclass
class GradientReport:
    alpha: Fraction
    b: Fraction
    max_ratio: float
    nodes: int
    bound: float
    status: str


def gradient_estimate_probe(
    alpha, b, u: Gaussian, v: Gaussian, grid: Grid, bound: float = 10.0, floor: float = 1e-8
) -> GradientReport:
    """Ratio of ``|grad(F(x,u) - F(x,v))|`` to the right side of the gradient estimate.

    The weight gradient ``-b x |x|^(-b-2)`` is exact; ``grad(|u|^a u - |v|^a v)``
    is spectral. Test-field gradients come from the analytic data. Nodes with
    ``|x| <= h`` or a right side below ``floor`` times its maximum are skipped.

    Raises:
        PreconditionError: ``alpha == 1`` (the case split is ambiguous there) or a
            test field is not resolved.
    """
    a, bb = as_fraction(alpha), as_fraction(b)
    if a == 1:
        raise PreconditionError("alpha = 1 sits on the case boundary of the E term")
    if a <= 0 or bb <= 0:
        raise ValueError("alpha and b must be positive")
    U, V = u.sample(grid), v.sample(grid)
    for name, f in (("u", U), ("v", V)):
        if np.any(f.values) and spectral_tail(f) > 1e-6:
            raise PreconditionError(f"test field {name} is not smooth on the grid")
    af, bf = float(a), float(bb)
    x, r = grid.coords, grid.radius
    uv, vv = U.values, V.values
    fdiff = _g(uv, af) - _g(vv, af)
    w = r ** (-bf)
    grad_f = gradient(U.with_values(fdiff))
    lhs = np.sqrt(sum(np.abs(-bf * xi * r ** (-bf - 2) * fdiff + w * gi) ** 2 for xi, gi in zip(x, grad_f)))

    gu = u.gradient(x)
    gv = v.gradient(x)
    grad_diff = np.sqrt(sum(np.abs(np.broadcast_to(p - q, grid.shape)) ** 2 for p, q in zip(gu, gv)))
    grad_v = np.sqrt(sum(np.abs(np.broadcast_to(q, grid.shape)) ** 2 for q in gv))
    au, av, d = np.abs(uv), np.abs(vv), np.abs(uv - vv)
    rhs = r ** (-bf - 1) * (au**af + av**af) * d + w * au**af * grad_diff
    if af > 1:
        rhs = rhs + w * (au ** (af - 1) + av ** (af - 1)) * grad_v * d
    else:
        rhs = rhs + w * grad_v * d**af

    if not np.any(rhs > 0):
        return GradientReport(a, bb, 0.0, 0, bound, PASS)
    mask = (r > grid.h) & (rhs > floor * rhs.max())
    ratio = float(np.max(lhs[mask] / rhs[mask]))
    return GradientReport(a, bb, ratio, int(mask.sum()), bound, _status(ratio <= bound))


# ---------------------------------------------------------------------------
# Strichartz


@dataclass
class StrichartzProbeReport:
    ratios: List[float]
    attained: List[Tuple]
    minimum: float
    median: float
    maximum: float
    spread: float
    threshold: float
    status: str


def strichartz_probe(
    grid: Grid,
    s,
    trials: int,
    rng: Optional[np.random.Generator] = None,
    *,
    family: Optional[StrichartzFamily] = None,
    t_end: float = 1.0,
    n_times: int = 101,
    max_mode: int = 8,
    threshold: float = 50.0,
) -> StrichartzProbeReport:
    """Empirical constant of the free Strichartz estimate over random data.

    Each datum is band-limited noise (modes ``|k| <= max_mode``) under a random
    Gaussian envelope. The ratio is the family norm of the free evolution on
    ``[0, t_end]`` over ``||f||_{H^s}``; zero data are skipped.
    """
    if trials < 10:
        raise ValueError("need at least 10 trials")
    rng = rng or np.random.default_rng(0)
    s = as_fraction(s)
    fam = family or StrichartzFamily.default(s, grid.dim)
    times = np.linspace(0.0, t_end, n_times)
    ratios, attained = [], []
    for _ in range(trials):
        env = grid.length * rng.uniform(1 / 16, 1 / 6)
        f = band_limited(grid, rng, max_mode, env)
        den = sobolev_seminorm(f, float(s))
        if den == 0:
            continue
        val = strichartz_norm(free_evolution(f, times), fam)
        ratios.append(val.value / den)
        attained.append(val.attained)
    arr = np.array(ratios)
    lo, hi = float(arr.min()), float(arr.max())
    spread = hi / lo
    return StrichartzProbeReport(
        ratios, attained, lo, float(np.median(arr)), hi, spread, threshold, _status(spread <= threshold)
    )


@dataclass
class ScatteringReport:
    times: List[float]
    running_norm: List[float]
    sup_h2: float
    plateau: bool
    status: str = INFO


def scattering_monitor(traj: Trajectory, params: ProblemParams, family: Optional[StrichartzFamily] = None) -> ScatteringReport:
    """Running ``B(H^{s_c})`` surrogate on ``[0, T]`` as ``T`` grows, and ``sup_t ||u||_{H^2}``.

    ``plateau`` means growth over the last quarter of the run is at most 1%.
    This is an indication only; the status is always ``INFO``.

    Raises:
        WrongRegimeError: the parameters are not intercritical.
    """
    crit = critical_index(params)
    if crit.klass is not Regime.INTERCRITICAL:
        raise WrongRegimeError(f"scattering monitor needs intercritical parameters, got {crit.klass.value}")
    fam = family or StrichartzFamily.default(crit.s_c, params.dim)
    t = traj.times
    per_pair = []
    for q, r in fam.exponents():
        sp = spatial_norms(traj, r)
        qf = math.inf if q == INF else float(q)
        per_pair.append([_time_norm(t[: k + 1], sp[: k + 1], qf) for k in range(len(t))])
    running = np.max(np.array(per_pair), axis=0)
    sup_h2 = max(h2_norm(s) for s in traj.samples)
    k = int(np.searchsorted(t, t[0] + 0.75 * (t[-1] - t[0])))
    end, mid = running[-1], running[min(k, len(t) - 1)]
    plateau = bool(end == 0 or (end - mid) <= 0.01 * end)
    return ScatteringReport(list(t), [float(v) for v in running], float(sup_h2), plateau)


# ---------------------------------------------------------------------------
# stability under forcing


@dataclass
class PerturbationConfig:
    """Forcing shape ``e(t)``, initial gap and the ladder of scales applied to both.

    ``M_bound``, ``M_prime``, ``L_bound`` are the a-priori bounds of the
    stability statement, taken as experiment inputs and compared with the
    measured quantities for information only.
    """

    forcing: Callable[[float], np.ndarray]
    initial_gap: Optional[np.ndarray] = None
    ladder: Tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4)
    slope_tolerance: float = 0.2
    M_bound: Optional[float] = None
    M_prime: Optional[float] = None
    L_bound: Optional[float] = None
    eps: float = 1e-1
    tolerances: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.ladder or any(e <= 0 for e in self.ladder):
            raise ValueError("the ladder needs positive scales")


@dataclass
class PerturbationReport:
    ladder: List[float]
    dist_linf_l2: List[float]
    dist_diagonal: List[float]
    slope_linf_l2: float
    slope_diagonal: float
    diagonal_pair: Tuple
    measured: Dict[str, float]
    info: List[str]
    status: str


def _slope(eps: Sequence[float], dist: Sequence[float]) -> float:
    d = np.asarray(dist)
    if len(d) < 2 or np.any(d <= 0):
        return math.nan
    return float(np.polyfit(np.log(eps), np.log(d), 1)[0])


def perturbation_experiment(
    u0: ComplexField, config: SolverConfig, pert: PerturbationConfig, *, weight: Optional[WeightField] = None
) -> PerturbationReport:
    """Distance between the unforced run from ``u0`` and forced runs from ``u0 + eps*gap``.

    For every ``eps`` in the ladder the forced run uses ``eps * e(t)``, applied as
    an explicit increment ``-i eps e dt`` inside the nonlinear substep. The status
    is ``PASS`` when both log-log slopes lie within ``1 +- slope_tolerance``, and
    ``INFO`` when every distance vanishes.
    """
    grid = config.grid
    probe = np.asarray(pert.forcing(0.0))
    if probe.shape != grid.shape:
        raise ValueError(f"forcing shape {probe.shape} does not match grid {grid.shape}")
    gap = np.zeros(grid.shape, complex) if pert.initial_gap is None else np.asarray(pert.initial_gap)
    if gap.shape != grid.shape:
        raise ValueError("initial gap does not match the grid")
    pair = energy_space_surrogate(grid.dim)
    ref = evolve(u0, config, weight=weight)
    d_inf, d_diag = [], []
    sup_tilde = 0.0
    for eps in pert.ladder:
        forced = evolve(
            u0.with_values(u0.values + eps * gap),
            config,
            weight=weight,
            forcing=lambda t, e=eps: e * np.asarray(pert.forcing(t)),
        )
        n = min(len(ref), len(forced))
        diff = Trajectory([forced.samples[k] - ref.samples[k] for k in range(n)])
        d_inf.append(mixed_norm(diff, NormSpec(INF, 2)))
        d_diag.append(mixed_norm(diff, NormSpec(pair.q, pair.r)))
        sup_tilde = max(sup_tilde, max(l2_norm(s) for s in forced.samples))
    s1, s2 = _slope(pert.ladder, d_inf), _slope(pert.ladder, d_diag)
    info = ["the forcing is generic and smooth; its dual Strichartz smallness is not verified"]
    measured = {"sup_l2_tilde": sup_tilde, "l2_gap": float(np.sqrt(np.sum(np.abs(gap) ** 2) * grid.cell))}
    for key, bound, val in (("M_bound", pert.M_bound, sup_tilde), ("M_prime", pert.M_prime, measured["l2_gap"])):
        if bound is not None:
            info.append(f"{key}: supplied {bound!r}, measured {val!r}")
    if all(d == 0 for d in d_inf + d_diag):
        status = INFO
    else:
        tol = pert.slope_tolerance
        status = _status(abs(s1 - 1) <= tol and abs(s2 - 1) <= tol)
    return PerturbationReport(
        list(pert.ladder), d_inf, d_diag, s1, s2, (pair.q, pair.r), measured, info, status
    )


# ---------------------------------------------------------------------------
# Hardy-Littlewood and Gagliardo-Nirenberg on dilated Gaussians

DEFAULT_SIGMAS = (0.25, 0.5, 1.0, 2.0, 4.0)


@dataclass
class FunctionalProbeReport:
    kind: str
    sigmas: List[float]
    lhs: List[float]
    rhs: List[float]
    ratios: List[float]
    sup_ratio: float
    flatness: float
    tolerance: float
    status: str


def _lp_field(f: ComplexField, p) -> float:
    return lebesgue_norm(f, p)


def _gaussians(grid: Grid, sigmas: Sequence[float]) -> List[ComplexField]:
    return [Gaussian(1.0, sig).sample(grid) for sig in sigmas]


def _report(kind: str, sigmas, lhs, rhs, tol) -> FunctionalProbeReport:
    ratios = [a / b for a, b in zip(lhs, rhs)]
    flat = max(ratios) / min(ratios) - 1
    return FunctionalProbeReport(kind, list(sigmas), lhs, rhs, ratios, max(ratios), flat, tol, _status(flat <= tol))


def hl_probe(grid: Grid, p, q, s, rho, sigmas=DEFAULT_SIGMAS, tol: float = 0.05) -> FunctionalProbeReport:
    """``|| |x|^-rho u ||_q`` against ``|| D^s u ||_p`` on dilated Gaussians.

    Raises:
        PreconditionError: the exponents fail the Hardy-Littlewood relation.
    """
    if not hl_exponent_check(p, q, s, rho, grid.dim):
        raise PreconditionError(
            f"Hardy-Littlewood exponents rejected: p={fmt(p)}, q={fmt(q)}, s={fmt(s)}, rho={fmt(rho)}"
        )
    w = grid.radius ** (-float(as_fraction(rho)))
    lhs, rhs = [], []
    for u in _gaussians(grid, sigmas):
        lhs.append(_lp_field(u.with_values(w * u.values), q))
        rhs.append(_lp_field(fractional_derivative(u, float(as_fraction(s))), p))
    return _report("HL", sigmas, lhs, rhs, tol)


def gn_probe(grid: Grid, p, p0, p1, s, s1, theta, sigmas=DEFAULT_SIGMAS, tol: float = 0.05) -> FunctionalProbeReport:
    """``|| D^s u ||_p`` against ``||u||_{p0}^(1-theta) || D^{s1} u ||_{p1}^theta``.

    Raises:
        PreconditionError: the exponents fail the Gagliardo-Nirenberg relation.
    """
    if not gn_exponent_check(p, p0, p1, s, s1, theta, grid.dim):
        raise PreconditionError("Gagliardo-Nirenberg exponents rejected")
    th = float(as_fraction(theta))
    lhs, rhs = [], []
    for u in _gaussians(grid, sigmas):
        lhs.append(_lp_field(fractional_derivative(u, float(as_fraction(s))), p))
        d1 = _lp_field(fractional_derivative(u, float(as_fraction(s1))), p1)
        rhs.append(_lp_field(u, p0) ** (1 - th) * d1**th)
    return _report("GN", sigmas, lhs, rhs, tol)


def hl_gn_function_probe(kind: str, exponents: Dict[str, object], grid: Grid, sigmas=DEFAULT_SIGMAS, tol: float = 0.05):
    """Dispatch to :func:`hl_probe` (``kind='HL'``) or :func:`gn_probe` (``kind='GN'``)."""
    kind = kind.upper()
    if kind == "HL":
        return hl_probe(grid, sigmas=sigmas, tol=tol, **exponents)
    if kind == "GN":
        return gn_probe(grid, sigmas=sigmas, tol=tol, **exponents)
    raise ValueError(f"unknown functional probe {kind!r}; expected HL or GN")
