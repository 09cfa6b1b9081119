import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ibnls.data import Gaussian
from ibnls.regime import ProblemParams
from ibnls.solver import (
    SolverConfig,
    Trajectory,
    energy,
    evolve,
    free_evolution,
    h2_norm,
    nonlinear_flow,
    picard_iterate,
    strang_step,
)
from ibnls.solver import _power, _power_difference
from ibnls.spectral import ComplexField, Grid, free_propagator, l2_norm, weight

P1 = ProblemParams(1, Fraction(1, 2), 3)
G1 = Grid(1, 256, 40.0)


def cfg(**kw):
    base = dict(params=P1, grid=G1, dt=1e-3, t_end=0.05)
    base.update(kw)
    return SolverConfig(**base)


@pytest.mark.parametrize("dt", [0.0, -1e-3, math.nan])
def test_config_rejects_bad_dt(dt):
    with pytest.raises(ValueError):
        cfg(dt=dt)


def test_config_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        cfg(grid=Grid(2, 16, 4.0))


def test_n_steps_tolerates_float_multiples():
    assert cfg(dt=0.1, t_end=0.3).n_steps == 3


def test_trajectory_requires_increasing_times():
    f = ComplexField.zeros(G1)
    with pytest.raises(ValueError):
        Trajectory([f, f])


def test_nonlinear_flow_zero_dt_and_zero_data():
    w = weight(G1, P1.b)
    u = Gaussian().sample(G1)
    assert nonlinear_flow(u, w, P1, 0.0) is u
    z = ComplexField.zeros(G1)
    assert not np.any(nonlinear_flow(z, w, P1, 0.1).values)


def test_nonlinear_flow_scalar_phase():
    """w = 1, lambda = -1, alpha = 2, |u| = 2, dt = pi/4: factor exp(-i pi)."""
    g = Grid(1, 2, 4.0)  # nodes at +-1, so |x|^-b = 1
    p = ProblemParams(1, 1, 2, -1)
    u = ComplexField(g, np.full(2, 2.0 + 0j))
    out = nonlinear_flow(u, weight(g, 1), p, math.pi / 4)
    np.testing.assert_allclose(out.values, -2.0, atol=1e-14)


def test_strang_without_weight_is_free_flow():
    u = Gaussian(1.0, 1.0, (), (1.0,)).sample(G1)
    w = weight(G1, P1.b).scaled(0)
    out = strang_step(u, w, P1, 0.01)
    np.testing.assert_allclose(out.values, free_propagator(u, 0.01).values, atol=1e-13)


def test_strang_without_dispersion_is_nonlinear_flow():
    u = Gaussian().sample(G1)
    w = weight(G1, P1.b)
    out = strang_step(u, w, P1, 0.01, dispersive=False)
    np.testing.assert_allclose(out.values, nonlinear_flow(u, w, P1, 0.01).values, atol=1e-15)


def test_strang_local_error_is_third_order():
    """||Phi_dt - Phi_{dt/2}^2|| shrinks about 8x when dt halves.

    The grid is coarse so that dt |xi_max|^4 is small and the local error is asymptotic.
    """
    g = Grid(1, 64, 40.0)
    p = ProblemParams(1, 2, 3)
    u = Gaussian(0.8, 1.5).sample(g)
    w = weight(g, 2, delta=0.5)

    def defect(dt):
        one = strang_step(u, w, p, dt)
        two = strang_step(strang_step(u, w, p, dt / 2), w, p, dt / 2)
        return l2_norm(one - two)

    ratio = defect(2.5e-3) / defect(1.25e-3)
    assert 7.5 < ratio < 8.5


def test_zero_data_stays_zero():
    traj = evolve(ComplexField.zeros(G1), cfg())
    assert all(not np.any(s.values) for s in traj.samples)


def test_linear_evolution_matches_free_flow():
    u0 = Gaussian(1.0, 1.0, (), (1.0,)).sample(G1)
    c = cfg(sample_stride=10)
    traj = evolve(u0, c, weight=c.weight().scaled(0))
    ref = free_evolution(u0, traj.times)
    for a, b in zip(traj.samples, ref.samples):
        assert l2_norm(a - b) / l2_norm(b) < 1e-10


def test_mass_is_conserved_to_roundoff():
    traj = evolve(Gaussian().sample(G1), cfg(t_end=0.2, sample_stride=20))
    m = np.array(traj.mass)
    assert np.max(np.abs(m - m[0])) / m[0] < 1e-12


def test_sampling_includes_final_step():
    traj = evolve(Gaussian().sample(G1), cfg(dt=0.01, t_end=0.05, sample_stride=2))
    assert np.allclose(traj.times, [0, 0.02, 0.04, 0.05])
    assert len(traj.mass) == len(traj.energy) == len(traj) == 4


def test_boundary_warning():
    wide = Gaussian(1.0, 8.0).sample(Grid(1, 64, 20.0))
    traj = evolve(wide, SolverConfig(P1, Grid(1, 64, 20.0), 1e-3, 2e-3))
    assert any(w.startswith("boundary") for w in traj.warnings)


def test_blow_up_flag_stops_the_run():
    # both substeps preserve the L2 norm, so the amplitude guard is exercised through forcing
    g = Grid(1, 64, 20.0)
    u0 = Gaussian(1e-3).sample(g)
    traj = evolve(u0, SolverConfig(P1, g, 1e-3, 1.0), forcing=lambda t: np.full(g.shape, 1e7))
    assert traj.blow_up
    assert traj.samples[-1].time < 1.0
    assert any(w.startswith("blow-up") for w in traj.warnings)


def test_forcing_enters_linearly():
    g = Grid(1, 64, 20.0)
    c = SolverConfig(P1, g, 1e-3, 0.01)
    zero_w = c.weight().scaled(0)
    shape = Gaussian(1.0, 2.0).sample(g).values
    traj = evolve(ComplexField.zeros(g), c, weight=zero_w, forcing=lambda t: shape)
    # i u_t + Delta^2 u = e with u(0) = 0 gives u(t) ~ -i t e for small t
    assert l2_norm(traj.samples[-1].with_values(traj.samples[-1].values + 1j * 0.01 * shape)) < 1e-3 * 0.01 * l2_norm(
        traj.samples[-1].with_values(shape)
    )


def test_energy_of_zero_is_zero():
    assert energy(ComplexField.zeros(G1), weight(G1, P1.b), P1) == 0.0


def test_free_energy_is_half_h2_seminorm_squared():
    u = Gaussian().sample(G1)
    e = energy(u, weight(G1, P1.b).scaled(0), P1)
    assert e == pytest.approx(0.5 * (3 * math.sqrt(math.pi) / 4), rel=1e-6)


@settings(max_examples=100)
@given(st.floats(0.1, 4), st.floats(1e-12, 1e-1))
def test_power_difference_is_cancellation_free(alpha, eps):
    rng = np.random.default_rng(int(alpha * 1000))
    u = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    d = eps * (rng.standard_normal(16) + 1j * rng.standard_normal(16))
    fast = _power_difference(u, d, alpha)
    assert np.all(np.isfinite(fast))
    # first-order expansion: |u|^a d + (a/2)|u|^(a-2) 2 Re(conj(u) d) u
    linear = np.abs(u) ** alpha * d + alpha * np.abs(u) ** (alpha - 2) * np.real(np.conj(u) * d) * u
    assert np.max(np.abs(fast - linear)) <= 50 * eps**2 * np.max(np.abs(u)) ** max(alpha - 1, 0) + 1e-15 * np.max(
        np.abs(linear)
    )
    if eps > 1e-6:
        direct = _power(u + d, alpha) - _power(u, alpha)
        np.testing.assert_allclose(fast, direct, rtol=1e-6, atol=1e-14)


def test_power_difference_at_zero_base():
    d = np.array([0.5 + 0.5j, -2.0])
    np.testing.assert_allclose(_power_difference(np.zeros(2, complex), d, 2.0), _power(d, 2.0))


def test_picard_needs_two_iterates():
    with pytest.raises(ValueError):
        picard_iterate(Gaussian().sample(G1), cfg(), 1)


def test_picard_without_weight_is_stationary():
    c = cfg(t_end=0.02)
    rep = picard_iterate(Gaussian().sample(G1), c, 3, weight=c.weight().scaled(0))
    assert rep.distances == [0.0, 0.0]
    assert all(math.isnan(r) for r in rep.contraction_ratios)
    assert rep.converged


def test_picard_small_data_contracts_and_matches_strang():
    g = Grid(1, 512, 40.0)
    c = SolverConfig(P1, g, 1e-3, 0.1)
    u0 = Gaussian().sample(g)
    u0 = u0.scaled(1e-3 / h2_norm(u0))
    rep = picard_iterate(u0, c, 6)
    assert len(rep.iterates) == 6 and len(rep.contraction_ratios) == 4
    assert all(r < 0.5 for r in rep.contraction_ratios)
    ref = evolve(u0, c)
    last = rep.iterates[-1].samples[-1]
    assert l2_norm(last - ref.samples[-1]) / l2_norm(ref.samples[-1]) < 1e-4
