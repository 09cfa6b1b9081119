import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ibnls.data import Gaussian
from ibnls.pairs import PreconditionError
from ibnls.probes import (
    INFO,
    PASS,
    PerturbationConfig,
    ScalingCheckConfig,
    WrongRegimeError,
    conservation_probe,
    dynamic_scaling_check,
    gn_probe,
    gradient_estimate_probe,
    hl_gn_function_probe,
    hl_probe,
    perturbation_experiment,
    pointwise_estimate_probe,
    scaling_exponent,
    scattering_monitor,
    static_scaling_check,
    strichartz_probe,
)
from ibnls.regime import ProblemParams, critical_index
from ibnls.solver import SolverConfig, evolve, free_evolution
from ibnls.spectral import ComplexField, Grid, l2_norm

F = Fraction
P1 = ProblemParams(1, F(1, 2), 3)


# --- conservation -----------------------------------------------------------


def test_linear_run_conserves_mass_and_energy():
    g = Grid(1, 256, 40.0)
    c = SolverConfig(P1, g, 1e-3, 0.2, sample_stride=20)
    traj = evolve(Gaussian().sample(g), c, weight=c.weight().scaled(0))
    rep = conservation_probe(traj, weight=c.weight().scaled(0))
    assert rep.mass_drift <= 1e-12 and rep.energy_drift <= 1e-12


def test_zero_data_energy_is_zero():
    g = Grid(1, 64, 20.0)
    traj = evolve(ComplexField.zeros(g), SolverConfig(P1, g, 1e-3, 0.01))
    rep = conservation_probe(traj)
    assert rep.energy == [0.0] * len(traj) and rep.energy_drift == 0.0


# --- scaling ----------------------------------------------------------------


def test_scaling_exponent():
    assert scaling_exponent(P1) == F(7, 6)


def test_static_scaling_mu_one_is_exact():
    g = Grid(1, 256, 40.0)
    assert static_scaling_check(Gaussian(), g, P1, ScalingCheckConfig(1.0, 2)) == 0.0


def test_static_scaling_at_s2():
    g = Grid(1, 1024, 60.0)
    assert static_scaling_check(Gaussian(), g, P1, ScalingCheckConfig(2.0, 2)) <= 1e-6


def test_static_scaling_at_critical_index():
    p = ProblemParams(1, F(1, 2), 14)
    s_c = critical_index(p).s_c
    assert s_c == F(1, 4)
    datum = Gaussian(1.0, 1.0, (), (6.0,))
    assert static_scaling_check(datum, Grid(1, 1024, 150.0), p, ScalingCheckConfig(2.0, s_c)) <= 1e-6


def test_static_scaling_refuses_unresolved_data():
    with pytest.raises(PreconditionError):
        static_scaling_check(Gaussian(1.0, 10.0), Grid(1, 64, 20.0), P1, ScalingCheckConfig(2.0, 0))


def test_dynamic_scaling_mu_one_linear():
    g = Grid(1, 128, 40.0)
    c = SolverConfig(P1, g, 1e-4, 1e-3)
    rep = dynamic_scaling_check(Gaussian(), P1, ScalingCheckConfig(1.0, 0, 1e-3), c, scale_weight=0.0)
    assert rep.error <= 1e-10


def test_dynamic_scaling_linear_flow_is_exact():
    g = Grid(1, 256, 64.0)
    c = SolverConfig(P1, g, 1e-4, 1e-3)
    rep = dynamic_scaling_check(Gaussian(0.5), P1, ScalingCheckConfig(2.0, 0, 1e-3), c, scale_weight=0.0)
    assert rep.error <= 1e-8


def test_dynamic_scaling_small_data():
    g = Grid(1, 256, 64.0)
    errs = [
        dynamic_scaling_check(Gaussian(0.5), P1, ScalingCheckConfig(2.0, 0, 1e-3), SolverConfig(P1, g, dt, 1e-3)).error
        for dt in (1e-4, 5e-5)
    ]
    assert errs[0] <= 1e-3
    assert errs[1] <= errs[0] / 2


# --- pointwise and gradient estimates ---------------------------------------


def test_pointwise_anchor_ratio_is_one():
    rep = pointwise_estimate_probe(F(1, 2), 1000, np.random.default_rng(0))
    assert rep.min_ratio <= 1 <= rep.max_ratio + 1e-15


@pytest.mark.parametrize("alpha", [F(1, 2), 1, 2, 3])
def test_pointwise_bound(alpha):
    rep = pointwise_estimate_probe(alpha, 100_000, np.random.default_rng(1))
    assert rep.status == PASS
    assert 1 - 1e-12 <= rep.max_ratio <= float(alpha) + 1


def test_pointwise_alpha2_below_three():
    assert pointwise_estimate_probe(2, 100_000, np.random.default_rng(2)).max_ratio <= 3


def test_pointwise_mean_value_bound_by_dense_sweep():
    """|g(z) - g(w)| <= (a+1) max(|z|,|w|)^a |z - w| on a dense real sweep."""
    for a in (0.5, 2.0, 3.0):
        x = np.linspace(-3, 3, 601)
        z, w = np.meshgrid(x, x)
        g = lambda t: np.abs(t) ** a * t
        lhs = np.abs(g(z) - g(w))
        rhs = (a + 1) * np.maximum(np.abs(z), np.abs(w)) ** a * np.abs(z - w)
        assert np.all(lhs <= rhs * (1 + 1e-12) + 1e-300)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.sampled_from([F(1, 2), F(3, 2), 2, F(5, 2), 3]))
def test_pointwise_bound_holds_for_any_seed(seed, alpha):
    assert pointwise_estimate_probe(alpha, 1000, np.random.default_rng(seed)).status == PASS


def test_pointwise_needs_samples():
    with pytest.raises(ValueError):
        pointwise_estimate_probe(2, 10)


def test_gradient_equal_fields_pass_trivially():
    u = Gaussian()
    rep = gradient_estimate_probe(2, F(1, 2), u, u, Grid(1, 256, 40.0))
    assert rep.status == PASS and rep.max_ratio == 0.0


@pytest.mark.parametrize("alpha", [F(1, 2), 2, 3])
def test_gradient_ratio_bounded(alpha):
    g = Grid(1, 1024, 40.0)
    u = Gaussian(1.0, 1.0, (), (1.0,))
    v = Gaussian(0.6, 1.3, (0.4,))
    rep = gradient_estimate_probe(alpha, F(1, 2), u, v, g)
    assert rep.status == PASS and 0 < rep.max_ratio < 10


def test_gradient_with_zero_second_field():
    g = Grid(1, 1024, 40.0)
    rep = gradient_estimate_probe(2, F(1, 2), Gaussian(), Gaussian(0.0), g)
    assert math.isfinite(rep.max_ratio) and rep.status == PASS


def test_gradient_alpha_one_rejected():
    with pytest.raises(PreconditionError):
        gradient_estimate_probe(1, F(1, 2), Gaussian(), Gaussian(0.5), Grid(1, 64, 20.0))


# --- Strichartz and scattering ----------------------------------------------


def test_strichartz_probe_spread():
    rep = strichartz_probe(Grid(1, 512, 40.0), 0, 20, np.random.default_rng(1))
    assert rep.status == PASS and rep.spread <= 50
    assert len(rep.ratios) == 20


def test_strichartz_probe_is_seed_deterministic():
    g = Grid(1, 256, 40.0)
    a = strichartz_probe(g, 0, 10, np.random.default_rng(5))
    b = strichartz_probe(g, 0, 10, np.random.default_rng(5))
    assert a.ratios == b.ratios


def test_scattering_monitor_zero_solution():
    g = Grid(1, 64, 20.0)
    p = ProblemParams(1, F(1, 2), 14)
    traj = free_evolution(ComplexField.zeros(g), np.linspace(0, 1, 11))
    rep = scattering_monitor(traj, p)
    assert rep.plateau and rep.status == INFO and max(rep.running_norm) == 0


def test_scattering_monitor_linear_small_data_plateaus():
    g = Grid(1, 512, 200.0)
    p = ProblemParams(1, F(1, 2), 14)
    traj = free_evolution(Gaussian(1e-2).sample(g), np.linspace(0, 4, 201))
    rep = scattering_monitor(traj, p)
    assert rep.status == INFO
    assert np.all(np.diff(rep.running_norm) >= -1e-15)


def test_scattering_monitor_needs_intercritical():
    traj = free_evolution(Gaussian().sample(Grid(1, 64, 20.0)), [0.0, 0.1])
    with pytest.raises(WrongRegimeError):
        scattering_monitor(traj, P1)


# --- perturbation ------------------------------------------------------------


def _pert_setup(t_end=0.2):
    g = Grid(1, 256, 40.0)
    c = SolverConfig(P1, g, 1e-3, t_end, sample_stride=10)
    return g, c, Gaussian().sample(g)


def test_perturbation_zero_forcing_zero_gap():
    g, c, u0 = _pert_setup()
    rep = perturbation_experiment(u0, c, PerturbationConfig(lambda t: np.zeros(g.shape)))
    assert rep.status == INFO
    assert rep.dist_linf_l2 == [0.0] * 4


def test_perturbation_gap_only_short_time():
    g, c, u0 = _pert_setup(t_end=0.01)
    gap = Gaussian(1.0, 1.0, (-0.5,), (1.0,)).sample(g)
    rep = perturbation_experiment(u0, c, PerturbationConfig(lambda t: np.zeros(g.shape), gap.values, ladder=(1e-2,)))
    assert math.isnan(rep.slope_linf_l2)
    assert rep.dist_linf_l2[0] == pytest.approx(1e-2 * l2_norm(gap), rel=0.05)


def test_perturbation_ladder_slope():
    g, c, u0 = _pert_setup(t_end=0.5)
    shape = Gaussian(1.0, 1.5, (1.0,)).sample(g).values
    gap = Gaussian(1.0, 1.0, (-0.5,), (1.0,)).sample(g).values
    rep = perturbation_experiment(u0, c, PerturbationConfig(lambda t: math.cos(t) * shape, gap))
    assert rep.status == PASS
    assert abs(rep.slope_linf_l2 - 1) <= 0.2 and abs(rep.slope_diagonal - 1) <= 0.2
    assert rep.diagonal_pair == (10, 10)


def test_perturbation_rejects_bad_shapes():
    g, c, u0 = _pert_setup()
    with pytest.raises(ValueError):
        perturbation_experiment(u0, c, PerturbationConfig(lambda t: np.zeros(3)))
    with pytest.raises(ValueError):
        PerturbationConfig(lambda t: 0, ladder=(0.1, -1))


# --- Hardy-Littlewood and Gagliardo-Nirenberg -------------------------------


def test_hl_rejects_s_zero():
    with pytest.raises(PreconditionError):
        hl_probe(Grid(1, 64, 20.0), 2, 2, 0, 0)


def test_gn_identity_case_ratio_is_one():
    rep = gn_probe(Grid(1, 1024, 64.0), 2, 2, 2, 1, 1, 1)
    np.testing.assert_allclose(rep.ratios, 1.0, rtol=1e-12)
    assert rep.status == PASS


def test_gn_interpolation_flat():
    rep = gn_probe(Grid(1, 4096, 128.0), 2, 2, 2, F(1, 2), 1, F(1, 2))
    assert rep.flatness <= 0.05


@pytest.mark.slow
def test_hl_dilation_flatness():
    rep = hl_probe(Grid(1, 2**20, 128.0), 2, 2, F(1, 4), F(1, 4))
    assert rep.status == PASS and rep.flatness <= 0.05


def test_dispatcher():
    rep = hl_gn_function_probe("gn", dict(p=2, p0=2, p1=2, s=1, s1=1, theta=1), Grid(1, 256, 40.0))
    assert rep.kind == "GN"
    with pytest.raises(ValueError):
        hl_gn_function_probe("xx", {}, Grid(1, 8, 1.0))
