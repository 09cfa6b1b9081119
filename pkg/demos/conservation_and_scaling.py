"""Evolve a Gaussian in dim 1, report mass and energy drift and the dynamic scaling mismatch."""

from fractions import Fraction as F

from ibnls.data import Gaussian
from ibnls.probes import ScalingCheckConfig, conservation_probe, dynamic_scaling_check
from ibnls.regime import ProblemParams
from ibnls.solver import SolverConfig, evolve
from ibnls.spectral import Grid


def main():
    p = ProblemParams(1, F(1, 2), 3)
    g = Grid(1, 512, 40.0)
    u0 = Gaussian().sample(g)
    for dt in (1e-3, 5e-4):
        rep = conservation_probe(evolve(u0, SolverConfig(p, g, dt, 1.0, sample_stride=10)))
        print(f"dt={dt:g}: mass drift {rep.mass_drift:.2e}, energy drift {rep.energy_drift:.3e}")

    g = Grid(1, 256, 64.0)
    cfg = ScalingCheckConfig(2.0, 0, 1e-3)
    for dt in (1e-4, 5e-5, 2.5e-5):
        err = dynamic_scaling_check(Gaussian(0.5), p, cfg, SolverConfig(p, g, dt, 1e-3)).error
        print(f"dt={dt:g}: rescaled-solution mismatch {err:.3e}")


if __name__ == "__main__":
    main()
