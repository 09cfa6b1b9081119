"""Show that the solution gap scales linearly with the forcing and datum perturbation size."""

import math
from fractions import Fraction as F

from ibnls.data import Gaussian
from ibnls.probes import PerturbationConfig, perturbation_experiment
from ibnls.regime import ProblemParams
from ibnls.solver import SolverConfig
from ibnls.spectral import Grid


def main():
    p = ProblemParams(1, F(1, 2), 3)
    g = Grid(1, 512, 40.0)
    cfg = SolverConfig(p, g, 1e-3, 1.0, sample_stride=10)
    shape = Gaussian(1.0, 1.5, (1.0,)).sample(g).values
    gap = Gaussian(1.0, 1.0, (-0.5,), (1.0,)).sample(g).values
    pert = PerturbationConfig(lambda t: math.cos(t) * shape, gap, ladder=(1e-1, 1e-2, 1e-3, 1e-4))
    rep = perturbation_experiment(Gaussian().sample(g), cfg, pert)
    print(f"log-log slope in L^inf L^2: {rep.slope_linf_l2:.4f}")
    print(f"log-log slope in the diagonal norm: {rep.slope_diagonal:.4f}")


if __name__ == "__main__":
    main()
