"""Print the exact exponent suites and regime verdicts for a few parameter sets."""

from fractions import Fraction as F

from ibnls.pairs import lemma32_exponents, lemma41_exponents
from ibnls.rationals import fmt
from ibnls.regime import ProblemParams, critical_index


def main():
    for N, b, alpha in [(6, F(1), F(2)), (5, F(1, 2), F(2)), (1, F(1, 2), F(3))]:
        idx = critical_index(ProblemParams(N, b, alpha))
        print(f"N={N} b={b} alpha={alpha}: s_c={fmt(idx.s_c)} ({idx.klass.name.lower()})")

    rep = lemma32_exponents(6, 1, 2, F(1, 10))
    print("\nsubcritical suite at N=6, b=1, alpha=2, theta=1/10")
    for name, pair in rep.pairs.items():
        print(f"  {name:10s} q={fmt(pair.q):>8s} r={fmt(pair.r):>8s} s={fmt(pair.s):>4s} admissible={pair.admissible}")

    rep = lemma41_exponents(7, F(1, 2))
    print("\nenergy-critical suite at N=7, b=1/2")
    for ident in rep.identities:
        print(f"  {ident.name:18s} {fmt(ident.lhs)} vs {fmt(ident.rhs)} holds={ident.holds}")


if __name__ == "__main__":
    main()
