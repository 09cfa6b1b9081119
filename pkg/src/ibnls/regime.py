"""Criticality classification and theorem-hypothesis checks in exact arithmetic.

Every inequality here is decided on :class:`~fractions.Fraction` values, so a
parameter sitting exactly on a boundary (for example ``alpha == (8 - 2b)/N``)
is never mistaken for an interior point.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple, Union

import mpmath

from .rationals import INF, as_fraction, fmt


class Regime(str, enum.Enum):
    MASS_SUBCRITICAL = "MassSubcritical"
    MASS_CRITICAL = "MassCritical"
    INTERCRITICAL = "Intercritical"
    ENERGY_CRITICAL = "EnergyCritical"
    ENERGY_SUPERCRITICAL = "EnergySupercritical"


class TheoremId(str, enum.Enum):
    THM_A_I = "ThmA_i"
    THM_A_II = "ThmA_ii"
    THM_A_III = "ThmA_iii"
    THM_A_IV = "ThmA_iv"
    THM_GWPH2 = "Thm_GWPH2"
    THM_GWPH2_N5 = "Thm_GWPH2_N5"
    COR_N5 = "Cor_N5"
    THM_ENERGY_CRITICAL = "Thm_EnergyCritical"


@dataclass(frozen=True)
class ProblemParams:
    """The quadruple ``(N, b, alpha, lambda)``.

    ``b`` and ``alpha`` are coerced to Fractions (ints and ``"P/Q"`` strings
    are accepted, floats are not). ``lam`` is the sign of the nonlinear term:
    ``+1`` defocusing, ``-1`` focusing.
    """

    dim: int
    b: Fraction
    alpha: Fraction
    lam: int = 1

    def __post_init__(self):
        if isinstance(self.dim, bool) or not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        b = as_fraction(self.b)
        alpha = as_fraction(self.alpha)
        if b <= 0:
            raise ValueError(f"b must be positive, got {fmt(b)}")
        if alpha <= 0:
            raise ValueError(f"alpha must be positive, got {fmt(alpha)}")
        if self.lam not in (1, -1):
            raise ValueError(f"lambda must be +1 or -1, got {self.lam!r}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True)
class CriticalityReport:
    s_c: Fraction
    four_star: Union[Fraction, float]
    klass: Regime


@dataclass(frozen=True)
class HypothesisVerdict:
    theorem_id: TheoremId
    satisfied: bool
    failed_conditions: Tuple[str, ...] = field(default_factory=tuple)

    def csv_line(self) -> str:
        return f"{self.theorem_id.value},{str(self.satisfied).lower()},{';'.join(self.failed_conditions)}"


def critical_s(dim: int, b, alpha) -> Fraction:
    """``s_c = N/2 - (4 - b)/alpha``."""
    return Fraction(dim, 2) - (4 - as_fraction(b)) / as_fraction(alpha)


def four_star(dim: int, b) -> Union[Fraction, float]:
    """Upper intercritical threshold: ``(8-2b)/(N-4)`` for ``N >= 5``, ``inf`` otherwise."""
    if dim >= 5:
        return (8 - 2 * as_fraction(b)) / (dim - 4)
    return INF


def critical_index(params: ProblemParams) -> CriticalityReport:
    s_c = critical_s(params.dim, params.b, params.alpha)
    if s_c < 0:
        klass = Regime.MASS_SUBCRITICAL
    elif s_c == 0:
        klass = Regime.MASS_CRITICAL
    elif s_c < 2:
        klass = Regime.INTERCRITICAL
    elif s_c == 2:
        klass = Regime.ENERGY_CRITICAL
    else:
        klass = Regime.ENERGY_SUPERCRITICAL
    return CriticalityReport(s_c=s_c, four_star=four_star(params.dim, params.b), klass=klass)


def intercritical_by_inequality(params: ProblemParams) -> bool:
    """``(8-2b)/N < alpha < 4*``, evaluated without going through ``s_c``."""
    N, b, a = params.dim, params.b, params.alpha
    upper = four_star(N, b)
    return (8 - 2 * b) / N < a and a < upper


# ---------------------------------------------------------------------------
# theorem hypotheses

Conditions = List[Tuple[str, bool]]


def _hypotheses(tid: TheoremId, N: int, b: Fraction, a: Fraction) -> Conditions:
    lower = (8 - 2 * b) / N
    fs = four_star(N, b)
    mass_line = ("(8-2b)/N < alpha", lower < a)
    if tid is TheoremId.THM_A_I:
        return [
            ("N >= 8", N >= 8),
            ("0 < b", b > 0),
            ("b < 4", b < 4),
            mass_line,
            ("alpha < 4*", a < fs),
        ]
    if tid is TheoremId.THM_A_II:
        conds = [("N in {5,6,7}", N in (5, 6, 7)), mass_line]
        if N != 4:
            conds.append(("alpha < (N-2b)/(N-4)", a < (N - 2 * b) / (N - 4)))
        else:
            conds.append(("alpha < (N-2b)/(N-4)", False))
        conds += [("0 < b", b > 0), ("b < (N^2-8N+32)/8", b < Fraction(N * N - 8 * N + 32, 8))]
        return conds
    if tid is TheoremId.THM_A_III:
        return [
            ("N in {6,7}", N in (6, 7)),
            ("0 < b", b > 0),
            ("b < N-4", b < N - 4),
            mass_line,
            ("alpha < 4*", a < fs),
        ]
    if tid is TheoremId.THM_A_IV:
        return [
            ("N in {3,4}", N in (3, 4)),
            ("0 < b", b > 0),
            ("b < N/2", b < Fraction(N, 2)),
            mass_line,
        ]
    if tid is TheoremId.THM_GWPH2:
        conds = [
            ("N >= 3", N >= 3),
            ("0 < b", b > 0),
            ("b < min(N/2, 4)", b < min(Fraction(N, 2), Fraction(4))),
            mass_line,
            ("alpha < 4*", a < fs),
        ]
        if N == 5:
            conds.append(("alpha < 7-2b (N = 5)", a < 7 - 2 * b))
        return conds
    if tid is TheoremId.THM_GWPH2_N5:
        return [
            ("N = 5", N == 5),
            ("0 < b", b > 0),
            ("b <= 3/2", b <= Fraction(3, 2)),
            ("(8-2b)/5 < alpha", (8 - 2 * b) / 5 < a),
            ("alpha < 8-2b", a < 8 - 2 * b),
        ]
    if tid is TheoremId.COR_N5:
        return [
            ("N = 5", N == 5),
            ("0 < b", b > 0),
            ("b < 5/2", b < Fraction(5, 2)),
            ("min(1, (8-2b)/5) < alpha", min(Fraction(1), (8 - 2 * b) / 5) < a),
            ("alpha < 8-2b", a < 8 - 2 * b),
        ]
    if tid is TheoremId.THM_ENERGY_CRITICAL:
        conds = [("5 <= N", N >= 5), ("N <= 11", N <= 11)]
        if N > 4:
            conds.append(("alpha = (8-2b)/(N-4)", a == (8 - 2 * b) / (N - 4)))
        else:
            conds.append(("alpha = (8-2b)/(N-4)", False))
        conds += [("0 < b", b > 0)]
        if N != 2:
            conds.append(("b < (12-N)/(N-2)", b < Fraction(12 - N, N - 2)))
        else:
            conds.append(("b < (12-N)/(N-2)", False))
        return conds
    raise ValueError(f"unknown theorem id {tid!r}")


def hypothesis_conditions(params: ProblemParams, theorem_id) -> Conditions:
    """All ``(description, holds)`` pairs of a theorem's hypotheses."""
    tid = TheoremId(theorem_id)
    return _hypotheses(tid, params.dim, params.b, params.alpha)


def check_theorem(params: ProblemParams, theorem_id) -> HypothesisVerdict:
    """Check every inequality of the named hypothesis exactly.

    Raises:
        ValueError: if ``theorem_id`` is not one of :class:`TheoremId`.
    """
    try:
        tid = TheoremId(theorem_id)
    except ValueError:
        raise ValueError(
            f"unknown theorem id {theorem_id!r}; expected one of "
            + ", ".join(t.value for t in TheoremId)
        ) from None
    failed = tuple(desc for desc, ok in _hypotheses(tid, params.dim, params.b, params.alpha) if not ok)
    return HypothesisVerdict(theorem_id=tid, satisfied=not failed, failed_conditions=failed)


def check_all(params: ProblemParams) -> List[HypothesisVerdict]:
    return [check_theorem(params, tid) for tid in TheoremId]


def smallness_threshold(c, eta, alpha, theta, dps: int = 50) -> mpmath.mpf:
    """Data-smallness level below which the Duhamel map is a contraction.

    Returns ``min{ (1/(2 c^(θ+2) 2^(α+1) η^(θ+1)))^(1/(α-1-θ)),
    (1/(2 c^(θ+1) 2^(α+1) η^θ))^(1/(α-θ)) }`` evaluated with ``dps`` digits.

    Raises:
        ValueError: if ``c`` or ``eta`` is not positive, or either root index
            ``α-1-θ``, ``α-θ`` is not positive.
    """
    c, eta, alpha, theta = (as_fraction(v) for v in (c, eta, alpha, theta))
    if c <= 0 or eta <= 0:
        raise ValueError("c and eta must be positive")
    if alpha - 1 - theta <= 0 or alpha - theta <= 0:
        raise ValueError(
            f"root indices must be positive: alpha-1-theta = {fmt(alpha - 1 - theta)}, "
            f"alpha-theta = {fmt(alpha - theta)}"
        )
    with mpmath.workdps(dps):
        def mp(x: Fraction):
            return mpmath.mpf(x.numerator) / x.denominator

        c_, eta_, a_, t_ = mp(c), mp(eta), mp(alpha), mp(theta)
        first = (1 / (2 * c_ ** (t_ + 2) * 2 ** (a_ + 1) * eta_ ** (t_ + 1))) ** (1 / (a_ - 1 - t_))
        second = (1 / (2 * c_ ** (t_ + 1) * 2 ** (a_ + 1) * eta_ ** t_)) ** (1 / (a_ - t_))
        return +min(first, second)
