"""Admissible pairs and the exponent bookkeeping behind the nonlinear estimates.

Everything is exact. A report lists the constructed pairs, auxiliary
exponents (Hölder indices ``gamma``, ``beta``, ``r1`` inside and outside the
unit ball) and every identity or strict inequality the construction relies
on, each with its two sides so that a reader can audit it.

"Sufficiently small" parameters are made concrete: each strict inequality is
a Möbius function of ``theta`` (or ``eps``) once the other inputs are fixed,
so the supremum of valid values is the first positive zero or pole among
those margins. It is computed exactly by :func:`_first_exit`.
"""

from __future__ import annotations

import enum
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .rationals import INF, Exponent, as_exponent, as_fraction, fmt, from_recip, is_inf, recip
from .regime import TheoremId, critical_s, hypothesis_conditions, ProblemParams


class PreconditionError(ValueError):
    """A lemma was asked for parameters outside its hypotheses."""


class ParameterRangeError(ValueError):
    """``theta`` or ``eps`` is not below its supremum."""

    def __init__(self, name: str, value: Fraction, limit: Exponent):
        self.name = name
        self.value = value
        self.limit = limit
        super().__init__(f"{name} = {fmt(value)} is not in the valid window (0, {fmt(limit)})")


# ---------------------------------------------------------------------------
# admissibility


def recip_r_window(s, N: int) -> Tuple[Fraction, bool, Fraction, bool]:
    """Window for ``1/r`` of an ``H^s``-admissible pair as ``(lo, lo_closed, hi, hi_closed)``.

    For ``N >= 5`` this is ``(N-4)/(2N) < 1/r <= (N-2s)/(2N)``. For ``N <= 4``
    the literal range is ``0 < 1/r <= 1/2``; for ``s > 0`` the upper end is
    tightened to ``(N-2s)/(2N)``, which keeps ``q`` positive.
    """
    s = as_fraction(s)
    hi_s = Fraction(N - 2 * s, 2 * N)
    if N >= 5:
        return Fraction(N - 4, 2 * N), False, hi_s, True
    hi = min(Fraction(1, 2), hi_s) if s > 0 else Fraction(1, 2)
    return Fraction(0), False, hi, True


def admissibility_readings_differ(r, s, N: int) -> bool:
    """True when the literal low-dimensional range ``2 <= r < inf`` and the
    ``s``-tightened range disagree about ``r``."""
    if N >= 5:
        return False
    x = recip(as_exponent(r))
    literal = 0 < x <= Fraction(1, 2)
    lo, _, hi, _ = recip_r_window(s, N)
    return literal != (lo < x <= hi)


def is_admissible(q, r, s, N: int) -> bool:
    """``H^s``-biharmonic admissibility of ``(q, r)`` in dimension ``N``.

    The scaling relation ``4/q = N/2 - N/r - s`` must hold exactly and ``r``
    must lie in the dimension-dependent window (see :func:`recip_r_window`).
    ``q`` may be ``inf``.
    """
    q = as_exponent(q)
    r = as_exponent(r)
    s = as_fraction(s)
    if not is_inf(q) and q <= 0:
        return False
    if is_inf(r) or r <= 0:
        return False
    x = recip(r)
    if 4 * recip(q) != Fraction(N, 2) - N * x - s:
        return False
    lo, lo_closed, hi, hi_closed = recip_r_window(s, N)
    above = lo <= x if lo_closed else lo < x
    below = x <= hi if hi_closed else x < hi
    return above and below


@dataclass(frozen=True)
class ExponentPair:
    q: Exponent
    r: Exponent
    s: Fraction
    dim: int

    @property
    def admissible(self) -> bool:
        return is_admissible(self.q, self.r, self.s, self.dim)

    @property
    def conjugate(self) -> Tuple[Exponent, Exponent]:
        return from_recip(1 - recip(self.q)), from_recip(1 - recip(self.r))


class WeightIntegrability(str, enum.Enum):
    BALL_ONLY = "BallOnly"
    COMPLEMENT_ONLY = "ComplementOnly"
    NEITHER = "Neither"


def weight_integrability(N: int, b, gamma) -> WeightIntegrability:
    """Where ``|x|^-b`` lies in ``L^gamma``: inside the unit ball iff ``N/gamma - b > 0``,
    outside iff ``N/gamma - b < 0``."""
    gamma = as_exponent(gamma)
    if not is_inf(gamma) and gamma <= 0:
        raise ValueError("gamma must be positive")
    margin = N * recip(gamma) - as_fraction(b)
    if margin > 0:
        return WeightIntegrability.BALL_ONLY
    if margin < 0:
        return WeightIntegrability.COMPLEMENT_ONLY
    return WeightIntegrability.NEITHER


def gn_exponent_check(p, p0, p1, s, s1, theta, N: int) -> bool:
    """Exponent conditions of the fractional Gagliardo-Nirenberg inequality."""
    p, p0, p1 = (as_exponent(v) for v in (p, p0, p1))
    s, s1, theta = (as_fraction(v) for v in (s, s1, theta))
    if any(is_inf(v) or v <= 1 for v in (p, p0, p1)):
        return False
    if not 0 <= theta <= 1:
        return False
    lhs = N * recip(p) - s
    rhs = (1 - theta) * N * recip(p0) + theta * (N * recip(p1) - s1)
    return lhs == rhs and s <= theta * s1


def hl_exponent_check(p, q, s, rho, N: int) -> bool:
    """Exponent conditions of the Hardy-Littlewood (Stein-Weiss) inequality
    ``|| |x|^-rho u ||_q <~ || D^s u ||_p``."""
    p, q = as_exponent(p), as_exponent(q)
    s, rho = as_fraction(s), as_fraction(rho)
    if is_inf(p) or is_inf(q) or not (1 < p <= q):
        return False
    if not (0 < s < N) or rho < 0:
        return False
    return rho < N * recip(q) and s == N * recip(p) - N * recip(q) + rho


# ---------------------------------------------------------------------------
# reports

_RELATIONS = {
    "=": operator.eq,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


@dataclass(frozen=True)
class Identity:
    name: str
    lhs: Exponent
    rhs: Exponent
    relation: str = "="

    @property
    def holds(self) -> bool:
        return _RELATIONS[self.relation](self.lhs, self.rhs)


@dataclass
class LemmaExponentReport:
    lemma: str
    params: ProblemParams
    theta: Fraction
    eps: Fraction
    pairs: Dict[str, ExponentPair] = field(default_factory=dict)
    auxiliaries: Dict[str, Exponent] = field(default_factory=dict)
    identities: List[Identity] = field(default_factory=list)
    theta_max: Optional[Exponent] = None
    eps_max: Optional[Exponent] = None
    formal_limit: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return all(i.holds for i in self.identities)

    def identity(self, name: str) -> Identity:
        for i in self.identities:
            if i.name == name:
                return i
        raise KeyError(name)

    def failed(self) -> List[Identity]:
        return [i for i in self.identities if not i.holds]

    def pair_rows(self) -> List[Tuple[str, str, str, str, str]]:
        return [
            (name, fmt(p.q), fmt(p.r), fmt(p.s), fmt(p.admissible))
            for name, p in self.pairs.items()
        ]

    def identity_rows(self) -> List[Tuple[str, str, str, str]]:
        return [(i.name, fmt(i.lhs), fmt(i.rhs), fmt(i.holds)) for i in self.identities]


# ---------------------------------------------------------------------------
# exact window of a small parameter

Margin = Tuple[str, Callable[["LemmaExponentReport"], Fraction], bool]  # (name, extract, strict)


def _nullspace_3x4(rows: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    m = [list(r) for r in rows]
    pivots = []
    row = 0
    for col in range(4):
        piv = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = 1 / m[row][col]
        m[row] = [v * inv for v in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
        if row == len(m):
            break
    free = [c for c in range(4) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * 4
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


_SAMPLES = [Fraction(1, 3), Fraction(2, 7), Fraction(5, 11), Fraction(7, 13), Fraction(3, 17),
            Fraction(11, 19), Fraction(13, 23), Fraction(17, 29)]


def _mobius(pts: Sequence[Tuple[Fraction, Fraction]]):
    """Exact ``(a, b, c, d)`` with ``f(t) = (a + b t)/(c + d t)`` through four samples,
    or ``None`` when the samples are constant."""
    if all(y == pts[0][1] for _, y in pts):
        return None
    rows = [[Fraction(1), t, -y, -t * y] for t, y in pts[:3]]
    basis = _nullspace_3x4(rows)
    if len(basis) != 1:
        raise RuntimeError("margin is not a Möbius function of the parameter")
    a, b, c, d = basis[0]
    for t, y in pts[3:]:
        if (c + d * t) == 0 or (a + b * t) / (c + d * t) != y:
            raise RuntimeError("margin is not a Möbius function of the parameter")
    return a, b, c, d


def _sign_at_0plus(c0: Fraction, c1: Fraction) -> int:
    """Sign of ``c0 + c1 t`` for small ``t > 0``."""
    if c0 != 0:
        return 1 if c0 > 0 else -1
    if c1 != 0:
        return 1 if c1 > 0 else -1
    return 0


def _first_exit(sampled: Dict[str, List[Tuple[Fraction, Fraction]]], strict: Dict[str, bool]) -> Exponent:
    """Supremum ``T`` such that every non-constant margin stays valid on ``(0, T)``.

    Returns ``0`` if some margin is already invalid just above zero.
    """
    limit: Exponent = INF
    for name, pts in sampled.items():
        coeffs = _mobius(pts)
        if coeffs is None:
            continue
        a, b, c, d = coeffs
        sign = _sign_at_0plus(a, b) * _sign_at_0plus(c, d)
        if sign < 0 or (sign == 0 and strict[name]):
            return Fraction(0)
        for root in ((-a / b) if b != 0 else None, (-c / d) if d != 0 else None):
            if root is not None and 0 < root < limit:
                limit = root
    return limit


# ---------------------------------------------------------------------------
# Lemma-specific constructions


def _require(params: ProblemParams, tid: TheoremId, extra: Sequence[Tuple[str, bool]] = ()):
    failed = [d for d, ok in list(hypothesis_conditions(params, tid)) + list(extra) if not ok]
    if failed:
        raise PreconditionError("hypotheses violated: " + "; ".join(failed))


def _region_identities(
    N: int,
    b: Fraction,
    alpha: Fraction,
    theta: Fraction,
    s_c: Fraction,
    gamma_rhs: Callable[[Fraction], Fraction],
    beta_chain: Callable[[Fraction], Fraction],
    beta_closed: Dict[str, Fraction],
    beta_upper: Fraction,
    out: LemmaExponentReport,
):
    """Ball/complement bookkeeping shared by the intercritical lemmas.

    ``gamma_rhs(N/beta)`` gives ``N/gamma`` from the Hölder split;
    ``beta_chain(1/r1)`` gives ``N/beta`` from the product of Lebesgue norms.
    """
    targets = {"ball": Fraction(2 * N, N - 4) if N != 4 else INF, "complement": Fraction(2)}
    sign_target = {"ball": theta * (2 - s_c), "complement": -theta * s_c}
    for region in ("ball", "complement"):
        # theta * r1 is pinned; keep 1/r1 exact so theta = 0 stays meaningful
        inv_r1 = theta * recip(targets[region])
        beta = beta_closed[region]
        n_over_gamma = gamma_rhs(N / beta)
        out.auxiliaries[f"r1_{region}"] = from_recip(inv_r1)
        out.auxiliaries[f"beta_{region}"] = beta
        out.auxiliaries[f"gamma_{region}"] = from_recip(n_over_gamma / N) if n_over_gamma != 0 else INF
        out.identities += [
            Identity(f"beta_chain_{region}", N / beta, beta_chain(inv_r1)),
            Identity(f"weight_reduction_{region}", n_over_gamma - b, theta * (4 - b) / alpha - N * inv_r1),
            Identity(f"weight_sign_value_{region}", n_over_gamma - b, sign_target[region]),
            Identity(
                f"weight_integrable_{region}",
                n_over_gamma - b,
                Fraction(0),
                ">" if region == "ball" else "<",
            ),
            Identity(f"gamma_positive_{region}", n_over_gamma, Fraction(0), ">"),
            Identity(f"beta_gt_1_{region}", beta, Fraction(1), ">"),
            Identity(f"beta_lt_bound_{region}", beta, beta_upper, "<"),
        ]


def _lemma32_build(params: ProblemParams, theta: Fraction, eps: Fraction) -> LemmaExponentReport:
    N, b, alpha = params.dim, params.b, params.alpha
    s_c = critical_s(N, b, alpha)
    rep = LemmaExponentReport("3.2", params, theta, eps)
    rep.auxiliaries["s_c"] = s_c
    rep.identities.append(Identity("theta_lt_alpha", theta, alpha, "<"))
    if N in (6, 7):
        a_bar = 8 * alpha * (alpha + 1 - theta) / (8 - 2 * b - alpha * (N - 4))
        r_bar = 2 * alpha * N * (alpha + 1 - theta) / (alpha * (N + 4 - 2 * b) - 2 * theta * (4 - b))
        q_bar = 8 * alpha * (alpha + 1 - theta) / (
            alpha * (N * alpha - 4 + 2 * b) - theta * (N * alpha - 8 + 2 * b)
        )
        rep.pairs["q_bar"] = ExponentPair(q_bar, r_bar, Fraction(0), N)
        rep.pairs["a_bar"] = ExponentPair(a_bar, r_bar, s_c, N)
        rep.auxiliaries.update(a_bar=a_bar, r_bar=r_bar, q_bar=q_bar)
        rep.identities += [
            Identity("a_bar_positive", a_bar, Fraction(0), ">"),
            Identity("r_bar_positive", r_bar, Fraction(0), ">"),
            Identity("q_bar_positive", q_bar, Fraction(0), ">"),
            Identity("q_bar_B_admissible", rep.pairs["q_bar"].admissible, True),
            Identity("a_bar_Hsc_admissible", rep.pairs["a_bar"].admissible, True),
            Identity("holder_time", Fraction(1, 2), (alpha - theta) / a_bar + 1 / q_bar),
            Identity("r_bar_lt_N", r_bar, Fraction(N), "<"),
        ]
        inv_r2 = 1 / r_bar - Fraction(1, N)
        rep.auxiliaries["r2"] = from_recip(inv_r2)

        def gamma_rhs(n_over_beta):
            return Fraction(N + 2, 2) - n_over_beta

        def beta_chain(inv_r1):
            return N * inv_r1 + N * (alpha - theta) / r_bar + N * inv_r2

        rep.identities.append(Identity("sobolev_gradient", Fraction(1), N / r_bar - N * inv_r2))
    else:  # N == 5
        q_eps = Fraction(8) / (3 - 2 * eps)
        r_eps = Fraction(5) / (1 + eps)
        a = 8 * (alpha - theta) / (1 + 2 * eps)
        r = 10 * alpha * (alpha - theta) / (alpha * (7 - 2 * b) - 2 * theta * (4 - b) - 2 * eps * alpha)
        rep.pairs["q_eps"] = ExponentPair(q_eps, r_eps, Fraction(0), N)
        rep.pairs["a_bar"] = ExponentPair(a, r, s_c, N)
        rep.auxiliaries.update(q_eps=q_eps, r_eps=r_eps, a=a, r=r)
        rep.identities += [
            Identity("eps_positive", eps, Fraction(0), ">"),
            Identity("a_positive", a, Fraction(0), ">"),
            Identity("r_positive", r, Fraction(0), ">"),
            Identity("q_eps_B_admissible", rep.pairs["q_eps"].admissible, True),
            Identity("a_Hsc_admissible", rep.pairs["a_bar"].admissible, True),
            Identity("holder_time", Fraction(1, 2), (alpha - theta) / a + 1 / q_eps),
            Identity("r_lt_10", r, Fraction(10), "<"),
            Identity("r_eps_lt_5", r_eps, Fraction(5), "<"),
        ]
        inv_r3 = 1 / r_eps - Fraction(1, N)
        rep.auxiliaries["r3"] = from_recip(inv_r3)

        def gamma_rhs(n_over_beta):
            return Fraction(N + 2, 2) - n_over_beta

        def beta_chain(inv_r1):
            return N * inv_r1 + N * (alpha - theta) / r + N * inv_r3

        rep.identities.append(
            Identity(
                "gamma_expansion",
                gamma_rhs(beta_chain(theta * Fraction(N - 4, 2 * N))),
                Fraction(N, 2) + 1 - N * theta * Fraction(N - 4, 2 * N) - N * (alpha - theta) / r
                - (N / r_eps - 1),
            )
        )
    beta_closed = {
        "ball": Fraction(2 * N) / (N + 2 - 2 * b - 2 * theta * (2 - s_c)),
        "complement": Fraction(2 * N) / (N + 2 - 2 * b + 2 * theta * s_c),
    }
    _region_identities(N, b, alpha, theta, s_c, gamma_rhs, beta_chain, beta_closed, Fraction(N), rep)
    return rep


def _lemma33_build(params: ProblemParams, theta: Fraction, eps: Fraction) -> LemmaExponentReport:
    N, b, alpha = 5, params.b, params.alpha
    s_c = critical_s(N, b, alpha)
    rep = LemmaExponentReport("3.3", params, theta, eps)
    rep.auxiliaries["s_c"] = s_c
    a_star = 8 * alpha * (alpha + 1 - theta) / (8 - 2 * b - alpha * (N - 4) + 2 * eps * alpha)
    r_star = 2 * alpha * N * (alpha + 1 - theta) / (
        alpha * (N + 4 - 2 * b) - 2 * theta * (4 - b) - 2 * eps * alpha
    )
    q_star = 8 * alpha * (alpha + 1 - theta) / (
        alpha * (N * alpha - 4 + 2 * b) - theta * (N * alpha - 8 + 2 * b) + 2 * eps * alpha
    )
    q_eps = Fraction(4) / (2 - eps)
    r_eps = Fraction(2 * N) / (N - 4 + 2 * eps)
    p_star = 10 * (alpha + 1 - theta) / (5 * alpha + 1 + 2 * s_c - 5 * theta - 2 * eps)
    rep.pairs.update(
        a_star=ExponentPair(a_star, r_star, s_c, N),
        q_star=ExponentPair(q_star, r_star, Fraction(0), N),
        q_eps=ExponentPair(q_eps, r_eps, Fraction(0), N),
        p_star=ExponentPair(a_star, p_star, Fraction(0), N),
    )
    rep.auxiliaries.update(a_star=a_star, r_star=r_star, q_star=q_star, q_eps=q_eps, r_eps=r_eps, p_star=p_star)
    a_star_adm = rep.pairs["a_star"].admissible
    rep.identities += [
        Identity("theta_lt_alpha", theta, alpha, "<"),
        Identity("eps_positive", eps, Fraction(0), ">"),
        Identity("a_star_positive", a_star, Fraction(0), ">"),
        Identity("r_star_positive", r_star, Fraction(0), ">"),
        Identity("q_star_positive", q_star, Fraction(0), ">"),
        Identity("q_star_B_admissible", rep.pairs["q_star"].admissible, True),
        Identity("q_eps_B_admissible", rep.pairs["q_eps"].admissible, True),
        Identity("a_star_scaling", 4 / a_star, Fraction(N, 2) - N / r_star - s_c),
        Identity("time_holder_dual", 1 - 1 / q_eps, (alpha - theta) / a_star + 1 / q_star),
        Identity("p_star_B_admissible", rep.pairs["p_star"].admissible, True),
        Identity("p_star_sobolev", s_c, 5 / p_star - 5 / r_star),
        Identity("p_star_lt_5_over_sc", p_star, 5 / s_c if s_c != 0 else INF, "<"),
        Identity("p_star_gt_2", p_star, Fraction(2), ">"),
        Identity("p_star_lt_10", p_star, Fraction(10), "<"),
    ]
    lower = Fraction(2 * N) / (N - 2 * s_c)
    rep.notes.append(
        f"(a*, r*) meets the H^s_c scaling relation; r* = {fmt(r_star)} against the window "
        f"[{fmt(lower)}, 10) gives admissible = {fmt(a_star_adm)}"
    )

    def gamma_rhs(n_over_beta):
        return Fraction(N + 4, 2) - eps - n_over_beta

    def beta_chain(inv_r1):
        return N * inv_r1 + N * (alpha - theta) / r_star + N / r_star

    beta_closed = {
        "ball": Fraction(2 * N) / (N + 4 - 2 * b - 2 * theta * (2 - s_c) - 2 * eps),
        "complement": Fraction(2 * N) / (N + 4 - 2 * b + 2 * theta * s_c - 2 * eps),
    }
    _region_identities(N, b, alpha, theta, s_c, gamma_rhs, beta_chain, beta_closed, Fraction(N, 2), rep)
    return rep


_STRUCTURAL = ("_B_admissible", "_Hsc_admissible")


def _margins(base: LemmaExponentReport) -> List[Margin]:
    """Strict and non-strict margins of a construction, as extractors on a report."""
    margins: List[Margin] = []
    for ident in base.identities:
        if ident.relation == "=" or ident.name.endswith(_STRUCTURAL):
            continue

        def f(rep, name=ident.name, rel=ident.relation):
            i = rep.identity(name)
            if is_inf(i.rhs):
                return Fraction(1)
            return (i.lhs - i.rhs) if rel in (">", ">=") else (i.rhs - i.lhs)

        margins.append((ident.name, f, ident.relation in ("<", ">")))
    for pname, pair in base.pairs.items():
        if pname == "a_star":
            continue
        lo, lo_closed, hi, hi_closed = recip_r_window(pair.s, pair.dim)
        margins.append((f"{pname}_r_lower", lambda rep, p=pname, lo=lo: recip(rep.pairs[p].r) - lo, not lo_closed))
        margins.append((f"{pname}_r_upper", lambda rep, p=pname, hi=hi: hi - recip(rep.pairs[p].r), not hi_closed))
    return margins


def _window(builder, params, theta: Fraction, eps: Fraction, var: str) -> Exponent:
    """Supremum of the valid window of ``var`` with the other parameter held fixed."""
    margins = _margins(builder(params, theta, eps))
    sampled: Dict[str, List[Tuple[Fraction, Fraction]]] = {name: [] for name, _, _ in margins}
    strict = {name: s for name, _, s in margins}
    n_ok = 0
    for t in _SAMPLES:
        try:
            rep = builder(params, t if var == "theta" else theta, t if var == "eps" else eps)
            values = [(name, f(rep)) for name, f, _ in margins]
        except ZeroDivisionError:
            continue
        for name, v in values:
            sampled[name].append((t, v))
        n_ok += 1
        if n_ok == 5:
            break
    if n_ok < 4:
        raise RuntimeError("could not sample the construction")
    return _first_exit(sampled, strict)


def _margins_hold(rep: LemmaExponentReport) -> bool:
    return all((f(rep) > 0) if s else (f(rep) >= 0) for _, f, s in _margins(rep))


def _check_window(name: str, value: Fraction, limit: Exponent):
    if value < 0:
        raise ParameterRangeError(name, value, limit)
    if value > 0 and not value < limit:
        raise ParameterRangeError(name, value, limit)


def lemma32_exponents(params_or_dim, b=None, alpha=None, theta=None, eps=None) -> LemmaExponentReport:
    """Exponents behind the gradient estimate of the nonlinearity, ``N in {5, 6, 7}``.

    Accepts either a :class:`ProblemParams` or ``(N, b, alpha)``. ``theta``
    defaults to half its supremum; for ``N = 5`` ``eps`` likewise. A zero
    ``theta`` (or ``eps``) evaluates the closed forms at the formal limit, in
    which case strict inequalities may fail and ``formal_limit`` is set.

    Raises:
        PreconditionError: hypotheses of the lemma fail.
        ParameterRangeError: ``theta`` or ``eps`` outside its window.
    """
    params = _coerce_params(params_or_dim, b, alpha)
    N = params.dim
    _require(params, TheoremId.THM_GWPH2, [("N in {5,6,7}", N in (5, 6, 7))])
    return _small_parameter_report(_lemma32_build, params, theta, eps, uses_eps=(N == 5))


def lemma33_exponents(b, alpha=None, theta=None, eps=None) -> LemmaExponentReport:
    """Exponents behind the ``N = 5`` Laplacian estimates and the Picard threshold pair ``p*``.

    Raises:
        PreconditionError: hypotheses of the lemma fail.
        ParameterRangeError: ``theta`` or ``eps`` outside its window.
    """
    if isinstance(b, ProblemParams):
        params = b
        if params.dim != 5:
            raise PreconditionError("hypotheses violated: N = 5")
    else:
        params = ProblemParams(5, b, alpha)
    _require(params, TheoremId.THM_GWPH2_N5)
    return _small_parameter_report(_lemma33_build, params, theta, eps, uses_eps=True)


def _coerce_params(params_or_dim, b, alpha) -> ProblemParams:
    if isinstance(params_or_dim, ProblemParams):
        return params_or_dim
    return ProblemParams(int(params_or_dim), b, alpha)


def _small_parameter_report(builder, params, theta, eps, uses_eps: bool) -> LemmaExponentReport:
    zero = Fraction(0)
    eps_f = as_fraction(eps) if eps is not None else None
    if not uses_eps:
        eps_f = zero
    theta_f = as_fraction(theta) if theta is not None else None

    if theta_f is None:
        theta_f = _window(builder, params, zero, eps_f if eps_f is not None else zero, "theta") / 2
        if uses_eps and eps_f is None:
            eps_f = _window(builder, params, theta_f, zero, "eps") / 2
            while not _margins_hold(builder(params, theta_f, eps_f)):
                theta_f /= 2
                eps_f /= 2
    elif eps_f is None:
        eps_f = _window(builder, params, theta_f, zero, "eps") / 2

    theta_max = _window(builder, params, zero, eps_f, "theta")
    if theta_max == 0:
        raise PreconditionError("no admissible theta: some strict inequality fails for every theta > 0")
    _check_window("theta", theta_f, theta_max)
    eps_max = None
    if uses_eps:
        eps_max = _window(builder, params, theta_f, zero, "eps")
        if eps_max == 0:
            raise PreconditionError("no admissible eps at this theta")
        _check_window("eps", eps_f, eps_max)

    rep = builder(params, theta_f, eps_f)
    rep.theta_max = theta_max
    rep.eps_max = eps_max
    rep.formal_limit = theta_f == 0 or (uses_eps and eps_f == 0)
    return rep


def lemma41_exponents(N: int, b) -> LemmaExponentReport:
    """Exponents of the energy-critical nonlinear estimate, ``5 <= N <= 11``.

    Raises:
        PreconditionError: ``alpha = (8-2b)/(N-4)`` with ``0 < b < (12-N)/(N-2)``
            and ``5 <= N <= 11`` is not satisfiable for these inputs.
    """
    b = as_fraction(b)
    if not 5 <= N <= 11:
        raise PreconditionError(f"hypotheses violated: 5 <= N <= 11 (N = {N})")
    alpha = (8 - 2 * b) / (N - 4)
    params = ProblemParams(N, b, alpha)
    _require(params, TheoremId.THM_ENERGY_CRITICAL)
    q = 2 * (N + 4) * (b + 1) / (b * (N - 2) + N - 4)
    r = 2 * N * (N + 4) * (b + 1) / (N * N + b * (N * N + 8) + 16)
    r_bar = Fraction(2 * (N + 4), N - 4)
    beta = N * r / (N - r)
    rep = LemmaExponentReport("4.1", params, Fraction(0), Fraction(0))
    rep.pairs["q_crit"] = ExponentPair(q, r, Fraction(0), N)
    rep.pairs["r_bar_crit"] = ExponentPair(r_bar, r_bar, Fraction(2), N)
    rep.auxiliaries.update(alpha=alpha, q=q, r=r, r_bar=r_bar, beta_crit=beta)
    rep.identities += [
        Identity("beta_lt_N", beta, Fraction(N), "<"),
        Identity("space_holder", Fraction(N + 2, 2 * N), (alpha - b) / r_bar + b / beta + 1 / beta),
        Identity("time_holder", Fraction(1, 2), (alpha - b) / r_bar + b / q + 1 / q),
        Identity("sobolev_gradient", Fraction(1), N / r - N / beta),
        Identity("q_crit_B_admissible", rep.pairs["q_crit"].admissible, True),
        Identity("alpha_minus_b_minus_1_positive", alpha - b - 1, Fraction(0), ">"),
        Identity("r_bar_H2_scaling", 4 / r_bar, Fraction(N, 2) - N / r_bar - 2),
    ]
    rep.notes.append(
        "r_bar_crit satisfies the H^2 scaling relation but the H^2 window for r is empty when N >= 5, "
        "so its admissible column is false"
    )
    return rep


def lemma_report(lemma: str, dim: int, b, alpha=None, theta=None, eps=None) -> LemmaExponentReport:
    """Dispatch on ``"3.2"``, ``"3.3"`` or ``"4.1"``."""
    if lemma == "3.2":
        return lemma32_exponents(dim, b, alpha, theta, eps)
    if lemma == "3.3":
        if dim != 5:
            raise PreconditionError("hypotheses violated: N = 5")
        return lemma33_exponents(b, alpha, theta, eps)
    if lemma == "4.1":
        return lemma41_exponents(dim, b)
    raise ValueError(f"unknown lemma {lemma!r}; expected 3.2, 3.3 or 4.1")


def default_family(s, N: int, count: int = 5, inset: Fraction = Fraction(1, 100)) -> List[ExponentPair]:
    """``count`` admissible pairs evenly spaced in ``1/r`` across the window, ends pulled in by ``inset``."""
    s = as_fraction(s)
    lo, _, hi, _ = recip_r_window(s, N)
    lo, hi = lo + inset, hi - inset
    if hi < lo:
        raise ValueError(f"empty admissible window for s = {fmt(s)}, N = {N}")
    pairs = []
    for k in range(count):
        x = lo + (hi - lo) * Fraction(k, max(count - 1, 1))
        q = from_recip((Fraction(N, 2) - N * x - s) / 4)
        pairs.append(ExponentPair(q, from_recip(x), s, N))
    return pairs
