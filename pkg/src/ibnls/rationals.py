"""Exact rational helpers shared by the exponent modules.

Exponents are carried as :class:`fractions.Fraction`. An infinite exponent
(the time exponent of the ``(inf, 2)`` pair) is represented by ``math.inf``;
use :func:`recip` instead of ``1 / q`` so that ``1/inf`` stays an exact zero.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

INF = math.inf

Exponent = Union[Fraction, float]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text: str, allow_inf: bool = False) -> Exponent:
    """Parse ``P/Q`` or an integer literal into a Fraction.

    ``inf`` (or ``∞``) is accepted only when ``allow_inf`` is set.

    Raises:
        ValueError: on anything else, including a zero denominator.
    """
    s = str(text).strip()
    if allow_inf and s.lower() in ("inf", "+inf", "infinity", "∞"):
        return INF
    m = _RATIONAL_RE.match(s)
    if m is None:
        raise ValueError(f"malformed rational {text!r} (expected P/Q or an integer)")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"malformed rational {text!r}: zero denominator")
    return Fraction(num, den)


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and rational strings to Fraction; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        out = parse_rational(value)
        assert isinstance(out, Fraction)
        return out
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def as_exponent(value) -> Exponent:
    """Like :func:`as_fraction` but lets ``inf`` through."""
    if isinstance(value, float) and math.isinf(value) and value > 0:
        return INF
    if isinstance(value, str):
        return parse_rational(value, allow_inf=True)
    return as_fraction(value)


def is_inf(q) -> bool:
    return isinstance(q, float) and math.isinf(q)


def recip(q: Exponent) -> Fraction:
    """Exact reciprocal with ``1/inf == 0``."""
    if is_inf(q):
        return Fraction(0)
    q = as_fraction(q)
    if q == 0:
        raise ZeroDivisionError("reciprocal of zero exponent")
    return 1 / q


def from_recip(x: Fraction) -> Exponent:
    """Inverse of :func:`recip`: ``0`` maps back to ``inf``."""
    return INF if x == 0 else 1 / Fraction(x)


def conjugate(q: Exponent) -> Exponent:
    """Hölder conjugate: ``1/q + 1/q' = 1``."""
    return from_recip(1 - recip(q))


def fmt(value) -> str:
    """Serialize an exact value as ``P/Q`` (integers without ``/1``); inf as ``inf``."""
    if value is None:
        return ""
    if is_inf(value):
        return "inf"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, Fraction)):
        f = Fraction(value)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    return repr(value)
