from fractions import Fraction

from hypothesis import settings, strategies as st

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")


def fractions(lo, hi, max_den=60, *, open_lo=True, open_hi=True):
    """Rationals in an interval, with small denominators."""

    def build(pair):
        num, den = pair
        return Fraction(num, den)

    lo, hi = Fraction(lo), Fraction(hi)

    @st.composite
    def strat(draw):
        den = draw(st.integers(1, max_den))
        n_lo = int(lo * den) - 1
        n_hi = int(hi * den) + 1
        x = Fraction(draw(st.integers(n_lo, n_hi)), den)
        x = min(max(x, lo), hi)
        if (open_lo and x == lo) or (open_hi and x == hi):
            x = (lo + hi) / 2
        return x

    return strat()


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
