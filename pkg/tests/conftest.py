import os
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from asysig.signal import BinarySignal, TimeGrid

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# quarter-step times in [-4, 4] keep enumeration cheap but exercise fractions
times = st.integers(-16, 16).map(lambda n: Fraction(n, 4))
shifts = st.integers(-12, 12).map(lambda n: Fraction(n, 4))


@st.composite
def signals(draw, width=None, max_switches=4):
    w = draw(st.integers(1, 2)) if width is None else width
    mask = (1 << w) - 1
    ts = sorted(draw(st.sets(times, max_size=max_switches)))
    init = draw(st.integers(0, mask))
    cur, sw = init, []
    for t in ts:
        nxt = draw(st.integers(0, mask).filter(lambda v, c=cur: v != c))
        sw.append((t, nxt))
        cur = nxt
    return BinarySignal(w, init, sw)


@st.composite
def signal_pairs(draw, max_switches=4):
    w = draw(st.integers(1, 2))
    return draw(signals(w, max_switches)), draw(signals(w, max_switches))


@st.composite
def grids(draw, max_points=4):
    return TimeGrid.of(draw(st.sets(st.integers(0, 8).map(lambda n: Fraction(n, 2)), min_size=1,
                                    max_size=max_points)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, title = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
