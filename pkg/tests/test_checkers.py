import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from asysig import (BoundedDelayClosed, BoundedDelayWindow, ConstState, Domain, InertialDelay, MissingBounds,
                    MonotoneCover, NaProperty, NotASubsystem, PhiWindow, PureDelay, SearchBounds, Tabulated,
                    TimeGrid, UnstableEnumeration, Verdict, adequate_grid, check_condition, check_def31,
                    check_def51, check_lemma35, check_star, chi, chi_before, constant, enumerate_states,
                    grid_signals, implication_audit, replay_witness, representative_times, restrict)
from asysig.catalog import DEFAULT_CORPUS, load_corpus, load_systems, pair_corpus
from asysig.checkers import ALL, CONDITIONS, STAR, check_all, parse_props

P = NaProperty
PAIR = pair_corpus()
SMALL = grid_signals(TimeGrid([0, 1]))


def run(f, corpus, props=ALL, grid=None):
    grid = grid or adequate_grid(f, corpus)
    return grid, check_all(f, props, corpus, grid)


# -- first-switch causality --------------------------------------------------------

def test_def31_examples():
    v = check_def31(ConstState(chi(0)), [constant(0)])
    assert not v and v.witness["u"] == constant(0) and v.witness["x"] == chi(0)
    assert check_def31(PureDelay(1), grid_signals(TimeGrid([0, 1, 2])))


def test_def31_lagged_witness():
    systems = load_systems()
    v = check_def31(systems["lagged"], load_corpus("lagged.sig"))
    assert not v
    assert v.witness["u"] == chi(2)
    assert (v.witness["inputFirstSwitch"], v.witness["stateFirstSwitch"]) == (2, 0)


def test_def31_vacuous_when_states_constant():
    v = check_def31(ConstState(constant(1)), SMALL)
    assert v and v.vacuous


# -- history dependence ------------------------------------------------------------

def test_def51_examples():
    systems = load_systems()
    assert check_def51(systems["lagged"], load_corpus("lagged.sig"))
    v = check_def51(systems["step_exc"], PAIR)
    assert not v
    assert (v.witness["t"], v.witness["u"], v.witness["v"]) == (1, chi(0), chi(0, 2))
    assert check_def51(InertialDelay(1), SMALL)


@pytest.mark.parametrize("name,def31,def51", [("lagged", False, True), ("step_exc", True, False),
                                              ("adv_exc", False, False)])
def test_independence_quadrants(name, def31, def51):
    f = load_systems()[name]
    corpus = load_corpus("lagged.sig" if name == "lagged" else "pair.sig")
    assert check_def31(f, corpus).passed is def31
    assert check_def51(f, corpus).passed is def51


# -- memory conditions ---------------------------------------------------------------

def test_pure_delay_passes_every_condition():
    _, vs = run(PureDelay(1), SMALL)
    assert all(vs.values())


def test_bounded_delay_models():
    corpus = grid_signals(TimeGrid([0, 1, 2]))
    _, vs = run(BoundedDelayWindow(1, 2), corpus, CONDITIONS)
    assert all(vs.values())
    _, vs = run(BoundedDelayClosed(1, 2), corpus, CONDITIONS[4:])
    assert all(vs.values())


def test_missing_bounds():
    with pytest.raises(MissingBounds):
        check_condition(PureDelay(1), "C_II", SMALL, None, SearchBounds())
    with pytest.raises(MissingBounds):
        check_condition(PureDelay(1), "C_VII", SMALL, None, SearchBounds(d_candidates=[1]))


@pytest.mark.parametrize("model", [PureDelay(1), BoundedDelayWindow(1, 2), MonotoneCover(), PhiWindow()])
@pytest.mark.parametrize("prop", [P.C_II, P.C_III, P.C_IV])
def test_passing_d_stays_passing_for_larger_d(model, prop):
    corpus = grid_signals(TimeGrid([0, 1]))
    grid = adequate_grid(model, corpus)
    ds = [F(1, 2), F(1), F(3, 2), F(2), F(3), F(5)]
    passed = [check_condition(model, prop, corpus, grid, SearchBounds(d_candidates=[d])).passed for d in ds]
    first = passed.index(True) if True in passed else len(ds)
    assert all(passed[first:]), passed


def test_d_refutations_replay():
    f = MonotoneCover()
    grid = adequate_grid(f, SMALL)
    v = check_condition(f, P.C_IV, SMALL, grid, SearchBounds(d_candidates=[F(1, 2), 1]))
    assert not v
    assert {r["d"] for r in v.witness["refutations"]} == {F(1, 2), F(1)}
    assert replay_witness(f, v, grid)


# -- starred conditions -------------------------------------------------------------

def test_star_examples():
    assert check_star(MonotoneCover(), P.STAR_I, grid_signals(TimeGrid([0, 1, 2])))
    for p in STAR:
        assert check_star(ConstState(chi(0)), p, SMALL)


def test_star_i_pure_delay_counterexample():
    # equal tails from 2 and equal values at 2, but v dips on [3/2, 7/4)
    u, v = chi(0), chi(0) ^ chi(F(3, 2), F(7, 4))
    f = PureDelay(1)
    assert restrict(u, Domain.FUTURE, 2) == restrict(v, Domain.FUTURE, 2)
    assert u(1) == v(1)
    verdict = check_star(f, P.STAR_I, [u, v])
    assert not verdict
    assert replay_witness(f, verdict, adequate_grid(f, [u, v]))


def test_star_requires_starred_tag():
    with pytest.raises(ValueError):
        check_star(PureDelay(1), P.C_I, SMALL)


# -- representative instants --------------------------------------------------------

def test_representative_times_examples():
    pts = representative_times(constant(0), constant(0), TimeGrid([0]))
    assert min(pts) < 0 < max(pts) and len(pts) == 3
    pts = representative_times(chi(0), chi(2), TimeGrid([0, 2]))
    assert {F(-1), F(0), F(1), F(2), F(3)} <= set(pts)


@given(st.lists(st.integers(-6, 6).map(lambda n: F(n, 2)), min_size=1, max_size=5, unique=True))
def test_representative_times_idempotent(points):
    grid = TimeGrid.of(points)
    u = chi(min(points))
    pts = representative_times(u, constant(0), grid)
    again = representative_times(u, constant(0), TimeGrid(pts))
    assert set(pts) <= set(again)
    breaks = sorted(set(grid.points) | set(u.times))
    # every gap between consecutive breakpoints has a probe strictly inside
    for a, b in zip(breaks, breaks[1:]):
        assert any(a < p < b for p in pts)


# -- witnesses and the audit --------------------------------------------------------

@pytest.mark.parametrize("name", list(DEFAULT_CORPUS))
def test_shipped_runs_replay_and_audit(name):
    f, corpus = load_systems()[name], load_corpus(DEFAULT_CORPUS[name])
    grid = adequate_grid(f, corpus)
    vs = check_all(f, ALL, corpus, grid)
    assert implication_audit(vs) == []
    for p, v in vs.items():
        if not v:
            assert replay_witness(f, v, grid, None), (name, p)
    if f.deterministic:
        assert vs[P.C_V].passed == vs[P.C_VI].passed
        assert vs[P.DEF5_1].passed == vs[P.C_I].passed


def test_audit_flags_injected_inconsistency():
    found = implication_audit({P.C_IV: Verdict(P.C_IV, True), P.C_III: Verdict(P.C_III, False)})
    assert [(i.stronger, i.weaker) for i in found] == [(P.C_IV, P.C_III)]
    assert implication_audit({"C_IV": True, "C_III": True, "C_II": False}) != []


def test_audit_ignores_mismatched_carriers():
    a = Verdict(P.C_IV, True, carriers={"grid": "0"})
    b = Verdict(P.C_III, False, carriers={"grid": "0,1"})
    assert implication_audit({P.C_IV: a, P.C_III: b}) == []


def test_value_sets_agree_while_restriction_sets_differ():
    f = Tabulated({constant(0): [constant(0), constant(1)], chi(2): [chi_before(0), chi(0)]})
    corpus = [constant(0), chi(2)]
    grid, vs = run(f, corpus, ALL)
    for t in (F(-1), F(0), F(1), F(3, 2)):
        a = {x.bits_at(t) for x in enumerate_states(f, corpus[0], grid)}
        b = {x.bits_at(t) for x in enumerate_states(f, corpus[1], grid)}
        assert a == b == {0, 1}
    assert vs[P.C_VI] and not vs[P.C_V]
    assert implication_audit(vs) == []


def test_unstable_enumeration_is_caught():
    class Flaky(MonotoneCover):
        calls = 0

        def states(self, u, grid):
            Flaky.calls += 1
            full = super().states(u, grid)
            return full if Flaky.calls % 2 else frozenset(list(full)[:1])

    with pytest.raises(UnstableEnumeration):
        check_def31(Flaky(), [chi(0)])


# -- deterministic equivalences on random tables ------------------------------------

@settings(max_examples=25)
@given(st.data())
def test_deterministic_tables_equivalences(data):
    states = grid_signals(TimeGrid([0, 1, 2]))
    table = {u: [data.draw(st.sampled_from(states))] for u in PAIR}
    f = Tabulated(table)
    vs = check_all(f, [P.DEF5_1, P.C_I, P.C_V, P.C_VI], PAIR, adequate_grid(f, PAIR))
    assert vs[P.C_V].passed == vs[P.C_VI].passed
    assert vs[P.DEF5_1].passed == vs[P.C_I].passed


# -- inheritance by subsystems ------------------------------------------------------

def test_lemma35_examples():
    corpus = grid_signals(TimeGrid([0, 1]))
    assert check_lemma35(BoundedDelayWindow(1, 2), PureDelay(1), corpus)
    g = BoundedDelayWindow(1, 2)
    assert check_lemma35(g, g, corpus)
    with pytest.raises(NotASubsystem):
        check_lemma35(PureDelay(1), BoundedDelayWindow(1, 2), corpus)


def test_lemma35_random_subsystems():
    g = BoundedDelayWindow(1, 2)
    corpus = PAIR
    grid = adequate_grid(g, corpus)
    assert check_def31(g, corpus, grid)
    full = {u: sorted(enumerate_states(g, u, grid)) for u in corpus}
    rng = random.Random(35)
    for _ in range(100):
        table = {}
        for u in rng.sample(corpus, rng.randint(1, len(corpus))):
            xs = full[u]
            table[u] = rng.sample(xs, rng.randint(1, len(xs)))
        v = check_lemma35(g, Tabulated(table), corpus, grid)
        assert v.passed and "inheritance consistent" in v.notes


def test_parse_props():
    assert parse_props("all") == list(ALL)
    assert parse_props("def51, iv") == [P.DEF5_1, P.C_IV]
    with pytest.raises(ValueError):
        parse_props("C_X")
