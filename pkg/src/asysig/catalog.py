"""Shipped models and corpora.

The tabulated entries encode systems that are only given as formulas on
all of S; they are tabulated on the small corpus in ``pair.sig`` (every
width-1 signal switching inside {0, 2}) so checks can be run from data.
``regenerate()`` rebuilds every data file from the builders below, and the
test suite asserts the shipped files are byte-identical to it.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .constructions import FundamentalModeSpec, TransferSpec
from .dsl import format_corpus, format_system, parse_corpus, parse_systems
from .signal import BinarySignal, TimeGrid, chi, chi_before, constant, grid_signals, translate
from .systems import (BoundedDelayClosed, BoundedDelayWindow, ConstState, IdealCombinational, InertialDelay,
                      MonotoneCover, ParityLower, PhiWindow, PureDelay, SystemModel, Tabulated, TruthTable)

DATA = "data"

# exhaustive width-1 corpora
GRID4 = TimeGrid([0, 1, 2, 3])
PAIR_GRID = TimeGrid([0, 2])


def exhaustive(grid: TimeGrid, width: int = 1) -> list[BinarySignal]:
    return sorted(grid_signals(grid, width))


def pair_corpus() -> list[BinarySignal]:
    return exhaustive(PAIR_GRID)


def lagged_corpus() -> list[BinarySignal]:
    """``pair_corpus`` with the late step first, so the first reported violation is the step at 2."""
    step = chi(2)
    return [step] + [u for u in pair_corpus() if u != step]


def _lagged(u: BinarySignal) -> BinarySignal:
    # chi[0,1) xor (u o tau^1) . chi[1, inf)
    return chi(0, 1) ^ (translate(u, 1) & chi(1))


def _step_exception(u: BinarySignal) -> BinarySignal:
    return constant(1) if u == chi(0) else u


def _advance_exception(u: BinarySignal) -> BinarySignal:
    return constant(1) if u == chi(0) else translate(u, -1)


def build_systems() -> dict[str, SystemModel]:
    pair = pair_corpus()
    xor = TruthTable.from_function(lambda w: (w >> 1) ^ (w & 1), 2)
    systems = [
        PureDelay(1, name="p"),
        ConstState(chi(0), name="anticip"),
        Tabulated.from_function(_lagged, pair, name="lagged"),
        Tabulated.from_function(_step_exception, pair, name="step_exc"),
        Tabulated.from_function(_advance_exception, pair, name="adv_exc"),
        InertialDelay(1, name="inertial"),
        BoundedDelayWindow(1, 2, name="bdw"),
        BoundedDelayWindow(1, 1, name="bdw11"),
        BoundedDelayClosed(1, 2, name="bdc"),
        BoundedDelayClosed(0, 1, name="bdc0"),
        ParityLower(1, name="parity"),
        PhiWindow(1, name="phiw"),
        MonotoneCover(1, name="cover"),
        IdealCombinational(xor, 1, name="xor"),
        # value sets agree at every instant, restriction sets do not
        Tabulated({constant(0): [constant(0), constant(1)], chi(2): [chi_before(0), chi(0)]}, name="split"),
    ]
    return {f.name: f for f in systems}


CORPORA = {
    "corpus.sig": lambda: exhaustive(GRID4),
    "pair.sig": pair_corpus,
    "lagged.sig": lagged_corpus,
    "split.sig": lambda: [constant(0), chi(2)],
    "corpus2.sig": lambda: exhaustive(TimeGrid([0, 1]), 2),
}

# which corpus each shipped system is checked on by default
DEFAULT_CORPUS = {
    "p": "corpus.sig", "anticip": "corpus.sig", "lagged": "lagged.sig", "step_exc": "pair.sig",
    "adv_exc": "pair.sig", "inertial": "corpus.sig", "bdw": "corpus.sig", "bdw11": "corpus.sig",
    "bdc": "corpus.sig", "bdc0": "corpus.sig", "parity": "corpus.sig", "phiw": "corpus.sig",
    "cover": "corpus.sig", "xor": "corpus2.sig", "split": "split.sig",
}


def transfer_delay() -> TransferSpec:
    """Pure delay: from 0 to 1 and on to 1, gluing a step to itself at 2."""
    return TransferSpec(2, 2, chi(0), chi(0), 0, 1, 1, 1)


def transfer_cover() -> TransferSpec:
    return TransferSpec(2, Fraction(1, 2), chi(1, 3), chi(0, 1) ^ chi(2), 1, 1, 1, 1)


def fundamental_mode(times=(0, Fraction(3, 2), 3, Fraction(9, 2))) -> FundamentalModeSpec:
    """Alternating input for ``bdw11`` held for 3/2 before each change (at least dr = df = 1)."""
    t = [Fraction(x) for x in times]
    u = chi(t[0], t[1]) ^ chi(t[2], t[3])
    inputs = [chi(t[0]), chi(t[0], t[1]), chi(t[0], t[1]) ^ chi(t[2])]
    return FundamentalModeSpec(u, t, inputs, [0, 1, 0, 1], 1)


SPECS = {
    "transfer_delay.json": transfer_delay,
    "transfer_cover.json": transfer_cover,
    "fm_bdw11.json": fundamental_mode,
    "fm_bdw11_tight.json": lambda: fundamental_mode((0, Fraction(1, 2), 3, Fraction(9, 2))),
}


def render() -> dict[str, str]:
    """File name -> exact file contents."""
    out = {"systems.dsl": "".join(format_system(f) for f in build_systems().values())}
    for name, make in CORPORA.items():
        out[name] = format_corpus(make())
    for name, make in SPECS.items():
        out[name] = json.dumps(make().to_json(), indent=2) + "\n"
    return out


def regenerate(directory=None) -> list[Path]:
    directory = Path(directory) if directory else Path(str(resources.files("asysig") / DATA))
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in render().items():
        path = directory / name
        path.write_text(text)
        written.append(path)
    return written


def data_path(name: str) -> Path:
    return Path(str(resources.files("asysig") / DATA / name))


def load_systems() -> dict[str, SystemModel]:
    return parse_systems(data_path("systems.dsl").read_text())


def load_corpus(name: str) -> list[BinarySignal]:
    return parse_corpus(data_path(name).read_text())


def shipped_runs():
    """(system name, model, corpus) for every shipped system on its default corpus."""
    systems = load_systems()
    for name, corpus in DEFAULT_CORPUS.items():
        yield name, systems[name], load_corpus(corpus)
