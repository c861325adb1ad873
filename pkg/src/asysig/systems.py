"""Asynchronous systems: multi-valued maps from input signals to state sets.

A model answers three questions about an admissible input ``u``: is ``x``
a possible state (:func:`membership`), what is the unique state when the
model is deterministic (:func:`eval_deterministic`), and which states
switch only on the points of a finite grid (:func:`enumerate_states`).
:func:`brute_force_states` answers the last question a second way, by
filtering every grid signal through membership.

Most models constrain ``x(t)`` pointwise by bounds that depend on ``u``
only; they derive from :class:`PointwiseModel`, whose bounds are constant
between a known set of breakpoints.  That is what makes exact membership
and enumeration finite.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import kernels
from .errors import (BadParameter, BudgetExceeded, GridTooCoarse, InadmissibleInput,
                     NotDeterministic, WidthMismatch)
from .signal import (BinarySignal, TimeGrid, as_time, format_time, phi, sample_points,
                     translate)

DEFAULT_BUDGET = 1 << 16

StateSet = frozenset


def _budget() -> int:
    return int(os.environ.get("ASYSIG_BUDGET", DEFAULT_BUDGET))


def _positive(name, value, allow_zero=False):
    value = as_time(value)
    if value < 0 or (value == 0 and not allow_zero):
        raise BadParameter(f"{name} must be {'>= 0' if allow_zero else '> 0'}, got {format_time(value)}")
    return value


class SystemModel:
    """Base class.  Subclasses set ``kind`` and implement :meth:`contains`."""

    kind = "abstract"
    deterministic = False

    def __init__(self, input_width: int, state_width: int, name: str | None = None):
        self.input_width = input_width
        self.state_width = state_width
        self.name = name or self.kind

    def admissible(self, u: BinarySignal) -> bool:
        return u.width == self.input_width

    def contains(self, u: BinarySignal, x: BinarySignal) -> bool:
        raise NotImplementedError

    def evaluate(self, u: BinarySignal) -> BinarySignal:
        raise NotDeterministic(f"{self.name} ({self.kind}) is not deterministic")

    def states(self, u: BinarySignal, grid: TimeGrid) -> frozenset:
        if self.deterministic:
            x = self.evaluate(u)
            if not grid.covers(x):
                raise GridTooCoarse(f"state {x} of {self.name} switches off the grid {grid}")
            return frozenset([x])
        raise NotImplementedError

    def grid_hint(self, u: BinarySignal) -> set:
        """Instants a grid should contain for this input's states to be representable."""
        if self.deterministic:
            return set(self.evaluate(u).times) | set(u.times)
        return set(u.times)

    def delays(self) -> tuple:
        """Own delay parameters (seed the checkers' window-size search)."""
        return ()

    def params(self) -> dict:
        return {}

    def __repr__(self):
        ps = ", ".join(f"{k}={format_time(v) if isinstance(v, Fraction) else v}"
                       for k, v in self.params().items())
        return f"{type(self).__name__}({ps})"


class PointwiseModel(SystemModel):
    """``x`` is a state of ``u`` iff ``lower(t) <= x(t) <= upper(t)`` bitwise for all t.

    ``bounds`` must be constant on every open interval between consecutive
    ``breakpoints(u)`` and is evaluated exactly at the breakpoints.
    """

    def breakpoints(self, u: BinarySignal) -> set:
        raise NotImplementedError

    def bounds(self, u: BinarySignal, probes: Sequence[Fraction]) -> tuple[list[int], list[int]]:
        raise NotImplementedError

    def contains(self, u, x):
        if x.width != self.state_width:
            return False
        probes = sample_points(self.breakpoints(u) | set(x.times))
        lowers, uppers = self.bounds(u, probes)
        xs = kernels.values(x, probes)
        return all(not (lo & ~v) and not (v & ~up) for lo, v, up in zip(lowers, xs, uppers))

    def piece_constraints(self, u, grid: TimeGrid):
        """Probe times, the grid piece of each probe, and the bounds there.

        Piece 0 is ``(-inf, g0)``; piece ``i`` is ``[g(i-1), g(i))``.
        """
        probes = sample_points(self.breakpoints(u) | set(grid.points))
        pieces = kernels.values(BinarySignal(_width_for(len(grid)), 0,
                                             [(g, i + 1) for i, g in enumerate(grid.points)]), probes)
        lowers, uppers = self.bounds(u, probes)
        return probes, pieces, lowers, uppers

    def states(self, u, grid):
        if self.deterministic:
            return super().states(u, grid)
        _, pieces, lowers, uppers = self.piece_constraints(u, grid)
        mask = (1 << self.state_width) - 1
        need = [0] * (len(grid) + 1)
        allow = [mask] * (len(grid) + 1)
        for k, lo, up in zip(pieces, lowers, uppers):
            need[k] |= lo
            allow[k] &= up
        choices = []
        for lo, up in zip(need, allow):
            if lo & ~up:
                return frozenset()
            choices.append(_between(lo, up))
        out = set()
        for combo in itertools.product(*choices):
            out.add(BinarySignal.sample(self.state_width, combo[0], grid.points, combo[1:]))
        return frozenset(out)

    def grid_hint(self, u):
        if self.deterministic:
            return super().grid_hint(u)
        # bounds may differ at a breakpoint and just after it, so every
        # breakpoint needs a grid point strictly inside the following gap
        pts = sorted(self.breakpoints(u) | set(u.times))
        if not pts:
            return {Fraction(0)}
        return set(pts) | {(a + b) / 2 for a, b in zip(pts, pts[1:])} | {pts[-1] + 1}


def _width_for(n: int) -> int:
    return max(1, (n + 1).bit_length())


def _between(lo: int, up: int) -> list[int]:
    """Every word w with lo <= w <= up bitwise."""
    free = up & ~lo
    out, sub = [], free
    while True:
        out.append(lo | sub)
        if sub == 0:
            break
        sub = (sub - 1) & free
    return out


def _shift(points: Iterable, *offsets) -> set:
    return {p + o for p in points for o in offsets}


# ---------------------------------------------------------------------------
# deterministic models

@dataclass(frozen=True)
class TruthTable:
    """``F: B^m -> B^n`` as ``2**m`` output words indexed by the input word."""

    inputs: int
    outputs: int
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != 1 << self.inputs:
            raise BadParameter(f"truth table needs {1 << self.inputs} rows, got {len(self.rows)}")
        if any(not 0 <= r < 1 << self.outputs for r in self.rows):
            raise BadParameter("truth table row out of range")

    @classmethod
    def from_function(cls, fn: Callable[[int], int], inputs: int, outputs: int = 1) -> "TruthTable":
        return cls(inputs, outputs, tuple(fn(w) for w in range(1 << inputs)))

    def __call__(self, w: int) -> int:
        return self.rows[w]


class IdealCombinational(PointwiseModel):
    """``x(t) = F(u(t - d))``."""

    kind = "combinational"
    deterministic = True

    def __init__(self, table: TruthTable, d=0, name=None):
        super().__init__(table.inputs, table.outputs, name)
        self.table = table
        self.d = _positive("d", d, allow_zero=True)

    def breakpoints(self, u):
        return _shift(u.times, self.d)

    def bounds(self, u, probes):
        vals = [self.table(w) for w in kernels.values(u, [p - self.d for p in probes])]
        return vals, vals

    def evaluate(self, u):
        if not self.admissible(u):
            raise InadmissibleInput(f"input width {u.width} != {self.input_width}")
        return BinarySignal.build(self.state_width, self.table(u.initial),
                                  [(t + self.d, self.table(w)) for t, w in u.switches])

    def delays(self):
        return (self.d,) if self.d else ()

    def params(self):
        return {"d": self.d, "inputs": self.input_width}


class PureDelay(PointwiseModel):
    """``x(t) = u(t - d)``, ``d > 0``."""

    kind = "pure_delay"
    deterministic = True

    def __init__(self, d, width: int = 1, name=None):
        super().__init__(width, width, name)
        self.d = _positive("d", d)

    def breakpoints(self, u):
        return _shift(u.times, self.d)

    def bounds(self, u, probes):
        vals = kernels.values(u, [p - self.d for p in probes])
        return vals, vals

    def evaluate(self, u):
        return translate(u, self.d)

    def delays(self):
        return (self.d,)

    def params(self):
        return {"d": self.d}


class PhiWindow(PointwiseModel):
    """``x(t)`` is the AND of ``u`` over ``[t - 2 phi(u), t - phi(u)]``."""

    kind = "phi_window"
    deterministic = True

    def __init__(self, width: int = 1, name=None):
        super().__init__(width, width, name)

    def breakpoints(self, u):
        p = phi(u)
        return _shift(u.times, p, 2 * p)

    def bounds(self, u, probes):
        p = phi(u)
        meets, _ = kernels.folds(u, [t - 2 * p for t in probes], [t - p for t in probes], True)
        return meets, meets

    def evaluate(self, u):
        p = phi(u)
        if p == 0:
            return u
        times = sorted(self.breakpoints(u))
        lo = [t - 2 * p for t in times] + [times[0] - 1 - 2 * p]
        hi = [t - p for t in times] + [times[0] - 1 - p]
        meets, _ = kernels.folds(u, lo, hi, True)
        return BinarySignal.build(u.width, meets[-1], zip(times, meets[:-1]))


class InertialDelay(SystemModel):
    """``Dx(t) = (x(t-0) ^ u(t-0)) & ~OR{Du(s) : t-d < s < t}`` with ``x(-inf+0) = u(-inf+0)``."""

    kind = "inertial_delay"
    deterministic = True

    def __init__(self, d, width: int = 1, name=None):
        super().__init__(width, width, name)
        self.d = _positive("d", d)

    def evaluate(self, u):
        return eval_inertial(self.d, u)

    def contains(self, u, x):
        if x.width != self.state_width:
            return False
        d = self.d
        probes = sample_points(set(u.times) | _shift(u.times, d) | set(x.times))
        x_now = kernels.values(x, probes)
        x_prev = kernels.values(x, probes, left=True)
        u_prev = kernels.values(u, probes, left=True)
        # Du over (t-d, t): OR of u's switch changes strictly inside
        changed = _open_window_activity(u, probes, d)
        for xn, xp, up, act in zip(x_now, x_prev, u_prev, changed):
            if xn ^ xp != (xp ^ up) & ~act:
                return False
        return True

    def filter_rows(self, u, grid: TimeGrid, rows) -> list:
        """Grid candidates (initial word, one word per point) solving the equation.

        Same test as :meth:`contains` with the probes of the whole grid, so
        the brute-force oracle avoids one probe computation per candidate.
        """
        d = self.d
        probes = sample_points(set(u.times) | _shift(u.times, d) | set(grid.points))
        stairs = BinarySignal(_width_for(len(grid)), 0, [(g, i + 1) for i, g in enumerate(grid.points)])
        now = kernels.values(stairs, probes)
        before = kernels.values(stairs, probes, left=True)
        u_prev = kernels.values(u, probes, left=True)
        checks = list(zip(now, before, u_prev, _open_window_activity(u, probes, d)))
        return [r for r in rows
                if all(r[n] ^ r[b] == (r[b] ^ up) & ~act for n, b, up, act in checks)]

    def delays(self):
        return (self.d,)

    def params(self):
        return {"d": self.d}


def _open_window_activity(u: BinarySignal, probes, d) -> list[int]:
    """Per probe t, the bitwise OR of Du(s) over s in (t-d, t)."""
    out = []
    prev = [u.initial] + list(u.words[:-1])
    for t in probes:
        acc = 0
        for s, w, p in zip(u.times, u.words, prev):
            if t - d < s < t:
                acc |= w ^ p
        out.append(acc)
    return out


def eval_inertial(d, u: BinarySignal) -> BinarySignal:
    """Inertial delay: a change of ``u`` reaches ``x`` only if ``u`` then holds still for ``d``.

    Coordinates are independent; each one switches at ``s + d`` after a
    switch ``s`` of that coordinate when the next switch of the same
    coordinate is no earlier than ``s + d`` and the new value differs from
    the state.
    """
    d = _positive("d", d)
    events = []
    for i in range(u.width):
        shift = u.width - 1 - i
        bit_times = []
        prev = (u.initial >> shift) & 1
        for t, w in u.switches:
            b = (w >> shift) & 1
            if b != prev:
                bit_times.append((t, b))
                prev = b
        state = (u.initial >> shift) & 1
        for k, (s, b) in enumerate(bit_times):
            nxt = bit_times[k + 1][0] if k + 1 < len(bit_times) else None
            if b != state and (nxt is None or s + d <= nxt):
                events.append((s + d, shift, b))
                state = b
    events.sort()
    value = u.initial
    switches = []
    for t, group in itertools.groupby(events, key=lambda e: e[0]):
        for _, shift, b in group:
            value = (value & ~(1 << shift)) | (b << shift)
        switches.append((t, value))
    return BinarySignal.build(u.width, u.initial, switches)


class ConstState(SystemModel):
    """``f(u) = {state}`` for every input."""

    kind = "const_state"
    deterministic = True

    def __init__(self, state: BinarySignal, input_width: int = 1, name=None):
        super().__init__(input_width, state.width, name)
        self.state = state

    def evaluate(self, u):
        return self.state

    def contains(self, u, x):
        return x == self.state

    def params(self):
        return {"state": str(self.state)}


# ---------------------------------------------------------------------------
# non-deterministic pointwise models

class BoundedDelayWindow(PointwiseModel):
    """AND of u over ``[t-dr, t)`` <= x(t) <= OR of u over ``[t-df, t)``."""

    kind = "bounded_delay"

    def __init__(self, dr, df, width: int = 1, name=None):
        super().__init__(width, width, name)
        self.dr = _positive("dr", dr)
        self.df = _positive("df", df)

    def breakpoints(self, u):
        return set(u.times) | _shift(u.times, self.dr, self.df)

    def bounds(self, u, probes):
        lowers, _ = kernels.folds(u, [t - self.dr for t in probes], probes, False)
        _, uppers = kernels.folds(u, [t - self.df for t in probes], probes, False)
        return lowers, uppers

    def delays(self):
        return tuple(sorted({self.dr, self.df}))

    def params(self):
        return {"dr": self.dr, "df": self.df}


class BoundedDelayClosed(PointwiseModel):
    """AND of u over ``[t-d', t-d]`` <= x(t) <= OR over the same window, ``0 <= d <= d'``."""

    kind = "bounded_delay_closed"

    def __init__(self, d, dprime, width: int = 1, name=None):
        super().__init__(width, width, name)
        self.d = _positive("d", d, allow_zero=True)
        self.dprime = _positive("dprime", dprime, allow_zero=True)
        if self.dprime < self.d:
            raise BadParameter("need d <= dprime")

    @property
    def degenerate(self) -> bool:
        """``d == 0``: the window touches the present input value."""
        return self.d == 0

    def breakpoints(self, u):
        return _shift(u.times, self.d, self.dprime)

    def bounds(self, u, probes):
        return kernels.folds(u, [t - self.dprime for t in probes], [t - self.d for t in probes], True)

    def delays(self):
        return tuple(sorted({self.d, self.dprime} - {0}))

    def params(self):
        return {"d": self.d, "dprime": self.dprime}


class ParityLower(PointwiseModel):
    """``x(t) >= 1`` whenever an odd number of input switches lie in ``(-inf, t]``."""

    kind = "parity_lower"

    def __init__(self, input_width: int = 1, name=None):
        super().__init__(input_width, 1, name)

    def breakpoints(self, u):
        return set(u.times)

    def bounds(self, u, probes):
        counter = BinarySignal.build(1, 0, [(t, (k + 1) & 1) for k, t in enumerate(u.times)])
        return kernels.values(counter, probes), [1] * len(probes)


class MonotoneCover(PointwiseModel):
    """``x(t) >= u(t-0)`` bitwise."""

    kind = "monotone_cover"

    def __init__(self, width: int = 1, name=None):
        super().__init__(width, width, name)

    def breakpoints(self, u):
        return set(u.times)

    def bounds(self, u, probes):
        mask = (1 << self.state_width) - 1
        return kernels.values(u, probes, left=True), [mask] * len(probes)


# ---------------------------------------------------------------------------
# explicit and derived systems

class Tabulated(SystemModel):
    """A finite map from inputs to explicitly listed state sets.

    Inputs outside the map are inadmissible.  Enumeration refuses grids
    that miss a listed state's switch instants.
    """

    kind = "tabulated"

    def __init__(self, table: Mapping[BinarySignal, Iterable[BinarySignal]], name=None):
        table = {u: frozenset(xs) for u, xs in table.items()}
        if not table:
            raise BadParameter("a tabulated system needs at least one input")
        in_w = {u.width for u in table}
        st_w = {x.width for xs in table.values() for x in xs}
        if any(not xs for xs in table.values()):
            raise BadParameter("every listed input needs a non-empty state set")
        if len(in_w) != 1 or len(st_w) != 1:
            raise WidthMismatch("tabulated inputs (and states) must share one width")
        super().__init__(in_w.pop(), st_w.pop(), name)
        self.table = table
        self.deterministic = all(len(xs) == 1 for xs in table.values())

    @classmethod
    def from_function(cls, fn: Callable[[BinarySignal], object], corpus: Iterable[BinarySignal],
                      name=None) -> "Tabulated":
        """Tabulate ``fn`` (returning one signal or an iterable of them) on ``corpus``."""
        table = {}
        for u in corpus:
            out = fn(u)
            table[u] = [out] if isinstance(out, BinarySignal) else list(out)
        return cls(table, name)

    @property
    def domain(self) -> list[BinarySignal]:
        return list(self.table)

    def admissible(self, u):
        return u in self.table

    def contains(self, u, x):
        return x in self.table.get(u, ())

    def evaluate(self, u):
        if not self.deterministic:
            return super().evaluate(u)
        (x,) = self.table[u]
        return x

    def states(self, u, grid):
        xs = self.table[u]
        for x in xs:
            if not grid.covers(x):
                raise GridTooCoarse(f"listed state {x} switches off the grid {grid}")
        return xs

    def grid_hint(self, u):
        return set(u.times).union(*(x.times for x in self.table[u]))

    def params(self):
        return {"inputs": len(self.table)}


class Restricted(SystemModel):
    """Subsystem with the same state map on a smaller set of admissible inputs."""

    kind = "restricted"

    def __init__(self, base: SystemModel, admissible: Callable[[BinarySignal], bool], name=None):
        super().__init__(base.input_width, base.state_width, name or f"{base.name}|U")
        self.base = base
        self._pred = admissible
        self.deterministic = base.deterministic

    def admissible(self, u):
        return self.base.admissible(u) and bool(self._pred(u))

    def contains(self, u, x):
        return self.base.contains(u, x)

    def evaluate(self, u):
        return self.base.evaluate(u)

    def states(self, u, grid):
        return self.base.states(u, grid)

    def grid_hint(self, u):
        return self.base.grid_hint(u)

    def delays(self):
        return self.base.delays()


# ---------------------------------------------------------------------------
# operations

def _require(f: SystemModel, u: BinarySignal):
    if not f.admissible(u):
        raise InadmissibleInput(f"{u} is not an admissible input of {f.name}")


def membership(f: SystemModel, u: BinarySignal, x: BinarySignal) -> bool:
    _require(f, u)
    if x.width != f.state_width:
        raise WidthMismatch(f"state width {x.width} != {f.state_width}")
    return f.contains(u, x)


def eval_deterministic(f: SystemModel, u: BinarySignal) -> BinarySignal:
    if not f.deterministic:
        raise NotDeterministic(f"{f.name} ({f.kind}) is not deterministic")
    _require(f, u)
    return f.evaluate(u)


def enumerate_states(f: SystemModel, u: BinarySignal, grid: TimeGrid) -> frozenset:
    """Every state of ``f(u)`` whose switches lie on ``grid``."""
    _require(f, u)
    return f.states(u, grid)


def candidate_count(width: int, grid: TimeGrid) -> int:
    return (1 << width) ** (len(grid) + 1)


def brute_force_states(f: SystemModel, u: BinarySignal, grid: TimeGrid,
                       budget: int | None = None) -> frozenset:
    """Independent oracle: filter every grid signal through membership."""
    _require(f, u)
    budget = _budget() if budget is None else budget
    n = f.state_width
    total = candidate_count(n, grid)
    if total > budget:
        raise BudgetExceeded(f"{total} candidate signals exceed the budget of {budget}")
    words = range(1 << n)
    rows = list(itertools.product(words, repeat=len(grid) + 1))
    if isinstance(f, PointwiseModel):
        _, pieces, lowers, uppers = f.piece_constraints(u, grid)
        keep = kernels.filter_candidates(pieces, lowers, uppers, rows, n)
        rows = [r for r, k in zip(rows, keep) if k]
        return frozenset(BinarySignal.sample(n, r[0], grid.points, r[1:]) for r in rows)
    if isinstance(f, InertialDelay):
        return frozenset(BinarySignal.sample(n, r[0], grid.points, r[1:]) for r in f.filter_rows(u, grid, rows))
    out = set()
    for r in rows:
        x = BinarySignal.sample(n, r[0], grid.points, r[1:])
        if f.contains(u, x):
            out.add(x)
    return frozenset(out)


def adequate_grid(f: SystemModel, corpus: Iterable[BinarySignal], extra: Iterable = ()) -> TimeGrid:
    """Smallest grid holding every instant the model needs for this corpus."""
    pts = set(as_time(p) for p in extra)
    for u in corpus:
        pts |= f.grid_hint(u)
    return TimeGrid.of(pts or [0])


@dataclass
class Check:
    """Outcome of a relation check; falsy with a witness when it fails."""

    ok: bool
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def subsystem_check(f: SystemModel, g: SystemModel, corpus: Iterable[BinarySignal],
                    grid: TimeGrid) -> Check:
    """Is ``f`` a subsystem of ``g`` on the corpus: U_f within U_g and f(u) within g(u)."""
    if (f.input_width, f.state_width) != (g.input_width, g.state_width):
        raise WidthMismatch("subsystem check needs equal input and state widths")
    for u in corpus:
        if not f.admissible(u):
            continue
        if not g.admissible(u):
            return Check(False, {"u": u, "reason": "admissible for f but not for g"})
        for x in sorted(enumerate_states(f, u, grid)):
            if not g.contains(u, x):
                return Check(False, {"u": u, "x": x})
    return Check(True)


def time_invariance_check(f: SystemModel, corpus: Iterable[BinarySignal], shifts: Iterable,
                          grid: TimeGrid) -> Check:
    """``x in f(u)`` implies ``x o tau^d in f(u o tau^d)`` for each corpus input and shift.

    States of the shifted input are enumerated on the shifted grid.
    """
    shifts = [as_time(d) for d in shifts]
    for u in corpus:
        xs = enumerate_states(f, u, grid)
        for d in shifts:
            ud = translate(u, d)
            if not f.admissible(ud):
                return Check(False, {"u": u, "d": d, "reason": "translated input not admissible"})
            ys = enumerate_states(f, ud, grid.shifted(d))
            for x in sorted(xs):
                if translate(x, d) not in ys:
                    return Check(False, {"u": u, "d": d, "x": x})
    return Check(True)
