"""Binary signals over exact rational time.

A signal of width ``n`` is an eventually constant, piecewise constant map
``R -> {0,1}^n``: an initial word (the value on some ``(-inf, t0)``) and a
finite, strictly increasing list of switches.  Pieces are left-closed and
right-open, so ``x(t)`` is the word of the last switch ``<= t`` and the left
limit ``x(t-0)`` is the word of the last switch ``< t``.

Words are stored as ints; coordinate 1 is the most significant bit, which
is also the leftmost character of the textual form (``"10"`` means
coordinate 1 high, coordinate 2 low).
"""

from __future__ import annotations

import enum
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BadWindow, ConstantSignal, NoOpSwitch, NonIncreasingTimes, WidthMismatch

Time = Fraction


def as_time(value) -> Fraction:
    """Coerce ``int``, ``Fraction`` or ``"p/q"`` text to an exact time.

    Floats are refused: every comparison downstream is an exact equality or
    order test.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a time")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"time must be an integer or p/q, got {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot use {type(value).__name__} as an exact time")


def format_time(t: Fraction) -> str:
    if t.denominator == 1:
        return str(t.numerator)
    return f"{t.numerator}/{t.denominator}"


def _mask(width: int) -> int:
    return (1 << width) - 1


@dataclass(frozen=True, slots=True)
class BinaryWord:
    """An element of B^n."""

    bits: int
    width: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("word width must be >= 1")
        if not 0 <= self.bits <= _mask(self.width):
            raise ValueError(f"bits {self.bits} do not fit width {self.width}")

    @classmethod
    def parse(cls, text: str) -> "BinaryWord":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a binary word: {text!r}")
        return cls(int(text, 2), len(text))

    def _other(self, other: "BinaryWord") -> int:
        if other.width != self.width:
            raise WidthMismatch(f"width {self.width} vs {other.width}")
        return other.bits

    def __invert__(self):
        return BinaryWord(~self.bits & _mask(self.width), self.width)

    def __or__(self, other):
        return BinaryWord(self.bits | self._other(other), self.width)

    def __and__(self, other):
        return BinaryWord(self.bits & self._other(other), self.width)

    def __xor__(self, other):
        return BinaryWord(self.bits ^ self._other(other), self.width)

    def __le__(self, other):
        # pointwise order of B^n
        return self.bits & ~self._other(other) == 0

    def __getitem__(self, i: int) -> int:
        """Coordinate ``i`` counted from 0 at the leftmost position."""
        if not 0 <= i < self.width:
            raise IndexError(i)
        return (self.bits >> (self.width - 1 - i)) & 1

    def __str__(self):
        return format(self.bits, f"0{self.width}b")


def word(value, width: int | None = None) -> BinaryWord:
    if isinstance(value, BinaryWord):
        return value
    if isinstance(value, str):
        w = BinaryWord.parse(value)
        if width is not None and w.width != width:
            raise WidthMismatch(f"{value!r} is not {width} bits wide")
        return w
    return BinaryWord(int(value), 1 if width is None else width)


class BinarySignal:
    """Immutable canonical signal: ``initial`` plus ``switches``.

    The constructor is strict (it rejects unordered times and switches that
    do not change the value); :meth:`build` is the lenient factory that
    sorts nothing but silently drops no-op switches.
    """

    __slots__ = ("width", "initial", "times", "words", "_hash")

    def __init__(self, width: int, initial: int, switches: Iterable[tuple] = ()):
        if width < 1:
            raise ValueError("signal width must be >= 1")
        mask = _mask(width)
        initial = int(initial)
        if not 0 <= initial <= mask:
            raise ValueError(f"initial word {initial} does not fit width {width}")
        times, words = [], []
        prev_t, prev_w = None, initial
        for t, w in switches:
            t = as_time(t)
            w = int(w.bits if isinstance(w, BinaryWord) else w)
            if not 0 <= w <= mask:
                raise ValueError(f"word {w} does not fit width {width}")
            if prev_t is not None and t <= prev_t:
                raise NonIncreasingTimes(f"switch time {format_time(t)} does not follow {format_time(prev_t)}")
            if w == prev_w:
                raise NoOpSwitch(f"switch at {format_time(t)} does not change the value")
            times.append(t)
            words.append(w)
            prev_t, prev_w = t, w
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "times", tuple(times))
        object.__setattr__(self, "words", tuple(words))
        object.__setattr__(self, "_hash", hash((width, initial, self.times, self.words)))

    def __setattr__(self, name, value):
        raise AttributeError("BinarySignal is immutable")

    @classmethod
    def build(cls, width: int, initial: int, switches: Iterable[tuple] = ()) -> "BinarySignal":
        """Canonicalize: keep only switches that change the value.

        Times must still be strictly increasing.
        """
        kept = []
        prev = int(initial)
        for t, w in switches:
            w = int(w.bits if isinstance(w, BinaryWord) else w)
            if w != prev:
                kept.append((t, w))
                prev = w
        return cls(width, initial, kept)

    @classmethod
    def sample(cls, width: int, initial: int, times: Sequence, words: Sequence[int]) -> "BinarySignal":
        """Signal taking ``words[i]`` on ``[times[i], times[i+1])``."""
        return cls.build(width, initial, zip(times, words))

    # -- basic queries -------------------------------------------------
    @property
    def switches(self) -> tuple[tuple[Fraction, int], ...]:
        return tuple(zip(self.times, self.words))

    @property
    def final(self) -> int:
        return self.words[-1] if self.words else self.initial

    @property
    def is_constant(self) -> bool:
        return not self.times

    def bits_at(self, t) -> int:
        i = bisect_right(self.times, t)
        return self.words[i - 1] if i else self.initial

    def bits_before(self, t) -> int:
        i = bisect_left(self.times, t)
        return self.words[i - 1] if i else self.initial

    def __call__(self, t) -> BinaryWord:
        return BinaryWord(self.bits_at(as_time(t)), self.width)

    # -- algebra via operators ----------------------------------------
    def __invert__(self):
        return pointwise("not", self)

    def __or__(self, other):
        return pointwise("or", self, other)

    def __and__(self, other):
        return pointwise("and", self, other)

    def __xor__(self, other):
        return pointwise("xor", self, other)

    def __eq__(self, other):
        if not isinstance(other, BinarySignal):
            return NotImplemented
        return (self.width, self.initial, self.times, self.words) == (
            other.width, other.initial, other.times, other.words)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        # arbitrary but total order so enumerations print deterministically
        return self._key() < other._key()

    def _key(self):
        return (self.width, len(self.times), self.times, self.initial, self.words)

    def __repr__(self):
        return f"BinarySignal({self})"

    def __str__(self):
        head = f"{self.width} | {format(self.initial, f'0{self.width}b')} |"
        if not self.times:
            return head
        body = " ; ".join(f"{format_time(t)}:{format(w, f'0{self.width}b')}"
                          for t, w in zip(self.times, self.words))
        return f"{head} {body}"


# -- constructors ------------------------------------------------------------

def constant(value=0, width: int | None = None) -> BinarySignal:
    w = word(value, width)
    return BinarySignal(w.width, w.bits)


def chi(start, end=None) -> BinarySignal:
    """Characteristic function of ``[start, end)`` (``end=None`` means infinity)."""
    start = as_time(start)
    if end is None:
        return BinarySignal(1, 0, [(start, 1)])
    end = as_time(end)
    if end < start:
        raise BadWindow("chi: end before start")
    if end == start:
        return BinarySignal(1, 0)
    return BinarySignal(1, 0, [(start, 1), (end, 0)])


def chi_before(end) -> BinarySignal:
    """Characteristic function of ``(-inf, end)``."""
    return BinarySignal(1, 1, [(as_time(end), 0)])


def stack(*signals: BinarySignal) -> BinarySignal:
    """Juxtapose coordinates: ``stack(a, b)`` has a's bits left of b's."""
    if not signals:
        raise ValueError("stack needs at least one signal")
    width = sum(s.width for s in signals)
    times = sorted({t for s in signals for t in s.times})

    def combine(values):
        out = 0
        for s, v in zip(signals, values):
            out = (out << s.width) | v
        return out

    initial = combine(s.initial for s in signals)
    return BinarySignal.build(width, initial,
                              [(t, combine(s.bits_at(t) for s in signals)) for t in times])


def coordinate(x: BinarySignal, i: int) -> BinarySignal:
    """Coordinate ``i`` (0 = leftmost) as a width-1 signal."""
    shift = x.width - 1 - i
    return BinarySignal.build(1, (x.initial >> shift) & 1,
                              [(t, (w >> shift) & 1) for t, w in x.switches])


# -- the operations ------------------------------------------------------------

def value_at(x: BinarySignal, t) -> BinaryWord:
    return BinaryWord(x.bits_at(as_time(t)), x.width)


def left_limit(x: BinarySignal, t) -> BinaryWord:
    return BinaryWord(x.bits_before(as_time(t)), x.width)


def derivative_support(x: BinarySignal) -> frozenset:
    """Support of ``Dx``.  Canonical signals switch exactly at their switch times."""
    return frozenset(x.times)


def first_switch(x: BinarySignal) -> Fraction:
    if not x.times:
        raise ConstantSignal("a constant signal has no first switch")
    return x.times[0]


def translate(x: BinarySignal, d) -> BinarySignal:
    """``x o tau^d``: the signal ``t -> x(t - d)``."""
    d = as_time(d)
    if d == 0:
        return x
    return BinarySignal(x.width, x.initial, [(t + d, w) for t, w in x.switches])


_OPS = {
    "or": lambda a, b, m: a | b,
    "and": lambda a, b, m: a & b,
    "xor": lambda a, b, m: a ^ b,
}


def pointwise(op: str, x: BinarySignal, y: BinarySignal | None = None) -> BinarySignal:
    op = op.lower()
    mask = _mask(x.width)
    if op == "not":
        if y is not None:
            raise TypeError("not is unary")
        return BinarySignal(x.width, ~x.initial & mask, [(t, ~w & mask) for t, w in x.switches])
    if op not in _OPS:
        raise ValueError(f"unknown pointwise op {op!r}")
    if y is None:
        raise TypeError(f"{op} needs two operands")
    if x.width != y.width:
        raise WidthMismatch(f"width {x.width} vs {y.width}")
    f = _OPS[op]
    times = sorted(set(x.times) | set(y.times))
    return BinarySignal.build(x.width, f(x.initial, y.initial, mask),
                              [(t, f(x.bits_at(t), y.bits_at(t), mask)) for t in times])


def concat(u: BinarySignal, v: BinarySignal, t) -> BinarySignal:
    """``u`` strictly before ``t``, ``v`` from ``t`` on."""
    if u.width != v.width:
        raise WidthMismatch(f"width {u.width} vs {v.width}")
    t = as_time(t)
    head = [(s, w) for s, w in u.switches if s < t]
    tail = [(t, v.bits_at(t))] + [(s, w) for s, w in v.switches if s > t]
    return BinarySignal.build(u.width, u.initial, head + tail)


def splice(pieces: Sequence[BinarySignal], cuts: Sequence) -> BinarySignal:
    """``pieces[0]`` before ``cuts[0]``, ``pieces[k]`` on ``[cuts[k-1], cuts[k])``, the last one after."""
    if len(pieces) != len(cuts) + 1:
        raise ValueError("need exactly one more piece than cuts")
    out = pieces[0]
    for piece, cut in zip(pieces[1:], cuts):
        out = concat(out, piece, cut)
    return out


def parity_integral(u: BinarySignal, t) -> int:
    """1 when an odd number of switches lie in ``(-inf, t]`` (zero counts as even)."""
    return bisect_right(u.times, as_time(t)) & 1


def phi(u: BinarySignal) -> Fraction:
    if u.is_constant:
        return Fraction(0)
    m = first_switch(u)
    return max(-m, m)


def is_in_S0(x: BinarySignal) -> bool:
    return not x.times or x.times[0] >= 0


# -- restrictions --------------------------------------------------------------

class Domain(enum.Enum):
    PAST_OPEN = "past_open"        # (-inf, t)
    PAST_CLOSED = "past_closed"    # (-inf, t]
    FUTURE = "future"              # [t, inf)
    WINDOW = "window"              # [a, b] or [a, b)


@dataclass(frozen=True)
class Restriction:
    """A signal's trace on a domain, in a form where ``==`` means pointwise agreement.

    ``trace`` is ``(first_value, ((t, w), ...))``: the value at the left end
    of the domain (the initial word for half-lines to the left) and every
    switch strictly inside or on a closed right end.  An empty window has
    ``trace = None``.
    """

    kind: Domain
    lo: Fraction | None
    hi: Fraction | None
    closed_end: bool
    width: int
    trace: tuple | None

    def __str__(self):
        lo = "-inf" if self.lo is None else format_time(self.lo)
        hi = "inf" if self.hi is None else format_time(self.hi)
        left = "(" if self.lo is None else "["
        right = "]" if self.closed_end else ")"
        if self.trace is None:
            return f"{left}{lo},{hi}{right}: empty"
        first, sw = self.trace
        body = " ; ".join(f"{format_time(t)}:{format(w, f'0{self.width}b')}" for t, w in sw)
        return f"{left}{lo},{hi}{right}: {format(first, f'0{self.width}b')}" + (f" | {body}" if body else "")


def _domain(kind) -> Domain:
    return kind if isinstance(kind, Domain) else Domain(kind)


def restrict(x: BinarySignal, kind, a, b=None, closed_end: bool = False) -> Restriction:
    """Restriction of ``x`` to a half-line or window.

    ``kind`` is a :class:`Domain` (or its string value).  Half-lines take
    the single bound ``a``; windows take ``[a, b]`` when ``closed_end`` and
    ``[a, b)`` otherwise.
    """
    kind = _domain(kind)
    a = as_time(a)
    times, words = x.times, x.words
    if kind is Domain.PAST_OPEN:
        k = bisect_left(times, a)
        return Restriction(kind, None, a, False, x.width, (x.initial, tuple(zip(times[:k], words[:k]))))
    if kind is Domain.PAST_CLOSED:
        k = bisect_right(times, a)
        return Restriction(kind, None, a, True, x.width, (x.initial, tuple(zip(times[:k], words[:k]))))
    if kind is Domain.FUTURE:
        k = bisect_right(times, a)
        return Restriction(kind, a, None, False, x.width, (x.bits_at(a), tuple(zip(times[k:], words[k:]))))
    if b is None:
        raise BadWindow("a window needs two bounds")
    b = as_time(b)
    if b < a:
        raise BadWindow(f"window [{format_time(a)}, {format_time(b)}] is reversed")
    if b == a and not closed_end:
        return Restriction(kind, a, b, False, x.width, None)
    i = bisect_right(times, a)
    j = bisect_right(times, b) if closed_end else bisect_left(times, b)
    return Restriction(kind, a, b, closed_end, x.width, (x.bits_at(a), tuple(zip(times[i:j], words[i:j]))))


def window_fold(u: BinarySignal, a, b, closed_end: bool = False) -> tuple[int, int]:
    """Bitwise (AND, OR) of ``u`` over ``[a, b)`` or ``[a, b]``, from the switch structure."""
    a, b = as_time(a), as_time(b)
    if b < a or (b == a and not closed_end):
        raise BadWindow("window is empty or reversed")
    meet = join = u.bits_at(a)
    i = bisect_right(u.times, a)
    j = bisect_right(u.times, b) if closed_end else bisect_left(u.times, b)
    for w in u.words[i:j]:
        meet &= w
        join |= w
    return meet, join


def window_meet(u: BinarySignal, a, b, closed_end: bool = False) -> BinaryWord:
    return BinaryWord(window_fold(u, a, b, closed_end)[0], u.width)


def window_join(u: BinarySignal, a, b, closed_end: bool = False) -> BinaryWord:
    return BinaryWord(window_fold(u, a, b, closed_end)[1], u.width)


# -- grids -----------------------------------------------------------------------

class TimeGrid:
    """Finite strictly increasing set of candidate switch instants."""

    __slots__ = ("points",)

    def __init__(self, points: Iterable):
        pts = tuple(as_time(p) for p in points)
        if not pts:
            raise ValueError("a time grid needs at least one point")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise NonIncreasingTimes("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __setattr__(self, name, value):
        raise AttributeError("TimeGrid is immutable")

    @classmethod
    def of(cls, points: Iterable) -> "TimeGrid":
        """Sort and deduplicate before building."""
        return cls(sorted({as_time(p) for p in points}))

    @classmethod
    def parse(cls, text: str) -> "TimeGrid":
        return cls(as_time(p) for p in text.split(",") if p.strip())

    def shifted(self, d) -> "TimeGrid":
        d = as_time(d)
        return TimeGrid(p + d for p in self.points)

    def union(self, other: Iterable) -> "TimeGrid":
        extra = other.points if isinstance(other, TimeGrid) else other
        return TimeGrid.of(list(self.points) + list(extra))

    def covers(self, x: BinarySignal) -> bool:
        pts = set(self.points)
        return all(t in pts for t in x.times)

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return isinstance(other, TimeGrid) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        return f"TimeGrid({self})"

    def __str__(self):
        return ",".join(format_time(p) for p in self.points)


def grid_signals(grid: TimeGrid, width: int = 1) -> list[BinarySignal]:
    """Every signal whose switches lie on ``grid`` (duplicates removed)."""
    from itertools import product

    out = set()
    values = range(1 << width)
    for init in values:
        for ws in product(values, repeat=len(grid)):
            out.add(BinarySignal.sample(width, init, grid.points, ws))
    return sorted(out)


def sample_points(breakpoints: Iterable, probes: Iterable = ()) -> list[Fraction]:
    """Finite stand-in for "every t in R" given the instants where truth may change.

    Returns the breakpoints, the midpoint of every consecutive pair, one
    point below and one above them all, plus any extra ``probes``.  A
    predicate that is constant between consecutive breakpoints is decided
    on all of R by its values here.
    """
    pts = sorted({as_time(p) for p in breakpoints})
    if pts:
        out = set(pts)
        out.update((a + b) / 2 for a, b in zip(pts, pts[1:]))
        out.add(pts[0] - 1)
        out.add(pts[-1] + 1)
    else:
        out = {Fraction(-1), Fraction(1)}
    out.update(as_time(p) for p in probes)
    return sorted(out)
