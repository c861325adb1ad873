"""Corpus-relative decision procedures for the non-anticipation conditions.

Every check runs over a finite carrier: a corpus of inputs, a grid on
which state sets are enumerated, and (for the memory-bounded conditions)
finite candidate lists for ``d`` and ``(d, d')``.  A ``Fail`` comes with a
witness that :func:`replay_witness` re-derives from plain restriction
comparisons.  A ``PassCorpusRelative`` only speaks for its carriers.

"For every t" is reduced to a finite set of representative instants: all
corpus switches and grid points, the midpoint of every gap between them
and one sentinel beyond each end.  Value sets and restriction sets are
constant on the open gaps, so the sample is exact for the conditions
that do not involve ``d``.  For the ``d`` conditions the supremum over a
gap is taken from its right end, and for the window conditions the
representative set is refined by the candidate offsets.
"""

from __future__ import annotations

import enum
import hashlib
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import kernels
from .errors import InadmissibleInput, MissingBounds, NotASubsystem, UnstableEnumeration
from .signal import (BinarySignal, Domain, TimeGrid, as_time, format_time, restrict,
                     sample_points)
from .systems import SystemModel, adequate_grid, enumerate_states, subsystem_check


class NaProperty(enum.Enum):
    DEF3_1 = "DEF3_1"
    DEF5_1 = "DEF5_1"
    C_I = "C_I"
    C_II = "C_II"
    C_III = "C_III"
    C_IV = "C_IV"
    C_V = "C_V"
    C_VI = "C_VI"
    C_VII = "C_VII"
    C_VIII = "C_VIII"
    C_IX = "C_IX"
    STAR_I = "STAR_I"
    STAR_II = "STAR_II"
    STAR_III = "STAR_III"

    @classmethod
    def parse(cls, text: str) -> "NaProperty":
        key = text.strip().upper().replace("-", "_").replace(".", "_")
        aliases = {"DEF31": "DEF3_1", "DEF51": "DEF5_1"}
        key = aliases.get(key, key)
        roman = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX")
        if key in roman:
            key = "C_" + key
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown property {text!r}") from None


CONDITIONS = tuple(NaProperty(f"C_{r}") for r in ("I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX"))
STAR = (NaProperty.STAR_I, NaProperty.STAR_II, NaProperty.STAR_III)
ALL = (NaProperty.DEF3_1, NaProperty.DEF5_1) + CONDITIONS

_D_PROPS = {NaProperty.C_II, NaProperty.C_III, NaProperty.C_IV}
_DD_PROPS = {NaProperty.C_VII, NaProperty.C_VIII, NaProperty.C_IX}

# stronger => weaker
IMPLICATIONS = (
    (NaProperty.C_IV, NaProperty.C_III),
    (NaProperty.C_III, NaProperty.C_II),
    (NaProperty.C_II, NaProperty.C_I),
    (NaProperty.DEF5_1, NaProperty.C_I),
    (NaProperty.C_I, NaProperty.C_VI),
    (NaProperty.DEF5_1, NaProperty.C_V),
    (NaProperty.C_V, NaProperty.C_VI),
    (NaProperty.C_IX, NaProperty.C_VIII),
    (NaProperty.C_VIII, NaProperty.C_VII),
    (NaProperty.C_VII, NaProperty.C_VI),
)


def parse_props(text: str) -> list[NaProperty]:
    """``all`` (the eleven conditions), ``star``, ``every`` or a CSV of tags."""
    key = text.strip().lower()
    if key == "all":
        return list(ALL)
    if key == "star":
        return list(STAR)
    if key == "every":
        return list(ALL + STAR)
    return [NaProperty.parse(p) for p in text.split(",") if p.strip()]


@dataclass(frozen=True)
class SearchBounds:
    """Finite candidate lists for the existential memory parameters."""

    d_candidates: tuple = ()
    dd_candidates: tuple = ()
    t_extra: tuple = ()

    def __post_init__(self):
        ds = tuple(sorted({as_time(d) for d in self.d_candidates}))
        if any(d <= 0 for d in ds):
            raise ValueError("d candidates must be > 0")
        dds = tuple(sorted({(as_time(a), as_time(b)) for a, b in self.dd_candidates}))
        if any(not 0 <= a <= b for a, b in dds):
            raise ValueError("(d, d') candidates need 0 <= d <= d'")
        object.__setattr__(self, "d_candidates", ds)
        object.__setattr__(self, "dd_candidates", dds)
        object.__setattr__(self, "t_extra", tuple(sorted({as_time(t) for t in self.t_extra})))

    @classmethod
    def default(cls, f: SystemModel, corpus: Sequence[BinarySignal], grid: TimeGrid,
                t_extra: Iterable = ()) -> "SearchBounds":
        """Gaps between base instants plus the model's delays, and one window spanning everything.

        ``(d, d')`` pairs are drawn from ``{0}``, the model's delays and that
        spanning length.
        """
        base = sorted(_base_points(corpus, grid))
        span = (base[-1] - base[0] if base else Fraction(0)) + 2
        gaps = {b - a for i, a in enumerate(base) for b in base[i + 1:]}
        delays = {as_time(d) for d in f.delays()}
        ds = gaps | delays | {span}
        offsets = sorted({Fraction(0), span} | delays)
        dds = [(a, b) for i, a in enumerate(offsets) for b in offsets[i:]]
        return cls(tuple(ds), tuple(dds), tuple(t_extra))

    def as_dict(self) -> dict:
        return {"dCandidates": [format_time(d) for d in self.d_candidates],
                "ddCandidates": [[format_time(a), format_time(b)] for a, b in self.dd_candidates],
                "tExtra": [format_time(t) for t in self.t_extra]}


def corpus_hash(corpus: Iterable[BinarySignal]) -> str:
    text = "\n".join(str(u) for u in corpus)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class Verdict:
    prop: NaProperty
    passed: bool
    vacuous: bool = False
    witness: dict | None = None
    carriers: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def outcome(self) -> str:
        return "PassCorpusRelative" if self.passed else "Fail"

    def __bool__(self):
        return self.passed

    def to_json(self) -> dict:
        out = {"property": self.prop.value, "outcome": self.outcome}
        if self.vacuous:
            out["vacuous"] = True
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        out["carriers"] = _jsonable(self.carriers)
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def line(self) -> str:
        head = f"{self.prop.value}: {self.outcome}"
        if self.vacuous:
            head += " (vacuous)"
        if self.witness is not None:
            w = self.witness
            bits = [f"{k}={_text(w[k])}" for k in ("t", "d", "dPrime", "u", "v", "x") if k in w]
            head += " [" + ", ".join(bits) + "]"
        return head


def _text(v):
    if isinstance(v, Fraction):
        return format_time(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (frozenset, set)):
        return sorted(_jsonable(x) for x in v)
    if isinstance(v, Fraction):
        return format_time(v)
    if isinstance(v, (BinarySignal, TimeGrid)) or hasattr(v, "trace"):
        return str(v)
    if isinstance(v, enum.Enum):
        return v.value
    return v


# ---------------------------------------------------------------------------
# representative instants

def _base_points(corpus: Iterable[BinarySignal], grid: TimeGrid) -> set:
    pts = set(grid.points)
    for u in corpus:
        pts.update(u.times)
    return pts


def representative_times(u: BinarySignal, v: BinarySignal, grid: TimeGrid,
                         extras: Iterable = (), shifts: Iterable = ()) -> list[Fraction]:
    """Instants sufficient for "every t" when comparing ``u`` and ``v`` on ``grid``.

    ``shifts`` adds every switch moved by each offset as a further
    breakpoint; ``extras`` are included as plain probes.
    """
    pts = set(grid.points) | set(u.times) | set(v.times)
    for o in shifts:
        o = as_time(o)
        pts |= {s + o for s in u.times} | {s + o for s in v.times}
    return sample_points(pts, extras)


def _order(points: list, base: set) -> list[int]:
    """Indices of ``points`` in witness order: gap interiors, breakpoints, then sentinels."""
    lo, hi = points[0], points[-1]

    def cls(i):
        p = points[i]
        if len(points) > 1 and (p == lo or p == hi) and p not in base:
            return 2
        return 1 if p in base else 0

    return sorted(range(len(points)), key=lambda i: (cls(i), points[i]))


# ---------------------------------------------------------------------------
# the shared carrier

class _Carrier:
    def __init__(self, f: SystemModel, corpus: Sequence[BinarySignal], grid: TimeGrid | None,
                 bounds: SearchBounds | None):
        seen, clean = set(), []
        for u in corpus:
            if not f.admissible(u):
                raise InadmissibleInput(f"corpus input {u} is not admissible for {f.name}")
            if u not in seen:
                seen.add(u)
                clean.append(u)
        if not clean:
            raise ValueError("empty corpus")
        self.f = f
        self.corpus = clean
        self.grid = grid if grid is not None else adequate_grid(f, clean)
        self.bounds = bounds if bounds is not None else SearchBounds.default(f, clean, self.grid)
        self.states = [sorted(enumerate_states(f, u, self.grid), key=_sort_key) for u in clean]
        # the pair (u, u): every condition is trivial there unless f(u) is not a stable set
        for u, xs in zip(clean, self.states):
            if enumerate_states(f, u, self.grid) != frozenset(xs):
                raise UnstableEnumeration(f"{f.name}: two enumerations of the states of {u} differ")
        # traces are compared within one carrier only, so times are kept as scaled ints
        self.tb = kernels.Timebase(list(self.grid.points) + [t for xs in self.states for x in xs for t in x.times])
        self._sw = [[(x, self.tb.ints(x.times), tuple(zip(self.tb.ints(x.times), x.words))) for x in xs]
                    for xs in self.states]
        self.base = _base_points(clean, self.grid)
        self.R = sample_points(self.base, self.bounds.t_extra)
        self._cache = {}

    def carriers(self) -> dict:
        return {"corpusHash": corpus_hash(self.corpus), "grid": str(self.grid),
                "bounds": self.bounds.as_dict(), "corpusSize": len(self.corpus)}

    def value_sets(self, points) -> list[list[frozenset]]:
        key = ("vs", tuple(points))
        if key not in self._cache:
            out = []
            for xs in self.states:
                cols = kernels.values_many(xs, points)
                out.append([frozenset(c[k] for c in cols) for k in range(len(points))])
            self._cache[key] = out
        return self._cache[key]

    def restriction_set(self, i: int, kind: Domain, t) -> frozenset:
        key = ("rs", i, kind, t)
        if key not in self._cache:
            t = as_time(t)
            if self.tb.scale % t.denominator == 0:
                n, tx = t.numerator * (self.tb.scale // t.denominator), 1
            else:
                n, tx = t, 0
            self._cache[key] = frozenset(_trace(x, ti if tx else x.times, sw, kind, n) for x, ti, sw in self._sw[i])
        return self._cache[key]

    def input_key(self, i: int, kind: Domain, t):
        u = self.corpus[i]
        return _trace(u, u.times, u.switches, kind, t) if kind is not Domain.WINDOW else restrict(u, kind, t).trace

    def pairs(self):
        n = len(self.corpus)
        for i in range(n):
            for j in range(i + 1, n):
                yield i, j


def _sort_key(x: BinarySignal):
    return x._key()


def _trace(x: BinarySignal, times, sw: tuple, kind: Domain, t):
    """``restrict(x, kind, t).trace`` for half-line kinds, with ``sw`` standing in for the switch list."""
    if kind is Domain.PAST_OPEN:
        return (x.initial, sw[:bisect_left(times, t)])
    if kind is Domain.PAST_CLOSED:
        return (x.initial, sw[:bisect_right(times, t)])
    k = bisect_right(times, t)
    return (sw[k - 1][1] if k else x.initial, sw[k:])


def _show_values(vs: frozenset, width: int) -> list[str]:
    return sorted(format(w, f"0{width}b") for w in vs)


def _show_traces(rs: frozenset, kind: Domain, t, width: int, scale: int = 1) -> list[str]:
    out = []
    for tr in rs:
        first, sw = tr
        body = " ; ".join(f"{format_time(Fraction(s) / scale)}:{format(w, f'0{width}b')}" for s, w in sw)
        out.append(f"{format(first, f'0{width}b')}" + (f" | {body}" if body else ""))
    return sorted(out)


# ---------------------------------------------------------------------------
# individual checks

def check_def31(f: SystemModel, corpus: Sequence[BinarySignal], grid: TimeGrid | None = None) -> Verdict:
    """A variable state never switches before its input first switches."""
    c = _Carrier(f, corpus, grid, SearchBounds())
    return _def31(c)


def _def31(c: _Carrier) -> Verdict:
    any_variable = False
    for u, xs in zip(c.corpus, c.states):
        for x in xs:
            if x.is_constant:
                continue
            any_variable = True
            sx = x.times[0]
            if u.is_constant:
                return Verdict(NaProperty.DEF3_1, False, witness={
                    "t": sx, "u": u, "x": x, "reason": "constant input, variable state",
                    "stateFirstSwitch": sx}, carriers=c.carriers())
            su = u.times[0]
            if su > sx:
                return Verdict(NaProperty.DEF3_1, False, witness={
                    "t": sx, "u": u, "x": x, "inputFirstSwitch": su, "stateFirstSwitch": sx,
                    "reason": f"{format_time(su)} > {format_time(sx)}"}, carriers=c.carriers())
    notes = [] if any_variable else ["every enumerated state is constant"]
    return Verdict(NaProperty.DEF3_1, True, vacuous=not any_variable, carriers=c.carriers(), notes=notes)


def _grouped(c: _Carrier, prop: NaProperty, key_fn, cons_fn, show, exists_later=False) -> Verdict:
    """Premise as an equivalence key per instant; compare consequents within each class.

    With ``exists_later`` the consequent is compared at the top sentinel
    instead (futures equal from some later t' iff they are equal from beyond
    every switch), and the earliest representative t' >= t is reported.
    """
    R = c.R
    vacuous = True
    for k in _order(R, c.base):
        t = R[k]
        groups: dict = {}
        for i in range(len(c.corpus)):
            groups.setdefault(key_fn(i, k, t), []).append(i)
        for members in groups.values():
            if len(members) < 2:
                continue
            vacuous = False
            first = members[0]
            for other in members[1:]:
                if exists_later:
                    tp = _first_agreement(c, first, other, t)
                    if tp is not None:
                        continue
                    top = R[-1]
                    lhs = c.restriction_set(first, Domain.FUTURE, top)
                    rhs = c.restriction_set(other, Domain.FUTURE, top)
                    w = {"t": t, "tPrime": top, "u": c.corpus[first], "v": c.corpus[other],
                         "lhsSet": show(lhs, Domain.FUTURE, top), "rhsSet": show(rhs, Domain.FUTURE, top)}
                    return Verdict(prop, False, witness=w, carriers=c.carriers())
                lhs, rhs = cons_fn(first, k, t), cons_fn(other, k, t)
                if lhs != rhs:
                    w = {"t": t, "u": c.corpus[first], "v": c.corpus[other],
                         "lhsSet": show(lhs, None, t), "rhsSet": show(rhs, None, t)}
                    return Verdict(prop, False, witness=w, carriers=c.carriers())
    notes = ["no two distinct inputs satisfy the premise"] if vacuous else []
    return Verdict(prop, True, vacuous=vacuous, carriers=c.carriers(), notes=notes)


def _first_agreement(c: _Carrier, i: int, j: int, t):
    for tp in c.R:
        if tp >= t and c.restriction_set(i, Domain.FUTURE, tp) == c.restriction_set(j, Domain.FUTURE, tp):
            return tp
    return None


def _check_plain(c: _Carrier, prop: NaProperty) -> Verdict:
    vs = c.value_sets(c.R)
    width = c.f.state_width

    def values(i, k, t):
        return vs[i][k]

    def show_values(s, kind, t):
        return _show_values(s, width)

    def past_closed_set(i, k, t):
        return c.restriction_set(i, Domain.PAST_CLOSED, t)

    def show_traces(s, kind, t):
        return _show_traces(s, kind, t, width, c.tb.scale)

    if prop is NaProperty.DEF5_1:
        return _grouped(c, prop, lambda i, k, t: c.input_key(i, Domain.PAST_OPEN, t), past_closed_set, show_traces)
    if prop is NaProperty.C_I:
        return _grouped(c, prop, lambda i, k, t: c.input_key(i, Domain.PAST_OPEN, t), values, show_values)
    if prop is NaProperty.C_V:
        return _grouped(c, prop, lambda i, k, t: c.input_key(i, Domain.PAST_CLOSED, t), past_closed_set, show_traces)
    if prop is NaProperty.C_VI:
        return _grouped(c, prop, lambda i, k, t: c.input_key(i, Domain.PAST_CLOSED, t), values, show_values)
    if prop is NaProperty.STAR_I:
        return _grouped(c, prop, lambda i, k, t: (c.input_key(i, Domain.FUTURE, t), vs[i][k]),
                        lambda i, k, t: c.restriction_set(i, Domain.FUTURE, t), show_traces)
    if prop is NaProperty.STAR_II:
        return _grouped(c, prop, lambda i, k, t: c.input_key(i, Domain.FUTURE, t), None, show_traces,
                        exists_later=True)
    if prop is NaProperty.STAR_III:
        return _grouped(c, prop, lambda i, k, t: (c.input_key(i, Domain.FUTURE, t), past_closed_set(i, k, t)),
                        None, show_traces, exists_later=True)
    raise ValueError(prop)


# -- conditions with one memory length d --------------------------------------

@dataclass
class _Need:
    """What a candidate d must satisfy for one (instant, pair): ``d > lo`` or ``d >= lo``.

    ``lo is None`` means no d works: either the inputs agree on the whole
    past, or the instant lies in the unbounded last gap where the distance
    to the last disagreement grows without limit.  ``gap`` marks a
    requirement taken over an open gap rather than at a single instant.
    """

    lo: Fraction | None
    strict: bool
    t: Fraction          # instant to cite when d fails
    q: Fraction | None   # end of the last disagreement before t
    gap: bool = False

    def ok(self, d) -> bool:
        if self.lo is None:
            return False
        return d > self.lo if self.strict else d >= self.lo

    def refute_at(self, d) -> Fraction:
        """An instant in the same gap at which ``d`` is refuted (premise holds, sets differ)."""
        if not self.gap:
            return self.t
        return max(self.t, self.q + d)


def _needs(c: _Carrier) -> dict:
    """``{(k, i, j): _Need}`` for every representative instant and pair with differing value sets."""
    if "needs" not in c._cache:
        c._cache["needs"] = _compute_needs(c)
    return c._cache["needs"]


def _compute_needs(c: _Carrier) -> dict:
    R, base = c.R, sorted(c.base)
    vs = c.value_sets(R)
    out = {}
    for i, j in c.pairs():
        diff = [k for k in range(len(R)) if vs[i][k] != vs[j][k]]
        if not diff:
            continue
        gaps = kernels.gaps(c.corpus[i] ^ c.corpus[j], [R[k] for k in diff])
        for k, g in zip(diff, gaps):
            t = R[k]
            if g is None:
                out[k, i, j] = _Need(None, True, t, None)
            elif g == 0:
                continue        # disagree right up to t: every d > 0 falsifies the premise
            elif t in c.base or t in c.bounds.t_extra:
                out[k, i, j] = _Need(g, True, t, t - g)
            else:
                nxt = bisect_right(base, t)
                q = t - g
                if nxt == len(base):
                    # beyond every switch: the gap grows without bound
                    out[k, i, j] = _Need(None, False, t, q, gap=True)
                else:
                    out[k, i, j] = _Need(base[nxt] - q, False, t, q, gap=True)
    return out


def _value_witness(c: _Carrier, i: int, j: int, t) -> dict:
    vals = [frozenset(x.bits_at(t) for x in c.states[n]) for n in (i, j)]
    w = c.f.state_width
    return {"t": t, "u": c.corpus[i], "v": c.corpus[j],
            "lhsSet": _show_values(vals[0], w), "rhsSet": _show_values(vals[1], w)}


def _check_d(c: _Carrier, prop: NaProperty) -> Verdict:
    ds = c.bounds.d_candidates
    if not ds:
        raise MissingBounds(f"{prop.value} needs d candidates")
    needs = _needs(c)
    order = _order(c.R, c.base)
    by_k: dict = {}
    for (k, i, j), need in needs.items():
        by_k.setdefault(k, []).append((i, j, need))
    vacuous = len(c.corpus) < 2
    notes = []

    if prop is NaProperty.C_II:
        for k in order:
            for i, j, need in by_k.get(k, ()):
                if not any(need.ok(d) for d in ds):
                    t = need.refute_at(ds[-1])
                    w = _value_witness(c, i, j, t)
                    w["refutations"] = [{"d": d} for d in ds]
                    return Verdict(prop, False, witness=w, carriers=c.carriers(),
                                   notes=_longer_note(need.q is not None))
        return Verdict(prop, True, vacuous=vacuous, carriers=c.carriers(), notes=notes)

    if prop is NaProperty.C_III:
        chosen = {}
        for k in order:
            items = by_k.get(k, ())
            good = [d for d in ds if all(n.ok(d) for _, _, n in items)]
            if good:
                chosen[k] = good[0]
                continue
            refs = []
            for d in ds:
                i, j, need = next((i, j, n) for i, j, n in items if not n.ok(d))
                refs.append((d, i, j, need))
            t = max(n.refute_at(d) for d, _, _, n in refs)
            d0, i0, j0, _ = refs[-1]
            w = _value_witness(c, i0, j0, t)
            w["refutations"] = [{"d": d, "u": c.corpus[i], "v": c.corpus[j]} for d, i, j, _ in refs]
            return Verdict(prop, False, witness=w, carriers=c.carriers(),
                           notes=_longer_note(all(n.q is not None for _, _, _, n in refs)))
        if chosen:
            notes.append("largest per-instant minimal d: " + format_time(max(chosen.values())))
        return Verdict(prop, True, vacuous=vacuous, carriers=c.carriers(), notes=notes)

    # C_IV: one d for every instant and pair
    for d in ds:
        if all(n.ok(d) for n in needs.values()):
            notes.append(f"d = {format_time(d)} works globally")
            inf = _infimum(needs.values())
            if inf is not None:
                notes.append(inf)
            return Verdict(prop, True, vacuous=vacuous, carriers=c.carriers(), notes=notes,
                           witness=None)
    refs = []
    for d in ds:
        for k in order:
            hit = next(((i, j, n) for i, j, n in by_k.get(k, ()) if not n.ok(d)), None)
            if hit:
                i, j, n = hit
                refs.append({"d": d, "t": n.refute_at(d), "u": c.corpus[i], "v": c.corpus[j]})
                break
    first = refs[-1]
    i = c.corpus.index(first["u"])
    j = c.corpus.index(first["v"])
    w = _value_witness(c, i, j, first["t"])
    w["d"] = first["d"]
    w["refutations"] = refs
    return Verdict(prop, False, witness=w, carriers=c.carriers())


def _longer_note(longer: bool) -> list:
    if not longer:
        return []
    return ["the inputs do differ somewhere before t: a memory longer than every candidate "
            "would falsify the premise, so this fail is relative to the candidate list"]


def _disagree_before(c: _Carrier, i: int, j: int, t) -> bool:
    xor = c.corpus[i] ^ c.corpus[j]
    return xor.initial != 0 or any(s <= t for s in xor.times)


def _infimum(needs) -> str | None:
    needs = list(needs)
    if not needs:
        return "every d > 0 works"
    if any(n.lo is None for n in needs):
        return None
    lo = max(n.lo for n in needs)
    strict = any(n.strict and n.lo == lo for n in needs)
    return f"exactly the d {'>' if strict else '>='} {format_time(lo)} work"


# -- conditions with a closed window [t-d', t-d] --------------------------------

def _window_points(c: _Carrier) -> tuple[list, set]:
    """Representative instants refined so that every window premise is constant between them."""
    offsets = {o for pair in c.bounds.dd_candidates for o in pair}
    pts = set(c.base)
    for u in c.corpus:
        for o in offsets:
            pts.update(s + o for s in u.times)
    return sample_points(pts, c.bounds.t_extra), pts


def _window_diffs(c: _Carrier, dds) -> tuple:
    """Per pair: instants where value sets differ, and per candidate whether the window sees the inputs differ."""
    P, breaks = _window_points(c)
    vs = c.value_sets(P)
    diffs = {}
    for i, j in c.pairs():
        dk = [k for k in range(len(P)) if vs[i][k] != vs[j][k]]
        if not dk:
            continue
        xor = c.corpus[i] ^ c.corpus[j]
        pts = [P[k] for k in dk]
        per = {}
        for d, dp in dds:
            _, joins = kernels.folds(xor, [t - dp for t in pts], [t - d for t in pts], True)
            per[d, dp] = dict(zip(dk, (bool(x) for x in joins)))
        diffs[i, j] = (dk, per)
    return P, breaks, diffs


def _check_dd(c: _Carrier, prop: NaProperty) -> Verdict:
    dds = c.bounds.dd_candidates
    if not dds:
        raise MissingBounds(f"{prop.value} needs (d, d') candidates")
    if "windows" not in c._cache:
        c._cache["windows"] = _window_diffs(c, dds)
    P, breaks, diffs = c._cache["windows"]
    order = _order(P, breaks)
    vacuous = len(c.corpus) < 2

    def failures(cand):
        """(k, i, j) where this candidate's premise holds but value sets differ."""
        out = []
        for (i, j), (dk, per) in diffs.items():
            out.extend((k, i, j) for k in dk if not per[cand][k])
        return out

    def witness(cand, k, i, j):
        w = _value_witness(c, i, j, P[k])
        w["d"], w["dPrime"] = cand
        return w


    if prop is NaProperty.C_VII:
        rank = {k: n for n, k in enumerate(order)}
        bad = None
        for (i, j), (dk, per) in diffs.items():
            for k in dk:
                if all(not per[cand][k] for cand in dds):
                    if bad is None or (rank[k], i, j) < (rank[bad[0]], bad[1], bad[2]):
                        bad = (k, i, j)
        if bad:
            k, i, j = bad
            w = _value_witness(c, i, j, P[k])
            w["refutations"] = [{"d": a, "dPrime": b} for a, b in dds]
            return Verdict(prop, False, witness=w, carriers=c.carriers(),
                           notes=_longer_note(_disagree_before(c, i, j, P[k])))
        return Verdict(prop, True, vacuous=vacuous, carriers=c.carriers())

    fails = {cand: failures(cand) for cand in dds}
    if prop is NaProperty.C_VIII:
        bad_at = {cand: {} for cand in dds}
        for cand, fl in fails.items():
            for k, i, j in fl:
                bad_at[cand].setdefault(k, (i, j))
        for k in order:
            if all(k in bad_at[cand] for cand in dds):
                refs = [{"d": a, "dPrime": b, "u": c.corpus[bad_at[(a, b)][k][0]],
                         "v": c.corpus[bad_at[(a, b)][k][1]]} for a, b in dds]
                i, j = bad_at[dds[0]][k]
                w = _value_witness(c, i, j, P[k])
                w["refutations"] = refs
                longer = all(_disagree_before(c, *bad_at[cand][k], P[k]) for cand in dds)
                return Verdict(prop, False, witness=w, carriers=c.carriers(), notes=_longer_note(longer))
        return Verdict(prop, True, vacuous=vacuous, carriers=c.carriers())

    rank = {k: n for n, k in enumerate(order)}
    for cand in dds:
        if not fails[cand]:
            return Verdict(prop, True, vacuous=vacuous, carriers=c.carriers(),
                           notes=[f"(d, d') = ({format_time(cand[0])}, {format_time(cand[1])}) works globally"])
    refs = []
    for cand in dds:
        k, i, j = min(fails[cand], key=lambda e: (rank[e[0]], e[1], e[2]))
        refs.append({"d": cand[0], "dPrime": cand[1], "t": P[k], "u": c.corpus[i], "v": c.corpus[j]})
    k, i, j = min(fails[dds[0]], key=lambda e: (rank[e[0]], e[1], e[2]))
    w = witness(dds[0], k, i, j)
    w["refutations"] = refs
    return Verdict(prop, False, witness=w, carriers=c.carriers())


# ---------------------------------------------------------------------------
# public entry points

def check_condition(f: SystemModel, prop, corpus: Sequence[BinarySignal], grid: TimeGrid | None = None,
                    bounds: SearchBounds | None = None) -> Verdict:
    prop = prop if isinstance(prop, NaProperty) else NaProperty.parse(prop)
    return _dispatch(_Carrier(f, corpus, grid, bounds), prop)


def check_def51(f: SystemModel, corpus: Sequence[BinarySignal], grid: TimeGrid | None = None) -> Verdict:
    return check_condition(f, NaProperty.DEF5_1, corpus, grid, SearchBounds())


def check_star(f: SystemModel, prop, corpus: Sequence[BinarySignal], grid: TimeGrid | None = None) -> Verdict:
    prop = prop if isinstance(prop, NaProperty) else NaProperty.parse(prop)
    if prop not in STAR:
        raise ValueError(f"{prop.value} is not a starred condition")
    return check_condition(f, prop, corpus, grid, SearchBounds())


def _dispatch(c: _Carrier, prop: NaProperty) -> Verdict:
    if prop is NaProperty.DEF3_1:
        return _def31(c)
    if prop in _D_PROPS:
        return _check_d(c, prop)
    if prop in _DD_PROPS:
        return _check_dd(c, prop)
    return _check_plain(c, prop)


def check_all(f: SystemModel, props: Iterable, corpus: Sequence[BinarySignal], grid: TimeGrid | None = None,
              bounds: SearchBounds | None = None) -> dict:
    """Run several properties on one shared carrier (what the audit expects)."""
    c = _Carrier(f, corpus, grid, bounds)
    out = {}
    for p in props:
        p = p if isinstance(p, NaProperty) else NaProperty.parse(p)
        out[p] = _dispatch(c, p)
    return out


@dataclass(frozen=True)
class Inconsistency:
    stronger: NaProperty
    weaker: NaProperty

    def __str__(self):
        return f"{self.stronger.value} passed but {self.weaker.value} failed"


def implication_audit(verdicts: Mapping) -> list[Inconsistency]:
    """Flag strong-Pass / weak-Fail pairs among verdicts computed on identical carriers."""
    vs = {(k if isinstance(k, NaProperty) else NaProperty.parse(k)): v for k, v in verdicts.items()}
    out = []
    for strong, weak in IMPLICATIONS:
        a, b = vs.get(strong), vs.get(weak)
        if a is None or b is None:
            continue
        if _passed(a) and not _passed(b) and _same_carriers(a, b):
            out.append(Inconsistency(strong, weak))
    return out


def _passed(v) -> bool:
    return v.passed if isinstance(v, Verdict) else bool(v)


def _same_carriers(a, b) -> bool:
    if not isinstance(a, Verdict) or not isinstance(b, Verdict):
        return True
    ka = {k: a.carriers.get(k) for k in ("corpusHash", "grid", "bounds")}
    kb = {k: b.carriers.get(k) for k in ("corpusHash", "grid", "bounds")}
    return ka == kb


def check_lemma35(g: SystemModel, f: SystemModel, corpus: Sequence[BinarySignal],
                  grid: TimeGrid | None = None) -> Verdict:
    """First-switch causality inherited by a subsystem ``f`` of ``g``.

    Returns ``f``'s verdict; a Pass of ``g`` with a Fail of ``f`` on the same
    carriers would contradict the inheritance and is reported as such.
    """
    corpus = [u for u in corpus if f.admissible(u)]
    if grid is None:
        grid = adequate_grid(g, corpus).union(adequate_grid(f, corpus))
    sub = subsystem_check(f, g, corpus, grid)
    if not sub:
        raise NotASubsystem(f"{f.name} is not a subsystem of {g.name}: {sub.witness}")
    vg = check_def31(g, corpus, grid)
    vf = check_def31(f, corpus, grid)
    vf.notes.append(f"superset system {g.name}: {vg.outcome}")
    if vg.passed and not vf.passed:
        vf.notes.append("inheritance violated")
    else:
        vf.notes.append("inheritance consistent")
    return vf


# ---------------------------------------------------------------------------
# independent witness replay

def _values_at(f, u, grid, t) -> frozenset:
    return frozenset(x.bits_at(t) for x in enumerate_states(f, u, grid))


def _rset(f, u, grid, kind, t) -> frozenset:
    return frozenset(restrict(x, kind, t) for x in enumerate_states(f, u, grid))


def replay_witness(f: SystemModel, verdict: Verdict, grid: TimeGrid, bounds: SearchBounds | None = None) -> bool:
    """Re-derive a Fail witness using only restrictions and point evaluation."""
    if verdict.passed or verdict.witness is None:
        return False
    w, p = verdict.witness, verdict.prop
    u = w["u"]
    if p is NaProperty.DEF3_1:
        x = w["x"]
        if x not in enumerate_states(f, u, grid) or x.is_constant:
            return False
        return u.is_constant or u.times[0] > x.times[0]
    v, t = w["v"], w["t"]
    if p in (NaProperty.DEF5_1, NaProperty.C_I):
        if restrict(u, Domain.PAST_OPEN, t) != restrict(v, Domain.PAST_OPEN, t):
            return False
        if p is NaProperty.C_I:
            return _values_at(f, u, grid, t) != _values_at(f, v, grid, t)
        return _rset(f, u, grid, Domain.PAST_CLOSED, t) != _rset(f, v, grid, Domain.PAST_CLOSED, t)
    if p in (NaProperty.C_V, NaProperty.C_VI):
        if restrict(u, Domain.PAST_CLOSED, t) != restrict(v, Domain.PAST_CLOSED, t):
            return False
        if p is NaProperty.C_VI:
            return _values_at(f, u, grid, t) != _values_at(f, v, grid, t)
        return _rset(f, u, grid, Domain.PAST_CLOSED, t) != _rset(f, v, grid, Domain.PAST_CLOSED, t)
    if p in STAR:
        if restrict(u, Domain.FUTURE, t) != restrict(v, Domain.FUTURE, t):
            return False
        if p is NaProperty.STAR_I:
            if _values_at(f, u, grid, t) != _values_at(f, v, grid, t):
                return False
            return _rset(f, u, grid, Domain.FUTURE, t) != _rset(f, v, grid, Domain.FUTURE, t)
        if p is NaProperty.STAR_III and (_rset(f, u, grid, Domain.PAST_CLOSED, t)
                                          != _rset(f, v, grid, Domain.PAST_CLOSED, t)):
            return False
        # beyond every switch the futures are constants; differing there means differing from every t'
        top = max([t, *grid.points, *u.times, *v.times]) + 1
        return _rset(f, u, grid, Domain.FUTURE, top) != _rset(f, v, grid, Domain.FUTURE, top)
    if p in _D_PROPS:
        return all(_replay_d(f, grid, r.get("u", u), r.get("v", v), r.get("t", t), r["d"])
                   for r in w["refutations"])
    if p in _DD_PROPS:
        return all(_replay_dd(f, grid, r.get("u", u), r.get("v", v), r.get("t", t), r["d"], r["dPrime"])
                   for r in w["refutations"])
    raise ValueError(p)


def _replay_d(f, grid, u, v, t, d) -> bool:
    same = restrict(u, Domain.WINDOW, t - d, t) == restrict(v, Domain.WINDOW, t - d, t)
    return same and _values_at(f, u, grid, t) != _values_at(f, v, grid, t)


def _replay_dd(f, grid, u, v, t, d, dp) -> bool:
    same = (restrict(u, Domain.WINDOW, t - dp, t - d, closed_end=True)
            == restrict(v, Domain.WINDOW, t - dp, t - d, closed_end=True))
    return same and _values_at(f, u, grid, t) != _values_at(f, v, grid, t)
