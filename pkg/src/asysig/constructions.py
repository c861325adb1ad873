"""Executable forms of the constructive results about asynchronous systems.

* :func:`restrict_to_zero` / :func:`extend_by_translation`: move a
  time-invariant causal system to inputs and states without switches
  before 0, and back.
* :func:`compose_transfer`: glue an input that drives all states from
  ``mu`` to ``mu'`` with one that drives them from ``mu'`` to ``mu''``.
* :func:`verify_fundamental_mode`, :func:`synthesize_fundamental_mode`,
  :func:`next_state_trace`: inputs under which every state settles to a
  prescribed word after each switching instant, so the system can be read
  as a synchronous next-state function.

Universal statements ("every state of f(u) ...") are decided by
enumeration on a grid that is always refined with the model's own grid
hints, so off-grid behaviour cannot hide a counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .checkers import NaProperty, check_condition, check_def31, check_def51, check_star
from .errors import (ConclusionFailed, EmptyNormalizedDomain, HypothesisEFailed, IllDefinedExtension,
                     OracleContractViolation, PreconditionFailed, RaceDetected, WidthMismatch)
from .signal import (BinarySignal, BinaryWord, Domain, TimeGrid, as_time, concat, constant,
                     format_time, is_in_S0, restrict, splice, translate, word)
from .systems import (BoundedDelayClosed, BoundedDelayWindow, InertialDelay, PureDelay, SystemModel,
                      Tabulated, adequate_grid, enumerate_states, time_invariance_check)


def _refined(f: SystemModel, inputs: Iterable[BinarySignal], grid: TimeGrid | None, extra=()) -> TimeGrid:
    g = adequate_grid(f, [u for u in inputs if f.admissible(u)], extra)
    return g if grid is None else g.union(grid)


def _bits(w, width: int) -> int:
    return word(w, width).bits


def _show_word(bits: int, width: int) -> str:
    return format(bits, f"0{width}b")


# ---------------------------------------------------------------------------
# initial time 0

class NormalizedSystem(Tabulated):
    """The system on inputs and states without switches before 0.

    ``shift_of`` records, for every member of the domain, how far right
    the originating corpus input was moved.
    """

    kind = "normalized"

    def __init__(self, table, base: SystemModel, shift_of: dict, anchor: TimeGrid, name=None):
        super().__init__(table, name or f"{base.name}^")
        self.base = base
        self.shift_of = shift_of
        self.anchor = anchor
        self.translation_report: list = []


def _anchor(u: BinarySignal) -> Fraction:
    return u.times[0] if u.times else Fraction(0)


def _is_translate(u: BinarySignal, w: BinarySignal):
    """``e`` with ``w == u o tau^e`` (``None`` if there is none; constants give 0)."""
    if u.width != w.width or u.initial != w.initial or u.words != w.words:
        return None
    if not u.times:
        return Fraction(0)
    e = w.times[0] - u.times[0]
    return e if all(b - a == e for a, b in zip(u.times, w.times)) else None


def restrict_to_zero(f: SystemModel, corpus: Sequence[BinarySignal], grid: TimeGrid | None = None,
                     check_preconditions: bool = True) -> NormalizedSystem:
    """Inputs and states of ``f`` restricted to signals that do not switch before 0.

    Corpus inputs that switch before 0 are moved right until they do not,
    and further if none of their states qualifies yet.  State sets are
    enumerated on a grid anchored at each input's first switch, so that
    translated inputs see translated grids.
    """
    corpus = list(dict.fromkeys(corpus))
    if grid is None:
        grid = adequate_grid(f, corpus)
    if check_preconditions:
        v = check_def31(f, corpus, _refined(f, corpus, grid))
        if not v.passed:
            raise PreconditionFailed(f"{f.name} fails the first-switch causality check: {v.line()}")
        for u in corpus:
            d = max(Fraction(0), -_anchor(u))
            ti = time_invariance_check(f, [u], [d, -d] if d else [1], _refined(f, [u], grid))
            if not ti:
                raise PreconditionFailed(f"{f.name} is not time invariant on {u}: {ti.witness}")

    # grid offsets relative to each input's first switch
    rel = set()
    for u in corpus:
        a = _anchor(u)
        rel |= {p - a for p in grid.points}
        rel |= {p - a for p in f.grid_hint(u)}

    def grid_for(u):
        a = _anchor(u)
        return TimeGrid.of({p + a for p in rel} | set(f.grid_hint(u)))

    table, shift_of = {}, {}
    for u in corpus:
        d = max(Fraction(0), -_anchor(u))
        w = translate(u, d)
        states = [x for x in enumerate_states(f, w, grid_for(w)) if is_in_S0(x)]
        if not states:
            xs = [x for x in enumerate_states(f, w, grid_for(w)) if x.times]
            if not xs:
                continue
            extra = -max(x.times[0] for x in xs)
            w, d = translate(w, extra), d + extra
            states = [x for x in enumerate_states(f, w, grid_for(w)) if is_in_S0(x)]
        if states and w not in table:
            table[w] = states
            shift_of[w] = d
    if not table:
        raise EmptyNormalizedDomain("no corpus input yields a state without switches before 0")
    fhat = NormalizedSystem(table, f, shift_of, TimeGrid.of(rel or [0]))
    fhat.translation_report = _check_translation_closure(fhat, f)
    bad = [r for r in fhat.translation_report if not r["ok"]]
    if bad:
        r = bad[0]
        raise PreconditionFailed(f"translation compatibility fails: {r['x']} moved by "
                                 f"{format_time(r['d'])} is not a state of {r['w']}")
    return fhat


def _check_translation_closure(fhat: NormalizedSystem, f: SystemModel) -> list:
    """For members related by translation, translated states must stay states."""
    out = []
    dom = fhat.domain
    for u in dom:
        for w in dom:
            e = _is_translate(u, w)
            if e is None or u == w:
                continue
            for x in sorted(fhat.table[u]):
                y = translate(x, e)
                ok = is_in_S0(y) and y in fhat.table[w]
                out.append({"u": u, "w": w, "d": e, "x": x, "ok": ok})
    return out


def extend_by_translation(fhat: Tabulated, shifts: Iterable) -> Tabulated:
    """The time-invariant system generated by translating ``fhat`` by each shift."""
    shifts = sorted({as_time(d) for d in shifts} | {Fraction(0)})
    table, origin = {}, {}
    for u in fhat.domain:
        for d in shifts:
            v = translate(u, d)
            xs = frozenset(translate(x, d) for x in fhat.table[u])
            if v in table:
                if table[v] != xs:
                    raise IllDefinedExtension(
                        f"{v} arises from {origin[v][0]} and {u} with different state sets",
                        left=origin[v], right=(u, d))
                continue
            table[v] = xs
            origin[v] = (u, d)
    return Tabulated(table, name=f"{fhat.name}~")


# ---------------------------------------------------------------------------
# transfers

@dataclass
class TransferSpec:
    t1: Fraction
    t2: Fraction
    u0: BinarySignal
    u1: BinarySignal
    mu: int
    mu1: int
    mu2: int
    width: int

    def __post_init__(self):
        self.t1, self.t2 = as_time(self.t1), as_time(self.t2)
        if self.u0.width != self.u1.width:
            raise WidthMismatch("u0 and u1 need the same width")
        self.mu, self.mu1, self.mu2 = (_bits(w, self.width) for w in (self.mu, self.mu1, self.mu2))

    @property
    def d(self) -> Fraction:
        return self.t1 - self.t2

    def to_json(self) -> dict:
        w = self.width
        return {"t1": format_time(self.t1), "t2": format_time(self.t2), "u0": str(self.u0), "u1": str(self.u1),
                "mu": _show_word(self.mu, w), "muPrime": _show_word(self.mu1, w),
                "muSecond": _show_word(self.mu2, w)}

    @classmethod
    def from_json(cls, data: dict) -> "TransferSpec":
        from .dsl import parse_signal

        mu = BinaryWord.parse(data["mu"])
        return cls(as_time(data["t1"]), as_time(data["t2"]), parse_signal(data["u0"]), parse_signal(data["u1"]),
                   mu, BinaryWord.parse(data["muPrime"]), BinaryWord.parse(data["muSecond"]), mu.width)


def _hit_before(x: BinarySignal, mu: int, t1) -> Fraction | None:
    """A time ``t0 < t1`` with ``x(t0) == mu`` (taken from the last such piece), else None."""
    starts = [None] + list(x.times)
    vals = [x.initial] + list(x.words)
    ends = list(x.times) + [None]
    best = None
    for a, w, b in zip(starts, vals, ends):
        if w != mu or (a is not None and a >= t1):
            continue
        if a is None:
            best = (t1 if b is None else min(b, t1)) - 1
        else:
            best = a
    return best


def _hit_after(x: BinarySignal, mu: int, t) -> Fraction | None:
    """A time ``t3 > t`` with ``x(t3) == mu`` (from the first such piece), else None."""
    starts = [None] + list(x.times)
    vals = [x.initial] + list(x.words)
    ends = list(x.times) + [None]
    for a, w, b in zip(starts, vals, ends):
        if w != mu or (b is not None and b <= t):
            continue
        if a is not None and a > t:
            return a
        return t + 1 if b is None else (t + b) / 2
    return None


@dataclass
class TransferReport:
    u_tilde: BinarySignal
    d: Fraction
    grid: TimeGrid
    hypotheses: dict = field(default_factory=dict)
    conclusions: list = field(default_factory=list)
    structure: dict = field(default_factory=dict)
    spot_checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c["eq8"] and c["eq9"] for c in self.conclusions) and all(self.structure.values())

    def to_json(self) -> dict:
        return {
            "uTilde": str(self.u_tilde), "d": format_time(self.d), "grid": str(self.grid),
            "hypotheses": self.hypotheses,
            "conclusions": [{"x": str(c["x"]), "eq8": c["eq8"], "eq9": c["eq9"],
                             "t0": None if c["t0"] is None else format_time(c["t0"]),
                             "t3": None if c["t3"] is None else format_time(c["t3"])}
                            for c in self.conclusions],
            "structure": self.structure, "spotChecks": self.spot_checks, "ok": self.ok,
        }


def compose_transfer(f: SystemModel, spec: TransferSpec, grid: TimeGrid | None = None,
                     spot_checks: bool = True) -> tuple[BinarySignal, TransferReport]:
    """Build the glued input and verify that it transfers ``mu`` to ``mu''``."""
    t1, t2, d = spec.t1, spec.t2, spec.d
    g0 = _refined(f, [spec.u0], grid, [t1])
    g1 = _refined(f, [spec.u1], grid, [t2])
    hyp = {}
    for x in sorted(enumerate_states(f, spec.u0, g0)):
        if _hit_before(x, spec.mu, t1) is None:
            raise HypothesisEFailed(f"state {x} never equals mu before t1", equation=3, state=x)
        if x.bits_at(t1) != spec.mu1:
            raise HypothesisEFailed(f"state {x} is not mu' at t1", equation=4, state=x)
    for x in sorted(enumerate_states(f, spec.u1, g1)):
        if x.bits_at(t2) != spec.mu1:
            raise HypothesisEFailed(f"state {x} is not mu' at t2", equation=5, state=x)
        if _hit_after(x, spec.mu2, t2) is None:
            raise HypothesisEFailed(f"state {x} never equals mu'' after t2", equation=6, state=x)
    hyp.update({"eq3": True, "eq4": True, "eq5": True, "eq6": True})

    shifted = translate(spec.u1, d)
    u_tilde = concat(spec.u0, shifted, t1)
    gt = _refined(f, [u_tilde, shifted], grid, [t1]).union(g0).union(g1.shifted(d))
    report = TransferReport(u_tilde, d, gt, hypotheses=hyp)
    report.structure = {
        "pastAgrees": restrict(u_tilde, Domain.PAST_OPEN, t1) == restrict(spec.u0, Domain.PAST_OPEN, t1),
        "futureAgrees": restrict(u_tilde, Domain.FUTURE, t1) == restrict(shifted, Domain.FUTURE, t1),
    }
    for x in sorted(enumerate_states(f, u_tilde, gt)):
        t0 = _hit_before(x, spec.mu, t1)
        t3 = _hit_after(x, spec.mu2, t1)
        report.conclusions.append({"x": x, "t0": t0, "t3": t3, "eq8": t0 is not None, "eq9": t3 is not None})

    if spot_checks:
        report.spot_checks["b"] = check_def51(f, [spec.u0, u_tilde], gt).outcome
        # the translated tail may lie outside a tabulated domain
        pair = [w for w in (u_tilde, shifted) if f.admissible(w)]
        report.spot_checks["c"] = check_star(f, NaProperty.STAR_I, pair, gt).outcome
        if d != 0:
            report.spot_checks["d"] = "PassCorpusRelative" if time_invariance_check(f, [spec.u1], [d], g1) else "Fail"
    if not report.ok:
        broken = [k for k, v in report.spot_checks.items() if v == "Fail"]
        raise ConclusionFailed("the glued input does not transfer mu to mu''"
                               + (f"; failing hypotheses on this carrier: {', '.join(broken)}" if broken else ""),
                               report=report)
    return u_tilde, report


# ---------------------------------------------------------------------------
# fundamental mode

@dataclass
class FundamentalModeSpec:
    """``k`` inputs, ``k + 1`` switching instants and ``k + 1`` state words."""

    u: BinarySignal
    times: list
    inputs: list
    states: list
    width: int
    seed: BinarySignal | None = None

    def __post_init__(self):
        self.times = [as_time(t) for t in self.times]
        self.states = [_bits(w, self.width) for w in self.states]
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("switching instants must increase strictly")
        k = len(self.inputs)
        if len(self.times) != k + 1 or len(self.states) != k + 1:
            raise ValueError(f"{k} inputs need {k + 1} instants and {k + 1} state words")

    def to_json(self) -> dict:
        out = {"u": str(self.u), "times": [format_time(t) for t in self.times],
               "inputs": [str(v) for v in self.inputs],
               "states": [_show_word(m, self.width) for m in self.states]}
        if self.seed is not None:
            out["seed"] = str(self.seed)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FundamentalModeSpec":
        from .dsl import parse_signal

        states = [BinaryWord.parse(s) for s in data["states"]]
        return cls(parse_signal(data["u"]), [as_time(t) for t in data["times"]],
                   [parse_signal(s) for s in data["inputs"]], states, states[0].width,
                   parse_signal(data["seed"]) if data.get("seed") else None)


@dataclass
class Clause:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class FundamentalModeReport:
    clauses: list
    grid: TimeGrid

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.clauses)

    def to_json(self) -> dict:
        return {"ok": self.ok, "grid": str(self.grid),
                "clauses": [{"name": c.name, "ok": c.ok, **({"detail": c.detail} if c.detail else {})}
                            for c in self.clauses]}


def _const_on(x: BinarySignal, mu: int, kind: Domain, t) -> bool:
    return restrict(x, kind, t) == restrict(constant(BinaryWord(mu, x.width)), kind, t)


def verify_fundamental_mode(f: SystemModel, spec: FundamentalModeSpec, grid: TimeGrid | None = None,
                            check_precondition: bool = True) -> FundamentalModeReport:
    ts, us, mus = spec.times, spec.inputs, spec.states
    carriers = list(us) or [spec.u]
    g = _refined(f, carriers + [spec.u], grid, ts)
    clauses = []
    if check_precondition:
        v = check_def51(f, carriers + [spec.u], g)
        clauses.append(Clause("history-causal", v.passed, "" if v.passed else v.line()))

    first = us[0] if us else spec.u
    bad = [x for x in sorted(enumerate_states(f, first, g)) if not _const_on(x, mus[0], Domain.PAST_OPEN, ts[0])]
    clauses.append(Clause("initial", not bad, f"state {bad[0]} is not constant before t0" if bad else ""))
    for j, uj in enumerate(us):
        t = ts[j + 1]
        same = restrict(spec.u, Domain.PAST_OPEN, t) == restrict(uj, Domain.PAST_OPEN, t)
        clauses.append(Clause(f"prefix[{j}]", same, "" if same else f"u differs from u{j} before {format_time(t)}"))
        bad = [x for x in sorted(enumerate_states(f, uj, g)) if not _const_on(x, mus[j + 1], Domain.FUTURE, t)]
        clauses.append(Clause(f"settle[{j}]", not bad,
                              f"state {bad[0]} has not settled to {_show_word(mus[j + 1], spec.width)} "
                              f"from {format_time(t)}" if bad else ""))
    return FundamentalModeReport(clauses, g)


def next_state_trace(spec: FundamentalModeSpec) -> list[tuple[BinaryWord, str | None]]:
    """``mu0 -u0-> mu1 -u1-> ...``, cut once inputs and words stop changing."""
    us, mus = spec.inputs, spec.states
    k = len(us)
    end = k
    for j in range(k):
        if all(v == us[j] for v in us[j:]) and all(m == mus[j + 1] for m in mus[j + 1:]):
            end = j + 1
            break
    out = []
    for i in range(end + 1):
        label = f"u{i}" if i < end else None
        out.append((BinaryWord(mus[i], spec.width), label))
    return out


def format_trace(trace) -> str:
    parts = []
    for w, label in trace:
        parts.append(str(w))
        if label:
            parts.append(f"-{label}->")
    return " ".join(parts)


Oracle = Callable[[int, BinarySignal, Fraction], tuple]


def settle_time(f: SystemModel) -> Fraction:
    """Time after which a delay model's states follow a held input."""
    if isinstance(f, BoundedDelayWindow):
        return max(f.dr, f.df)
    if isinstance(f, BoundedDelayClosed):
        return f.dprime
    if isinstance(f, (PureDelay, InertialDelay)):
        return f.d
    raise TypeError(f"no settling time known for {type(f).__name__}")


def delay_oracle(f: SystemModel, delta=1) -> Oracle:
    """Hold the target word from ``t`` on; states follow after the model's settling time."""
    delta = as_time(delta)
    settle = settle_time(f)

    def oracle(mu, u: BinarySignal, t):
        v = concat(u, constant(BinaryWord(_bits(mu, u.width), u.width)), t)
        return v, t + settle + delta

    return oracle


def synthesize_fundamental_mode(f: SystemModel, oracle: Oracle, mu_seq: Sequence, delta=1,
                                grid: TimeGrid | None = None, seed: BinarySignal | None = None
                                ) -> FundamentalModeSpec:
    """Fundamental mode reaching ``mu_seq`` in order, driven by an accessibility oracle."""
    delta = as_time(delta)
    if delta <= 0:
        raise ValueError("delta must be > 0")
    n = f.state_width
    v0 = seed if seed is not None else constant(BinaryWord(0, f.input_width))
    states = sorted(enumerate_states(f, v0, _refined(f, [v0], grid)))
    inits = {x.initial for x in states}
    if len(inits) != 1:
        raise RaceDetected(f"states of the seed input start from {len(inits)} different words")
    mu0 = inits.pop()
    switches = [x.times[0] for x in states if x.times]
    g0 = _refined(f, [v0], grid)
    t0 = min(switches) if switches else g0.points[0]

    times, inputs, words = [t0], [], [mu0]
    prev, t_prev = v0, t0
    for mu in mu_seq:
        mu = _bits(mu, n)
        v, tp = oracle(mu, prev, t_prev)
        tp = as_time(tp)
        if tp <= t_prev:
            raise OracleContractViolation(f"oracle returned t' = {format_time(tp)} <= t = {format_time(t_prev)}")
        if restrict(v, Domain.PAST_OPEN, t_prev) != restrict(prev, Domain.PAST_OPEN, t_prev):
            raise OracleContractViolation(f"oracle input {v} changes the past before {format_time(t_prev)}")
        for x in enumerate_states(f, v, _refined(f, [v], grid, [tp])):
            if not _const_on(x, mu, Domain.FUTURE, tp):
                raise OracleContractViolation(f"state {x} of {v} is not {_show_word(mu, n)} from {format_time(tp)}")
        t_next = tp if tp > t_prev + delta else t_prev + 2 * delta
        inputs.append(v)
        times.append(t_next)
        words.append(mu)
        prev, t_prev = v, t_next
    u = splice(inputs, times[1:-1]) if inputs else v0
    return FundamentalModeSpec(u, times, inputs, words, n, seed=v0)
