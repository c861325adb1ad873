"""Text formats: signals, corpus files and system stanzas.

Signal (one line)::

    WIDTH | INITIAL | TIME:WORD ; TIME:WORD ...

    1 | 0 | 0:1 ; 2:0          chi[0, 2)
    2 | 00 | 1/2:10 ; 3/2:11

Times are integers or ``p/q``; words are written MSB first (coordinate 1
leftmost).  A corpus file holds one signal per line; blank lines and
``#`` comments are skipped.

System stanza::

    system p { kind = pure_delay; d = 1; }
    system c { kind = combinational; d = 0; inputs = 2; table = [00->0, 01->1, 10->1, 11->0]; }
    system t { kind = tabulated; map = [ "1 | 0 |" -> { "1 | 0 |", "1 | 1 |" } ]; }
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .errors import (AsysigError, BadParameter, DslSyntaxError, NonIncreasingTimes, NoOpSwitch, UnknownKind,
                     WidthMismatch)
from .signal import BinarySignal, TimeGrid, as_time
from .systems import (BoundedDelayClosed, BoundedDelayWindow, ConstState, IdealCombinational, InertialDelay,
                      MonotoneCover, ParityLower, PhiWindow, PureDelay, SystemModel, Tabulated, TruthTable)

_TIME = re.compile(r"-?\d+(?:/\d+)?")
_WORD = re.compile(r"[01]+")


def _fail(msg, line, col):
    raise DslSyntaxError(msg, line=line, col=col)


def parse_signal(text: str, line: int = 1, col0: int = 1) -> BinarySignal:
    """Parse one signal.  Errors carry 1-based line and column."""
    fields = text.split("|")
    if len(fields) != 3:
        _fail("expected 'WIDTH | INITIAL | SWITCHES'", line, col0)
    offs = [0, len(fields[0]) + 1, len(fields[0]) + len(fields[1]) + 2]

    def col(field, i=0):
        raw = fields[field]
        return col0 + offs[field] + (len(raw) - len(raw.lstrip())) + i

    wtext = fields[0].strip()
    if not wtext.isdigit() or int(wtext) < 1:
        _fail(f"bad width {wtext!r}", line, col(0))
    width = int(wtext)
    itext = fields[1].strip()
    if not _WORD.fullmatch(itext):
        _fail(f"bad word {itext!r}", line, col(1))
    if len(itext) != width:
        raise WidthMismatch(f"initial word {itext!r} is not {width} bits wide", line=line, col=col(1))

    switches = []
    body = fields[2]
    pos = 0
    for chunk in body.split(";"):
        start = col0 + offs[2] + pos + (len(chunk) - len(chunk.lstrip()))
        pos += len(chunk) + 1
        item = chunk.strip()
        if not item:
            if len(body.split(";")) > 1 or body.strip():
                _fail("empty switch", line, start)
            continue
        t, sep, w = item.partition(":")
        t, w = t.strip(), w.strip()
        if not sep or not _TIME.fullmatch(t):
            _fail(f"bad switch {item!r}, expected TIME:WORD", line, start)
        if not _WORD.fullmatch(w):
            _fail(f"bad word {w!r}", line, start + item.index(":") + 1)
        if len(w) != width:
            raise WidthMismatch(f"word {w!r} is not {width} bits wide", line=line, col=start)
        try:
            tv = Fraction(t)
        except ZeroDivisionError:
            _fail(f"bad time {t!r}", line, start)
        switches.append((tv, int(w, 2), start))
    prev = None
    cur = int(itext, 2)
    for t, w, c in switches:
        if prev is not None and t <= prev:
            raise NonIncreasingTimes(f"switch time {t} does not follow {prev}", line=line, col=c)
        if w == cur:
            raise NoOpSwitch(f"switch at {t} does not change the value", line=line, col=c)
        prev, cur = t, w
    return BinarySignal(width, int(itext, 2), [(t, w) for t, w, _ in switches])


def format_signal(x: BinarySignal) -> str:
    return str(x)


def parse_corpus(text: str) -> list[BinarySignal]:
    out = []
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if body.strip():
            out.append(parse_signal(body, line=n))
    return out


def format_corpus(signals) -> str:
    return "".join(f"{x}\n" for x in signals)


def load_corpus(path) -> list[BinarySignal]:
    return parse_corpus(Path(path).read_text())


def parse_grid(text: str) -> TimeGrid:
    try:
        return TimeGrid.parse(text)
    except (ValueError, ZeroDivisionError) as e:
        if isinstance(e, AsysigError):
            raise
        raise DslSyntaxError(f"bad grid {text!r}: {e}") from None


# ---------------------------------------------------------------------------
# system stanzas

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>\#[^\n]*)
  | (?P<str>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<num>-?\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}\[\]=;,])
""", re.X)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def _tokens(text: str, line0: int = 1) -> list[Token]:
    out, pos, line, bol = [], 0, line0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            _fail(f"unexpected character {text[pos]!r}", line, pos - bol + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, bol = line + 1, m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, m.start() - bol + 1))
        pos = m.end()
    out.append(Token("eof", "", line, pos - bol + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text=None, kind=None) -> Token:
        tok = self.next()
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            want = repr(text) if text is not None else kind
            got = tok.text or "end of input"
            _fail(f"expected {want}, got {got!r}", tok.line, tok.col)
        return tok

    def stanza(self):
        self.expect("system")
        name = self.expect(kind="name")
        self.expect("{")
        fields = {}
        while self.peek().text != "}":
            key = self.expect(kind="name")
            if key.text != key.text.lower():
                _fail(f"keys are lowercase: {key.text!r}", key.line, key.col)
            if key.text in fields:
                _fail(f"duplicate key {key.text!r}", key.line, key.col)
            self.expect("=")
            fields[key.text] = (self.value(), key)
            self.expect(";")
        self.expect("}")
        return name, fields

    def value(self):
        tok = self.peek()
        if tok.text == "[":
            return self.listing()
        if tok.kind in ("num", "name", "str"):
            return self.next()
        _fail(f"unexpected {tok.text or 'end of input'!r}", tok.line, tok.col)

    def listing(self):
        open_ = self.expect("[")
        items = []
        while self.peek().text != "]":
            lhs = self.next()
            if lhs.kind not in ("num", "str"):
                _fail(f"unexpected {lhs.text!r} in list", lhs.line, lhs.col)
            self.expect("->")
            if self.peek().text == "{":
                self.next()
                rhs = []
                while self.peek().text != "}":
                    rhs.append(self.expect(kind="str"))
                    if self.peek().text == ",":
                        self.next()
                self.expect("}")
            else:
                rhs = self.next()
            items.append((lhs, rhs))
            if self.peek().text == ",":
                self.next()
            elif self.peek().text != "]":
                tok = self.peek()
                _fail(f"expected ',' or ']', got {tok.text!r}", tok.line, tok.col)
        self.expect("]")
        return items, open_


def _num(tok, key) -> Fraction:
    if not isinstance(tok, Token) or tok.kind != "num":
        t = tok if isinstance(tok, Token) else tok[1]
        _fail(f"{key} must be a number", t.line, t.col)
    return as_time(tok.text)


def _int(tok, key) -> int:
    v = _num(tok, key)
    if v.denominator != 1 or v < 1:
        raise BadParameter(f"{key} must be a positive integer", line=tok.line, col=tok.col)
    return int(v)


def _sig(tok: Token) -> BinarySignal:
    if tok.kind != "str":
        _fail("expected a quoted signal", tok.line, tok.col)
    return parse_signal(tok.text[1:-1], line=tok.line, col0=tok.col + 1)


def _table(value, key, inputs, outputs) -> TruthTable:
    if isinstance(value, Token):
        _fail(f"{key} must be a list", value.line, value.col)
    items, open_ = value
    rows = {}
    for lhs, rhs in items:
        if lhs.kind != "num" or isinstance(rhs, list) or not (_WORD.fullmatch(lhs.text) and _WORD.fullmatch(rhs.text)):
            _fail("truth table rows look like 01->1", lhs.line, lhs.col)
        if len(lhs.text) != inputs or len(rhs.text) != outputs:
            raise WidthMismatch(f"row {lhs.text}->{rhs.text} does not match {inputs} inputs / {outputs} outputs",
                                line=lhs.line, col=lhs.col)
        if lhs.text in rows:
            _fail(f"duplicate row {lhs.text}", lhs.line, lhs.col)
        rows[lhs.text] = int(rhs.text, 2)
    if len(rows) != 1 << inputs:
        raise BadParameter(f"truth table needs {1 << inputs} rows, got {len(rows)}", line=open_.line, col=open_.col)
    return TruthTable(inputs, outputs, tuple(rows[format(w, f"0{inputs}b")] for w in range(1 << inputs)))


def _map(value, key):
    if isinstance(value, Token):
        _fail(f"{key} must be a list", value.line, value.col)
    table = {}
    for lhs, rhs in value[0]:
        u = _sig(lhs)
        if u in table:
            _fail(f"input {u} listed twice", lhs.line, lhs.col)
        states = rhs if isinstance(rhs, list) else [rhs]
        table[u] = [_sig(t) for t in states]
    return table


# kind -> (required keys, optional keys with defaults, builder)
_KINDS: dict[str, tuple[tuple, dict, Callable]] = {
    "pure_delay": (("d",), {"width": 1}, lambda a, n: PureDelay(a["d"], a["width"], name=n)),
    "bounded_delay": (("dr", "df"), {"width": 1},
                      lambda a, n: BoundedDelayWindow(a["dr"], a["df"], a["width"], name=n)),
    "bounded_delay_closed": (("d", "dprime"), {"width": 1},
                             lambda a, n: BoundedDelayClosed(a["d"], a["dprime"], a["width"], name=n)),
    "inertial_delay": (("d",), {"width": 1}, lambda a, n: InertialDelay(a["d"], a["width"], name=n)),
    "combinational": (("table",), {"d": 0, "inputs": 1, "outputs": 1},
                      lambda a, n: IdealCombinational(a["table"], a["d"], name=n)),
    "phi_window": ((), {"width": 1}, lambda a, n: PhiWindow(a["width"], name=n)),
    "parity_lower": ((), {"inputs": 1}, lambda a, n: ParityLower(a["inputs"], name=n)),
    "monotone_cover": ((), {"width": 1}, lambda a, n: MonotoneCover(a["width"], name=n)),
    "const_state": (("state",), {"inputs": 1}, lambda a, n: ConstState(a["state"], a["inputs"], name=n)),
    "tabulated": (("map",), {}, lambda a, n: Tabulated(a["map"], name=n)),
}

_INT_KEYS = {"width", "inputs", "outputs"}
_TIME_KEYS = {"d", "dr", "df", "dprime"}


def _build(name: Token, fields: dict) -> SystemModel:
    if "kind" not in fields:
        _fail(f"system {name.text} has no kind", name.line, name.col)
    kind_tok, _ = fields.pop("kind")
    if not isinstance(kind_tok, Token) or kind_tok.kind != "name":
        _fail("kind must be a name", name.line, name.col)
    if kind_tok.text not in _KINDS:
        raise UnknownKind(f"unknown kind {kind_tok.text!r}", line=kind_tok.line, col=kind_tok.col)
    required, optional, build = _KINDS[kind_tok.text]
    for key, (_, ktok) in fields.items():
        if key not in required and key not in optional:
            raise BadParameter(f"unknown key {key!r} for kind {kind_tok.text}", line=ktok.line, col=ktok.col)
    for key in required:
        if key not in fields:
            raise BadParameter(f"kind {kind_tok.text} needs {key!r}", line=name.line, col=name.col)
    args = dict(optional)
    for key in fields:
        value, ktok = fields[key]
        if key in _INT_KEYS:
            args[key] = _int(value, key)
        elif key in _TIME_KEYS:
            args[key] = _num(value, key)
        elif key == "state":
            args[key] = _sig(value)
    if "table" in fields:
        args["table"] = _table(fields["table"][0], "table", args["inputs"], args["outputs"])
    if "map" in fields:
        args["map"] = _map(fields["map"][0], "map")
    try:
        return build(args, name.text)
    except AsysigError as e:
        if e.line is not None:
            raise
        raise type(e)(str(e), line=name.line, col=name.col) from None


def parse_systems(text: str) -> dict[str, SystemModel]:
    """All stanzas of a system file, by name."""
    p = _Parser(text)
    out = {}
    while p.peek().kind != "eof":
        name, fields = p.stanza()
        if name.text in out:
            _fail(f"system {name.text!r} defined twice", name.line, name.col)
        out[name.text] = _build(name, fields)
    return out


def parse_system(stanza: str) -> SystemModel:
    systems = parse_systems(stanza)
    if len(systems) != 1:
        raise DslSyntaxError(f"expected exactly one system, found {len(systems)}")
    return next(iter(systems.values()))


def load_system(ref: str) -> SystemModel:
    """Resolve ``FILE#NAME`` (the name may be omitted when the file has one system)."""
    path, _, name = ref.partition("#")
    systems = parse_systems(Path(path).read_text())
    if not name:
        if len(systems) != 1:
            raise BadParameter(f"{path} defines {len(systems)} systems; use {path}#NAME")
        return next(iter(systems.values()))
    if name not in systems:
        raise BadParameter(f"no system {name!r} in {path} (have: {', '.join(sorted(systems))})")
    return systems[name]


def format_system(f: SystemModel) -> str:
    """Stanza for the kinds the DSL can express."""
    from .signal import format_time

    def t(v):
        return format_time(Fraction(v))

    k = f.kind
    if k == "pure_delay":
        body = [f"d = {t(f.d)}"] + ([f"width = {f.state_width}"] if f.state_width != 1 else [])
    elif k == "bounded_delay":
        body = [f"dr = {t(f.dr)}", f"df = {t(f.df)}"]
    elif k == "bounded_delay_closed":
        body = [f"d = {t(f.d)}", f"dprime = {t(f.dprime)}"]
    elif k == "inertial_delay":
        body = [f"d = {t(f.d)}"]
    elif k == "combinational":
        tt = f.table
        rows = ", ".join(f"{w:0{tt.inputs}b}->{tt(w):0{tt.outputs}b}" for w in range(1 << tt.inputs))
        body = [f"d = {t(f.d)}", f"inputs = {tt.inputs}", f"outputs = {tt.outputs}", f"table = [{rows}]"]
    elif k in ("phi_window", "monotone_cover"):
        body = [f"width = {f.state_width}"]
    elif k == "parity_lower":
        body = [f"inputs = {f.input_width}"]
    elif k == "const_state":
        body = [f'state = "{f.state}"', f"inputs = {f.input_width}"]
    elif k in ("tabulated", "normalized"):
        k = "tabulated"
        entries = []
        for u in sorted(f.table):
            xs = ", ".join(f'"{x}"' for x in sorted(f.table[u]))
            entries.append(f'    "{u}" -> {{ {xs} }}')
        body = ["map = [\n" + ",\n".join(entries) + "\n  ]"]
    else:
        raise UnknownKind(f"kind {k!r} has no DSL form")
    if f.kind in ("bounded_delay", "bounded_delay_closed", "inertial_delay") and f.state_width != 1:
        body.append(f"width = {f.state_width}")
    inner = "".join(f" {line};" for line in [f"kind = {k}"] + body)
    return f"system {f.name} {{{inner} }}\n"
