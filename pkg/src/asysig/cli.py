"""Command line entry point: ``asysig <command> ...``.

Exit status: 0 when everything passed, 1 when any verdict, clause or
construction failed, 2 for usage, parse and model errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .checkers import SearchBounds, check_all, implication_audit, parse_props
from .constructions import (FundamentalModeSpec, TransferSpec, compose_transfer, delay_oracle, format_trace,
                            next_state_trace, synthesize_fundamental_mode, verify_fundamental_mode)
from .dsl import load_corpus, load_system, parse_grid, parse_signal
from .errors import (AsysigError, ConclusionFailed, HypothesisEFailed, OracleContractViolation,
                     PreconditionFailed, RaceDetected)
from .plot import plot
from .signal import BinaryWord, as_time, format_time
from .systems import adequate_grid, enumerate_states, eval_deterministic

EPILOG = """\
signals:  'WIDTH | INITIAL | TIME:WORD ; ...'   e.g. '1 | 0 | 0:1 ; 2:0'
systems:  FILE#NAME pointing at a stanza such as
          system p { kind = pure_delay; d = 1; }
grids:    comma separated rationals, e.g. '0,1/2,1'; always merged with the
          instants the model itself needs
env:      ASYSIG_BUDGET caps brute-force enumeration (default 65536 candidates)
          ASYSIG_BACKEND=python disables the compiled kernels
exit:     0 all passed, 1 something failed, 2 usage or parse error
"""

FAIL_ERRORS = (ConclusionFailed, HypothesisEFailed, OracleContractViolation, PreconditionFailed, RaceDetected)


def _emit(args, text: str):
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _grid(args, f, corpus, extra=()):
    g = adequate_grid(f, corpus, extra)
    return g.union(parse_grid(args.grid)) if args.grid else g


def _inputs(args):
    if getattr(args, "inputs", None):
        return load_corpus(args.inputs)
    if getattr(args, "input", None):
        return [parse_signal(s) for s in args.input]
    raise AsysigError("give --input SIGNAL or --inputs FILE")


def _range(text: str):
    a, _, b = text.partition(",")
    return as_time(a), as_time(b)


def _plot(args, rows, default_range):
    a, b = _range(args.range) if args.range else default_range
    return plot(rows, a, b, args.columns, args.plot)


def _span(signals):
    ts = [t for x in signals for t in x.times]
    if not ts:
        return as_time(-1), as_time(1)
    return min(ts) - 1, max(ts) + 1


# ---------------------------------------------------------------------------
# commands

def cmd_eval(args) -> int:
    f = load_system(args.system)
    us = _inputs(args)
    xs = [eval_deterministic(f, u) for u in us]
    if args.plot:
        rows = []
        for n, (u, x) in enumerate(zip(us, xs)):
            sfx = "" if len(us) == 1 else str(n)
            rows += [(f"u{sfx}", u), (f"x{sfx}", x)]
        _emit(args, _plot(args, rows, _span(us + xs)))
    elif args.format == "json":
        _emit(args, _json([{"input": str(u), "state": str(x)} for u, x in zip(us, xs)]))
    else:
        _emit(args, "".join(f"{x}\n" for x in xs))
    return 0


def cmd_enumerate(args) -> int:
    f = load_system(args.system)
    us = _inputs(args)
    out = []
    for u in us:
        g = _grid(args, f, [u])
        out.append((u, g, sorted(enumerate_states(f, u, g))))
    if args.format == "json":
        _emit(args, _json([{"input": str(u), "grid": str(g), "states": [str(x) for x in xs]} for u, g, xs in out]))
    else:
        lines = []
        for u, g, xs in out:
            if len(out) > 1:
                lines.append(f"# {u}  ({len(xs)} states on {g})")
            lines += [str(x) for x in xs]
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _bounds(args, f, corpus, grid) -> SearchBounds:
    base = SearchBounds.default(f, corpus, grid)
    ds, dds = base.d_candidates, base.dd_candidates
    if args.dmax is not None:
        cap = as_time(args.dmax)
        if cap <= 0:
            raise AsysigError("--dmax must be > 0")
        ds = tuple(d for d in ds if d <= cap) + (cap,)
        dds = tuple((a, b) for a, b in dds if b <= cap) + ((0, cap),)
    if args.dd_candidates:
        pairs = []
        for item in args.dd_candidates.split(","):
            a, sep, b = item.partition(":")
            if not sep:
                raise AsysigError(f"--dd-candidates items look like d:d', got {item!r}")
            pairs.append((as_time(a), as_time(b)))
        dds = tuple(pairs)
    return SearchBounds(ds, dds)


def cmd_check(args) -> int:
    f = load_system(args.system)
    corpus = _inputs(args)
    props = parse_props(args.props)
    grid = _grid(args, f, corpus)
    bounds = _bounds(args, f, corpus, grid)
    verdicts = check_all(f, props, corpus, grid, bounds)
    audit = implication_audit(verdicts)
    audit_rec = {"property": "AUDIT", "outcome": "Fail" if audit else "Pass",
                 "inconsistencies": [str(i) for i in audit]}
    if args.format == "json":
        _emit(args, _json([v.to_json() for v in verdicts.values()] + [audit_rec]))
    else:
        lines = [v.line() for v in verdicts.values()]
        lines.append("AUDIT: " + audit_rec["outcome"] + "".join(f"\n  {i}" for i in audit))
        _emit(args, "\n".join(lines) + "\n")
    return 0 if all(v.passed for v in verdicts.values()) and not audit else 1


def _load_json(path):
    return json.loads(Path(path).read_text())


def cmd_transfer(args) -> int:
    f = load_system(args.system)
    spec = TransferSpec.from_json(_load_json(args.spec))
    grid = parse_grid(args.grid) if args.grid else None
    try:
        _, report = compose_transfer(f, spec, grid)
    except ConclusionFailed as e:
        _emit(args, _json({"ok": False, "error": str(e), "report": e.report.to_json()}))
        return 1
    except HypothesisEFailed as e:
        _emit(args, _json({"ok": False, "error": str(e), "equation": e.equation, "state": str(e.state)}))
        return 1
    if args.plot:
        rows = [("u0", spec.u0), ("u1", spec.u1), ("u~", report.u_tilde)]
        _emit(args, _plot(args, rows, _span([r for _, r in rows])))
    else:
        _emit(args, _json(report.to_json()))
    return 0


def cmd_fm_verify(args) -> int:
    f = load_system(args.system)
    spec = FundamentalModeSpec.from_json(_load_json(args.spec))
    grid = parse_grid(args.grid) if args.grid else None
    report = verify_fundamental_mode(f, spec, grid)
    out = report.to_json()
    out["trace"] = format_trace(next_state_trace(spec))
    if args.format == "text":
        lines = [f"{c.name}: {'ok' if c.ok else 'FAIL'}" + (f"  {c.detail}" if c.detail else "") for c in report.clauses]
        lines.append(out["trace"])
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, _json(out))
    return 0 if report.ok else 1


def cmd_fm_synth(args) -> int:
    f = load_system(args.system)
    n = f.state_width
    mus = [BinaryWord.parse(m) for m in args.mu.split(",")]
    if any(m.width != n for m in mus):
        raise AsysigError(f"--mu words must be {n} bits wide")
    seed = parse_signal(args.seed) if args.seed else None
    grid = parse_grid(args.grid) if args.grid else None
    spec = synthesize_fundamental_mode(f, delay_oracle(f, args.delta), mus, args.delta, grid, seed)
    report = verify_fundamental_mode(f, spec, grid)
    out = {"spec": spec.to_json(), "delta": format_time(as_time(args.delta)),
           "trace": format_trace(next_state_trace(spec)), "verified": report.to_json()}
    _emit(args, _json(out))
    return 0 if report.ok else 1


def cmd_plot(args) -> int:
    rows = []
    for n, item in enumerate(args.input or []):
        label, sep, text = item.partition("=")
        if not sep or "|" in label:
            label, text = f"s{n}", item
        rows.append((label.strip(), parse_signal(text)))
    if args.system:
        f = load_system(args.system)
        rows = [r for (label, u) in rows for r in ((label, u), (f"{f.name}({label})", eval_deterministic(f, u)))]
    if not rows:
        raise AsysigError("nothing to plot: give --input [LABEL=]SIGNAL")
    args.plot = args.plot or "ascii"
    _emit(args, _plot(args, rows, _span([x for _, x in rows])))
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="asysig", description="Binary signals and asynchronous systems, exactly.",
                                epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"asysig {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, system=True, inputs=True):
        if system:
            sp.add_argument("--system", required=True, metavar="FILE#NAME", help="system stanza to use")
        if inputs:
            g = sp.add_mutually_exclusive_group()
            g.add_argument("--input", action="append", metavar="SIGNAL", help="input signal (repeatable)")
            g.add_argument("--inputs", metavar="FILE", help="corpus file, one signal per line")
        sp.add_argument("--grid", metavar="CSV", help="extra candidate switch instants")
        sp.add_argument("--out", metavar="FILE", help="write the result here instead of stdout")
        sp.add_argument("--format", choices=("json", "text"), default="text")

    def plotting(sp):
        sp.add_argument("--plot", choices=("ascii", "svg"), help="render waveforms instead of text")
        sp.add_argument("--range", metavar="A,B", help="time range for --plot; write --range=-1,3 when A is negative")
        sp.add_argument("--columns", type=int, default=64, help="plot width in columns (>= 8)")

    sp = sub.add_parser("eval", help="state of a deterministic system")
    common(sp)
    plotting(sp)
    sp.set_defaults(run=cmd_eval)

    sp = sub.add_parser("enumerate", help="state set on a grid")
    common(sp)
    sp.set_defaults(run=cmd_enumerate)

    sp = sub.add_parser("check", help="non-anticipation verdicts on a corpus")
    common(sp)
    sp.add_argument("--props", default="all", help="CSV of properties, 'all', 'star' or 'every'")
    sp.add_argument("--dmax", metavar="D", help="largest memory length to try")
    sp.add_argument("--dd-candidates", metavar="d:d',...", help="window pairs to try for the (d, d') conditions")
    sp.set_defaults(run=cmd_check)

    sp = sub.add_parser("transfer", help="compose two transfers (JSON spec)")
    common(sp, inputs=False)
    plotting(sp)
    sp.add_argument("--spec", required=True, metavar="FILE")
    sp.set_defaults(run=cmd_transfer)

    sp = sub.add_parser("fm-verify", help="verify a fundamental-mode spec (JSON)")
    common(sp, inputs=False)
    sp.add_argument("--spec", required=True, metavar="FILE")
    sp.set_defaults(run=cmd_fm_verify, format="json")

    sp = sub.add_parser("fm-synth", help="synthesize a fundamental mode with the delay oracle")
    common(sp, inputs=False)
    sp.add_argument("--mu", required=True, metavar="W,W,...", help="target state words in order")
    sp.add_argument("--delta", default="1", help="minimum spacing between instants")
    sp.add_argument("--seed", metavar="SIGNAL", help="seed input (default constant 0)")
    sp.set_defaults(run=cmd_fm_synth)

    sp = sub.add_parser("plot", help="draw signals (and optionally a system's states)")
    sp.add_argument("--input", action="append", metavar="[LABEL=]SIGNAL")
    sp.add_argument("--system", metavar="FILE#NAME", help="also draw the deterministic state of each input")
    sp.add_argument("--out", metavar="FILE")
    plotting(sp)
    sp.set_defaults(run=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.run(args)
    except FAIL_ERRORS as e:
        print(f"asysig: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except (AsysigError, ValueError, TypeError, OSError, json.JSONDecodeError, KeyError) as e:
        print(f"asysig: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
