"""ASCII and SVG waveforms.

Column ``c`` of an ASCII trace covers ``[a + c*w, a + (c+1)*w)`` with
``w = (b - a) / columns``; a column holding a switch shows ``/`` (rise),
``\\`` (fall) or ``X`` (several switches), otherwise ``_`` (0) or ``=`` (1).
Positions are computed with exact rationals, so output is byte-stable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import BadRange
from .signal import BinarySignal, as_time, format_time

MIN_COLUMNS = 8


def _range(a, b, columns):
    try:
        a, b = as_time(a), as_time(b)
    except (TypeError, ValueError) as e:
        raise BadRange(f"plot range must be finite rationals: {e}") from None
    if b <= a:
        raise BadRange(f"empty plot range [{format_time(a)}, {format_time(b)}]")
    if columns < MIN_COLUMNS:
        raise BadRange(f"need at least {MIN_COLUMNS} columns, got {columns}")
    return a, b


def _rows(signals: Sequence[tuple[str, BinarySignal]]):
    for name, x in signals:
        for i in range(x.width):
            shift = x.width - 1 - i
            label = name if x.width == 1 else f"{name}[{i + 1}]"
            yield label, x, shift


def _trace(x: BinarySignal, shift: int, a: Fraction, w: Fraction, columns: int) -> str:
    out = []
    for c in range(columns):
        lo, hi = a + c * w, a + (c + 1) * w
        inside = [t for t in x.times if lo <= t < hi]
        bit = lambda t: (x.bits_at(t) >> shift) & 1
        flips = [t for t in inside if bit(t) != (x.bits_before(t) >> shift) & 1]
        if len(flips) > 1:
            out.append("X")
        elif flips:
            out.append("/" if bit(flips[0]) else "\\")
        else:
            out.append("=" if bit(lo) else "_")
    return "".join(out)


def ascii_plot(signals: Sequence[tuple[str, BinarySignal]], a, b, columns: int = 64) -> str:
    a, b = _range(a, b, columns)
    w = (b - a) / columns
    rows = list(_rows(signals))
    pad = max((len(r[0]) for r in rows), default=1)
    left, right = format_time(a), format_time(b)
    gap = max(1, columns - len(left) - len(right))
    lines = [" " * (pad + 1) + left + " " * gap + right]
    for label, x, shift in rows:
        lines.append(f"{label:<{pad}} {_trace(x, shift, a, w, columns)}")
    lines.append(" " * (pad + 1) + f"({format_time(w)} per column)")
    return "\n".join(lines) + "\n"


def _num(v: Fraction) -> str:
    v = round(v, 3)
    text = f"{v.numerator / v.denominator:.3f}".rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def svg_plot(signals: Sequence[tuple[str, BinarySignal]], a, b, columns: int = 64) -> str:
    a, b = _range(a, b, columns)
    rows = list(_rows(signals))
    cell, row_h, margin = 10, 30, 80
    width = margin + columns * cell + 10
    height = row_h * len(rows) + 30
    scale = Fraction(columns * cell) / (b - a)

    def px(t):
        return margin + (t - a) * scale

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">']
    for n, (label, x, shift) in enumerate(rows):
        top = 10 + n * row_h
        hi_y, lo_y = top + 4, top + row_h - 8
        ys = lambda v: hi_y if v else lo_y
        pts = [(Fraction(margin), ys((x.bits_at(a) >> shift) & 1))]
        cur = pts[0][1]
        for t in x.times:
            if a < t < b:
                y = ys((x.bits_at(t) >> shift) & 1)
                if y != cur:
                    pts += [(px(t), cur), (px(t), y)]
                    cur = y
        pts.append((px(b), cur))
        poly = " ".join(f"{_num(p)},{y}" for p, y in pts)
        times = " ".join(format_time(t) for t in x.times if a < t < b)
        parts.append(f'<text x="4" y="{lo_y}">{label}</text>')
        parts.append(f'<polyline fill="none" stroke="black" points="{poly}"><title>{label}: {times}</title></polyline>')
    base = height - 8
    parts.append(f'<text x="{margin}" y="{base}">{format_time(a)}</text>')
    parts.append(f'<text x="{_num(px(b))}" y="{base}" text-anchor="end">{format_time(b)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def plot(signals, a, b, columns: int = 64, fmt: str = "ascii") -> str:
    if fmt == "ascii":
        return ascii_plot(signals, a, b, columns)
    if fmt == "svg":
        return svg_plot(signals, a, b, columns)
    raise ValueError(f"unknown plot format {fmt!r}")
