"""Batch evaluation kernels with a compiled fast path.

Rational times are mapped to integers by multiplying with the lcm of all
denominators involved in one call, which keeps every comparison exact.
The compiled extension handles the call when the scaled values fit in
int64 and the words fit in 63 bits; otherwise the pure-Python module runs.

Set ``ASYSIG_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import contextlib
import math
import os
from fractions import Fraction
from typing import Iterable, Sequence

from . import _pykernels

try:
    import numpy as np
    from . import _ckernels
except ImportError:  # extension not built
    np = None
    _ckernels = None

_LIMIT = 1 << 62

_backend = "python"
if _ckernels is not None and os.environ.get("ASYSIG_BACKEND", "auto").lower() != "python":
    _backend = "cython"


def backend() -> str:
    return _backend


def compiled_available() -> bool:
    return _ckernels is not None


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch backend (used by tests and the benchmark)."""
    global _backend
    if name not in ("python", "cython"):
        raise ValueError(name)
    if name == "cython" and _ckernels is None:
        raise RuntimeError("compiled kernels are not built")
    old, _backend = _backend, name
    try:
        yield
    finally:
        _backend = old


class Timebase:
    """Common integer scale for a set of rational times."""

    __slots__ = ("scale",)

    def __init__(self, times: Iterable[Fraction]):
        scale = 1
        for t in times:
            d = t.denominator
            if scale % d:
                scale = scale * d // math.gcd(scale, d)
        self.scale = scale

    def ints(self, times: Iterable[Fraction]) -> list[int]:
        s = self.scale
        return [t.numerator * (s // t.denominator) for t in times]

    def time(self, n: int) -> Fraction:
        return Fraction(n, self.scale)


def _fits(width: int, *int_lists) -> bool:
    if width > 63:
        return False
    return all(not v or max(abs(min(v)), abs(max(v))) < _LIMIT for v in int_lists)


def _i64(v):
    return np.asarray(v, dtype=np.int64)


def _u64(v):
    return np.asarray(v, dtype=np.uint64)


def values(x, probes: Sequence[Fraction], left: bool = False) -> list[int]:
    """``x(p)`` (or ``x(p-0)``) for every probe."""
    tb = Timebase(list(x.times) + list(probes))
    ts, ps = tb.ints(x.times), tb.ints(probes)
    if _backend == "cython" and _fits(x.width, ts, ps):
        out = _ckernels.eval_many(_i64(ts), _u64(x.words), x.initial, _i64(ps), left)
        return [int(w) for w in out]
    return _pykernels.eval_many(ts, x.words, x.initial, ps, left)


def values_many(xs: Sequence, probes: Sequence[Fraction], left: bool = False) -> list[list[int]]:
    """:func:`values` for several signals sharing one probe list (one timebase for all)."""
    if not xs:
        return []
    tb = Timebase(list(probes) + [t for x in xs for t in x.times])
    ps = tb.ints(probes)
    width = max(x.width for x in xs)
    tss = [tb.ints(x.times) for x in xs]
    if _backend == "cython" and _fits(width, ps, *tss):
        pa = _i64(ps)
        return [[int(w) for w in _ckernels.eval_many(_i64(ts), _u64(x.words), x.initial, pa, left)]
                for x, ts in zip(xs, tss)]
    return [_pykernels.eval_many(ts, x.words, x.initial, ps, left) for x, ts in zip(xs, tss)]


def folds(x, lo: Sequence[Fraction], hi: Sequence[Fraction], closed_end: bool) -> tuple[list[int], list[int]]:
    """(AND, OR) of ``x`` over each window ``[lo[i], hi[i])`` or ``[lo[i], hi[i]]``."""
    tb = Timebase(list(x.times) + list(lo) + list(hi))
    ts, ls, hs = tb.ints(x.times), tb.ints(lo), tb.ints(hi)
    mask = (1 << x.width) - 1
    if _backend == "cython" and _fits(x.width, ts, ls, hs):
        m, j = _ckernels.fold_many(_i64(ts), _u64(x.words), x.initial, _i64(ls), _i64(hs),
                                   closed_end, mask)
        return [int(v) for v in m], [int(v) for v in j]
    return _pykernels.fold_many(ts, x.words, x.initial, ls, hs, closed_end, mask)


def gaps(xor, probes: Sequence[Fraction]) -> list[Fraction | None]:
    """See :func:`asysig._pykernels.disagreement_gaps`; ``None`` stands for "never disagree"."""
    tb = Timebase(list(xor.times) + list(probes))
    ts, ps = tb.ints(xor.times), tb.ints(probes)
    if _backend == "cython" and _fits(xor.width, ts, ps):
        raw = [int(g) for g in _ckernels.disagreement_gaps(_i64(ts), _u64(xor.words), xor.initial, _i64(ps))]
    else:
        raw = _pykernels.disagreement_gaps(ts, xor.words, xor.initial, ps)
    return [None if g < 0 else tb.time(g) for g in raw]


def filter_candidates(piece: Sequence[int], lowers: Sequence[int], uppers: Sequence[int],
                      candidates: Sequence[Sequence[int]], width: int) -> list[bool]:
    if _backend == "cython" and width <= 63 and candidates:
        keep = _ckernels.filter_candidates(_i64(piece), _u64(lowers), _u64(uppers),
                                           np.asarray(candidates, dtype=np.uint64).reshape(len(candidates), -1))
        return [bool(k) for k in keep]
    return _pykernels.filter_candidates(piece, lowers, uppers, candidates)
