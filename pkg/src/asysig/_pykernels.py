"""Pure-Python kernels over integer time.

Every caller first rescales its rational times by a common denominator
(see :class:`asysig.kernels.Timebase`), so these loops only compare ints.
The compiled module ``_ckernels`` has the same functions and signatures.
"""

from bisect import bisect_left, bisect_right


def eval_many(times, words, init, probes, left):
    """Value (or left limit when ``left``) of one signal at each probe."""
    times = list(times)
    out = []
    find = bisect_left if left else bisect_right
    for p in probes:
        i = find(times, p)
        out.append(words[i - 1] if i else init)
    return out


def fold_many(times, words, init, lo, hi, hi_closed, mask):
    """Per-window (AND, OR) of one signal over ``[lo[i], hi[i])`` or ``[lo[i], hi[i]]``.

    Empty windows yield the identities ``(mask, 0)``.
    """
    times = list(times)
    meets, joins = [], []
    for a, b in zip(lo, hi):
        if b < a or (b == a and not hi_closed):
            meets.append(mask)
            joins.append(0)
            continue
        i = bisect_right(times, a)
        meet = join = words[i - 1] if i else init
        j = bisect_right(times, b) if hi_closed else bisect_left(times, b)
        for k in range(i, j):
            meet &= words[k]
            join |= words[k]
        meets.append(meet)
        joins.append(join)
    return meets, joins


def filter_candidates(piece, lowers, uppers, candidates):
    """Keep grid candidates whose piece values respect ``lower <= x <= upper`` at every probe.

    ``piece[p]`` is the grid piece holding probe ``p``; each candidate row
    lists one word per piece.
    """
    keep = []
    checks = list(zip(piece, lowers, uppers))
    for row in candidates:
        ok = True
        for k, lo, up in checks:
            x = row[k]
            if lo & ~x or x & ~up:
                ok = False
                break
        keep.append(ok)
    return keep


def disagreement_gaps(times, words, init, probes):
    """For an XOR signal ``u ^ v``: how far back from each probe the last disagreement ends.

    Returns ``-1`` when the two inputs agree on all of ``(-inf, p)``, ``0``
    when they disagree right up to ``p``, otherwise ``p - q`` where ``q`` is
    the right end of the last disagreement piece before ``p``.
    """
    times = list(times)
    out = []
    for p in probes:
        i = bisect_left(times, p)   # pieces starting before p: initial + times[:i]
        cur = words[i - 1] if i else init
        if cur:
            out.append(0)
            continue
        gap = -1
        for k in range(i - 1, -1, -1):
            prev = words[k - 1] if k else init
            if prev:
                gap = p - times[k]
                break
        out.append(gap)
    return out
