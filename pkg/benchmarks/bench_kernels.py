"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat N]

Each case runs under both backends, checks that the results are identical and
prints the best wall time of ``--repeat`` runs.
"""

import argparse
import random
import time
from fractions import Fraction

from asysig import (BoundedDelayWindow, InertialDelay, TimeGrid, brute_force_states, check_all, chi,
                    constant, enumerate_states, grid_signals, stack)
from asysig import kernels
from asysig.checkers import ALL


def random_signal(rng, switches):
    times = sorted({Fraction(rng.randint(-400, 400), rng.choice([1, 2, 3, 4, 8])) for _ in range(switches)})
    x = constant(rng.randrange(2))
    for t in times:
        x = x ^ chi(t)
    return x


def cases(rng):
    xs = [random_signal(rng, 200) for _ in range(50)]
    probes = sorted({Fraction(rng.randint(-800, 800), 8) for _ in range(2000)})
    lo = [t - 1 for t in probes]

    yield "values_many 50 x 2000", lambda: kernels.values_many(xs, probes)
    yield "folds 2000 windows", lambda: [kernels.folds(x, lo, probes, False) for x in xs[:10]]

    grid = TimeGrid([Fraction(k, 2) for k in range(-2, 10)])
    bdw = BoundedDelayWindow(1, 2)
    u = chi(0, 1) ^ chi(2)
    yield "brute force bdw(1,2), 12-point grid", lambda: brute_force_states(bdw, u, grid)

    inert = InertialDelay(1, 2)
    g6 = TimeGrid([-1, 0, Fraction(1, 2), 1, Fraction(3, 2), 2])
    u2 = stack(chi(0), chi(Fraction(1, 2), 1))
    yield "brute force inertial width 2", lambda: brute_force_states(inert, u2, g6)

    corpus = grid_signals(TimeGrid([0, 1, 2, 3]))
    yield "check_all bdw(1,2) on 32 inputs", lambda: check_all(bdw, ALL, corpus)
    yield "enumerate bdw(1,2) over corpus", lambda: [enumerate_states(bdw, v, grid) for v in corpus]


def best(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    if not kernels.compiled_available():
        print("compiled kernels are not built; only the python backend is timed")
    names = ["python", "cython"] if kernels.compiled_available() else ["python"]
    print(f"{'case':40s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in cases(random.Random(args.seed)):
        row, results = [], []
        for name in names:
            with kernels.use_backend(name):
                t, out = best(fn, args.repeat)
            row.append(t)
            results.append(out)
        if len(results) == 2 and results[0] != results[1]:
            raise SystemExit(f"backends disagree on {label}")
        line = f"{label:40s}" + "".join(f"{t * 1000:10.1f}ms" for t in row)
        if len(row) == 2:
            line += f"{row[0] / row[1]:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
