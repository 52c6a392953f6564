"""Compare the compiled kernels against the numpy fallback.

Usage::

    python3 benchmarks/bench_backends.py [--repeat 5] [--grid 32]

Kernel timings run both implementations in this process. The end-to-end
composite timing runs in child processes, once with CERTCUB_PURE_PYTHON=1,
because the backend is chosen at import time.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from certcub import _fallback
from certcub.expr import CompiledExpr, parse

try:
    from certcub import _speedups
except ImportError:  # extension not built
    _speedups = None

EXPRS = ["x^2*y^2", "sin(pi*x)*exp(y)", "log(3+x+y)/sqrt(1+x^2+y^2)"]

E2E = """
import time
from certcub import Rectangle, _backend
from certcub.expr import to_bivariate
from certcub.composite import integrate_composite
f = to_bivariate({expr!r}, supnorm=10.0)
t0 = time.perf_counter()
r = integrate_composite(f, Rectangle(0, 1, 0, 1), {grid}, {grid})
print(_backend.BACKEND, time.perf_counter() - t0, repr(r.value))
"""


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_eval(repeat, npts):
    rng = np.random.default_rng(0)
    xs = rng.uniform(0, 1, npts)
    ys = rng.uniform(0, 1, npts)
    rows = []
    for text in EXPRS:
        c = CompiledExpr(parse(text))
        consts = c.consts if c.consts.size else np.zeros(1)
        row = [f"eval {text} ({npts} pts)"]
        for impl in (_speedups, _fallback):
            if impl is None:
                row.append(None)
                continue
            row.append(best(lambda: impl.eval_program(c.code, consts, c.depth, xs, ys), repeat))
        rows.append(row)
    return rows


def bench_reductions(repeat):
    rng = np.random.default_rng(1)
    x = rng.standard_normal(4096)
    rows = []
    for name, call in [
        ("pairwise_sum (4096)", lambda m: m.pairwise_sum(x)),
    ]:
        rows.append([name] + [None if m is None else best(lambda: call(m), repeat) for m in (_speedups, _fallback)])
    return rows


def bench_composite(grid, expr):
    times = {}
    for flag in ("0", "1"):
        env = dict(os.environ, CERTCUB_PURE_PYTHON=flag)
        out = subprocess.run(
            [sys.executable, "-c", E2E.format(expr=expr, grid=grid)],
            env=env, capture_output=True, text=True, check=True,
        ).stdout.split()
        times[out[0]] = float(out[1])
    return [f"composite {expr} ({grid}x{grid})", times.get("cython"), times.get("python")]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--grid", type=int, default=32)
    args = ap.parse_args()

    # small batches are what a single composite cell evaluates
    rows = bench_eval(args.repeat, 300) + bench_eval(args.repeat, args.points) + bench_reductions(args.repeat)
    rows += [bench_composite(args.grid, e) for e in EXPRS[1:]]

    def ms(t):
        return "n/a" if t is None else f"{1e3 * t:10.3f}"

    width = max(len(r[0]) for r in rows)
    print(f"{'benchmark':<{width}}  {'cython ms':>10}  {'python ms':>10}  speedup")
    for name, fast, slow in rows:
        ratio = "n/a" if not (fast and slow) else f"{slow / fast:6.1f}x"
        print(f"{name:<{width}}  {ms(fast)}  {ms(slow)}  {ratio}")


if __name__ == "__main__":
    main()
