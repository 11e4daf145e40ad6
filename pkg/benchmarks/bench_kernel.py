"""Compare the compiled kernel with the pure-Python fallback.

Two measurements:

* micro: ``mul_terms`` and ``deriv_terms`` on random graded term maps,
  calling both kernel modules directly in this process;
* end to end: a master-equation expansion plus a cohomology solve, each
  backend in its own subprocess (``LAPSM_PURE_PYTHON`` selects the
  fallback at import time).

Usage: python3 benchmarks/bench_kernel.py [--repeat N]
"""

import argparse
import os
import random
import subprocess
import sys
import timeit
from fractions import Fraction

from lapsm import _pykernel

try:
    from lapsm import _ckernel
except ImportError:
    _ckernel = None

WORKLOAD = """
import time
from lapsm import BACKEND
from lapsm.scenarios import preset
from lapsm.bv import graded_target, build_theta, master_residual
from lapsm.cohomology import solve_cohomology
t0 = time.perf_counter()
for name in ("glx_so3", "so3"):
    S = preset(name).sigma
    G = graded_target(S)
    assert master_residual(build_theta(S, G), G).is_zero()
    solve_cohomology(S, 2, 2)
print(BACKEND, time.perf_counter() - t0)
"""


def random_terms(rng, n, odd, size):
    out = {}
    for _ in range(size):
        key = tuple(rng.randint(0, 1) if i in odd else rng.randint(0, 3) for i in range(n))
        out[key] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 3))
    return out


def micro(repeat):
    rng = random.Random(0)
    n = 16
    odd = tuple(range(8, 16))
    a, b = random_terms(rng, n, odd, 60), random_terms(rng, n, odd, 60)
    rows = []
    for label, mod in (("python", _pykernel), ("cython", _ckernel)):
        if mod is None:
            continue
        tm = min(timeit.repeat(lambda: mod.mul_terms(a, b, odd), number=5, repeat=repeat)) / 5
        td = min(timeit.repeat(lambda: [mod.deriv_terms(a, p, p in odd, False, odd) for p in range(n)],
                               number=20, repeat=repeat)) / 20
        rows.append((label, tm, td))
    return rows


def end_to_end():
    rows = []
    for flag in ("0", "1"):
        env = dict(os.environ, LAPSM_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env,
                             capture_output=True, text=True, check=True)
        backend, seconds = out.stdout.split()
        rows.append((backend, float(seconds)))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'backend':8} {'mul_terms [ms]':>15} {'deriv x16 [ms]':>15}")
    rows = micro(args.repeat)
    for label, tm, td in rows:
        print(f"{label:8} {tm * 1e3:15.3f} {td * 1e3:15.3f}")
    if len(rows) == 2:
        print(f"speedup  {rows[0][1] / rows[1][1]:15.2f} {rows[0][2] / rows[1][2]:15.2f}")
    print()
    print(f"{'backend':8} {'end to end [s]':>15}")
    e2e = end_to_end()
    for label, sec in e2e:
        print(f"{label:8} {sec:15.3f}")
    times = dict(e2e)
    if "cython" in times and "python" in times:
        print(f"speedup  {times['python'] / times['cython']:15.2f}")


if __name__ == "__main__":
    main()
