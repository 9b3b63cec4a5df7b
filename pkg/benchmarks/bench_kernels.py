"""Compare the compiled and pure-Python polynomial kernels.

Two measurements:

* micro: each kernel on random packed-monomial dictionaries, both backends
  in the same process (outputs are checked to agree);
* workload: a fixed verification workload run in a subprocess per backend,
  selected through ``COHAQ_PURE_PYTHON``.

Usage::

    python3 benchmarks/bench_kernels.py [--terms 400] [--repeat 5] [--skip-workload]
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import textwrap
import timeit

import gmpy2

from cohaq import _kernels_py
from cohaq.kernels import FIELD_BITS

try:
    from cohaq import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None


def random_poly(rng: random.Random, terms: int, nvars: int = 8, maxexp: int = 4) -> dict:
    out = {}
    for _ in range(terms):
        mono = 0
        for v in range(nvars):
            mono |= rng.randint(0, maxexp) << (FIELD_BITS * v)
        out[mono] = gmpy2.mpq(rng.randint(-9, 9) or 1, rng.randint(1, 4))
    return out


def micro(terms: int, repeat: int) -> list[tuple[str, float, float | None]]:
    rng = random.Random(12345)
    a, b = random_poly(rng, terms), random_poly(rng, terms)
    small = random_poly(rng, max(terms // 10, 1))
    moves = [(0, FIELD_BITS * 9), (FIELD_BITS, FIELD_BITS * 10)]
    mask = (1 << FIELD_BITS) - 1

    def cases(k):
        return {
            "mul": lambda: k.mul(a, small),
            "addmul": lambda: k.addmul(dict(a), b, small),
            "add_scaled": lambda: k.add_scaled(dict(a), b, gmpy2.mpq(-3, 2)),
            "shift": lambda: k.shift(a, 1 << FIELD_BITS, gmpy2.mpq(2)),
            "max_degree": lambda: k.max_degree(a),
            "split_by_mask": lambda: k.split_by_mask(a, mask),
            "collect_field": lambda: k.collect_field(a, 0),
            "rename": lambda: k.rename(a, moves),
        }

    py = cases(_kernels_py)
    cy = cases(_kernels_c) if _kernels_c is not None else {}
    rows = []
    for name, fn in py.items():
        if cy:
            assert _normal(fn()) == _normal(cy[name]()), f"backends disagree on {name}"
        t_py = min(timeit.repeat(fn, number=3, repeat=repeat)) / 3
        t_cy = min(timeit.repeat(cy[name], number=3, repeat=repeat)) / 3 if cy else None
        rows.append((name, t_py, t_cy))
    return rows


def _normal(x):
    if isinstance(x, dict):
        return sorted((k, _normal(v)) for k, v in x.items())
    return x


WORKLOAD = textwrap.dedent(
    """
    import time
    from cohaq.kernels import BACKEND
    from cohaq.quiver import loop_quiver, triple, a_n
    from cohaq.verify import run_suite
    t = time.perf_counter()
    for name, q in [("bialgebra", loop_quiver(2)), ("hexagon", a_n(3)), ("phi", triple(a_n(2)))]:
        assert run_suite(name, q, 3).status == "pass"
    print(BACKEND, time.perf_counter() - t)
    """
)


def workload() -> dict[str, float]:
    out = {}
    for pure in ("0", "1"):
        env = dict(os.environ, COHAQ_PURE_PYTHON=pure)
        res = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
        backend, seconds = res.stdout.split()
        out[backend] = float(seconds)
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--terms", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-workload", action="store_true")
    args = ap.parse_args()

    if _kernels_c is None:
        print("compiled extension not available; timing the pure-Python backend only")
    print(f"{'kernel':15} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8}")
    for name, t_py, t_cy in micro(args.terms, args.repeat):
        if t_cy is None:
            print(f"{name:15} {t_py * 1e3:12.3f} {'-':>12} {'-':>8}")
        else:
            print(f"{name:15} {t_py * 1e3:12.3f} {t_cy * 1e3:12.3f} {t_py / t_cy:8.2f}x")
    if not args.skip_workload:
        times = workload()
        print()
        print("verification workload (bialgebra on 2-loop, hexagon on A3, phi on tripled A2):")
        for backend, t in sorted(times.items()):
            print(f"  {backend:7} {t:8.2f} s")
        if "cython" in times and "python" in times:
            print(f"  speedup {times['python'] / times['cython']:.2f}x")


if __name__ == "__main__":
    main()
