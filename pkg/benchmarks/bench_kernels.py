"""Compare the numba and numpy paths of the dense integer kernels.

Kernel timings call both implementations in one process on the same random
matrices (after a warm-up call that triggers JIT compilation).  The end-to-end
timing runs a homology computation in fresh interpreters with STP_BACKEND set
to each backend, after a small warm-up computation.

    python3 benchmarks/bench_kernels.py [--sizes 50 100 200] [--repeat 3]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from stp import kernels

E2E = ("from stp.homalg import homology_mod_p, reduced_chains; "
       "from stp.complexes import barycentric_subdivision; from stp.library import get_space; "
       "import time; homology_mod_p(reduced_chains(get_space('circle3')), 2); "
       "K = barycentric_subdivision(barycentric_subdivision(get_space('torus9'))); "
       "C = reduced_chains(K); t = time.perf_counter(); "
       "homology_mod_p(C, 2); homology_mod_p(C, 3); print(time.perf_counter() - t)")


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_kernels(sizes, repeat: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    # warm up the jit
    w = rng.integers(-3, 4, size=(4, 4)).astype(np.int64)
    kernels._rank_mod_p_numba(w, np.int64(3))
    kernels._snf_diag_numba(w, np.int64(kernels._LIMIT))
    rows = []
    for n in sizes:
        a = rng.integers(-3, 4, size=(n, n)).astype(np.int64)
        # sparse-ish 0/+-1 matrices like boundary maps, for the SNF kernel
        b = (rng.integers(-1, 2, size=(n, n)) * (rng.random((n, n)) < 3 / n)).astype(np.int64)
        r1 = int(kernels._rank_mod_p_numba(a, np.int64(3)))
        r2 = kernels._rank_mod_p_numpy(a, 3)
        assert r1 == r2, "backends disagree on rank"
        ok1, d1 = kernels._snf_diag_numba(b, np.int64(kernels._LIMIT))
        ok2, d2 = kernels._snf_diag_numpy(b, kernels._LIMIT)
        assert ok1 == ok2 and (not ok1 or sorted(d1[d1 != 0]) == sorted(d2[d2 != 0])), \
            "backends disagree on SNF"
        rows.append(("rank mod 3", n,
                     best_of(lambda: kernels._rank_mod_p_numba(a, np.int64(3)), repeat),
                     best_of(lambda: kernels._rank_mod_p_numpy(a, 3), repeat)))
        rows.append(("snf diagonal", n,
                     best_of(lambda: kernels._snf_diag_numba(b, np.int64(kernels._LIMIT)), repeat),
                     best_of(lambda: kernels._snf_diag_numpy(b, kernels._LIMIT), repeat)))
    return rows


def bench_end_to_end() -> dict:
    out = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, STP_BACKEND=backend)
        res = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
        out[backend] = float(res.stdout.strip())
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-e2e", action="store_true", help="kernel timings only")
    args = ap.parse_args(argv)

    print(f"{'kernel':<14} {'n':>5} {'numba (s)':>11} {'numpy (s)':>11} {'speedup':>8}")
    for name, n, tn, tp in bench_kernels(args.sizes, args.repeat):
        print(f"{name:<14} {n:>5} {tn:>11.5f} {tp:>11.5f} {tp / tn:>7.1f}x")
    if not args.skip_e2e:
        e2e = bench_end_to_end()
        print("\nmod-p homology of the twice-subdivided torus (fresh process per backend):")
        for backend, t in e2e.items():
            print(f"  STP_BACKEND={backend:<6} {t:.3f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
