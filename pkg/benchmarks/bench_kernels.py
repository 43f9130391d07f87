"""Compare the compiled kernels with the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py [--repeat R]``.
"""

import argparse
import timeit

import numpy as np

from fbmac import _kernels_py

try:
    from fbmac import _ckernels
except ImportError:
    _ckernels = None


def _loop_inputs(n, eta, seed=0):
    rng = np.random.default_rng(seed)
    c = np.ascontiguousarray
    return (
        c(rng.standard_normal((n, 2))),
        c(rng.standard_normal((n, eta))),
        c(rng.standard_normal((n, eta))),
        c(rng.standard_normal((n, eta))),
        c(rng.standard_normal(eta)),
        c(rng.standard_normal(eta)),
        c(np.tril(0.3 * rng.standard_normal((eta, eta)), -1)),
        c(np.tril(0.3 * rng.standard_normal((eta, eta)), -1)),
    )


def _dual_inputs(n, m, nv, seed=1):
    rng = np.random.default_rng(seed)
    return np.ascontiguousarray(rng.random((n, m))), np.ascontiguousarray(rng.random((nv, m)))


CASES = {
    "feedback_loop n=1e5 eta=4": ("feedback_loop", lambda: _loop_inputs(100_000, 4)),
    "feedback_loop n=1e5 eta=16": ("feedback_loop", lambda: _loop_inputs(100_000, 16)),
    "min_dual_bound n=2e5 m=13 v=40": ("min_dual_bound", lambda: _dual_inputs(200_000, 13, 40)),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'case':34s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, (fn, make) in CASES.items():
        inputs = make()
        t_py = min(timeit.repeat(lambda: getattr(_kernels_py, fn)(*inputs), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:34s} {1e3 * t_py:11.2f} {'n/a':>12s} {'n/a':>8s}")
            continue
        ref = getattr(_kernels_py, fn)(*inputs)
        got = getattr(_ckernels, fn)(*inputs)
        ref = ref if isinstance(ref, tuple) else (ref,)
        got = got if isinstance(got, tuple) else (got,)
        same = all(np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(a))) for a, b in zip(ref, got))
        t_c = min(timeit.repeat(lambda: getattr(_ckernels, fn)(*inputs), number=1, repeat=args.repeat))
        flag = "" if same else "  MISMATCH"
        print(f"{name:34s} {1e3 * t_py:11.2f} {1e3 * t_c:12.2f} {t_py / t_c:7.1f}x{flag}")


if __name__ == "__main__":
    main()
