"""Compare the compiled kernels against the pure-numpy fallback.

Run: python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from solarcap._kernels import HAVE_COMPILED, _py

if HAVE_COMPILED:
    from solarcap._kernels import _cy
else:
    _cy = None


def _time(fn, *args, repeat=5):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def random_halfspaces(m, dim, seed):
    """Bounded random polytope: box plus m random tangent planes."""
    rng = np.random.default_rng(seed)
    normals = rng.normal(size=(m, dim))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    offsets = rng.uniform(0.5, 1.5, size=m)
    eye = np.eye(dim)
    a = np.vstack([normals, eye, -eye])
    b = np.concatenate([offsets, np.full(2 * dim, 2.0)])
    return a, b


def bench_enumeration():
    print("vertex enumeration (3-D, box + m random facets)")
    print(f"{'m':>6} {'pure (s)':>12} {'compiled (s)':>12} {'speedup':>8} {'verts':>6}")
    for m in (25, 50, 100, 200):
        a, b = random_halfspaces(m, 3, seed=m)
        slack = 1e-7 * (1.0 + np.abs(b))
        t_py, pts_py = _time(_py.enumerate_candidates, a, b, slack)
        if _cy is None:
            print(f"{m:>6} {t_py:>12.4f} {'n/a':>12}")
            continue
        t_cy, pts_cy = _time(_cy.enumerate_candidates, a, b, slack)
        assert pts_py.shape == pts_cy.shape, "kernel outputs disagree"
        print(f"{m:>6} {t_py:>12.4f} {t_cy:>12.4f} {t_py / t_cy:>8.1f} "
              f"{pts_py.shape[0]:>6}")


def bench_pivot():
    print("\nsimplex pivoting (full Gauss-Jordan sweep over a random tableau)")
    print(f"{'rows x cols':>12} {'pure (s)':>12} {'compiled (s)':>12} {'speedup':>8}")
    rng = np.random.default_rng(7)
    for m, n in ((50, 120), (150, 400), (300, 800)):
        base = rng.normal(size=(m, n)) + np.eye(m, n) * 5.0

        def sweep(impl, tab=base):
            t = tab.copy()
            for i in range(m):
                impl.pivot_inplace(t, i, i)
            return t

        t_py, out_py = _time(sweep, _py)
        if _cy is None:
            print(f"{m:>5} x {n:<5} {t_py:>12.4f} {'n/a':>12}")
            continue
        t_cy, out_cy = _time(sweep, _cy)
        assert np.allclose(out_py, out_cy, atol=1e-8), "kernel outputs disagree"
        print(f"{m:>5} x {n:<5} {t_py:>12.4f} {t_cy:>12.4f} {t_py / t_cy:>8.1f}")


def bench_ratio_test():
    print("\nsimplex ratio test (10k repetitions per size)")
    print(f"{'rows':>6} {'pure (s)':>12} {'compiled (s)':>12} {'speedup':>8}")
    rng = np.random.default_rng(9)
    reps = 10_000
    for m in (20, 100, 500):
        col = rng.normal(size=m)
        rhs = rng.uniform(0.0, 3.0, size=m)
        ub = rng.uniform(0.5, 5.0, size=m)
        ub[rng.uniform(size=m) < 0.5] = np.inf
        basis = rng.permutation(m)

        def many(impl):
            out = None
            for _ in range(reps):
                out = impl.ratio_test(col, rhs, ub, basis, 1e-9, 1e-12)
            return out

        t_py, out_py = _time(many, _py, repeat=3)
        if _cy is None:
            print(f"{m:>6} {t_py:>12.4f} {'n/a':>12}")
            continue
        t_cy, out_cy = _time(many, _cy, repeat=3)
        assert out_py == out_cy, "kernel outputs disagree"
        print(f"{m:>6} {t_py:>12.4f} {t_cy:>12.4f} {t_py / t_cy:>8.1f}")


if __name__ == "__main__":
    print(f"compiled extension available: {HAVE_COMPILED}\n")
    bench_enumeration()
    bench_pivot()
    bench_ratio_test()
