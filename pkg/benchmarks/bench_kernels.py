"""Time the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from occam import _kernels_py
from occam.basis import BasisFamily, build_design_matrix

try:
    from occam import _kernels as _compiled
except ImportError:
    _compiled = None


def cases():
    rng = np.random.default_rng(0)
    for fam, n in [(BasisFamily.polynomial(4), 1000), (BasisFamily.trigonometric(3), 1000), (BasisFamily.polynomial(8), 5000)]:
        xs = rng.uniform(-1, 1, n)
        phi = build_design_matrix(fam, xs)
        ts = rng.normal(size=n)
        yield f"prefix_log_evidences {fam.label} N={n}", lambda k, phi=phi, ts=ts: k.prefix_log_evidences(phi, ts, 0.1, 10.0)
    bits = rng.integers(0, 2, 100_000).astype(np.int8)
    yield "coin_log_odds_path N=100000", lambda k: k.coin_log_odds_path(bits, 0.0)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _compiled is None:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'case':<44}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, fn in cases():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if _compiled is None:
            print(f"{name:<44}{t_py:>14.2f}{'-':>14}{'-':>10}")
            continue
        np.testing.assert_allclose(fn(_compiled), fn(_kernels_py), rtol=1e-9, atol=1e-9)
        t_c = min(timeit.repeat(lambda: fn(_compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<44}{t_py:>14.2f}{t_c:>14.2f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
