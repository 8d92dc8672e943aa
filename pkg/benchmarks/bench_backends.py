"""Timing comparison of the compiled extension against the numpy fallback
for the two hot kernels: the circulant nonlocal sum and the banded quadratic
mode coupling.

Run:  python benchmarks/bench_backends.py
"""

import time

import numpy as np

from nlfkpp import _kernels_py
from nlfkpp.backends import HAVE_COMPILED

try:
    from nlfkpp import _kernels as _compiled
except ImportError:
    _compiled = None


def bench(fn, *args, repeat=200):
    fn(*args)  # warm up
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def main():
    rng = np.random.default_rng(7)
    print(f"compiled extension available: {HAVE_COMPILED}")
    for N in (64, 256, 1024):
        row = rng.random(N)
        rho = rng.random(N)
        t_py = bench(_kernels_py.circulant_apply, row, rho, 0.01)
        line = f"circulant_apply  N={N:5d}  python {t_py * 1e6:9.1f} us"
        if _compiled is not None:
            t_c = bench(_compiled.circulant_apply, row, rho, 0.01)
            line += f"  compiled {t_c * 1e6:9.1f} us  speedup {t_py / t_c:6.2f}x"
        print(line)
    for J in (10, 40, 160):
        beta = rng.random(2 * J + 1) + 1j * rng.random(2 * J + 1)
        lam = rng.random(2 * J + 1)
        t_py = bench(_kernels_py.quadratic_coupling, beta, lam)
        line = f"quadratic_coupling J={J:4d}  python {t_py * 1e6:9.1f} us"
        if _compiled is not None:
            t_c = bench(_compiled.quadratic_coupling, beta, lam)
            line += f"  compiled {t_c * 1e6:9.1f} us  speedup {t_py / t_c:6.2f}x"
        print(line)


if __name__ == "__main__":
    main()
