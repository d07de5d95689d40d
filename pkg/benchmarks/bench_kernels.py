"""Numba vs numpy timings for the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel runs once on both backends to check the results agree, then
is timed.  The numba column excludes compilation (a warm-up call runs first).
"""

import argparse
import math
import time

import numpy as np

from legalsys import kernels
from legalsys.colouring import dsatur
from legalsys.graph import set_to_array
from legalsys.legal import MoveSet, _basis_csr
from legalsys.random_models import gnp
from legalsys.rng import RandomStream


def best_of(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    rng = RandomStream(11)
    n2 = 400
    g2 = gnp(n2, 0.3, 5)
    ip2, ix2 = g2.csr
    # random halves of a dense graph are connected, so every row is checked
    states = (rng.random((2000, n2)) < 0.5).astype(np.uint8)
    yield "check_states n=400 x2000", lambda k: k.check_states(ip2, ix2, states, True)

    classes = [0] * 16
    for v in range(n2):
        classes[v % 16] |= 1 << v
    ms = MoveSet.of(classes[v % 16] for v in range(n2))
    bptr, bidx = _basis_csr(ms.basis)
    s0 = set_to_array(sum(1 << v for v in range(0, n2, 2)), n2)
    yield "orbit_scan n=400 rank=16", lambda k: k.orbit_scan(ip2, ix2, s0, bptr, bidx, 0, 1 << ms.rank, False)

    col = dsatur(g2, RandomStream(2))
    kk = int(col.max()) - 3
    start = np.minimum(col, kk - 1)
    noise = kernels.noise_array(RandomStream(4), 20_000)
    yield f"tabucol n=400 k={kk} 20k iters", lambda k: k.tabucol(ip2, ix2, start.copy(), kk, 20_000, noise)[1:]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        print("numba not importable; only the numpy path is available")
        return
    print(f"{'kernel':34s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}  agree")
    for name, fn in cases():
        fn(kernels.numba_impl)  # compile
        t_np, r_np = best_of(lambda: fn(kernels.numpy_impl), args.repeat)
        t_nb, r_nb = best_of(lambda: fn(kernels.numba_impl), args.repeat)
        agree = r_np == r_nb
        print(f"{name:34s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}  {agree}")


if __name__ == "__main__":
    main()
