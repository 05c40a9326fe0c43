"""Time the numba and numpy packet kernels on identical uniform blocks.

    python benchmarks/bench_kernels.py [--packets N] [--repeat K]
"""

import argparse
import time

import numpy as np

from harqjam import _kernels
from harqjam.params import SystemParams, chunk_rng, g_bar, gamma_bar
from harqjam.policy import solve_p2
from harqjam.sim import CHUNK


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--packets", type=int, default=16 * CHUNK)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    p = SystemParams()
    pol = solve_p2(p, 10.0).policy
    lam = np.array([p.lambda0, p.lambda1, p.lambda2, p.lambda0, p.lambda1])
    kargs = (lam, p.p0, p.sigma2, gamma_bar(p), g_bar(p), pol.threshold, pol.jam_power, True)
    u = chunk_rng(0, 0).random((args.packets, 5))

    t_np, r_np = best_of(lambda: _kernels.count_chunk_numpy(u, *kargs), args.repeat)
    print(f"numpy : {t_np * 1e3:8.2f} ms  {args.packets / t_np / 1e6:7.1f} Mpkt/s  {r_np}")
    if not hasattr(_kernels, "_count_chunk_jit"):
        print("numba : unavailable (not installed or HARQJAM_DISABLE_NUMBA set)")
        return
    _kernels._count_chunk_jit(u[:10], *kargs)  # compile
    t_nb, r_nb = best_of(lambda: _kernels._count_chunk_jit(u, *kargs), args.repeat)
    r_nb = tuple(int(x) for x in r_nb)
    print(f"numba : {t_nb * 1e3:8.2f} ms  {args.packets / t_nb / 1e6:7.1f} Mpkt/s  {r_nb}")
    print(f"speedup {t_np / t_nb:.1f}x, counts {'identical' if r_np == r_nb else 'DIFFER'}")


if __name__ == "__main__":
    main()
