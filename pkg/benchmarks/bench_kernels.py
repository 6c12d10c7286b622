"""Time the numba and numpy backends on the two hot loops and check they agree.

    python benchmarks/bench_kernels.py [--n 4096] [--repeat 3]
"""

import argparse
import os
import time

import numpy as np

from companionlaw import besov, mollify, synth
from companionlaw.grid import make_grid


def _timed(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096, help="1D points; the 2D case uses n/16 per side")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    line = make_grid(1, [args.n], periodic=[True])
    side = max(args.n // 16, 32)
    square = make_grid(2, [side, side], periodic=[True, True])
    u1 = synth.holder_field(line, 0.4, seed=1)
    u2 = synth.holder_field(square, 0.4, n_components=2, seed=1)
    cases = {
        "mollify 1D eps=16h": lambda: mollify.mollify(u1, mollify.mollifier_kernel(line, 16 / args.n)).values,
        "mollify 2D eps=8h": lambda: mollify.mollify(u2, mollify.mollifier_kernel(square, 8 / side)).values,
        "vmo 1D eps=16h": lambda: besov.vmo_modulus(u1, None, 16 / args.n),
        "vmo 2D eps=8h": lambda: besov.vmo_modulus(u2, None, 8 / side),
    }
    previous = os.environ.get("COMPANIONLAW_BACKEND")
    print(f"{'case':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}{'max rel diff':>15}")
    try:
        for name, fn in cases.items():
            os.environ["COMPANIONLAW_BACKEND"] = "numba"
            fn()  # compile outside the timed region
            t_nb, r_nb = _timed(fn, args.repeat)
            os.environ["COMPANIONLAW_BACKEND"] = "numpy"
            t_np, r_np = _timed(fn, args.repeat)
            a, b = np.asarray(r_nb), np.asarray(r_np)
            diff = float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))
            print(f"{name:<22}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}{diff:>15.2e}")
    finally:
        if previous is None:
            os.environ.pop("COMPANIONLAW_BACKEND", None)
        else:
            os.environ["COMPANIONLAW_BACKEND"] = previous


if __name__ == "__main__":
    main()
