"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--points 200000] [--repeat 5]

Both backends are imported side by side from ``toruslab._kernels``; the
``TORUSLAB_DISABLE_NUMBA`` flag only changes which one the library uses.
"""

import argparse
import math
import time

import numpy as np

from toruslab import _kernels
from toruslab.verify import random_curve, unit_disk


def best_time(func, args, repeat):
    func(*args)  # warm-up (and JIT compile for numba)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    rows = np.asarray(random_curve(rng, max_n=4, max_deg=5).homogeneous)
    z = np.ascontiguousarray(20.0 * unit_disk(rng, args.points))
    x = (np.arange(args.points) + 0.5) * (2 * math.pi / args.points)
    pert = 0.005 * np.sin(3 * x)
    cases = {
        "eval_rows": (rows, z),
        "density": (rows, z),
        "log_partition": (rows, z),
        "pairwise_sum": (rng.standard_normal(args.points),),
        "cos_level_count": (4.0, pert, 0.05, 0.0, 2 * math.pi),
    }

    print(f"curve n={rows.shape[0] - 1}, deg={rows.shape[1] - 1}, {args.points} points, "
          f"best of {args.repeat}")
    print(f"{'kernel':<16}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, call_args in cases.items():
        t_nb = best_time(_kernels.NUMBA_KERNELS[name], call_args, args.repeat)
        t_np = best_time(_kernels.NUMPY_KERNELS[name], call_args, args.repeat)
        print(f"{name:<16}{1e3 * t_nb:>12.3f}{1e3 * t_np:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
