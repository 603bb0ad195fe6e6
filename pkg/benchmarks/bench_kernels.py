"""Compare the compiled and pure-numpy element-sum kernels.

    python benchmarks/bench_kernels.py --L 5 --points 200 --repeat 3
"""

import argparse
import time

import numpy as np

from wpc import kernels
from wpc.fuchsian import build_octagon_group, enumerate_group


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--L", type=int, default=5, help="word length of the enumeration")
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    E = enumerate_group(build_octagon_group(), args.L)
    rng = np.random.default_rng(args.seed)
    z = 0.8 * np.sqrt(rng.random(args.points)) * np.exp(2j * np.pi * rng.random(args.points))
    shell = E.shell_mask.astype(np.uint8)
    work = len(E) * args.points
    print(f"elements={len(E)} points={args.points} element-point pairs={work}")

    backends = ["numpy"] + (["cython"] if kernels.BACKEND == "cython" else [])
    results = {}
    for name in backends:
        t_s, s = _best(lambda: kernels.series_sums(E.a, E.b, shell, z, backend=name), args.repeat)
        t_m, m = _best(lambda: kernels.image_min(E.a, E.b, z, backend=name), args.repeat)
        results[name] = (t_s, t_m, s, m)
        print(f"{name:>7}  series_sums {t_s * 1e3:9.2f} ms ({t_s / work * 1e9:6.2f} ns/pair)"
              f"   image_min {t_m * 1e3:9.2f} ms ({t_m / work * 1e9:6.2f} ns/pair)")

    if "cython" in results:
        (ns, nm, s0, m0), (cs, cm, s1, m1) = results["numpy"], results["cython"]
        err = float(np.max(np.abs(s0[0] - s1[0]) / np.maximum(s0[1], 1e-300)))
        print(f"speedup  series_sums x{ns / cs:.1f}   image_min x{nm / cm:.1f}")
        print(f"agreement  theta rel. to majorant {err:.2e}   argmin equal {bool(np.all(m0[1] == m1[1]))}")
    else:
        print("compiled extension not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
