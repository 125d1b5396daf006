"""Timing comparison of the compiled and pure dilog kernels.

Run from a checkout with the package installed:

    python3 benchmarks/bench_dilog.py [--points N] [--repeats R]

Evaluates li2 and bloch_wigner_d on the same seeded random sample of
complex points with both backends and prints per-call timings and the
speedup. The pure module is always importable; the compiled one is
skipped with a note if the extension was not built.
"""

import argparse
import random
import time

from knotpot import _dilog_pure


def sample_points(n: int, seed: int):
    rng = random.Random(seed)
    pts = []
    while len(pts) < n:
        z = complex(rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0))
        # the kernels treat exact 0 and 1 as domain errors
        if abs(z) > 1e-6 and abs(z - 1) > 1e-6:
            pts.append(z)
    return pts


def time_fn(fn, pts, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for z in pts:
            fn(z)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=20260814)
    args = ap.parse_args()

    try:
        from knotpot import _dilog_core
    except ImportError:
        _dilog_core = None

    pts = sample_points(args.points, args.seed)
    backends = [("pure", _dilog_pure)]
    if _dilog_core is not None:
        backends.append(("compiled", _dilog_core))
    else:
        print("compiled extension not built; timing pure backend only")

    results = {}
    for name, mod in backends:
        for fn_name in ("li2", "bloch_wigner_d"):
            dt = time_fn(getattr(mod, fn_name), pts, args.repeats)
            results[name, fn_name] = dt
            print(
                "%-8s %-15s %8.1f ns/call  (%.3f s / %d points)"
                % (name, fn_name, 1e9 * dt / len(pts), dt, len(pts))
            )

    if _dilog_core is not None:
        worst = 0.0
        for z in pts:
            worst = max(worst, abs(_dilog_pure.li2(z) - _dilog_core.li2(z)))
        print("max |li2 pure - compiled| over the sample: %.3e" % worst)
        for fn_name in ("li2", "bloch_wigner_d"):
            speed = results["pure", fn_name] / results["compiled", fn_name]
            print("%s speedup: %.1fx" % (fn_name, speed))


if __name__ == "__main__":
    main()
