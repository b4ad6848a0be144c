"""Compare the compiled and pure-Python evaluation kernels.

    python benchmarks/bench_eval.py [--points N] [--repeat R]
"""
import argparse
import time

import numpy as np

from cdk import _kernels
from cdk.diffop import D
from cdk.generate import RandomMapConfig, gen_map
from cdk.maps import eval_batch
from cdk.shapes import flat


def workloads():
    cfg = RandomMapConfig(seed=1, max_depth=4, allow_transcendental=True)
    f = gen_map(cfg, flat(3), flat(3), index=0)
    yield "random 3->3", f
    yield "its derivative", D(f)
    yield "second derivative", D(D(gen_map(cfg.replace(allow_transcendental=False), flat(2), flat(1))))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = _kernels.backends()
    rng = np.random.default_rng(0)
    print(f"default backend: {_kernels.BACKEND}; points per batch: {args.points}")
    print(f"{'workload':<20}{'ops':>6}" + "".join(f"{n:>12}" for n in backends) + f"{'speedup':>10}")
    for name, f in workloads():
        pts = rng.uniform(-1.5, 1.5, (args.points, f.dom.dim))
        t = {n: best_of(lambda run=run: eval_batch(f, pts, backend=run), args.repeat)
             for n, run in backends.items()}
        ref = eval_batch(f, pts, backend=backends["python"])
        for run in backends.values():
            assert np.allclose(eval_batch(f, pts, backend=run), ref, rtol=1e-12, atol=1e-12)
        speed = f"{t['python'] / t['cython']:.1f}x" if "cython" in t else "-"
        print(f"{name:<20}{len(f.program.ops):>6}" + "".join(f"{v * 1e3:>10.1f}ms" for v in t.values())
              + f"{speed:>10}")


if __name__ == "__main__":
    main()
