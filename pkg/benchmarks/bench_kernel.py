"""Compare the compiled and pure-Python NoC kernels on the same traffic.

Usage: python benchmarks/bench_kernel.py [--k 4] [--packets 20000] [--repeat 3]

Both backends are fed an identical stream of random request and reply
packets; the script checks that they eject the same flits at the same
cycles and reports wall time and simulated cycles per second.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from critnoc.noc.kernel import BACKENDS


def traffic(k: int, packets: int, seed: int, gap: float):
    rng = np.random.default_rng(seed)
    n = k * k
    src = rng.integers(0, n, packets)
    dst = rng.integers(0, n, packets)
    reply = rng.random(packets) < 0.5
    cfi = rng.integers(0, 4, packets)
    inject = np.cumsum(rng.exponential(gap, packets)).astype(np.int64)
    return [(i, int(src[i]), int(dst[i]), 5 if reply[i] else 1, bool(reply[i]),
             int(cfi[i]), int(inject[i])) for i in range(packets)]


def run_backend(name: str, k: int, pkts, cfi_priority: bool) -> tuple[float, int, list]:
    kern = BACKENDS[name](k, 3, 4, 2, 1, cfi_priority, True, 0, False)
    start = time.perf_counter()
    for p in pkts:
        kern.add_packet(*p)
    events = []
    limit = pkts[-1][-1] + 1_000_000
    while kern.pending:
        events.extend(kern.run(limit))
    return time.perf_counter() - start, kern.last_move, events


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--packets", type=int, default=20_000)
    ap.add_argument("--gap", type=float, default=1.0, help="mean cycles between injections")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    pkts = traffic(args.k, args.packets, args.seed, args.gap)
    print(f"{args.k}x{args.k} mesh, {args.packets} packets, backends: {', '.join(BACKENDS)}")
    for priority in (False, True):
        results = {}
        for name in BACKENDS:
            best = min((run_backend(name, args.k, pkts, priority) for _ in range(args.repeat)),
                       key=lambda r: r[0])
            results[name] = best
            secs, cycles, events = best
            print(f"  priority={'on ' if priority else 'off'} {name:<7} {secs:8.3f} s  "
                  f"{cycles / secs:12,.0f} cycles/s  {len(events)} flits")
        if len(results) == 2:
            same = results["python"][2] == results["cython"][2]
            ratio = results["python"][0] / results["cython"][0]
            print(f"  identical ejections: {same}; compiled speedup {ratio:.1f}x")


if __name__ == "__main__":
    main()
