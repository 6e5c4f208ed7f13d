"""Compare the compiled and pure kernel lanes on the hot workloads.

Usage: python benchmarks/bench_kernels.py [--quick]

Also asserts that both lanes return bit-identical results on every workload
it times, so the numbers always describe the same computation.
"""

import argparse
import math
import time

from fireline import _pykernel, rng

try:
    from fireline import _fastkernel
except ImportError:
    _fastkernel = None


def timed(fn, *args, repeat=1):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_lattice(lam, half_width, horizon_rescaled, quick):
    log_inv = math.log(1.0 / lam)
    a_sites = int(half_width / (lam * log_inv))
    events = int((2 * a_sites + 1) * horizon_rescaled * log_inv)
    args = (
        a_sites,
        horizon_rescaled * log_inv,
        rng.derive_key(1, "growth"),
        [],
        [],
        lam,
        rng.derive_key(1, "ignite"),
        [0],
        [],
        True,
    )
    fast_out, fast_t = (None, None)
    if _fastkernel is not None:
        fast_out, fast_t = timed(_fastkernel.lattice_run, *args, repeat=1 if quick else 3)
    pure_out, pure_t = timed(_pykernel.lattice_run, *args)
    if fast_out is not None:
        assert fast_out == pure_out, "kernel lanes disagree"
    print(f"lattice lam={lam:g} ({2*a_sites+1} sites, ~{events} events):")
    _print_row(fast_t, pure_t, events)


def bench_lffp(half_width, t_eval, n, quick):
    keys = [rng.derive_key(s, "limit") for s in range(n)]
    fast_out, fast_t = (None, None)
    if _fastkernel is not None:
        fast_out, fast_t = timed(
            _fastkernel.lffp_endpoint_batch, half_width, t_eval, keys, 0.0,
            repeat=1 if quick else 3,
        )
    pure_out, pure_t = timed(_pykernel.lffp_endpoint_batch, half_width, t_eval, keys, 0.0)
    if fast_out is not None:
        assert fast_out == pure_out, "kernel lanes disagree"
    print(f"limit-process batch (A={half_width:g}, t={t_eval:g}, {n} timelines):")
    _print_row(fast_t, pure_t, n)


def _print_row(fast_t, pure_t, units):
    if fast_t is not None:
        print(f"  compiled: {fast_t:8.3f}s  ({units / fast_t:,.0f}/s)")
    else:
        print("  compiled: not built")
    print(f"  pure:     {pure_t:8.3f}s  ({units / pure_t:,.0f}/s)")
    if fast_t is not None:
        print(f"  speedup:  {pure_t / fast_t:.1f}x")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()
    bench_lattice(1e-3, 5.0, 3.0, args.quick)
    if not args.quick:
        bench_lattice(1e-4, 5.0, 3.0, args.quick)
    bench_lffp(30.0, 2.5, 200 if args.quick else 2000, args.quick)


if __name__ == "__main__":
    main()
