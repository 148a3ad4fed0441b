"""Time the per-day kernels with numba and with the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--p0 50000] [--repeat 200]

Both paths run on the same mid-epidemic population and must agree exactly.
The script also times a full baseline replication under each backend.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from testmult import ScenarioConfig, kernels
from testmult.simulation import World


def _time(fn, repeat: int) -> float:
    fn()  # warm-up (JIT compile on first call)
    start = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - start) / repeat


def bench_kernels(p0: int, repeat: int) -> None:
    world = World(ScenarioConfig(p0=p0), seed=0)
    for _ in range(60):
        world.step_day()
    pop, led = world.pop, world.ledger
    t = world.t + 1

    def args_classify(state, counts, det):
        return (t, pop.group, pop.epi_day, pop.symptom, pop.epi_death, pop.p_lag, pop.k_lag, pop.q_lag,
                pop.conf_day, pop.conf_severe, pop.conf_death, pop.k_f, pop.q_f, pop.detected, state, counts, det)

    out = {}
    for flag in (True, False):
        state = np.zeros_like(pop.state)
        counts = np.zeros_like(pop.counts)
        det = np.zeros_like(pop.det_counts)
        a = args_classify(state, counts, det)
        tc = _time(lambda: kernels.classify(*a, use_numba=flag), repeat)
        pool = np.zeros_like(led.pool)
        pc = np.zeros_like(led.pool_counts)
        tp = _time(lambda: kernels.testing_pools(t, led.d, state, pop.detected, led.last_test, pool, pc,
                                                 use_numba=flag), repeat)
        out[flag] = (tc, tp, state.copy(), counts.copy(), pool.copy())

    for i in (2, 3, 4):
        assert np.array_equal(out[True][i], out[False][i]), "backends disagree"
    print(f"P0={p0}, day {t}, {repeat} repeats")
    print(f"{'kernel':10s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, k in (("classify", 0), ("pools", 1)):
        nb, npy = out[True][k] * 1e3, out[False][k] * 1e3
        print(f"{name:10s} {nb:10.3f} {npy:10.3f} {npy / nb:8.1f}x")


def bench_replication() -> None:
    code = ("import time; from testmult import ScenarioConfig, run_replication as r; r(ScenarioConfig(), 99); "
            "t = time.perf_counter(); r(ScenarioConfig(), 0); print(time.perf_counter() - t)")
    for flag in ("1", "0"):
        env = dict(os.environ, TESTMULT_NUMBA=flag)
        secs = float(subprocess.check_output([sys.executable, "-c", code], env=env, text=True))
        print(f"baseline replication, TESTMULT_NUMBA={flag}: {secs:.2f} s")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p0", type=int, default=50_000)
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()
    if not kernels.NUMBA_AVAILABLE:
        sys.exit("numba is not installed; nothing to compare")
    bench_kernels(args.p0, args.repeat)
    bench_replication()


if __name__ == "__main__":
    main()
