#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot kernels (batch scoring, full-batch hinge gradient,
per-slot activation sums) and a short gradient-descent loop on a synthetic
drifting dataset, then prints per-kernel timings and speedups. Also checks
that both paths agree numerically.

Run:  python benchmarks/bench_kernels.py [--d 1000 --n-per-slot 500 ...]
Note: with DRIFTGUARD_NO_NUMBA=1 only the numpy path is timed.
"""

import argparse
import math
import time

import numpy as np

from driftguard import _kernels
from driftguard.drift import DriftConfig, slot_layout
from driftguard.synth import SynthSpec, generate
from driftguard.trainer import schedule_value


def _time(fn, repeat):
    fn()  # warm-up (triggers jit compilation on the numba path)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _descent_loop(kernel_grad, dataset, iters, eta0=7e-5):
    w = np.zeros(dataset.d)
    b = 0.0
    for t in range(1, iters + 1):
        eta = eta0 * schedule_value("cosine", t, iters)
        gw, gb, _ = kernel_grad(dataset.indptr, dataset.indices, dataset.y_signed, w, b)
        w -= eta * gw
        b -= eta * gb
    return w, b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=1000)
    ap.add_argument("--n-per-slot", type=int, default=500)
    ap.add_argument("--n-slots", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--train-iters", type=int, default=50)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    spec = SynthSpec(d=args.d, n_per_slot=args.n_per_slot, n_slots=args.n_slots,
                     stable_pos=25, stable_neg=25, n_drift_up=25, n_drift_down=25,
                     base_p=0.05, peak_p=0.4, noise_p=0.05, seed=args.seed)
    dataset, _ = generate(spec)
    layout = slot_layout(dataset, DriftConfig(slot_mode="fixed", dt_seconds=spec.slot_seconds))
    mask = dataset.labels == 1
    rng = np.random.default_rng(args.seed)
    w = rng.normal(0, 0.3, dataset.d)
    b = 0.1

    print(f"dataset: n={dataset.n} d={dataset.d} nnz={dataset.indices.size} "
          f"slots={layout.n_slots}")
    print(f"active backend: {_kernels.BACKEND}"
          + ("" if _kernels.NUMBA_AVAILABLE else "  (numba unavailable or disabled)"))
    print()

    cases = {
        "scores": (
            lambda: _kernels.scores_numpy(dataset.indptr, dataset.indices, w, b),
            lambda: _kernels.scores(dataset.indptr, dataset.indices, w, b),
        ),
        "hinge_grad": (
            lambda: _kernels.hinge_grad_numpy(dataset.indptr, dataset.indices,
                                              dataset.y_signed, w, b),
            lambda: _kernels.hinge_grad(dataset.indptr, dataset.indices,
                                        dataset.y_signed, w, b),
        ),
        "slot_sums": (
            lambda: _kernels.slot_sums_numpy(dataset.indptr, dataset.indices,
                                             layout.slot_ids, mask, dataset.d,
                                             layout.n_slots),
            lambda: _kernels.slot_sums(dataset.indptr, dataset.indices,
                                       layout.slot_ids, mask, dataset.d,
                                       layout.n_slots),
        ),
        f"descent x{args.train_iters}": (
            lambda: _descent_loop(_kernels.hinge_grad_numpy, dataset, args.train_iters),
            lambda: _descent_loop(_kernels.hinge_grad, dataset, args.train_iters),
        ),
    }

    header = f"{'kernel':<16} {'numpy':>12} {'numba':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, (numpy_fn, accel_fn) in cases.items():
        t_np = _time(numpy_fn, args.repeat)
        if _kernels.BACKEND == "numba":
            t_nb = _time(accel_fn, args.repeat)
            print(f"{name:<16} {t_np * 1e3:>10.2f}ms {t_nb * 1e3:>10.2f}ms "
                  f"{t_np / t_nb:>8.1f}x")
        else:
            print(f"{name:<16} {t_np * 1e3:>10.2f}ms {'-':>12} {'-':>9}")

    if _kernels.BACKEND == "numba":
        s_np = _kernels.scores_numpy(dataset.indptr, dataset.indices, w, b)
        s_nb = _kernels.scores(dataset.indptr, dataset.indices, w, b)
        g_np = _kernels.hinge_grad_numpy(dataset.indptr, dataset.indices, dataset.y_signed, w, b)
        g_nb = _kernels.hinge_grad(dataset.indptr, dataset.indices, dataset.y_signed, w, b)
        w_np, b_np = _descent_loop(_kernels.hinge_grad_numpy, dataset, args.train_iters)
        w_nb, b_nb = _descent_loop(_kernels.hinge_grad, dataset, args.train_iters)
        print()
        print(f"agreement: scores {np.max(np.abs(s_np - s_nb)):.2e}, "
              f"grad_w {np.max(np.abs(g_np[0] - g_nb[0])):.2e}, "
              f"trained w {np.max(np.abs(w_np - w_nb)):.2e}, "
              f"trained b {abs(b_np - b_nb):.2e}")


if __name__ == "__main__":
    main()
