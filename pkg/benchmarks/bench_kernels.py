"""Timing comparison of the numba kernels against their pure-Python/numpy
fallbacks.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

Both implementations live in locent._kernels; this script calls them
directly, so it needs numba importable (the LOCENT_NO_NUMBA escape hatch
only affects which path the library itself dispatches to).
"""

import time

import numpy as np

from locent import _kernels
from locent.generate import GenConfig, random_dpfsa
from locent.matrices import build_matrices
from locent.sampling import sample_corpus

if not _kernels.USE_NUMBA:
    raise SystemExit("unset LOCENT_NO_NUMBA to benchmark both paths")


def timed(fn, *args, repeat=3):
    fn(*args)  # warm-up / JIT compile
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def row(name, numba_s, fallback_s):
    print(f"{name:<28} {numba_s * 1e3:>10.2f} ms {fallback_s * 1e3:>12.2f} ms "
          f"{fallback_s / numba_s:>8.1f}x")


def bench_mlocal():
    pfsa = random_dpfsa(GenConfig(num_states=16, alphabet_size=32,
                                  target_mean_length=20.0,
                                  topology_seed=1, weight_seed=2))
    mats = build_matrices(pfsa)
    args = (np.ascontiguousarray(mats.prefix_vector),
            np.ascontiguousarray(mats.per_symbol),
            np.ascontiguousarray(mats.emission),
            np.ascontiguousarray(mats.final))
    depth = 3  # 32^3 contexts
    row("mlocal depth=3 Q=16 K=32",
        timed(_kernels._mlocal_numba, *args, depth),
        timed(_kernels._mlocal_numpy, *args, depth))


def bench_sampling():
    pfsa = random_dpfsa(GenConfig(num_states=16, alphabet_size=32,
                                  target_mean_length=20.0,
                                  topology_seed=3, weight_seed=4))
    Q, K = pfsa.num_states, pfsa.alphabet_size
    W = np.zeros((Q, K))
    TGT = np.zeros((Q, K), dtype=np.int64)
    for src, sym, w, dst in pfsa.transitions:
        W[src, sym] = w
        TGT[src, sym] = dst
    rho = np.asarray(pfsa.final)
    lam = np.asarray(pfsa.initial)
    out = np.empty(10_000, dtype=np.int32)

    def run_numba():
        for i in range(20_000):
            _kernels._sample_one_numba(W, TGT, rho, lam,
                                       np.uint64(_kernels.stream_state(9, i)), out)

    def run_py():
        for i in range(20_000):
            _kernels._sample_one_py(W, TGT, rho, lam,
                                    _kernels.stream_state(9, i), out)

    row("sample 20K strings", timed(run_numba), timed(run_py))


def bench_windows():
    pfsa = random_dpfsa(GenConfig(num_states=8, alphabet_size=16,
                                  target_mean_length=20.0,
                                  topology_seed=5, weight_seed=6))
    corpus = sample_corpus(pfsa, 50_000, seed=7)
    flat, offsets = corpus.flat()
    m, K = 4, 16
    lengths = np.diff(offsets)
    n = int(np.maximum(lengths - (m - 1) + 1, 0).sum())

    def run(fill):
        ctx = np.empty(n, dtype=np.int64)
        nxt = np.empty(n, dtype=np.int64)
        fill(flat, offsets, m, K, ctx, nxt)

    row("window codes 50K strings",
        timed(run, _kernels._window_fill_numba),
        timed(run, _kernels._window_fill_py))

    W = np.zeros((8, 16))
    TGT = np.zeros((8, 16), dtype=np.int64)
    for src, sym, w, dst in pfsa.transitions:
        W[src, sym] = w
        TGT[src, sym] = dst
    rho = np.asarray(pfsa.final)
    row("score 50K strings",
        timed(_kernels._score_det_numba, flat, offsets, W, TGT, rho, 0),
        timed(_kernels._score_det_py, flat, offsets, W, TGT, rho, 0))


def main():
    print(f"{'kernel':<28} {'numba':>13} {'fallback':>15} {'speedup':>8}")
    bench_mlocal()
    bench_sampling()
    bench_windows()


if __name__ == "__main__":
    main()
