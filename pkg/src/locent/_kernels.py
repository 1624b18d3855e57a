"""Hot numeric kernels.

Each kernel has a numba @njit implementation and a pure-numpy fallback.
The fallback is selected by setting the environment variable
LOCENT_NO_NUMBA=1 before import (or when numba is not importable).
Both paths produce identical results up to floating-point summation order;
the sampling kernels are bit-identical by construction.
"""

from __future__ import annotations

import math
import os

import numpy as np

USE_NUMBA = os.environ.get("LOCENT_NO_NUMBA", "") not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


# ---------------------------------------------------------------------------
# m-local entropy context-tree accumulation
#
# Depth-first walk over contexts c in Sigma^depth carrying the row vector
# u(c) = lambda^T K M^(c) incrementally; a context costs O(|Q|^2) instead of
# the O(|Q|^3) of recomputing the product from scratch.  Subtrees with an
# all-zero u are pruned and counted as skipped.
# ---------------------------------------------------------------------------


def _mlocal_leaf_batch(U, E, rho):
    """Weights and conditional entropies for a batch of context vectors."""
    sym = U @ E
    eos = U @ rho
    w = sym.sum(axis=1) + eos
    probs = np.concatenate([sym, eos[:, None]], axis=1)
    mask = w > 0.0
    ent = np.zeros(len(w))
    if mask.any():
        p = probs[mask] / w[mask, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            plogp = np.where(p > 0.0, p * np.log(p), 0.0)
        ent[mask] = -plogp.sum(axis=1)
    return w, ent, mask


def _mlocal_numpy(u0, P, E, rho, depth):
    K, Q, _ = P.shape
    if depth == 0:
        w, ent, mask = _mlocal_leaf_batch(u0[None, :], E, rho)
        if mask[0]:
            return float(w[0] * ent[0]), float(w[0]), 1, 0
        return 0.0, 0.0, 0, 1

    def rec(u, d):
        if d == 1:
            U = np.einsum("q,kqr->kr", u, P)
            w, ent, mask = _mlocal_leaf_batch(U, E, rho)
            nz = int(mask.sum())
            return float((w * ent).sum()), float(w.sum()), nz, K - nz
        wh = wt = 0.0
        ev = sk = 0
        for y in range(K):
            u2 = u @ P[y]
            if u2.sum() <= 0.0:
                sk += K ** (d - 1)
                continue
            a, b, c, e = rec(u2, d - 1)
            wh += a
            wt += b
            ev += c
            sk += e
        return wh, wt, ev, sk

    return rec(u0, depth)


if USE_NUMBA:

    @njit(cache=True)
    def _mlocal_numba(u0, P, E, rho, depth):
        K, Q, _ = P.shape
        Kb = E.shape[1] + 1
        probs = np.empty(Kb)
        if depth == 0:
            w = 0.0
            for k in range(Kb - 1):
                s = 0.0
                for q in range(Q):
                    s += u0[q] * E[q, k]
                probs[k] = s
                w += s
            s = 0.0
            for q in range(Q):
                s += u0[q] * rho[q]
            probs[Kb - 1] = s
            w += s
            if w <= 0.0:
                return 0.0, 0.0, 0, 1
            h = 0.0
            for k in range(Kb):
                p = probs[k] / w
                if p > 0.0:
                    h -= p * math.log(p)
            return w * h, w, 1, 0

        us = np.empty((depth + 1, Q))
        us[0] = u0
        idx = np.zeros(depth + 1, dtype=np.int64)
        acc_wh = 0.0
        acc_w = 0.0
        evaluated = 0
        skipped = 0
        level = 0
        while level >= 0:
            if idx[level] == K:
                level -= 1
                continue
            y = idx[level]
            idx[level] += 1
            # u_child = us[level] @ P[y]
            total = 0.0
            for r in range(Q):
                s = 0.0
                for q in range(Q):
                    s += us[level][q] * P[y, q, r]
                us[level + 1][r] = s
                total += s
            if total <= 0.0:
                skipped += K ** (depth - level - 1)
                continue
            if level + 1 == depth:
                u = us[depth]
                w = 0.0
                for k in range(Kb - 1):
                    s = 0.0
                    for q in range(Q):
                        s += u[q] * E[q, k]
                    probs[k] = s
                    w += s
                s = 0.0
                for q in range(Q):
                    s += u[q] * rho[q]
                probs[Kb - 1] = s
                w += s
                h = 0.0
                for k in range(Kb):
                    p = probs[k] / w
                    if p > 0.0:
                        h -= p * math.log(p)
                acc_wh += w * h
                acc_w += w
                evaluated += 1
            else:
                level += 1
                idx[level] = 0
        return acc_wh, acc_w, evaluated, skipped


def mlocal_accumulate(u0, P, E, rho, depth):
    """Return (sum of w(c)*H(c), sum of w(c), contexts evaluated, skipped)."""
    if USE_NUMBA:
        return _mlocal_numba(
            np.ascontiguousarray(u0),
            np.ascontiguousarray(P),
            np.ascontiguousarray(E),
            np.ascontiguousarray(rho),
            depth,
        )
    return _mlocal_numpy(u0, P, E, rho, depth)


# ---------------------------------------------------------------------------
# SplitMix64 string sampling (deterministic automata fast path)
# ---------------------------------------------------------------------------


def stream_state(seed: int, index: int) -> int:
    """Initial SplitMix64 state of the per-string substream (seed, index)."""
    x = (seed + (index + 1) * 0x9E3779B97F4A7C15) & ((1 << 64) - 1)
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & ((1 << 64) - 1)
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & ((1 << 64) - 1)
    return z ^ (z >> 31)


def _py_next(state):
    state = (state + 0x9E3779B97F4A7C15) & ((1 << 64) - 1)
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & ((1 << 64) - 1)
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & ((1 << 64) - 1)
    z ^= z >> 31
    return state, (z >> 11) * (2.0 ** -53)


def _sample_one_py(W, TGT, rho, lam, state, out):
    Q, K = W.shape
    state, u = _py_next(state)
    q = 0
    acc = 0.0
    for i in range(Q):
        acc += lam[i]
        if u < acc:
            q = i
            break
    n = 0
    cap = out.shape[0]
    while True:
        state, u = _py_next(state)
        if u < rho[q]:
            return n
        if n >= cap:
            return -1
        r = u - rho[q]
        chosen = -1
        for k in range(K):
            w = W[q, k]
            if w > 0.0:
                chosen = k
                r -= w
                if r < 0.0:
                    break
        out[n] = chosen
        q = TGT[q, chosen]
        n += 1


if USE_NUMBA:

    @njit(cache=True)
    def _sample_one_numba(W, TGT, rho, lam, state, out):
        Q, K = W.shape
        state = state + _GOLDEN
        z = state
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
        u = (z >> np.uint64(11)) * (2.0 ** -53)
        q = 0
        acc = 0.0
        for i in range(Q):
            acc += lam[i]
            if u < acc:
                q = i
                break
        n = 0
        cap = out.shape[0]
        while True:
            state = state + _GOLDEN
            z = state
            z = (z ^ (z >> np.uint64(30))) * _MIX1
            z = (z ^ (z >> np.uint64(27))) * _MIX2
            z = z ^ (z >> np.uint64(31))
            u = (z >> np.uint64(11)) * (2.0 ** -53)
            if u < rho[q]:
                return n
            if n >= cap:
                return -1
            r = u - rho[q]
            chosen = -1
            for k in range(K):
                w = W[q, k]
                if w > 0.0:
                    chosen = k
                    r -= w
                    if r < 0.0:
                        break
            out[n] = chosen
            q = TGT[q, chosen]
            n += 1


def sample_one(W, TGT, rho, lam, state, out):
    """Sample one string into out; returns its length or -1 on cap overflow."""
    if USE_NUMBA:
        return _sample_one_numba(W, TGT, rho, lam, np.uint64(state), out)
    return _sample_one_py(W, TGT, rho, lam, state, out)


# ---------------------------------------------------------------------------
# n-gram window encoding
#
# Contexts of length m-1 packed base-K into int64 codes; the next-symbol
# code uses K as EOS.  Strings shorter than m-1 contribute no windows.
# ---------------------------------------------------------------------------


def _window_fill_py(flat, offsets, m, K, ctx_out, nxt_out):
    pos = 0
    for i in range(len(offsets) - 1):
        a, b = offsets[i], offsets[i + 1]
        T = b - a
        if T < m - 1:
            continue
        y = flat[a:b]
        if m == 1:
            for j in range(T):
                ctx_out[pos] = 0
                nxt_out[pos] = y[j]
                pos += 1
            ctx_out[pos] = 0
            nxt_out[pos] = K
            pos += 1
            continue
        code = 0
        base = K ** (m - 2)
        for j in range(m - 1):
            code = code * K + int(y[j])
        for j in range(m - 1, T + 1):
            ctx_out[pos] = code
            nxt_out[pos] = y[j] if j < T else K
            pos += 1
            if j < T:
                code = (code - int(y[j - m + 1]) * base) * K + int(y[j])
    return pos


if USE_NUMBA:

    @njit(cache=True)
    def _window_fill_numba(flat, offsets, m, K, ctx_out, nxt_out):
        pos = 0
        for i in range(len(offsets) - 1):
            a, b = offsets[i], offsets[i + 1]
            T = b - a
            if T < m - 1:
                continue
            if m == 1:
                for j in range(T):
                    ctx_out[pos] = 0
                    nxt_out[pos] = flat[a + j]
                    pos += 1
                ctx_out[pos] = 0
                nxt_out[pos] = K
                pos += 1
                continue
            code = np.int64(0)
            base = np.int64(K) ** (m - 2)
            for j in range(m - 1):
                code = code * K + flat[a + j]
            for j in range(m - 1, T + 1):
                ctx_out[pos] = code
                if j < T:
                    nxt_out[pos] = flat[a + j]
                else:
                    nxt_out[pos] = K
                pos += 1
                if j < T:
                    code = (code - flat[a + j - m + 1] * base) * K + flat[a + j]
        return pos


def window_codes(flat, offsets, m, K):
    """Packed (context, next) codes for every counting window of the corpus."""
    lengths = np.diff(offsets)
    n_windows = int(np.maximum(lengths - (m - 1) + 1, 0).sum())
    ctx = np.empty(n_windows, dtype=np.int64)
    nxt = np.empty(n_windows, dtype=np.int64)
    if n_windows:
        if USE_NUMBA:
            _window_fill_numba(flat, offsets, m, K, ctx, nxt)
        else:
            _window_fill_py(flat, offsets, m, K, ctx, nxt)
    return ctx, nxt


# ---------------------------------------------------------------------------
# True-model surprisal of a corpus under a deterministic automaton
# ---------------------------------------------------------------------------


def _score_det_py(flat, offsets, W, TGT, rho, q0):
    total = 0.0
    for i in range(len(offsets) - 1):
        q = q0
        for j in range(offsets[i], offsets[i + 1]):
            y = flat[j]
            total -= math.log(W[q, y])
            q = TGT[q, y]
        total -= math.log(rho[q])
    return total


if USE_NUMBA:

    @njit(cache=True)
    def _score_det_numba(flat, offsets, W, TGT, rho, q0):
        total = 0.0
        for i in range(len(offsets) - 1):
            q = q0
            for j in range(offsets[i], offsets[i + 1]):
                y = flat[j]
                total -= math.log(W[q, y])
                q = TGT[q, y]
            total -= math.log(rho[q])
        return total


def score_corpus_deterministic(flat, offsets, W, TGT, rho, q0):
    """Total surprisal (nats) of all strings, EOS events included."""
    if USE_NUMBA:
        return _score_det_numba(flat, offsets, W, TGT, rho, q0)
    return _score_det_py(flat, offsets, W, TGT, rho, q0)
