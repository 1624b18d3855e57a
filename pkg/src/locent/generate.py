"""Random deterministic PFSA generation.

Two independent SplitMix64 streams drive the construction: one for the
topology (initial state, outgoing-symbol sets, transition targets) and one
for the raw transition weights.  Draw order follows the construction
line-by-line so a (config, seeds) pair always yields the same automaton.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pfsa import Pfsa
from .rng import SplitMix64

EXP_RATE = 0.1
ARC_FLOOR = 0.001


@dataclass(frozen=True)
class GenConfig:
    num_states: int
    alphabet_size: int
    target_mean_length: float = 20.0
    topology_seed: int = 0
    weight_seed: int = 1
    min_symbols_per_state: int = 2

    def __post_init__(self):
        if self.num_states < 1:
            raise ValueError("num_states must be >= 1")
        if self.alphabet_size < 2:
            raise ValueError("alphabet_size must be >= 2")
        if self.target_mean_length <= 0:
            raise ValueError("target_mean_length must be positive")


def generate_outgoing_symbols(config: GenConfig, rng: SplitMix64 | None = None) -> list[set[int]]:
    """Per-state outgoing-symbol sets.

    Each state gets at least min(s_min, |Sigma|) symbols, every symbol is
    covered by some state, then a random number of extra (symbol, state)
    insertions is applied.
    """
    if rng is None:
        rng = SplitMix64(config.topology_seed)
    Q, K, s_min = config.num_states, config.alphabet_size, config.min_symbols_per_state
    sets: list[set[int]] = [set() for _ in range(Q)]
    for q in range(Q):
        sets[q].update(rng.choice_distinct(range(K), min(s_min, K)))
    for y in range(K):
        q = rng.choice(range(Q))
        sets[q].add(y)
    extra = 0
    for _q in range(Q):
        extra += rng.integers(0, max(1, K // 2 - s_min))
    for _j in range(extra):
        y = rng.choice(range(K))
        q = rng.choice(range(Q))
        sets[q].add(y)
    return sets


def random_dpfsa(config: GenConfig) -> Pfsa:
    """Deterministic PFSA with per-state halting probability 1/(mu+1).

    Every (state, symbol) pair gets exactly one target.  Targets are drawn
    from the shrinking pool of not-yet-targeted states first, which makes
    every state reachable.  The raw weight is an Exp(0.1) draw gated on the
    outgoing-symbol set, plus a 0.001 floor on every pair.
    """
    topo = SplitMix64(config.topology_seed)
    weights = SplitMix64(config.weight_seed)
    Q, K, mu = config.num_states, config.alphabet_size, config.target_mean_length

    q_init = topo.choice(range(Q))
    lam = np.zeros(Q)
    lam[q_init] = 1.0

    outgoing = generate_outgoing_symbols(config, rng=topo)

    raw = np.zeros((Q, K))
    target = np.zeros((Q, K), dtype=np.int64)
    unused = set(range(Q))
    for q in range(Q):
        for y in range(K):
            if unused:
                dst = topo.choice(unused)
                unused.discard(dst)
            else:
                dst = topo.choice(range(Q))
            w = weights.exponential(EXP_RATE)
            raw[q, y] = w * (1.0 if y in outgoing[q] else 0.0) + ARC_FLOOR
            target[q, y] = dst

    final = np.zeros(Q)
    for q in range(Q):
        t = raw[q].sum()
        f = t / mu
        s = t + f
        raw[q] /= s
        final[q] = f / s

    transitions = tuple(
        (q, y, float(raw[q, y]), int(target[q, y]))
        for q in range(Q)
        for y in range(K)
    )
    return Pfsa(
        alphabet_size=K,
        num_states=Q,
        transitions=transitions,
        initial=lam,
        final=final,
    )
