import numpy as np
import pytest

from locent.pfsa import Pfsa

# Two-state reference automaton used throughout the suite; all REF values
# were confirmed against the enumeration and series oracles before freezing
# (see test_acceptance.py).
REF = {
    "string_eps": 0.2,
    "string_b": 0.12,
    "string_ba": 0.036,
    "prefix_a": 0.5,
    "prefix_b": 0.3,
    "infix_a": 2.125,
    "infix_b": 0.9375,
    "mean_length": 3.0625,
    "next_symbol_nats": 0.947351,
    "global_nats": 3.848614,
    "two_local_nats": 0.920477,
}


def make_t1() -> Pfsa:
    return Pfsa(
        alphabet_size=2,
        num_states=2,
        transitions=[(0, 0, 0.5, 0), (0, 1, 0.3, 1), (1, 0, 0.6, 0)],
        initial=[1.0, 0.0],
        final=[0.2, 0.4],
    )


def make_cycle_automaton(K: int, eps: float, mu: float = 30.0) -> Pfsa:
    """Strongly local automaton: state = last emitted symbol, symbol
    (s+1) mod K dominant, every state halting with probability 1/(mu+1)."""
    h = 1.0 / (mu + 1.0)
    transitions = []
    for s in range(K):
        for y in range(K):
            w = (1.0 - h) * ((1.0 - eps * (K - 1)) if y == (s + 1) % K else eps)
            transitions.append((s, y, w, y))
    return Pfsa(
        alphabet_size=K,
        num_states=K,
        transitions=transitions,
        initial=[1.0] + [0.0] * (K - 1),
        final=np.full(K, h),
    )


@pytest.fixture
def t1() -> Pfsa:
    return make_t1()
