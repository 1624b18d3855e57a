"""Dense matrix view of a PFSA and the closed-form probability operations.

M is the state-to-state transition matrix, M^(y) its per-symbol slices,
E the state-by-symbol emission matrix, and K = (I - M)^{-1} the Kleene
closure, computed by LU-based linear solve rather than series truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem, SymbolOutOfRange, ZeroMassInfix, ZeroMassPrefix
from .pfsa import Pfsa

RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class NextSymbolDistribution:
    """Distribution over the alphabet plus a trailing EOS slot."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", np.asarray(self.probs, dtype=np.float64))
        self.probs.setflags(write=False)

    @property
    def eos(self) -> float:
        return float(self.probs[-1])


@dataclass(frozen=True)
class TransitionMatrices:
    alphabet_size: int
    M: np.ndarray          # (Q, Q)
    per_symbol: np.ndarray  # (K, Q, Q)
    emission: np.ndarray    # (Q, K)
    star: np.ndarray        # K = (I - M)^{-1}
    initial: np.ndarray
    final: np.ndarray
    prefix_vector: np.ndarray  # lambda^T K, cached
    star_final: np.ndarray     # K rho

    def __post_init__(self):
        for name in ("M", "per_symbol", "emission", "star", "initial", "final",
                     "prefix_vector", "star_final"):
            getattr(self, name).setflags(write=False)


def build_matrices(pfsa: Pfsa) -> TransitionMatrices:
    Q, K = pfsa.num_states, pfsa.alphabet_size
    per_symbol = np.zeros((K, Q, Q))
    emission = np.zeros((Q, K))
    for src, sym, w, dst in pfsa.transitions:
        per_symbol[sym, src, dst] += w
        emission[src, sym] += w
    M = per_symbol.sum(axis=0)
    eye = np.eye(Q)
    try:
        star = np.linalg.solve(eye - M, eye)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    residual = np.max(np.abs((eye - M) @ star - eye))
    if residual > RESIDUAL_TOL:
        raise SingularSystem(
            f"(I - M) solve residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}; "
            "the automaton has no finite mean length"
        )
    lam = np.asarray(pfsa.initial)
    rho = np.asarray(pfsa.final)
    return TransitionMatrices(
        alphabet_size=K,
        M=M,
        per_symbol=per_symbol,
        emission=emission,
        star=star,
        initial=lam.copy(),
        final=rho.copy(),
        prefix_vector=lam @ star,
        star_final=star @ rho,
    )


def _check_symbols(mats: TransitionMatrices, y) -> None:
    for sym in y:
        if not 0 <= sym < mats.alphabet_size:
            raise SymbolOutOfRange(f"symbol {sym} outside 0..{mats.alphabet_size - 1}")


def _forward(mats: TransitionMatrices, start: np.ndarray, y) -> np.ndarray:
    v = start
    for sym in y:
        v = v @ mats.per_symbol[sym]
    return v


def string_prob(mats: TransitionMatrices, y) -> float:
    """lambda^T M^(y) rho."""
    _check_symbols(mats, y)
    return float(_forward(mats, mats.initial, y) @ mats.final)


def prefix_prob(mats: TransitionMatrices, y) -> float:
    """lambda^T M^(y) K rho."""
    _check_symbols(mats, y)
    return float(_forward(mats, mats.initial, y) @ mats.star_final)


def infix_weight(mats: TransitionMatrices, c) -> float:
    """lambda^T K M^(c) K rho; expected occurrence count, may exceed 1."""
    _check_symbols(mats, c)
    return float(_forward(mats, mats.prefix_vector, c) @ mats.star_final)


def next_symbol_given_prefix(mats: TransitionMatrices, y) -> NextSymbolDistribution:
    _check_symbols(mats, y)
    v = _forward(mats, mats.initial, y)
    denom = float(v @ mats.star_final)
    if denom <= 0.0:
        raise ZeroMassPrefix(f"prefix {list(y)!r} has zero probability")
    sym = v @ mats.emission
    eos = float(v @ mats.final)
    return NextSymbolDistribution(np.append(sym, eos) / denom)


def next_symbol_given_infix(mats: TransitionMatrices, c) -> NextSymbolDistribution:
    _check_symbols(mats, c)
    u = _forward(mats, mats.prefix_vector, c)
    denom = float(u @ mats.star_final)
    if denom <= 0.0:
        raise ZeroMassInfix(f"infix {list(c)!r} has zero weight")
    sym = u @ mats.emission
    eos = float(u @ mats.final)
    return NextSymbolDistribution(np.append(sym, eos) / denom)


def mean_length(mats: TransitionMatrices) -> float:
    """lambda^T K K rho - 1 (the prefix normalizer minus one)."""
    return float(mats.prefix_vector @ mats.star_final) - 1.0
