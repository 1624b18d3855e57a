"""Exact entropy quantities of a PFSA.

All computation is in natural log; EntropyReport carries the output base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, NondeterministicUnsupported, ZeroTotalMass
from .matrices import TransitionMatrices, mean_length
from .pfsa import Pfsa

DEFAULT_CONTEXT_BUDGET = 10 ** 8

_LN2 = math.log(2.0)


def _to_base(nats: float, base: str) -> float:
    if base == "bits":
        return nats / _LN2
    if base == "nats":
        return nats
    raise ValueError(f"unknown log base {base!r}")


@dataclass(frozen=True)
class EntropyReport:
    value: float
    log_base: str  # "bits" | "nats"
    m: int | None = None
    contexts_evaluated: int = 0
    contexts_skipped_zero_mass: int = 0


def _plogp(p: np.ndarray) -> float:
    p = p[p > 0.0]
    return float(-(p * np.log(p)).sum())


def _require_prefix_determinism(pfsa: Pfsa) -> None:
    # Every prefix must occupy a unique state: deterministic transitions
    # plus a one-hot initial vector.
    if not pfsa.deterministic:
        raise NondeterministicUnsupported(
            "exact next-symbol entropy needs a deterministic automaton"
        )
    if int((np.asarray(pfsa.initial) > 0).sum()) != 1:
        raise NondeterministicUnsupported(
            "exact next-symbol entropy needs a one-hot initial vector"
        )


def next_symbol_entropy(pfsa: Pfsa, mats: TransitionMatrices, base: str = "nats") -> EntropyReport:
    """Visit-weighted average of the per-state local distribution entropies."""
    _require_prefix_determinism(pfsa)
    visits = mats.prefix_vector  # lambda^T K
    local = np.concatenate([mats.emission, mats.final[:, None]], axis=1)
    locents = np.array([_plogp(row) for row in local])
    z = float(visits.sum())
    value = float(visits @ locents) / z
    return EntropyReport(
        value=_to_base(value, base),
        log_base=base,
        contexts_evaluated=pfsa.num_states,
    )


def global_entropy(pfsa: Pfsa, mats: TransitionMatrices, base: str = "nats") -> EntropyReport:
    """(mean length + 1) times the next-symbol entropy."""
    ns = next_symbol_entropy(pfsa, mats, base="nats")
    value = (mean_length(mats) + 1.0) * ns.value
    return EntropyReport(
        value=_to_base(value, base),
        log_base=base,
        contexts_evaluated=pfsa.num_states,
    )


def m_local_entropy(
    pfsa: Pfsa,
    mats: TransitionMatrices,
    m: int,
    base: str = "nats",
    context_budget: int = DEFAULT_CONTEXT_BUDGET,
) -> EntropyReport:
    """Infix-weighted average next-symbol entropy over contexts in Sigma^(m-1).

    m = 1 evaluates the single empty context (the infix-weighted mixture).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    depth = m - 1
    n_contexts = pfsa.alphabet_size ** depth
    if n_contexts > context_budget:
        raise BudgetExceeded(
            f"{n_contexts} contexts exceed the budget of {context_budget}"
        )
    wh, w, evaluated, skipped = _kernels.mlocal_accumulate(
        mats.prefix_vector, mats.per_symbol, mats.emission, mats.final, depth
    )
    if w <= 0.0:
        raise ZeroTotalMass(f"every length-{depth} context has zero infix weight")
    return EntropyReport(
        value=_to_base(wh / w, base),
        log_base=base,
        m=m,
        contexts_evaluated=evaluated,
        contexts_skipped_zero_mass=skipped,
    )
