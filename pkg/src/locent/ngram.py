"""Fixed-context counting, the plug-in m-local entropy estimator, smoothed
n-gram learner models, and held-out next-symbol cross-entropy.

Conventions: "m-local" always means context length m-1.  EOS is a predicted
outcome with id alphabet_size; BOS is a context filler with id -1 and never
a prediction target.  By default counting windows exclude positions with
fewer than m-1 preceding symbols; BOS padding (m-1 fill sentinels, so every
position gets a full-length context) is optional for counting and mandatory
for held-out scoring, where every symbol must be scored.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .entropy import EntropyReport, _to_base
from .errors import EmptyCorpusWindows, ZeroProbabilityEvent
from .sampling import Corpus

BOS = -1


@dataclass
class NgramCounts:
    context_length: int
    alphabet_size: int
    table: dict = field(default_factory=dict)  # context tuple -> {next: count}
    context_totals: dict = field(default_factory=dict)
    n_total: int = 0

    @property
    def eos(self) -> int:
        return self.alphabet_size

    def add(self, context: tuple, nxt: int, count: int = 1) -> None:
        bucket = self.table.setdefault(context, defaultdict(int))
        bucket[nxt] += count
        self.context_totals[context] = self.context_totals.get(context, 0) + count
        self.n_total += count


def _contexts_of(y, m: int, padded: bool):
    """Yield (context, next) windows of one string; next may be EOS."""
    T = len(y)
    n_ctx = m - 1
    if padded:
        padded_y = [BOS] * n_ctx + [int(s) for s in y]
        for t in range(T + 1):
            ctx = tuple(padded_y[t:t + n_ctx])
            nxt = int(y[t]) if t < T else None
            yield ctx, nxt
    else:
        if T < n_ctx:
            return
        ints = [int(s) for s in y]
        for t in range(n_ctx, T + 1):
            yield tuple(ints[t - n_ctx:t]), (ints[t] if t < T else None)


def count_corpus(corpus: Corpus, m: int, bos_padding: bool = False) -> NgramCounts:
    """Count (length-(m-1) context, next-symbol-or-EOS) windows."""
    if m < 1:
        raise ValueError("m must be >= 1")
    K = int(corpus.metadata.get("alphabet_size", 0)) or _infer_alphabet(corpus)
    counts = NgramCounts(context_length=m - 1, alphabet_size=K)
    eos = counts.eos
    for y in corpus.strings:
        for ctx, nxt in _contexts_of(y, m, bos_padding):
            counts.add(ctx, eos if nxt is None else nxt)
    return counts


def _infer_alphabet(corpus: Corpus) -> int:
    top = 0
    for s in corpus.strings:
        if len(s):
            top = max(top, int(np.max(s)) + 1)
    return top


def plugin_m_local_entropy(corpus: Corpus, m: int, base: str = "nats") -> EntropyReport:
    """In-sample average m-gram surprisal under the empirical conditionals.

    Equal to the context-frequency-weighted average of the per-context
    empirical next-symbol entropies; no zero-probability event can arise
    because every scored window was counted.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    K = int(corpus.metadata.get("alphabet_size", 0)) or _infer_alphabet(corpus)
    flat, offsets = corpus.flat()
    ctx, nxt = _kernels.window_codes(flat, offsets, m, K)
    if len(ctx) == 0:
        raise EmptyCorpusWindows(f"no counting windows at m={m}")
    pair = ctx * (K + 1) + nxt
    upair, cpair = np.unique(pair, return_counts=True)
    uctx = upair // (K + 1)
    _, inv = np.unique(uctx, return_inverse=True)
    ctx_totals = np.bincount(inv, weights=cpair.astype(np.float64))
    n_total = cpair.sum()
    cpair = cpair.astype(np.float64)
    nats = float(-(cpair * (np.log(cpair) - np.log(ctx_totals[inv]))).sum() / n_total)
    return EntropyReport(value=_to_base(nats, base), log_base=base, m=m,
                         contexts_evaluated=len(ctx_totals))


@dataclass
class SmoothedModel:
    """n-gram conditional model with a zero-free smoothing policy.

    Policies: "mle" (plug-in, in-sample only), "addk" with parameter kappa,
    "absdisc" with discount d interpolated against a uniform base over the
    alphabet plus EOS.  Unseen contexts back off to the uniform base.
    """

    counts: NgramCounts
    policy: str = "absdisc"
    param: float = 0.75

    def __post_init__(self):
        if self.policy not in ("mle", "addk", "absdisc"):
            raise ValueError(f"unknown smoothing policy {self.policy!r}")
        self._outcomes = self.counts.alphabet_size + 1

    @property
    def context_length(self) -> int:
        return self.counts.context_length

    def prob(self, context: tuple, nxt: int) -> float:
        n_c = self.counts.context_totals.get(context, 0)
        if n_c == 0:
            if self.policy == "mle":
                raise ZeroProbabilityEvent(f"unseen context {context!r} under MLE")
            return 1.0 / self._outcomes
        bucket = self.counts.table[context]
        c = bucket.get(nxt, 0)
        if self.policy == "mle":
            if c == 0:
                raise ZeroProbabilityEvent(f"unseen event {context!r} -> {nxt}")
            return c / n_c
        if self.policy == "addk":
            return (c + self.param) / (n_c + self.param * self._outcomes)
        # interpolated absolute discounting, uniform base
        d = self.param
        seen = len(bucket)
        return max(c - d, 0.0) / n_c + (d * seen / n_c) / self._outcomes

    def logprob(self, context: tuple, nxt: int) -> float:
        return math.log(self.prob(context, nxt))

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "context_length": self.counts.context_length,
            "alphabet_size": self.counts.alphabet_size,
            "policy": self.policy,
            "param": self.param,
            "counts": [
                [list(ctx), sorted((int(k), int(v)) for k, v in bucket.items())]
                for ctx, bucket in sorted(self.counts.table.items())
            ],
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, separators=(",", ":"), sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_dict(cls, doc: dict) -> "SmoothedModel":
        counts = NgramCounts(
            context_length=int(doc["context_length"]),
            alphabet_size=int(doc["alphabet_size"]),
        )
        for ctx, bucket in doc["counts"]:
            for k, v in bucket:
                counts.add(tuple(ctx), int(k), int(v))
        return cls(counts=counts, policy=doc["policy"], param=float(doc["param"]))

    @classmethod
    def load(cls, path) -> "SmoothedModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def train_model(corpus: Corpus, m: int, policy: str = "absdisc",
                param: float = 0.75) -> SmoothedModel:
    """Smoothed model of context length m-1, counted with BOS padding so
    every held-out position can be scored against a trained context."""
    counts = count_corpus(corpus, m, bos_padding=True)
    return SmoothedModel(counts=counts, policy=policy, param=param)


def heldout_cross_entropy(model: SmoothedModel, corpus: Corpus,
                          base: str = "nats") -> float:
    """Per-symbol cross-entropy with EOS scored once per string.

    Normalized by the total number of scored events, sum of (|y| + 1).
    """
    if model.policy == "mle":
        raise ZeroProbabilityEvent("held-out scoring needs a zero-free policy")
    m = model.context_length + 1
    eos = model.counts.eos
    total = 0.0
    events = 0
    for y in corpus.strings:
        for ctx, nxt in _contexts_of(y, m, padded=True):
            total -= model.logprob(ctx, eos if nxt is None else nxt)
            events += 1
    if events == 0:
        raise EmptyCorpusWindows("empty corpus")
    return _to_base(total / events, base)


def kl_estimate(heldout_ce: float, exact_next_symbol_entropy: float) -> float:
    """Cross-entropy minus the generator's next-symbol entropy, as-is
    (sampling noise can make it slightly negative)."""
    return heldout_ce - exact_next_symbol_entropy
