"""Ancestral sampling from a PFSA and corpus file handling.

Each string is drawn from its own SplitMix64 substream keyed by
(seed, index), so sampling order never affects output.  Corpora are stored
as one string per line, symbols as space-separated decimal integers, with a
JSON metadata sidecar.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import SampleLengthCapExceeded, SizesExceedCorpus
from .matrices import TransitionMatrices
from .pfsa import Pfsa
from .rng import SplitMix64

MAX_STRING_LENGTH = 10_000


@dataclass(frozen=True)
class Corpus:
    strings: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self,
            "strings",
            tuple(np.asarray(s, dtype=np.int32) for s in self.strings),
        )

    def __len__(self):
        return len(self.strings)

    def flat(self):
        """(concatenated symbols, offsets) view for the kernels."""
        lengths = np.fromiter((len(s) for s in self.strings), dtype=np.int64,
                              count=len(self.strings))
        offsets = np.zeros(len(self.strings) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        if len(self.strings) and offsets[-1]:
            flat = np.concatenate(self.strings)
        else:
            flat = np.zeros(0, dtype=np.int32)
        return flat, offsets


def _det_tables(pfsa: Pfsa):
    Q, K = pfsa.num_states, pfsa.alphabet_size
    W = np.zeros((Q, K))
    TGT = np.zeros((Q, K), dtype=np.int64)
    for src, sym, w, dst in pfsa.transitions:
        W[src, sym] = w
        TGT[src, sym] = dst
    return W, TGT


def _sample_generic(pfsa: Pfsa, rng: SplitMix64):
    # Arc-list walk for nondeterministic automata.
    arcs = [[] for _ in range(pfsa.num_states)]
    for src, sym, w, dst in pfsa.transitions:
        arcs[src].append((sym, w, dst))
    for a in arcs:
        a.sort()
    u = rng.next_float()
    acc = 0.0
    q = 0
    for i, w in enumerate(pfsa.initial):
        acc += w
        if u < acc:
            q = i
            break
    out = []
    while True:
        u = rng.next_float()
        if u < pfsa.final[q]:
            return out
        if len(out) >= MAX_STRING_LENGTH:
            raise SampleLengthCapExceeded(f"string exceeded {MAX_STRING_LENGTH} symbols")
        r = u - pfsa.final[q]
        sym, dst = arcs[q][-1][0], arcs[q][-1][2]
        for s, w, d in arcs[q]:
            r -= w
            if r < 0.0:
                sym, dst = s, d
                break
        out.append(sym)
        q = dst


def sample_string(pfsa: Pfsa, seed: int, index: int = 0):
    """One string from the substream (seed, index), as an int32 array."""
    if pfsa.deterministic:
        W, TGT = _det_tables(pfsa)
        scratch = np.empty(MAX_STRING_LENGTH, dtype=np.int32)
        n = _kernels.sample_one(
            W, TGT, np.asarray(pfsa.final), np.asarray(pfsa.initial),
            _kernels.stream_state(seed, index), scratch,
        )
        if n < 0:
            raise SampleLengthCapExceeded(f"string exceeded {MAX_STRING_LENGTH} symbols")
        return scratch[:n].copy()
    rng = SplitMix64(_kernels.stream_state(seed, index))
    return np.asarray(_sample_generic(pfsa, rng), dtype=np.int32)


def sample_corpus(pfsa: Pfsa, n: int, seed: int, split: str = "all") -> Corpus:
    strings = []
    if pfsa.deterministic:
        W, TGT = _det_tables(pfsa)
        rho = np.asarray(pfsa.final)
        lam = np.asarray(pfsa.initial)
        scratch = np.empty(MAX_STRING_LENGTH, dtype=np.int32)
        for i in range(n):
            ln = _kernels.sample_one(W, TGT, rho, lam,
                                     _kernels.stream_state(seed, i), scratch)
            if ln < 0:
                raise SampleLengthCapExceeded(
                    f"string {i} exceeded {MAX_STRING_LENGTH} symbols"
                )
            strings.append(scratch[:ln].copy())
    else:
        for i in range(n):
            rng = SplitMix64(_kernels.stream_state(seed, i))
            strings.append(np.asarray(_sample_generic(pfsa, rng), dtype=np.int32))
    return Corpus(
        strings=tuple(strings),
        metadata={
            "source": "sample",
            "seed": seed,
            "n": n,
            "alphabet_size": pfsa.alphabet_size,
            "automaton_fingerprint": pfsa.fingerprint(),
            "split": split,
        },
    )


def split_corpus(corpus: Corpus, sizes) -> list[Corpus]:
    """Contiguous slices of generation order (i.i.d. strings, so unbiased)."""
    sizes = list(sizes)
    if sum(sizes) > len(corpus):
        raise SizesExceedCorpus(f"requested {sum(sizes)} of {len(corpus)} strings")
    out = []
    start = 0
    for i, size in enumerate(sizes):
        meta = dict(corpus.metadata)
        meta["split"] = f"slice{i}[{start}:{start + size}]"
        out.append(Corpus(strings=corpus.strings[start:start + size], metadata=meta))
        start += size
    return out


def save_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in corpus.strings:
            fh.write(" ".join(str(int(x)) for x in s))
            fh.write("\n")
    with open(f"{path}.meta.json", "w", encoding="utf-8") as fh:
        json.dump(corpus.metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_corpus(path) -> Corpus:
    strings = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            strings.append(
                np.array([int(t) for t in line.split()], dtype=np.int32)
                if line else np.zeros(0, dtype=np.int32)
            )
    metadata = {}
    try:
        with open(f"{path}.meta.json", encoding="utf-8") as fh:
            metadata = json.load(fh)
    except FileNotFoundError:
        pass
    return Corpus(strings=tuple(strings), metadata=metadata)
