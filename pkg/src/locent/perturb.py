"""Length-preserving bijective string perturbations.

Five families: reverse, even-odd and odd-even interleave splits, a
length-keyed deterministic shuffle, and a windowed k-local shuffle.
Permutations are Fisher-Yates draws from SplitMix64 streams keyed by
(family, seed, length) or (family, seed, k, window index, window length),
so caches are reconstructible from the seed alone.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidWindowSize
from .rng import SplitMix64, derive_key
from .sampling import Corpus

_FAMILY_TAGS = {"detshuffle": 1, "klocal": 2}

FAMILIES = ("reverse", "detshuffle", "evenodd", "oddeven", "klocal")


def reverse(y: np.ndarray) -> np.ndarray:
    return np.asarray(y)[::-1].copy()


def even_odd_shuffle(y: np.ndarray) -> np.ndarray:
    """Symbols at even (1-indexed) positions, then odd positions."""
    y = np.asarray(y)
    return np.concatenate([y[1::2], y[0::2]])


def odd_even_shuffle(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y)
    return np.concatenate([y[0::2], y[1::2]])


@dataclass
class PermutationCache:
    """Lazily filled, seed-keyed position permutations.

    Entries are filled at most once; concurrent readers only ever observe
    completed permutations (first writer wins under the lock).
    """

    kind: str  # "detshuffle" | "klocal"
    seed: int
    table: dict = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def get(self, key) -> np.ndarray:
        perm = self.table.get(key)
        if perm is not None:
            return perm
        with self._lock:
            perm = self.table.get(key)
            if perm is None:
                rng = SplitMix64(derive_key(_FAMILY_TAGS[self.kind], self.seed, *key))
                n = key[-1]
                perm = np.array(rng.permutation(n), dtype=np.int64)
                perm.setflags(write=False)
                self.table[key] = perm
        return perm

    def inverse(self, key) -> np.ndarray:
        return np.argsort(self.get(key))


def deterministic_shuffle(y: np.ndarray, cache: PermutationCache) -> np.ndarray:
    """Apply the length-specific permutation; same-length strings shuffle alike."""
    assert cache.kind == "detshuffle"
    y = np.asarray(y)
    if len(y) < 2:
        return y.copy()
    return y[cache.get((len(y),))]


def k_local_shuffle(y: np.ndarray, k: int, cache: PermutationCache) -> np.ndarray:
    """Permute consecutive windows of size k independently.

    A trailing window of length l < k uses the length-l permutation at the
    same (1-based) window index.
    """
    if k < 2:
        raise InvalidWindowSize(f"window size {k} < 2")
    assert cache.kind == "klocal"
    y = np.asarray(y)
    out = np.empty_like(y)
    for i0 in range(0, len(y), k):
        ell = min(k, len(y) - i0)
        window_index = i0 // k + 1
        perm = cache.get((k, window_index, ell))
        out[i0:i0 + ell] = y[i0:i0 + ell][perm]
    return out


@dataclass(frozen=True)
class PerturbSpec:
    family: str
    seed: int = 0
    k: int = 3

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown perturbation family {self.family!r}")
        if self.family == "klocal" and self.k < 2:
            raise InvalidWindowSize(f"window size {self.k} < 2")


def make_perturber(spec: PerturbSpec):
    """String-to-string callable for the given spec, with a fresh cache."""
    if spec.family == "reverse":
        return reverse
    if spec.family == "evenodd":
        return even_odd_shuffle
    if spec.family == "oddeven":
        return odd_even_shuffle
    if spec.family == "detshuffle":
        cache = PermutationCache(kind="detshuffle", seed=spec.seed)
        return lambda y: deterministic_shuffle(y, cache)
    cache = PermutationCache(kind="klocal", seed=spec.seed)
    return lambda y: k_local_shuffle(y, spec.k, cache)


def make_inverse_perturber(spec: PerturbSpec):
    if spec.family == "reverse":
        return reverse
    if spec.family == "evenodd":
        def inv_eo(y):
            y = np.asarray(y)
            out = np.empty_like(y)
            n_even = len(y) // 2
            out[1::2] = y[:n_even]
            out[0::2] = y[n_even:]
            return out
        return inv_eo
    if spec.family == "oddeven":
        def inv_oe(y):
            y = np.asarray(y)
            out = np.empty_like(y)
            n_odd = (len(y) + 1) // 2
            out[0::2] = y[:n_odd]
            out[1::2] = y[n_odd:]
            return out
        return inv_oe
    if spec.family == "detshuffle":
        cache = PermutationCache(kind="detshuffle", seed=spec.seed)

        def inv_ds(y):
            y = np.asarray(y)
            if len(y) < 2:
                return y.copy()
            return y[cache.inverse((len(y),))]
        return inv_ds
    cache = PermutationCache(kind="klocal", seed=spec.seed)

    def inv_kl(y):
        y = np.asarray(y)
        out = np.empty_like(y)
        for i0 in range(0, len(y), spec.k):
            ell = min(spec.k, len(y) - i0)
            perm = cache.inverse((spec.k, i0 // spec.k + 1, ell))
            out[i0:i0 + ell] = y[i0:i0 + ell][perm]
        return out
    return inv_kl


def perturb_corpus(corpus: Corpus, spec: PerturbSpec) -> Corpus:
    """Apply the perturbation string-wise, preserving order."""
    f = make_perturber(spec)
    meta = dict(corpus.metadata)
    meta["perturbation"] = {"family": spec.family, "seed": spec.seed, "k": spec.k}
    return Corpus(strings=tuple(f(s) for s in corpus.strings), metadata=meta)
