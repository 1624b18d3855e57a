"""Probabilistic finite-state automata: representation, validation, JSON I/O.

Symbols are integers 0..alphabet_size-1.  A weighted transition is the tuple
(source, symbol, weight, target).  Per-state outgoing weights plus the final
weight sum to one; the initial vector sums to one.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidAutomaton

NORM_TOL = 1e-9
RENORM_TOL = 1e-6
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Violation:
    kind: str  # "initial-sum" | "state-sum" | "weight-range"
    state: int | None
    magnitude: float

    def __str__(self):
        where = "initial vector" if self.state is None else f"state {self.state}"
        return f"{self.kind} at {where}: off by {self.magnitude:.3e}"


@dataclass(frozen=True, eq=False)
class Pfsa:
    alphabet_size: int
    num_states: int
    transitions: tuple  # of (src, sym, weight, dst)
    initial: np.ndarray
    final: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, Pfsa):
            return NotImplemented
        return (
            self.alphabet_size == other.alphabet_size
            and self.num_states == other.num_states
            and self.transitions == other.transitions
            and np.array_equal(self.initial, other.initial)
            and np.array_equal(self.final, other.final)
        )

    def __hash__(self):
        return hash((self.alphabet_size, self.num_states, self.transitions))

    def __post_init__(self):
        object.__setattr__(self, "initial", np.asarray(self.initial, dtype=np.float64))
        object.__setattr__(self, "final", np.asarray(self.final, dtype=np.float64))
        object.__setattr__(self, "transitions", tuple(tuple(t) for t in self.transitions))
        self.initial.setflags(write=False)
        self.final.setflags(write=False)

    @property
    def deterministic(self) -> bool:
        seen = set()
        for src, sym, _w, _dst in self.transitions:
            if (src, sym) in seen:
                return False
            seen.add((src, sym))
        return True

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "alphabet_size": self.alphabet_size,
            "num_states": self.num_states,
            "initial": [float(x) for x in self.initial],
            "final": [float(x) for x in self.final],
            "transitions": [[int(s), int(y), float(w), int(d)] for s, y, w, d in self.transitions],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def validate(pfsa: Pfsa) -> list[Violation]:
    """Every normalization/range violation; an empty list means valid."""
    out = []
    init_sum = float(pfsa.initial.sum())
    if abs(init_sum - 1.0) > NORM_TOL:
        out.append(Violation("initial-sum", None, abs(init_sum - 1.0)))
    for vec, kind in ((pfsa.initial, "initial"), (pfsa.final, "final")):
        for q, w in enumerate(vec):
            if w < -NORM_TOL or w > 1.0 + NORM_TOL:
                out.append(Violation("weight-range", q, float(max(-w, w - 1.0))))
    totals = np.array(pfsa.final, dtype=np.float64)
    for src, sym, w, dst in pfsa.transitions:
        if not (0 <= src < pfsa.num_states and 0 <= dst < pfsa.num_states):
            out.append(Violation("weight-range", src, float("inf")))
            continue
        if not 0 <= sym < pfsa.alphabet_size:
            out.append(Violation("weight-range", src, float("inf")))
            continue
        if w < -NORM_TOL or w > 1.0 + NORM_TOL:
            out.append(Violation("weight-range", src, float(max(-w, w - 1.0))))
        totals[src] += w
    for q in range(pfsa.num_states):
        if abs(totals[q] - 1.0) > NORM_TOL:
            out.append(Violation("state-sum", q, abs(float(totals[q]) - 1.0)))
    return out


def renormalize(pfsa: Pfsa) -> Pfsa:
    """Rescale rows and the initial vector when off by at most 1e-6.

    Intended for serialized data that picked up rounding; anything further
    off than RENORM_TOL is rejected.
    """
    init_sum = float(pfsa.initial.sum())
    if abs(init_sum - 1.0) > RENORM_TOL:
        raise InvalidAutomaton(validate(pfsa))
    totals = np.array(pfsa.final, dtype=np.float64)
    for src, _sym, w, _dst in pfsa.transitions:
        totals[src] += w
    if np.max(np.abs(totals - 1.0)) > RENORM_TOL:
        raise InvalidAutomaton(validate(pfsa))
    transitions = tuple(
        (src, sym, w / totals[src], dst) for src, sym, w, dst in pfsa.transitions
    )
    return Pfsa(
        alphabet_size=pfsa.alphabet_size,
        num_states=pfsa.num_states,
        transitions=transitions,
        initial=pfsa.initial / init_sum,
        final=pfsa.final / totals,
    )


def from_dict(doc: dict, auto_renormalize: bool = False) -> Pfsa:
    if doc.get("version") != FORMAT_VERSION:
        raise InvalidAutomaton([f"unsupported format version {doc.get('version')!r}"])
    pfsa = Pfsa(
        alphabet_size=int(doc["alphabet_size"]),
        num_states=int(doc["num_states"]),
        transitions=tuple((int(s), int(y), float(w), int(d)) for s, y, w, d in doc["transitions"]),
        initial=np.array(doc["initial"], dtype=np.float64),
        final=np.array(doc["final"], dtype=np.float64),
    )
    violations = validate(pfsa)
    if violations:
        if not auto_renormalize:
            raise InvalidAutomaton(violations)
        pfsa = renormalize(pfsa)
        violations = validate(pfsa)
        if violations:
            raise InvalidAutomaton(violations)
    return pfsa


def load(path, auto_renormalize: bool = False) -> Pfsa:
    with open(path, encoding="utf-8") as fh:
        return from_dict(json.load(fh), auto_renormalize=auto_renormalize)


def save(pfsa: Pfsa, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(pfsa.to_json())
        fh.write("\n")
