"""m-local entropy of probabilistic finite-state automata: exact matrix
computation, random generation, sampling, bijective corpus perturbations,
n-gram estimation, and the validation/correlation experiment pipeline."""

from .entropy import EntropyReport, global_entropy, m_local_entropy, next_symbol_entropy
from .generate import GenConfig, random_dpfsa
from .matrices import (
    TransitionMatrices,
    build_matrices,
    infix_weight,
    mean_length,
    next_symbol_given_infix,
    next_symbol_given_prefix,
    prefix_prob,
    string_prob,
)
from .pfsa import Pfsa, validate

__all__ = [
    "EntropyReport", "GenConfig", "Pfsa", "TransitionMatrices",
    "build_matrices", "global_entropy", "infix_weight", "m_local_entropy",
    "mean_length", "next_symbol_entropy", "next_symbol_given_infix",
    "next_symbol_given_prefix", "prefix_prob", "random_dpfsa", "string_prob",
    "validate",
]

__version__ = "0.1.0"
