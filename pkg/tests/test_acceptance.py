"""End-to-end acceptance suite.

Each test here encodes one release gate with its stated tolerance; the rest
of the test modules cover the same code at unit granularity.
"""

import collections
import json
import time

import numpy as np
import pytest

import oracles
from locent.cli import dispatch
from locent.entropy import global_entropy, m_local_entropy, next_symbol_entropy
from locent.experiment import (
    GridProtocol,
    pearson,
    permutation_test_pearson,
    run_grid,
    run_table1,
)
from locent import _kernels
from locent.generate import GenConfig, random_dpfsa
from locent.matrices import (
    build_matrices,
    infix_weight,
    mean_length,
    prefix_prob,
    string_prob,
)
from locent.ngram import plugin_m_local_entropy
from locent.perturb import (
    PerturbSpec,
    make_inverse_perturber,
    make_perturber,
    perturb_corpus,
)
from locent.pfsa import save as save_pfsa
from locent.rng import derive_key
from locent.sampling import sample_corpus

from conftest import REF, make_cycle_automaton, make_t1


def tiny_bank(n=20, mu=0.25):
    """Small automata whose full string distribution is enumerable: per-state
    halting 1/(mu+1) = 0.8, so mass beyond length 14 is 0.2^15 < 1e-10."""
    shapes = [(1, 2), (2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (4, 3)]
    out = []
    for i in range(n):
        Q, K = shapes[i % len(shapes)]
        out.append(random_dpfsa(GenConfig(
            num_states=Q, alphabet_size=K, target_mean_length=mu,
            topology_seed=5000 + i, weight_seed=6000 + i)))
    return out


def all_strings(K, max_len=2):
    yield []
    for a in range(K):
        yield [a]
        for b in range(K):
            yield [a, b]


def test_closed_form_oracle_equivalence():
    t0 = time.monotonic()
    for pfsa in tiny_bank(20):
        stats = oracles.enumerate_stats(pfsa, max_len=14)
        assert stats["mass"] >= 1.0 - 1e-9
        mats = build_matrices(pfsa)
        K = pfsa.alphabet_size
        for y in all_strings(K):
            assert string_prob(mats, y) == pytest.approx(
                oracles.oracle_string_prob(stats, y), abs=1e-6)
            assert prefix_prob(mats, y) == pytest.approx(
                oracles.oracle_prefix_prob(stats, y), abs=1e-6)
            assert infix_weight(mats, y) == pytest.approx(
                oracles.oracle_infix_weight(stats, y), abs=1e-6)
        assert mean_length(mats) == pytest.approx(
            oracles.oracle_mean_length(stats), abs=1e-6)
        assert global_entropy(pfsa, mats).value == pytest.approx(
            oracles.oracle_global_entropy(stats), abs=1e-6)
        assert next_symbol_entropy(pfsa, mats).value == pytest.approx(
            oracles.oracle_next_symbol_entropy(stats), abs=1e-6)
        for m in (1, 2, 3):
            assert m_local_entropy(pfsa, mats, m).value == pytest.approx(
                oracles.oracle_m_local_entropy(stats, m), abs=1e-6)
    assert time.monotonic() - t0 < 60.0


def test_reference_automaton_frozen_values():
    t1 = make_t1()
    mats = build_matrices(t1)

    # the frozen numbers are re-confirmed by both oracles at every run
    series = oracles.SeriesOracle(t1)
    stats = oracles.enumerate_stats(t1, max_len=24)  # string probs are exact
    checks = [
        (string_prob(mats, []), REF["string_eps"],
         [series.string_prob([]), oracles.oracle_string_prob(stats, [])]),
        (prefix_prob(mats, [1]), REF["prefix_b"], [series.prefix_prob([1])]),
        (infix_weight(mats, [0]), REF["infix_a"], [series.infix_weight([0])]),
        (infix_weight(mats, [1]), REF["infix_b"], [series.infix_weight([1])]),
        (mean_length(mats), REF["mean_length"], [series.mean_length()]),
        (next_symbol_entropy(t1, mats).value, REF["next_symbol_nats"],
         [series.next_symbol_entropy()]),
        (global_entropy(t1, mats).value, REF["global_nats"],
         [series.global_entropy()]),
        (m_local_entropy(t1, mats, 2).value, REF["two_local_nats"],
         [series.m_local_entropy(2)]),
    ]
    for implemented, frozen, oracle_values in checks:
        for ov in oracle_values:
            assert ov == pytest.approx(frozen, abs=1e-6)
        assert implemented == pytest.approx(frozen, abs=1e-6)


# MRE per (m, corpus size) from the published estimator-validation table;
# obtained error must stay within 2x per cell
PUBLISHED_MRE = {
    (2, 50_000): 0.0004, (2, 200_000): 0.0002,
    (3, 50_000): 0.0036, (3, 200_000): 0.0013,
    (4, 50_000): 0.0363, (4, 200_000): 0.0149,
    (5, 50_000): 0.1382, (5, 200_000): 0.0761,
}


def test_estimator_error_table():
    t0 = time.monotonic()
    table, _ = run_table1()
    assert set(table) == set(PUBLISHED_MRE)
    for key, cell in table.items():
        assert cell["mre"] <= 2.0 * PUBLISHED_MRE[key], (key, cell)
    for m in (2, 3, 4, 5):
        assert table[(m, 200_000)]["mre"] < table[(m, 50_000)]["mre"]
    for n in (50_000, 200_000):
        for m in (2, 3, 4):
            assert table[(m, n)]["mre"] < table[(m + 1, n)]["mre"]
    assert time.monotonic() - t0 < 1800.0


def test_per_state_halting_identity():
    configs = [
        GenConfig(num_states=q, alphabet_size=k, target_mean_length=mu,
                  topology_seed=ts, weight_seed=ws)
        for (q, k, mu, ts, ws) in [
            (2, 3, 0.25, 1, 2), (4, 6, 5.0, 3, 4), (8, 16, 20.0, 5, 6),
            (16, 32, 20.0, 7, 8), (8, 48, 35.0, 9, 10), (3, 4, 1.0, 11, 12),
        ]
    ]
    for cfg in configs:
        pfsa = random_dpfsa(cfg)
        np.testing.assert_allclose(
            pfsa.final, 1.0 / (cfg.target_mean_length + 1.0), atol=1e-12)
        assert mean_length(build_matrices(pfsa)) == pytest.approx(
            cfg.target_mean_length, abs=1e-6)


def test_perturbation_suite():
    corpus = sample_corpus(
        random_dpfsa(GenConfig(num_states=4, alphabet_size=6,
                               target_mean_length=12.0,
                               topology_seed=21, weight_seed=22)),
        10_000, seed=23)
    specs = [PerturbSpec("reverse"), PerturbSpec("evenodd"),
             PerturbSpec("oddeven"), PerturbSpec("detshuffle", seed=5),
             PerturbSpec("klocal", seed=5, k=4)]

    def histogram(strings):
        return sorted(collections.Counter(tuple(map(int, s))
                                          for s in strings).values())

    base_hist = histogram(corpus.strings)
    for spec in specs:
        f = make_perturber(spec)
        g = make_inverse_perturber(spec)
        perturbed = [f(s) for s in corpus.strings]
        for orig, out in zip(corpus.strings, perturbed):
            assert len(out) == len(orig)
            np.testing.assert_array_equal(np.sort(out), np.sort(orig))
            np.testing.assert_array_equal(g(out), orig)
        assert histogram(perturbed) == base_hist

    # involution and the interleave reference example
    rev = make_perturber(PerturbSpec("reverse"))
    for s in corpus.strings[:500]:
        np.testing.assert_array_equal(rev(rev(s)), s)
    np.testing.assert_array_equal(
        make_perturber(PerturbSpec("evenodd"))(np.array([1, 2, 3, 4, 5])),
        [2, 4, 1, 3, 5])


def test_perturbation_entropy_trend():
    ks = (3, 4, 5, 6, 7)
    for K, eps in ((4, 0.02), (5, 0.03), (6, 0.02), (7, 0.025), (8, 0.015)):
        pfsa = make_cycle_automaton(K, eps)
        corpus = sample_corpus(pfsa, 3000, seed=100 + K)
        base = plugin_m_local_entropy(corpus, 3).value

        def seed_mean(family, k):
            vals = []
            for seed in range(20):
                spec = PerturbSpec(family=family, seed=seed, k=k)
                shuffled = perturb_corpus(corpus, spec)
                vals.append(plugin_m_local_entropy(shuffled, 3).value)
            vals = np.asarray(vals)
            return vals.mean(), vals.std(ddof=1) / np.sqrt(len(vals))

        kmeans = [seed_mean("klocal", k) for k in ks]
        det_mean, _ = seed_mean("detshuffle", 3)

        assert base < kmeans[0][0]
        for (lo, se_lo), (hi, se_hi) in zip(kmeans[:-1], kmeans[1:]):
            assert hi >= lo - (se_lo + se_hi), (K, kmeans)
        for km, _se in kmeans:
            assert det_mean >= km, (K, det_mean, kmeans)


def test_entropy_learnability_correlation():
    protocol = GridProtocol()
    assert protocol.topologies * protocol.weightings >= 25
    records = run_grid(protocol)
    xs = [r.exact_mlocal for r in records if r.m == 3]
    ys = [r.kl for r in records if r.m == 3]
    assert len(xs) >= 25
    r = pearson(xs, ys)
    p = permutation_test_pearson(xs, ys, n_shuffles=1000, seed=3)
    assert r > 0.0
    assert p < 0.05

    # held-out-scoring sanity: the generating automaton's own average
    # surprisal on a fresh 200K-string sample sits on its exact
    # next-symbol entropy
    nq, K = protocol.cells[0]
    cfg = GenConfig(
        num_states=nq, alphabet_size=K,
        target_mean_length=protocol.mean_length,
        topology_seed=derive_key(protocol.base_seed, 1, nq, K, 0),
        weight_seed=derive_key(protocol.base_seed, 2, nq, K, 0, 0))
    pfsa = random_dpfsa(cfg)
    sample = sample_corpus(pfsa, 200_000, seed=777)
    flat, offsets = sample.flat()
    W = np.zeros((nq, K))
    TGT = np.zeros((nq, K), dtype=np.int64)
    for src, sym, w, dst in pfsa.transitions:
        W[src, sym] = w
        TGT[src, sym] = dst
    total = _kernels.score_corpus_deterministic(
        flat, offsets, W, TGT, np.asarray(pfsa.final),
        int(np.argmax(pfsa.initial)))
    events = sum(len(s) + 1 for s in sample.strings)
    ce = total / events
    exact = next_symbol_entropy(pfsa, build_matrices(pfsa)).value
    assert ce == pytest.approx(exact, abs=0.01)


def test_cli_rerun_byte_identity(tmp_path, capsys):
    t1_path = tmp_path / "t1.json"
    save_pfsa(make_t1(), t1_path)
    grid_cfg = tmp_path / "grid.json"
    grid_cfg.write_text(json.dumps({
        "cells": [[3, 4]], "topologies": 1, "weightings": 2,
        "train_size": 300, "val_size": 80, "test_size": 80,
        "ms": [2, 3], "candidate_orders": [2], "mean_length": 6.0,
    }))

    runs = [
        (["gen-pfsa", "--states", "3", "--alphabet", "4",
          "--topology-seed", "1", "--weight-seed", "2",
          "-o", str(tmp_path / "auto.json")],
         [tmp_path / "auto.json"]),
        (["validate", str(t1_path), "-o", str(tmp_path / "valid.json")],
         [tmp_path / "valid.json"]),
        (["sample", str(tmp_path / "auto.json"), "-n", "400", "--seed", "3",
          "-o", str(tmp_path / "corpus.txt")],
         [tmp_path / "corpus.txt", tmp_path / "corpus.txt.meta.json"]),
        (["perturb", "--family", "klocal", "--k", "3", "--seed", "8",
          "-i", str(tmp_path / "corpus.txt"), "-o", str(tmp_path / "pert.txt")],
         [tmp_path / "pert.txt"]),
        (["entropy", "--exact", "--m", "2", "--base", "bits",
          str(tmp_path / "auto.json"), "-o", str(tmp_path / "exact.txt")],
         [tmp_path / "exact.txt"]),
        (["entropy", "--plugin", "--m", "2", "--base", "bits",
          "-i", str(tmp_path / "corpus.txt"),
          "-o", str(tmp_path / "plugin.txt")],
         [tmp_path / "plugin.txt"]),
        (["learn", "--m", "3", "--smoothing", "addk:0.5",
          "-i", str(tmp_path / "corpus.txt"),
          "-o", str(tmp_path / "model.json")],
         [tmp_path / "model.json"]),
        (["score", "--model", str(tmp_path / "model.json"),
          "-i", str(tmp_path / "corpus.txt"), "--base", "nats",
          "-o", str(tmp_path / "score.txt")],
         [tmp_path / "score.txt"]),
        (["exp", "grid", "--config", str(grid_cfg),
          "--out", str(tmp_path / "records.csv")],
         [tmp_path / "records.csv"]),
    ]
    for argv, outputs in runs:
        assert dispatch(list(argv)) == 0
        capsys.readouterr()
        first = {p: p.read_bytes() for p in outputs}
        sidecar = outputs[0].parent / (outputs[0].name + ".config.json")
        assert sidecar.exists(), argv
        for p in outputs:
            p.write_bytes(b"clobbered\n")
        assert dispatch(["rerun", str(sidecar)]) == 0
        capsys.readouterr()
        for p, content in first.items():
            assert p.read_bytes() == content, (argv, p)
