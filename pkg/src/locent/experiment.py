"""Experiment orchestration: estimator validation over a PFSA bank and the
entropy-vs-learner-difficulty grid, plus the correlation statistics.

Record CSVs are the exchange format between this module, the CLI, and the
plotting front end; the schema is versioned in a leading comment line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .entropy import m_local_entropy, next_symbol_entropy
from .errors import DegenerateInput
from .generate import GenConfig, random_dpfsa
from .matrices import build_matrices
from .ngram import heldout_cross_entropy, kl_estimate, plugin_m_local_entropy, train_model
from .rng import SplitMix64, derive_key
from .sampling import sample_corpus, split_corpus

CSV_HEADER_COMMENT = "# locent-records v1"
RECORD_FIELDS = (
    "fingerprint", "num_states", "alphabet_size", "topology_seed", "weight_seed",
    "cell", "m", "exact_mlocal", "estimated_mlocal", "learner", "learner_order",
    "learner_ce", "kl", "train_size", "val_size", "test_size", "log_base",
)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


@dataclass(frozen=True)
class ExperimentRecord:
    fingerprint: str
    num_states: int
    alphabet_size: int
    topology_seed: int
    weight_seed: int
    cell: str
    m: int
    exact_mlocal: float
    estimated_mlocal: float
    learner: str
    learner_order: int
    learner_ce: float
    kl: float
    train_size: int
    val_size: int
    test_size: int
    log_base: str

    def row(self) -> str:
        return ",".join(_fmt(getattr(self, f)) for f in RECORD_FIELDS)


def write_records_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER_COMMENT + "\n")
        fh.write(",".join(RECORD_FIELDS) + "\n")
        for rec in records:
            fh.write(rec.row() + "\n")


def read_records_csv(path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(dict(zip(header, line.split(","))))
    return rows


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


def pearson(xs, ys) -> float:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if len(xs) < 3 or len(xs) != len(ys):
        raise DegenerateInput("need at least 3 paired points")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float((dx * dx).sum())
    syy = float((dy * dy).sum())
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInput("zero variance")
    return float((dx * dy).sum()) / math.sqrt(sxx * syy)


def ols_fit(xs, ys):
    """(slope, intercept, r_squared) of the least-squares line."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if len(xs) < 3 or len(xs) != len(ys):
        raise DegenerateInput("need at least 3 paired points")
    dx = xs - xs.mean()
    sxx = float((dx * dx).sum())
    if sxx == 0.0:
        raise DegenerateInput("zero variance in xs")
    slope = float((dx * (ys - ys.mean())).sum()) / sxx
    intercept = float(ys.mean() - slope * xs.mean())
    resid = ys - (slope * xs + intercept)
    sst = float(((ys - ys.mean()) ** 2).sum())
    if sst == 0.0:
        raise DegenerateInput("zero variance in ys")
    r_squared = 1.0 - float((resid ** 2).sum()) / sst
    return slope, intercept, r_squared


def permutation_test_pearson(xs, ys, n_shuffles: int = 1000, seed: int = 0) -> float:
    """One-sided p-value for r > 0 under random re-pairings."""
    r_obs = pearson(xs, ys)
    ys = np.asarray(ys, dtype=np.float64)
    rng = SplitMix64(derive_key(seed, len(ys)))
    hits = 0
    for _ in range(n_shuffles):
        perm = np.array(rng.permutation(len(ys)))
        if pearson(xs, ys[perm]) >= r_obs:
            hits += 1
    return (1 + hits) / (1 + n_shuffles)


# ---------------------------------------------------------------------------
# Estimator validation (MAE/MRE table)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Table1Protocol:
    states: tuple = (8, 16)
    alphabets: tuple = (32, 48)
    topology_seeds: tuple = (101, 102)
    weight_seeds: tuple = (201, 202)
    corpus_sizes: tuple = (50_000, 200_000)
    ms: tuple = (2, 3, 4, 5)
    mean_length: float = 20.0
    sample_seed: int = 7


def run_table1(protocol: Table1Protocol = Table1Protocol(), progress=None):
    """MAE/MRE of the plug-in estimator per (m, corpus size), averaged over
    the automaton bank.  Returns {(m, size): {"mae": .., "mre": ..,
    "mae_std": .., "mre_std": ..}} plus the raw per-automaton errors."""
    errors = {(m, n): [] for m in protocol.ms for n in protocol.corpus_sizes}
    for nq in protocol.states:
        for K in protocol.alphabets:
            for ts in protocol.topology_seeds:
                for ws in protocol.weight_seeds:
                    cfg = GenConfig(num_states=nq, alphabet_size=K,
                                    target_mean_length=protocol.mean_length,
                                    topology_seed=derive_key(ts, nq, K),
                                    weight_seed=derive_key(ws, nq, K))
                    pfsa = random_dpfsa(cfg)
                    mats = build_matrices(pfsa)
                    exact = {m: m_local_entropy(pfsa, mats, m).value for m in protocol.ms}
                    for n in protocol.corpus_sizes:
                        corpus = sample_corpus(
                            pfsa, n, derive_key(protocol.sample_seed, ts, ws, nq, K, n))
                        for m in protocol.ms:
                            est = plugin_m_local_entropy(corpus, m).value
                            errors[(m, n)].append((est, exact[m]))
                        if progress:
                            progress(f"|Q|={nq} |S|={K} seeds=({ts},{ws}) n={n}")
    table = {}
    for key, pairs in errors.items():
        ae = np.array([abs(e - x) for e, x in pairs])
        re = np.array([abs(e - x) / x for e, x in pairs])
        table[key] = {
            "mae": float(ae.mean()), "mae_std": float(ae.std()),
            "mre": float(re.mean()), "mre_std": float(re.std()),
        }
    return table, errors


def write_table1_csv(table, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER_COMMENT + "\n")
        fh.write("m,corpus_size,mae,mae_std,mre,mre_std\n")
        for (m, n), cell in sorted(table.items()):
            fh.write(
                f"{m},{n},{_fmt(cell['mae'])},{_fmt(cell['mae_std'])},"
                f"{_fmt(cell['mre'])},{_fmt(cell['mre_std'])}\n"
            )


# ---------------------------------------------------------------------------
# Learner grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridProtocol:
    cells: tuple = ((16, 32),)          # (num_states, alphabet_size)
    topologies: int = 5
    weightings: int = 5
    train_size: int = 20_000
    val_size: int = 5_000
    test_size: int = 5_000
    ms: tuple = (2, 3, 4, 5)
    candidate_orders: tuple = (2, 3, 4)  # learner m; context length is m-1
    smoothing: str = "absdisc"
    smoothing_param: float = 0.75
    mean_length: float = 20.0
    base_seed: int = 11

    @classmethod
    def from_dict(cls, doc: dict) -> "GridProtocol":
        kwargs = {}
        for f in cls.__dataclass_fields__:
            if f in doc:
                v = doc[f]
                if f in ("cells",):
                    v = tuple(tuple(c) for c in v)
                elif isinstance(cls.__dataclass_fields__[f].default, tuple):
                    v = tuple(v)
                kwargs[f] = v
        return cls(**kwargs)


def run_grid(protocol: GridProtocol = GridProtocol(), progress=None):
    """One record per (automaton, m): exact m-local entropy, plug-in estimate
    on the pooled corpus, and the selected n-gram learner's held-out
    cross-entropy and KL on the test split."""
    records = []
    n_total = protocol.train_size + protocol.val_size + protocol.test_size
    for nq, K in protocol.cells:
        cell = f"Q{nq}-S{K}"
        for ti in range(protocol.topologies):
            for wi in range(protocol.weightings):
                cfg = GenConfig(
                    num_states=nq, alphabet_size=K,
                    target_mean_length=protocol.mean_length,
                    topology_seed=derive_key(protocol.base_seed, 1, nq, K, ti),
                    weight_seed=derive_key(protocol.base_seed, 2, nq, K, ti, wi),
                )
                pfsa = random_dpfsa(cfg)
                mats = build_matrices(pfsa)
                corpus = sample_corpus(
                    pfsa, n_total, derive_key(protocol.base_seed, 3, nq, K, ti, wi))
                train, val, test = split_corpus(
                    corpus, (protocol.train_size, protocol.val_size, protocol.test_size))

                best = None
                for order in protocol.candidate_orders:
                    model = train_model(train, order, protocol.smoothing,
                                        protocol.smoothing_param)
                    ce_val = heldout_cross_entropy(model, val)
                    if best is None or ce_val < best[1]:
                        best = (model, ce_val, order)
                model, _, order = best
                ce_test = heldout_cross_entropy(model, test)
                h_next = next_symbol_entropy(pfsa, mats).value
                kl = kl_estimate(ce_test, h_next)

                for m in protocol.ms:
                    records.append(ExperimentRecord(
                        fingerprint=pfsa.fingerprint(),
                        num_states=nq, alphabet_size=K,
                        topology_seed=cfg.topology_seed, weight_seed=cfg.weight_seed,
                        cell=cell, m=m,
                        exact_mlocal=m_local_entropy(pfsa, mats, m).value,
                        estimated_mlocal=plugin_m_local_entropy(corpus, m).value,
                        learner=f"{protocol.smoothing}-ngram",
                        learner_order=order,
                        learner_ce=ce_test, kl=kl,
                        train_size=protocol.train_size,
                        val_size=protocol.val_size,
                        test_size=protocol.test_size,
                        log_base="nats",
                    ))
                if progress:
                    progress(f"{cell} topology {ti} weighting {wi}: order={order} kl={kl:.4f}")
    return records


def stats_from_records(rows: list[dict], x_spec: str, y_col: str):
    """Pearson/OLS over record rows; x_spec is a column name or 'mlocal:M'."""
    if x_spec.startswith("mlocal:"):
        m = int(x_spec.split(":", 1)[1])
        rows = [r for r in rows if int(r["m"]) == m]
        x_col = "exact_mlocal"
    else:
        x_col = x_spec
    xs = [float(r[x_col]) for r in rows]
    ys = [float(r[y_col]) for r in rows]
    r = pearson(xs, ys)
    slope, intercept, r2 = ols_fit(xs, ys)
    return {"r": r, "slope": slope, "intercept": intercept, "r_squared": r2,
            "n": len(xs)}
