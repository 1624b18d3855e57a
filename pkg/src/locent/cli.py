"""Command-line entry point.

Every run writes its fully resolved configuration (defaults included) to a
sidecar JSON; `locent rerun sidecar.json` replays a run byte-for-byte.
Exit codes: 0 success, 1 usage error, 2 data/validation error.  Numeric
results print in scientific notation with 9 significant digits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import entropy as ent
from . import experiment, ngram, perturb, pfsa as pfsa_mod, sampling
from .matrices import build_matrices
from .errors import LocentError
from .generate import GenConfig, random_dpfsa


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    return f"{x:.8e}"


def _build_parser() -> _Parser:
    p = _Parser(prog="locent", description=__doc__)
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("LOCENT_THREADS", "0")) or None,
                   help="cap internal parallelism (recorded; kernels are single-threaded)")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen-pfsa", help="generate a random deterministic PFSA")
    g.add_argument("--states", type=int, required=True)
    g.add_argument("--alphabet", type=int, required=True)
    g.add_argument("--mean-length", type=float, default=20.0)
    g.add_argument("--topology-seed", type=int, required=True)
    g.add_argument("--weight-seed", type=int, required=True)
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--sidecar", default=None)

    v = sub.add_parser("validate", help="validate an automaton file")
    v.add_argument("automaton")
    v.add_argument("--renormalize", action="store_true",
                   help="rescale rows off by at most 1e-6")
    v.add_argument("-o", "--output", default=None,
                   help="write the (possibly renormalized) automaton here")
    v.add_argument("--sidecar", default=None)

    s = sub.add_parser("sample", help="sample a corpus from an automaton")
    s.add_argument("automaton")
    s.add_argument("-n", "--num-strings", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--sidecar", default=None)

    pt = sub.add_parser("perturb", help="apply a bijective perturbation to a corpus")
    pt.add_argument("--family", choices=perturb.FAMILIES, required=True)
    pt.add_argument("--k", type=int, default=3)
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("-i", "--input", required=True)
    pt.add_argument("-o", "--output", required=True)
    pt.add_argument("--sidecar", default=None)

    e = sub.add_parser("entropy", help="exact or plug-in entropy")
    mode = e.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--plugin", action="store_true")
    e.add_argument("--kind", choices=("mlocal", "global", "next"), default="mlocal")
    e.add_argument("--m", type=int, default=2)
    e.add_argument("--base", choices=("bits", "nats"), required=True)
    e.add_argument("--budget", type=int, default=ent.DEFAULT_CONTEXT_BUDGET)
    e.add_argument("automaton", nargs="?")
    e.add_argument("-i", "--input", default=None, help="corpus file (plug-in mode)")
    e.add_argument("-o", "--output", default=None)
    e.add_argument("--sidecar", default=None)

    l = sub.add_parser("learn", help="train a smoothed n-gram model")
    l.add_argument("--m", type=int, required=True)
    l.add_argument("--smoothing", default="absdisc:0.75",
                   help="policy[:param], e.g. absdisc:0.75 or addk:0.5")
    l.add_argument("-i", "--input", required=True)
    l.add_argument("-o", "--output", required=True)
    l.add_argument("--sidecar", default=None)

    sc = sub.add_parser("score", help="held-out per-symbol cross-entropy")
    sc.add_argument("--model", required=True)
    sc.add_argument("-i", "--input", required=True)
    sc.add_argument("--base", choices=("bits", "nats"), required=True)
    sc.add_argument("-o", "--output", default=None)
    sc.add_argument("--sidecar", default=None)

    ex = sub.add_parser("exp", help="experiment pipelines")
    exsub = ex.add_subparsers(dest="exp_cmd", required=True)
    t1 = exsub.add_parser("table1", help="estimator-validation error table")
    t1.add_argument("--out", required=True, help="output directory")
    t1.add_argument("--sidecar", default=None)
    gr = exsub.add_parser("grid", help="entropy-vs-learner grid")
    gr.add_argument("--config", default=None, help="JSON protocol overrides")
    gr.add_argument("--out", required=True, help="records CSV path")
    gr.add_argument("--sidecar", default=None)
    st = exsub.add_parser("stats", help="Pearson/OLS over a records CSV")
    st.add_argument("--in", dest="input", required=True)
    st.add_argument("--x", required=True, help="column name or mlocal:M")
    st.add_argument("--y", required=True)
    st.add_argument("--sidecar", default=None)

    rr = sub.add_parser("rerun", help="replay a run from its config sidecar")
    rr.add_argument("sidecar_file")
    return p


def _resolved_argv(args) -> list[str]:
    """Canonical argv with every option explicit, for the sidecar."""
    cmd = args.cmd
    out = [cmd] if cmd != "exp" else ["exp", args.exp_cmd]
    spec = {
        "gen-pfsa": [("--states", "states"), ("--alphabet", "alphabet"),
                     ("--mean-length", "mean_length"), ("--topology-seed", "topology_seed"),
                     ("--weight-seed", "weight_seed"), ("-o", "output")],
        "validate": [(None, "automaton"), ("--renormalize", "renormalize"),
                     ("-o", "output")],
        "sample": [(None, "automaton"), ("-n", "num_strings"), ("--seed", "seed"),
                   ("-o", "output")],
        "perturb": [("--family", "family"), ("--k", "k"), ("--seed", "seed"),
                    ("-i", "input"), ("-o", "output")],
        "entropy": [("--exact", "exact"), ("--plugin", "plugin"), ("--kind", "kind"),
                    ("--m", "m"), ("--base", "base"), ("--budget", "budget"),
                    (None, "automaton"), ("-i", "input"), ("-o", "output")],
        "learn": [("--m", "m"), ("--smoothing", "smoothing"), ("-i", "input"),
                  ("-o", "output")],
        "score": [("--model", "model"), ("-i", "input"), ("--base", "base"),
                  ("-o", "output")],
        ("exp", "table1"): [("--out", "out")],
        ("exp", "grid"): [("--config", "config"), ("--out", "out")],
        ("exp", "stats"): [("--in", "input"), ("--x", "x"), ("--y", "y")],
    }
    key = (cmd, args.exp_cmd) if cmd == "exp" else cmd
    for flag, attr in spec[key]:
        val = getattr(args, attr, None)
        if flag is None:
            if val is not None:
                out.append(str(val))
        elif isinstance(val, bool):
            if val:
                out.append(flag)
        elif val is not None:
            out.extend([flag, str(val)])
    return out


def _write_sidecar(args, default_stem: str) -> None:
    path = getattr(args, "sidecar", None)
    if path is None:
        base = getattr(args, "output", None) or getattr(args, "out", None)
        path = f"{base}.config.json" if base else f"locent-{default_stem}.config.json"
    doc = {"tool": "locent", "version": 1, "argv": _resolved_argv(args)}
    if args.threads:
        doc["threads"] = args.threads
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args) -> int:
    cmd = args.cmd
    if cmd == "rerun":
        with open(args.sidecar_file, encoding="utf-8") as fh:
            doc = json.load(fh)
        return dispatch(doc["argv"])

    stem = cmd if cmd != "exp" else f"exp-{args.exp_cmd}"
    _write_sidecar(args, stem)

    if cmd == "gen-pfsa":
        cfg = GenConfig(num_states=args.states, alphabet_size=args.alphabet,
                        target_mean_length=args.mean_length,
                        topology_seed=args.topology_seed,
                        weight_seed=args.weight_seed)
        pfsa_mod.save(random_dpfsa(cfg), args.output)
        return 0

    if cmd == "validate":
        auto = pfsa_mod.load(args.automaton, auto_renormalize=args.renormalize)
        if args.output:
            pfsa_mod.save(auto, args.output)
        sys.stdout.write("ok\n")
        return 0

    if cmd == "sample":
        auto = pfsa_mod.load(args.automaton)
        corpus = sampling.sample_corpus(auto, args.num_strings, args.seed)
        sampling.save_corpus(corpus, args.output)
        return 0

    if cmd == "perturb":
        corpus = sampling.load_corpus(args.input)
        spec = perturb.PerturbSpec(family=args.family, seed=args.seed, k=args.k)
        sampling.save_corpus(perturb.perturb_corpus(corpus, spec), args.output)
        return 0

    if cmd == "entropy":
        if args.plugin:
            if not args.input:
                raise UsageError("--plugin needs a corpus via -i")
            corpus = sampling.load_corpus(args.input)
            report = ngram.plugin_m_local_entropy(corpus, args.m, base=args.base)
        else:
            if not args.automaton:
                raise UsageError("--exact needs an automaton file")
            auto = pfsa_mod.load(args.automaton)
            mats = build_matrices(auto)
            if args.kind == "global":
                report = ent.global_entropy(auto, mats, base=args.base)
            elif args.kind == "next":
                report = ent.next_symbol_entropy(auto, mats, base=args.base)
            else:
                report = ent.m_local_entropy(auto, mats, args.m, base=args.base,
                                             context_budget=args.budget)
        _emit(_fmt(report.value) + "\n", args.output)
        return 0

    if cmd == "learn":
        policy, _, param = args.smoothing.partition(":")
        corpus = sampling.load_corpus(args.input)
        model = ngram.train_model(corpus, args.m, policy=policy,
                                  param=float(param) if param else 0.75)
        model.save(args.output)
        return 0

    if cmd == "score":
        model = ngram.SmoothedModel.load(args.model)
        corpus = sampling.load_corpus(args.input)
        ce = ngram.heldout_cross_entropy(model, corpus, base=args.base)
        _emit(_fmt(ce) + "\n", args.output)
        return 0

    if cmd == "exp":
        if args.exp_cmd == "table1":
            os.makedirs(args.out, exist_ok=True)
            table, _ = experiment.run_table1(
                progress=lambda msg: print(msg, file=sys.stderr))
            experiment.write_table1_csv(table, os.path.join(args.out, "table1.csv"))
            return 0
        if args.exp_cmd == "grid":
            proto = experiment.GridProtocol()
            if args.config:
                with open(args.config, encoding="utf-8") as fh:
                    proto = experiment.GridProtocol.from_dict(json.load(fh))
            records = experiment.run_grid(
                proto, progress=lambda msg: print(msg, file=sys.stderr))
            experiment.write_records_csv(records, args.out)
            return 0
        rows = experiment.read_records_csv(args.input)
        stats = experiment.stats_from_records(rows, args.x, args.y)
        for key in ("r", "slope", "intercept", "r_squared"):
            sys.stdout.write(f"{key} {_fmt(stats[key])}\n")
        return 0

    raise UsageError(f"unknown command {cmd!r}")


def dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (LocentError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
