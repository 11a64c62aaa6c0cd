"""Command-line frontend: expand, optimize, evaluate, stats, baseline.

A run is described by one JSON config file; selected flags override config
values so a single artifact captures everything needed to reproduce a run.
All randomness flows from the recorded seed and outputs land only under the
configured output directory.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import evaluate as ev
from .graph import PropagationParams
from .lexicon import EmotionSet, load_seed_lexicon, write_lexicon_json, write_lexicon_tsv
from .embeddings import load_embeddings
from .optimize import OptimizerConfig, fit_batched, fit_full
from .solver import expand

class ConfigError(ValueError):
    pass


def _atomic_write(path, text):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_json(path, payload):
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


class RunConfig:
    """Validated union of the config file and flag overrides."""

    def __init__(self, data):
        self.data = data

    @classmethod
    def from_args(cls, args):
        data = {}
        if args.config:
            if not os.path.exists(args.config):
                raise ConfigError("config file not found: %s" % args.config)
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        for key in ("seed", "out", "solver", "kernel", "mode"):
            value = getattr(args, key, None)
            if value is not None:
                data[key] = value
        return cls(data)

    def get(self, key, default=None):
        return self.data.get(key, default)

    def require_path(self, key):
        path = self.data.get(key)
        if not path:
            raise ConfigError("config key %r is required" % key)
        if not os.path.exists(path):
            raise ConfigError("%s path does not exist: %s" % (key, path))
        return path

    def out_dir(self):
        out = self.data.get("out")
        if not out:
            raise ConfigError("an output directory ('out') is required")
        os.makedirs(out, exist_ok=True)
        return out

    def emotions(self):
        names = self.data.get("emotions")
        return EmotionSet(names) if names else EmotionSet()

    def propagation_params(self, allow_fit=False):
        has_params = "params" in self.data or "params_file" in self.data
        has_fit = "fit" in self.data
        if has_params and has_fit:
            raise ConfigError("give either fixed params or a fit request, not both")
        if allow_fit:
            if not has_fit:
                raise ConfigError("a 'fit' request is required")
            return None
        if not has_params:
            raise ConfigError("fixed 'params' or a 'params_file' is required")
        if "params_file" in self.data:
            with open(self.data["params_file"], encoding="utf-8") as fh:
                raw = json.load(fh)
        else:
            raw = self.data["params"]
        if self.data.get("kernel"):
            raw = dict(raw, kernel=_kernel_name(self.data["kernel"]))
        return PropagationParams.from_dict(raw)

    def optimizer_config(self):
        fit = dict(self.data.get("fit", {}))
        init = fit.pop("init", None)
        if self.data.get("mode"):
            fit["mode"] = self.data["mode"]
        if self.data.get("seed") is not None:
            fit["rng_seed"] = int(self.data["seed"])
        return OptimizerConfig(**fit), init


def _kernel_name(short):
    return {"cosine": "cosine-logistic", "euclidean": "euclidean-rbf"}.get(short, short)


def _load_inputs(cfg):
    emotions = cfg.emotions()
    store = load_embeddings(cfg.require_path("embeddings"))
    seed = load_seed_lexicon(cfg.require_path("seed_lexicon"), emotions)
    return store, seed, emotions


def cmd_expand(cfg):
    store, seed, emotions = _load_inputs(cfg)
    params = cfg.propagation_params()
    out = cfg.out_dir()
    result = expand(store, seed, emotions, params,
                    solver=cfg.get("solver", "auto"),
                    tol=float(cfg.get("tol", 1e-6)),
                    max_iter=int(cfg.get("max_iter", 1000)))
    tsv = os.path.join(out, "expanded_lexicon.tsv")
    tmp = tsv + ".tmp"
    write_lexicon_tsv(tmp, store.vocab, result.distributions, emotions,
                      result.labeled_mask)
    os.replace(tmp, tsv)
    jsn = os.path.join(out, "expanded_lexicon.json")
    tmp = jsn + ".tmp"
    write_lexicon_json(tmp, store.vocab, result.distributions, emotions,
                       result.labeled_mask)
    os.replace(tmp, jsn)
    _write_json(os.path.join(out, "expand_report.json"), result.sidecar())
    return 0


def cmd_optimize(cfg):
    store, seed, _ = _load_inputs(cfg)
    cfg.propagation_params(allow_fit=True)
    config, init = cfg.optimizer_config()
    out = cfg.out_dir()
    if config.mode == "batch":
        params, trace = fit_batched(store, seed, config, init=init)
    else:
        params, trace = fit_full(store, seed, config, init=init)
    _write_json(os.path.join(out, "params.json"), params.to_dict())
    tmp = os.path.join(out, "trace.csv.tmp")
    trace.to_csv(tmp)
    os.replace(tmp, os.path.join(out, "trace.csv"))
    _write_json(os.path.join(out, "optimize_meta.json"),
                {"optimizer": config.to_dict(),
                 "final_entropy": trace.entropies[-1] if trace.entropies else None})
    return 0


def _class_counts(cfg, emotions):
    counts = cfg.get("class_counts")
    if counts:
        return np.array([float(counts[name]) for name in emotions])
    corpus_path = cfg.get("corpus")
    if corpus_path:
        corpus = ev.load_corpus(corpus_path, emotions)
        return np.array([sum(1 for lab, _ in corpus if lab == name)
                         for name in emotions], dtype=np.float64)
    raise ConfigError("majority/prior baselines need 'class_counts' or a 'corpus'")


def cmd_evaluate(cfg):
    store, seed, emotions = _load_inputs(cfg)
    out = cfg.out_dir()
    k = int(cfg.get("k_folds", 10))
    rng_seed = int(cfg.get("seed", 0))
    counts = _class_counts(cfg, emotions)

    expanders = [ev.baseline_expander("uniform"),
                 ev.baseline_expander("majority", counts),
                 ev.baseline_expander("prior", counts)]
    labels = ["uniform", "majority", "prior"]
    params = cfg.propagation_params()
    expanders.append(ev.label_prop_expander(
        params, solver=cfg.get("solver", "auto"),
        tol=float(cfg.get("tol", 1e-6)), max_iter=int(cfg.get("max_iter", 1000))))
    labels.append("label-propagation")
    if cfg.get("batch_params") or cfg.get("batch_params_file"):
        raw = cfg.get("batch_params")
        if raw is None:
            with open(cfg.get("batch_params_file"), encoding="utf-8") as fh:
                raw = json.load(fh)
        expanders.append(ev.label_prop_expander(
            PropagationParams.from_dict(raw), solver=cfg.get("solver", "auto")))
        labels.append("batch-label-propagation")

    rows = []
    for label, expander in zip(labels, expanders):
        report = ev.cross_validate(store, seed, emotions, expander, k=k,
                                   rng_seed=rng_seed)
        report.method = label
        rows.append(report.to_dict())

    _write_json(os.path.join(out, "eval_report.json"),
                {"k": k, "rng_seed": rng_seed, "rows": rows})
    lines = ["%-28s %10s" % ("Lexicon expansion", "KL divergence"),
             "-" * 40]
    lines += ["%-28s %13.4f" % (r["method"], r["overall"]) for r in rows]
    _atomic_write(os.path.join(out, "eval_table.txt"), "\n".join(lines) + "\n")
    return 0


def cmd_stats(cfg):
    emotions = cfg.emotions()
    seed = load_seed_lexicon(cfg.require_path("seed_lexicon"), emotions)
    corpus = ev.load_corpus(cfg.require_path("corpus"), emotions)
    out = cfg.out_dir()
    stats = ev.corpus_lexicon_stats(corpus, seed)
    _write_json(os.path.join(out, "stats.json"), stats)
    return 0


def cmd_baseline(cfg):
    emotions = cfg.emotions()
    seed = load_seed_lexicon(cfg.require_path("seed_lexicon"), emotions)
    corpus = ev.load_corpus(cfg.require_path("corpus"), emotions)
    out = cfg.out_dir()
    lexicon = {t: seed.distribution(t) for t in seed.entries}
    m = len(emotions)
    lines = []
    gold, predicted = [], []
    for label, tokens in corpus:
        dist, no_evidence = ev.count_classify(tokens, lexicon, m)
        pred = emotions.names[int(np.argmax(dist))]
        gold.append(label)
        predicted.append(pred)
        lines.append("%s\t%s\t%s\t%d" % (
            label, pred, "\t".join("%.17g" % p for p in dist), int(no_evidence)))
    _atomic_write(os.path.join(out, "classifications.tsv"),
                  "\n".join(lines) + ("\n" if lines else ""))
    _write_json(os.path.join(out, "baseline_metrics.json"),
                ev.micro_prf(gold, predicted))
    return 0


COMMANDS = {"expand": cmd_expand, "optimize": cmd_optimize,
            "evaluate": cmd_evaluate, "stats": cmd_stats,
            "baseline": cmd_baseline}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="emolex",
        description="Semi-supervised emotion lexicon expansion")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run config")
        p.add_argument("--seed", type=int, help="override the run rng seed")
        p.add_argument("--out", help="override the output directory")
        p.add_argument("--solver", choices=["iterative", "closed", "auto"])
        p.add_argument("--kernel", choices=["cosine", "euclidean"])
        p.add_argument("--mode", choices=["full", "batch"])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](RunConfig.from_args(args))
    except Exception as exc:  # machine-readable failure for any module error
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
