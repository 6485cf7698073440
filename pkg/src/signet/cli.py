"""Command-line entry point.

Every verb reads its settings from defaults, then an optional JSON file
(``--config``), then flags, later sources winning. Inputs are either a
dataset directory (``--data``) or a synthetic network generated on the
fly from the ``synth`` settings and the root seed.

Each run writes its reports plus ``manifest.json`` into the output
directory. Reports are byte-identical across reruns with the same config
and inputs; the wall-clock timestamp lives only in the manifest.
"""

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigInvalid, DataError, UnknownVerb, UsageError
from .evaluation import (
    IMPORTANCE_SUBSETS,
    METRICS,
    SWEEP_LEVELS,
    ClassifierConfig,
    CrossValidator,
    importance_matrix,
    sparsity_sweep,
    subset_name,
)
from .features import Sources, assemble, columns_for, expected_signs_for, normalize_blocks
from .io import load_dataset, write_dataset
from .learn import (
    DecisionRule,
    LogisticModel,
    coefficient_report,
    fit_forest,
    fit_logistic,
    fit_tree,
    model_from_dict,
    model_to_dict,
)
from .personality import compute_scores
from .synth import SynthConfig, synth_generate
from .theories import verify_all

VERBS = (
    "ingest",
    "synth",
    "personality",
    "features",
    "train",
    "evaluate",
    "sweep-sparsity",
    "importance",
    "verify-theories",
    "report-coefficients",
)

DEFAULTS = {
    "data": None,
    "out": "signet-out",
    "seed": 0,
    "users": 500,
    "items": 200,
    "density": 0.01,
    "pos_neg_ratio": 4.0,
    "emotion": 1.0,
    "diffusion": 1.0,
    "personality": 1.0,
    "noise": 0.0,
    "ratings_per_user": 20,
    "regime": "auto",
    "blocks": "ei,di,ip",
    "classifier": "logistic",
    "lam": 1.0,
    "max_depth": 8,
    "min_leaf": 5,
    "n_trees": 200,
    "balanced": False,
    "k": 10,
    "eps_p": 0.5,
    "eps_n": 0.5,
    "x_levels": list(SWEEP_LEVELS),
    "k_strength": 10,
    "k_personality": 20,
    "model": None,
}

# locations only; inputs are hashed by content
_NOT_HASHED = ("out", "data", "model")

_TYPES = {
    "seed": int, "users": int, "items": int, "ratings_per_user": int, "max_depth": int,
    "min_leaf": int, "n_trees": int, "k": int, "k_strength": int, "k_personality": int,
    "density": float, "pos_neg_ratio": float, "emotion": float, "diffusion": float,
    "personality": float, "noise": float, "lam": float, "eps_p": float, "eps_n": float,
    "balanced": bool,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _parser():
    top = _Parser(prog="signet", description="Signed link prediction toolkit.")
    top.add_argument("--version", action="version", version=f"signet {__version__}")
    sub = top.add_subparsers(dest="verb", metavar="VERB")
    S = argparse.SUPPRESS

    def verb(name, help_):
        p = sub.add_parser(name, help=help_, argument_default=S)
        p.add_argument("--config", help="JSON file of settings; flags win")
        p.add_argument("-o", "--out", help="output directory")
        p.add_argument("--seed", type=int)
        return p

    def data(p):
        p.add_argument("--data", help="dataset directory; synthesizes one when absent")
        p.add_argument("--users", type=int)
        p.add_argument("--items", type=int)
        p.add_argument("--density", type=float)
        p.add_argument("--pos-neg-ratio", dest="pos_neg_ratio", type=float)
        p.add_argument("--emotion", type=float)
        p.add_argument("--diffusion", type=float)
        p.add_argument("--personality", type=float)
        p.add_argument("--noise", type=float)
        p.add_argument("--ratings-per-user", dest="ratings_per_user", type=int)
        p.add_argument("--regime", choices=("auto", "rating", "emotion"))

    def model(p):
        p.add_argument("--blocks")
        p.add_argument("--classifier", choices=ClassifierConfig.KINDS)
        p.add_argument("--lambda", "--lam", dest="lam", type=float)
        p.add_argument("--max-depth", dest="max_depth", type=int)
        p.add_argument("--min-leaf", dest="min_leaf", type=int)
        p.add_argument("--n-trees", dest="n_trees", type=int)
        p.add_argument("--balanced", action="store_const", const=True)
        p.add_argument("--eps-p", dest="eps_p", type=float)
        p.add_argument("--eps-n", dest="eps_n", type=float)

    def cv(p):
        p.add_argument("--k", type=int, help="number of folds")

    p = verb("ingest", "validate a dataset directory and write it back normalized")
    p.add_argument("--data")
    p.add_argument("--regime", choices=("auto", "rating", "emotion"))
    data(verb("synth", "generate a synthetic dataset"))
    data(verb("personality", "per-user optimism and pessimism"))
    p = verb("features", "feature matrix of every labelled link")
    data(p)
    p.add_argument("--blocks")
    p = verb("train", "fit a classifier on every labelled link")
    data(p), model(p)
    p = verb("evaluate", "k-fold cross-validated metrics")
    data(p), model(p), cv(p)
    p = verb("sweep-sparsity", "AUC as the training share shrinks")
    data(p), model(p), cv(p)
    p.add_argument("--x", dest="x_levels", help="comma-separated percentages")
    p = verb("importance", "metrics of every block subset, logistic and forest")
    data(p), model(p), cv(p)
    p = verb("verify-theories", "hypothesis tests of the social theories")
    data(p)
    p.add_argument("--k-strength", dest="k_strength", type=int)
    p.add_argument("--k-personality", dest="k_personality", type=int)
    p = verb("report-coefficients", "odds ratios and confidence intervals of a logistic model")
    data(p), model(p)
    p.add_argument("--model", help="model JSON written by 'signet train'; fits one when absent")
    return top


def _coerce(key, value):
    kind = _TYPES.get(key)
    if kind is None or value is None:
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigInvalid(key, "expected true or false")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigInvalid(key, f"expected a number, got {value!r}")
    if kind is int and float(value) != int(value):
        raise ConfigInvalid(key, f"expected an integer, got {value!r}")
    return kind(value)


def resolve_config(verb, flags):
    """Merge defaults, the ``--config`` file and flags; validate the result."""
    cfg = dict(DEFAULTS)
    path = flags.pop("config", None)
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigInvalid("config", f"file {path} does not exist")
        except json.JSONDecodeError as exc:
            raise ConfigInvalid("config", f"not valid JSON ({exc})")
        if not isinstance(doc, dict):
            raise ConfigInvalid("config", "top level must be an object")
        for key, value in doc.items():
            key = key.replace("-", "_")
            if key == "lambda":
                key = "lam"
            if key not in DEFAULTS:
                raise ConfigInvalid(key, "unknown setting")
            cfg[key] = value
    cfg.update(flags)
    for key in list(cfg):
        cfg[key] = _coerce(key, cfg[key])
    if isinstance(cfg["x_levels"], str):
        try:
            cfg["x_levels"] = [float(x) for x in cfg["x_levels"].split(",") if x]
        except ValueError:
            raise ConfigInvalid("x_levels", "expected comma-separated numbers")
    cfg["x_levels"] = [int(x) if float(x).is_integer() else float(x) for x in cfg["x_levels"]]
    if not cfg["x_levels"] or any(not 0 < x <= 100 for x in cfg["x_levels"]):
        raise ConfigInvalid("x_levels", "percentages must lie in (0, 100]")
    try:
        cfg["blocks"] = ",".join(normalize_blocks(cfg["blocks"]))
    except (ValueError, AttributeError) as exc:
        raise ConfigInvalid("blocks", str(exc))
    if cfg["classifier"] not in ClassifierConfig.KINDS:
        raise ConfigInvalid("classifier", f"choose from {ClassifierConfig.KINDS}")
    if cfg["regime"] not in ("auto", "rating", "emotion"):
        raise ConfigInvalid("regime", "choose from auto, rating, emotion")
    for key in ("eps_p", "eps_n"):
        if not 0 <= cfg[key] <= 1:
            raise ConfigInvalid(key, "must lie in [0, 1]")
    if cfg["eps_p"] < cfg["eps_n"]:
        raise ConfigInvalid("eps_p", f"must be >= eps_n ({cfg['eps_n']})")
    if cfg["lam"] < 0:
        raise ConfigInvalid("lam", "must be non-negative")
    if cfg["k"] < 2:
        raise ConfigInvalid("k", "need at least 2 folds")
    for key in ("k_strength", "k_personality", "n_trees", "max_depth", "min_leaf"):
        if cfg[key] < 1:
            raise ConfigInvalid(key, "must be at least 1")
    if cfg["seed"] < 0:
        raise ConfigInvalid("seed", "must be non-negative")
    for key in ("data", "model"):
        if cfg[key] is not None and not Path(cfg[key]).exists():
            raise ConfigInvalid(key, f"path {cfg[key]} does not exist")
    if verb == "ingest" and cfg["data"] is None:
        raise ConfigInvalid("data", "ingest needs a dataset directory")
    return cfg


def config_hash(cfg, inputs=()):
    """Short digest of the settings and of the input contents (not their paths)."""
    body = {k: v for k, v in cfg.items() if k not in _NOT_HASHED}
    body["inputs"] = sorted([p.name, _sha256(p)] for p in inputs)
    text = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _input_files(cfg):
    files = []
    if cfg["data"] is not None:
        files += sorted(p for p in Path(cfg["data"]).iterdir() if p.is_file() and p.suffix == ".tsv")
    if cfg["model"] is not None:
        files.append(Path(cfg["model"]))
    return files


def synth_config(cfg):
    return SynthConfig(
        n_users=cfg["users"],
        n_items=cfg["items"],
        density=cfg["density"],
        pos_neg_ratio=cfg["pos_neg_ratio"],
        emotion=cfg["emotion"],
        diffusion=cfg["diffusion"],
        personality=cfg["personality"],
        noise=cfg["noise"],
        seed=cfg["seed"],
        ratings_per_user=cfg["ratings_per_user"],
    )


class _Run:
    """Output bookkeeping of one invocation."""

    def __init__(self, verb, cfg):
        self.verb = verb
        self.cfg = cfg
        self.inputs = _input_files(cfg)
        self.hash = config_hash(cfg, self.inputs)
        self.out = Path(cfg["out"])
        self.out.mkdir(parents=True, exist_ok=True)
        self.outputs = []

    def header(self):
        return f"# signet {self.verb} config_hash={self.hash} seed={self.cfg['seed']}\n"

    def tsv(self, name, columns, rows):
        path = self.out / name
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.header())
            fh.write("\t".join(columns) + "\n")
            for row in rows:
                fh.write("\t".join(_fmt(v) for v in row) + "\n")
        self.outputs.append(path)
        return path

    def json(self, name, doc):
        path = self.out / name
        doc = dict(doc, config_hash=self.hash, seed=self.cfg["seed"])
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.outputs.append(path)
        return path

    def adopt(self, paths):
        self.outputs.extend(Path(p) for p in paths)

    def manifest(self, extra=None):
        doc = {
            "signet_version": __version__,
            "verb": self.verb,
            "config": self.cfg,
            "config_hash": self.hash,
            "seed": self.cfg["seed"],
            "inputs": {str(p): _sha256(p) for p in self.inputs},
            "outputs": {p.name: _sha256(p) for p in self.outputs},
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        if extra:
            doc.update(extra)
        path = self.out / "manifest.json"
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _load(cfg):
    """Network, ledger, ratings and labels from ``--data`` or the generator."""
    if cfg["data"] is not None:
        ds = load_dataset(cfg["data"])
        return ds.network, ds.ledger, ds.ratings, list(ds.ids.names)
    data = synth_generate(synth_config(cfg))
    return data.network, data.ledger, data.ratings, list(data.network.labels)


def _scores(cfg, ledger, ratings, n_users):
    regime = cfg["regime"]
    if regime == "auto":
        regime = "rating" if ratings is not None else "emotion"
    if regime == "rating":
        if ratings is None:
            raise ConfigInvalid("regime", "rating regime needs ratings.tsv")
        return compute_scores(ratings, "rating", n_users)
    return compute_scores(ledger, "emotion", n_users)


def _sources(cfg, blocks=None):
    net, ledger, ratings, labels = _load(cfg)
    blocks = normalize_blocks(blocks or cfg["blocks"])
    scores = None
    if "ip" in blocks:
        scores = _scores(cfg, ledger, ratings, net.n_users)
    return Sources(net, ledger, scores), labels


def _classifier(cfg):
    return ClassifierConfig(
        cfg["classifier"], cfg["lam"], cfg["max_depth"], cfg["min_leaf"], cfg["n_trees"], cfg["balanced"]
    )


def _rule(cfg):
    return DecisionRule(cfg["eps_p"], cfg["eps_n"])


def _labelled(net):
    pairs = net.pairs()
    return pairs, [net.sign_of(i, j) for i, j in pairs]


def _fit(cfg, blocks, sources):
    kind = cfg["classifier"]
    if kind not in ("logistic", "tree", "forest"):
        raise ConfigInvalid("classifier", f"{kind} is a baseline and cannot be trained")
    pairs, y = _labelled(sources.network)
    fm = assemble(pairs, y, blocks, sources)
    if kind == "logistic":
        model = fit_logistic(
            fm.X, fm.y, cfg["lam"], balanced=cfg["balanced"], feature_names=fm.columns
        )
        model.eps_p, model.eps_n = cfg["eps_p"], cfg["eps_n"]
    elif kind == "tree":
        model = fit_tree(fm.X, fm.y, cfg["max_depth"], cfg["min_leaf"])
    else:
        model = fit_forest(fm.X, fm.y, cfg["n_trees"], cfg["seed"], cfg["max_depth"], cfg["min_leaf"])
    return model, fm


def cmd_ingest(run):
    cfg = run.cfg
    ds = load_dataset(cfg["data"])
    paths = write_dataset(run.out, ds.network, ds.ledger, ds.ratings, labels=list(ds.ids.names))
    run.adopt(paths)
    n_pos = sum(1 for *_, s in ds.network.edges() if s > 0)
    run.json(
        "summary.json",
        {
            "users": ds.network.n_users,
            "links": ds.network.n_edges,
            "positive_links": n_pos,
            "negative_links": ds.network.n_edges - n_pos,
            "positive_emotion_pairs": len(ds.ledger.pairs("pos")),
            "negative_emotion_pairs": len(ds.ledger.pairs("neg")),
            "ratings": 0 if ds.ratings is None else len(ds.ratings.ratings),
        },
    )
    return {}


def cmd_synth(run):
    scfg = synth_config(run.cfg)
    data = synth_generate(scfg)
    paths = write_dataset(run.out, data.network, data.ledger, data.ratings, data.helpfulness)
    run.adopt(paths)
    return {"synth_config": scfg.to_dict()}


def cmd_personality(run):
    net, ledger, ratings, labels = _load(run.cfg)
    scores = _scores(run.cfg, ledger, ratings, net.n_users)
    rows = [
        (labels[u], scores.regime, scores.o[u], scores.p[u],
         scores.optimism_support[u], scores.pessimism_support[u])
        for u in range(net.n_users)
    ]
    run.tsv("personality.tsv", ["user", "regime", "o", "p", "n_low", "n_high"], rows)
    return {}


def cmd_features(run):
    sources, labels = _sources(run.cfg)
    pairs, y = _labelled(sources.network)
    fm = assemble(pairs, y, run.cfg["blocks"], sources)
    rows = (
        [labels[i], labels[j]] + [float(x) for x in fm.X[r]] + [int(fm.y[r])]
        for r, (i, j) in enumerate(pairs)
    )
    run.tsv("features.tsv", ["src", "dst"] + fm.columns + ["label"], rows)
    return {}


def cmd_train(run):
    sources, _ = _sources(run.cfg)
    model, fm = _fit(run.cfg, run.cfg["blocks"], sources)
    run.json(
        "model.json",
        model_to_dict(model, blocks=list(fm.blocks), feature_names=fm.columns, n_train=len(fm)),
    )
    return {}


def _report_row(name, rep):
    return [name] + [getattr(rep, m) for m in METRICS] + [rep.n_undetermined]


_METRIC_COLUMNS = list(METRICS) + ["n_undetermined"]


def cmd_evaluate(run):
    cfg = run.cfg
    sources, _ = _sources(cfg)
    cv = CrossValidator(sources, cfg["k"], cfg["seed"], _rule(cfg))
    rep = cv.run(cfg["blocks"], _classifier(cfg))
    rows = [_report_row(f"fold{f}", r) for f, r in enumerate(rep.folds)]
    rows += [_report_row("mean", rep.mean), _report_row("std", rep.std), _report_row("pooled", rep.pooled)]
    run.tsv("metrics.tsv", ["row"] + _METRIC_COLUMNS, rows)
    run.json(
        "metrics.json",
        {
            "blocks": list(rep.blocks),
            "classifier": _classifier(cfg).kind,
            "k": rep.k,
            "folds": [r.as_dict() for r in rep.folds],
            "mean": rep.mean.as_dict(),
            "std": rep.std.as_dict(),
            "pooled": rep.pooled.as_dict(),
        },
    )
    return {}


def cmd_sweep_sparsity(run):
    cfg = run.cfg
    sources, _ = _sources(cfg)
    rows = sparsity_sweep(
        sources, cfg["blocks"], _classifier(cfg), cfg["x_levels"], cfg["k"], cfg["seed"], _rule(cfg)
    )
    run.tsv("sweep.tsv", ["x"] + _METRIC_COLUMNS, [_report_row(x, rep.mean) for x, _, rep in rows])
    run.json(
        "sweep.json",
        {"blocks": cfg["blocks"].split(","), "levels": [{"x": x, "mean": rep.mean.as_dict()} for x, _, rep in rows]},
    )
    return {}


def cmd_importance(run):
    cfg = run.cfg
    sources, _ = _sources(cfg, blocks="all")
    rows = importance_matrix(
        sources, cfg["k"], cfg["seed"], _rule(cfg), cfg["lam"], cfg["n_trees"], IMPORTANCE_SUBSETS
    )
    run.tsv(
        "importance.tsv",
        ["subset", "classifier"] + _METRIC_COLUMNS,
        [[subset_name(s)] + _report_row(kind, rep.mean) for s, kind, rep in rows],
    )
    run.json(
        "importance.json",
        {"rows": [{"subset": subset_name(s), "classifier": kind, "mean": rep.mean.as_dict()} for s, kind, rep in rows]},
    )
    return {}


def cmd_verify_theories(run):
    cfg = run.cfg
    net, ledger, ratings, _ = _load(cfg)
    scores = _scores(cfg, ledger, ratings, net.n_users)
    results = verify_all(net, ledger, scores, cfg["seed"], cfg["k_strength"], cfg["k_personality"])
    rows, doc = [], []
    for name, res in results:
        if isinstance(res, DataError):
            rows.append([name, "nan", "nan", "nan", 0, 0, 0, 0, 0, type(res).__name__])
            doc.append({"test": name, "error": type(res).__name__, "message": str(res)})
            continue
        rows.append([
            name, res.t_statistic, res.degrees_of_freedom, res.p_value_one_tailed,
            res.rejects(0.01), res.rejects(0.05), res.n_a, res.n_b, res.skipped, "",
        ])
        doc.append({
            "test": name, "t": res.t_statistic, "df": res.degrees_of_freedom,
            "p": res.p_value_one_tailed, "n_a": res.n_a, "n_b": res.n_b, "skipped": res.skipped,
        })
    columns = ["test", "t", "df", "p", "reject_0.01", "reject_0.05", "n_a", "n_b", "skipped", "note"]
    run.tsv("theories.tsv", columns, rows)
    run.json("theories.json", {"tests": doc})
    return {}


def cmd_report_coefficients(run):
    cfg = run.cfg
    if cfg["model"] is not None:
        doc = json.loads(Path(cfg["model"]).read_text(encoding="utf-8"))
        try:
            model = model_from_dict(doc)
        except (ValueError, KeyError) as exc:
            raise ConfigInvalid("model", str(exc))
        blocks = normalize_blocks(doc.get("blocks") or cfg["blocks"])
    else:
        if cfg["classifier"] != "logistic":
            raise ConfigInvalid("classifier", "coefficients need a logistic model")
        sources, _ = _sources(cfg)
        model, _ = _fit(cfg, cfg["blocks"], sources)
        blocks = normalize_blocks(cfg["blocks"])
    if not isinstance(model, LogisticModel):
        raise ConfigInvalid("model", "coefficients need a logistic model")
    names = model.feature_names or columns_for(blocks)
    signs = expected_signs_for(blocks) if len(columns_for(blocks)) == len(model.weights) else None
    report = coefficient_report(model, names, signs)
    columns = ["feature", "coefficient", "std_error", "odds_ratio", "ci_low", "ci_high", "expected_sign", "agreement"]
    run.tsv(
        "coefficients.tsv",
        columns,
        [[r.name, r.coefficient, r.std_error, r.odds_ratio, r.ci_low, r.ci_high, r.expected_sign, r.agreement]
         for r in report],
    )
    return {}


COMMANDS = {
    "ingest": cmd_ingest,
    "synth": cmd_synth,
    "personality": cmd_personality,
    "features": cmd_features,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "sweep-sparsity": cmd_sweep_sparsity,
    "importance": cmd_importance,
    "verify-theories": cmd_verify_theories,
    "report-coefficients": cmd_report_coefficients,
}


def dispatch(argv):
    """Run one verb; returns the process exit code."""
    parser = _parser()
    try:
        if argv and not argv[0].startswith("-") and argv[0] not in VERBS:
            raise UnknownVerb(
                f"{parser.format_usage()}signet: error: unknown verb {argv[0]!r}; choose from {', '.join(VERBS)}"
            )
        ns = parser.parse_args(argv)
        if ns.verb is None:
            raise UsageError(parser.format_usage() + "signet: error: a verb is required")
        flags = {k: v for k, v in vars(ns).items() if k != "verb"}
        cfg = resolve_config(ns.verb, flags)
        run = _Run(ns.verb, cfg)
        extra = COMMANDS[ns.verb](run)
        run.manifest(extra)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"signet: data error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        # unreadable or missing dataset file
        print(f"signet: data error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        # --help and --version
        return 0 if exc.code in (None, 0) else 1
    return 0


def main(argv=None):
    sys.exit(dispatch(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
