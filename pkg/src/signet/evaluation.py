"""Cross-validated evaluation of signed link predictors.

Every fold hides its test edges from the network before any structural
feature is computed, fits on the remaining labelled links, and scores the
held-out links. Reports carry per-fold metrics, their unweighted mean and
standard deviation, and metrics pooled over all test predictions.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import InfeasibleSubsample, LengthMismatch, SingleClass, TooFewExamples
from .features import BLOCKS, block_matrix, columns_for, normalize_blocks
from .graph import LinkMask
from .learn import DEFAULT_RULE, decide_all, fit_forest, fit_logistic, fit_tree
from .rng import stream

METRICS = (
    "auc",
    "acc",
    "precision_pos",
    "precision_neg",
    "recall_pos",
    "recall_neg",
    "f1_pos",
    "f1_neg",
)

IMPORTANCE_SUBSETS = (
    ("ei",),
    ("di",),
    ("ip",),
    ("all23",),
    ("ei", "di"),
    ("ei", "ip"),
    ("di", "ip"),
    ("ei", "di", "ip"),
    ("ei", "di", "ip", "all23"),
)

SWEEP_LEVELS = (60, 70, 80, 90, 100)


def worker_count():
    """Worker cap from ``SIGNET_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("SIGNET_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    test_folds: tuple

    def train_indices(self, f):
        others = [t for g, t in enumerate(self.test_folds) if g != f]
        return np.sort(np.concatenate(others)) if others else np.array([], dtype=int)

    def test_indices(self, f):
        return self.test_folds[f]


def stratified_folds(labels, k=10, seed=0):
    """Assign each example to one of ``k`` folds, class by class.

    Each class is shuffled with a seeded stream and dealt round-robin; the
    second class starts dealing where the first stopped so that fold sizes
    differ by at most one overall.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise TooFewExamples("k must be at least 2")
    assignment = np.empty(len(labels), dtype=int)
    start = 0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        if len(idx) < k:
            raise TooFewExamples(f"class {c} has {len(idx)} examples, fewer than k={k}")
        rng = stream(seed, "folds", int(c) % (2**31))
        idx = idx[rng.permutation(len(idx))]
        assignment[idx] = (start + np.arange(len(idx))) % k
        start = (start + len(idx)) % k
    folds = tuple(np.flatnonzero(assignment == f) for f in range(k))
    return FoldPlan(k, seed, folds)


def auc(scores, labels):
    """Probability a random positive outscores a random negative; ties count half."""
    scores = np.asarray(scores, dtype=float)
    pos = np.asarray(labels) > 0
    n_pos = int(pos.sum())
    n_neg = len(pos) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUC needs both classes")
    ranks = rankdata(scores, method="average")
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


@dataclass
class MetricsReport:
    auc: float
    acc: float
    precision_pos: float
    precision_neg: float
    recall_pos: float
    recall_neg: float
    f1_pos: float
    f1_neg: float
    n_undetermined: float = 0

    def as_dict(self):
        return asdict(self)


def _div(a, b):
    return a / b if b else 0.0


def _f1(p, r):
    return 2 * p * r / (p + r) if p + r else 0.0


def metrics(decisions, probabilities, labels):
    decisions = np.asarray(decisions)
    probabilities = np.asarray(probabilities, dtype=float)
    labels = np.asarray(labels)
    if not len(decisions) == len(probabilities) == len(labels):
        raise LengthMismatch("decisions, probabilities and labels must align")
    det = decisions != 0
    tp = int(np.sum((decisions == 1) & (labels == 1)))
    fp = int(np.sum((decisions == 1) & (labels == -1)))
    tn = int(np.sum((decisions == -1) & (labels == -1)))
    fn = int(np.sum((decisions == -1) & (labels == 1)))
    p_pos, p_neg = _div(tp, tp + fp), _div(tn, tn + fn)
    r_pos, r_neg = _div(tp, tp + fn), _div(tn, tn + fp)
    return MetricsReport(
        auc=auc(probabilities, labels),
        acc=_div(tp + tn, int(det.sum())),
        precision_pos=p_pos,
        precision_neg=p_neg,
        recall_pos=r_pos,
        recall_neg=r_neg,
        f1_pos=_f1(p_pos, r_pos),
        f1_neg=_f1(p_neg, r_neg),
        n_undetermined=int((~det).sum()),
    )


def mean_report(reports):
    return MetricsReport(
        **{m: float(np.mean([getattr(r, m) for r in reports])) for m in METRICS},
        n_undetermined=float(np.mean([r.n_undetermined for r in reports])),
    )


def std_report(reports):
    return MetricsReport(
        **{m: float(np.std([getattr(r, m) for r in reports])) for m in METRICS},
        n_undetermined=float(np.std([r.n_undetermined for r in reports])),
    )


@dataclass(frozen=True)
class ClassifierConfig:
    kind: str = "logistic"
    lam: float = 1.0
    max_depth: int = 8
    min_leaf: int = 5
    n_trees: int = 200
    balanced: bool = False

    KINDS = ("logistic", "tree", "forest", "majority", "random")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown classifier {self.kind!r}; choose from {self.KINDS}")


def baseline_majority(labels_train):
    """Constant predictor of the modal training sign.

    Returns ``predict(n) -> (probabilities, decisions)``; the probability is
    the training prevalence of positive links.
    """
    labels_train = np.asarray(labels_train)
    if len(labels_train) == 0:
        raise TooFewExamples("majority baseline needs training labels")
    prevalence = float(np.mean(labels_train > 0))
    modal = 1 if prevalence >= 0.5 else -1

    def predict(n):
        return np.full(n, prevalence), np.full(n, modal, dtype=int)

    return predict


def baseline_random(seed, rule=DEFAULT_RULE):
    """Uniform random probabilities, decided by ``rule``."""
    rng = stream(seed, "random-baseline")

    def predict(n):
        p = rng.random(n)
        return p, decide_all(p, rule)

    return predict


def fit_classifier(config, X, y, seed=0):
    if config.kind == "logistic":
        return fit_logistic(X, y, config.lam, balanced=config.balanced)
    if config.kind == "tree":
        return fit_tree(X, y, config.max_depth, config.min_leaf)
    if config.kind == "forest":
        return fit_forest(X, y, config.n_trees, seed, config.max_depth, config.min_leaf)
    raise ValueError(f"{config.kind} is not a trainable classifier")


@dataclass
class CVReport:
    blocks: tuple
    classifier: ClassifierConfig
    k: int
    seed: int
    x_percent: float
    folds: list
    mean: MetricsReport
    std: MetricsReport
    pooled: MetricsReport
    extra: dict = field(default_factory=dict)


class CrossValidator:
    """Cross-validation over the labelled links of one dataset.

    Structural features are computed per fold (and per subsampling level)
    and cached, so several block subsets and classifiers can be evaluated
    on the same folds without recomputation.
    """

    def __init__(self, sources, k=10, seed=0, rule=DEFAULT_RULE):
        self.sources = sources
        net = sources.network
        self.pairs = net.pairs()
        self.labels = np.array([net.sign_of(i, j) for i, j in self.pairs], dtype=int)
        self.k = k
        self.seed = seed
        self.rule = rule
        self.plan = stratified_folds(self.labels, k, seed)
        self._static = {}
        self._fold_cache = {}

    def training_rows(self, f, x_percent=100):
        """Training indices of fold ``f`` after keeping ``x_percent``% of each class,
        and the indices dropped."""
        train = self.plan.train_indices(f)
        if x_percent >= 100:
            return train, np.array([], dtype=int)
        if not 0 < x_percent <= 100:
            raise InfeasibleSubsample(f"x must be in (0, 100], got {x_percent}")
        rng = stream(self.seed, "subsample", f)
        keep, drop = [], []
        for c in (1, -1):
            idx = train[self.labels[train] == c]
            idx = idx[rng.permutation(len(idx))]
            n_keep = int(round(len(idx) * x_percent / 100.0))
            if n_keep == 0:
                raise InfeasibleSubsample(f"{x_percent}% of class {c} rounds to zero links")
            keep.append(idx[:n_keep])
            drop.append(idx[n_keep:])
        return np.sort(np.concatenate(keep)), np.sort(np.concatenate(drop))

    def fold_mask(self, f, x_percent=100):
        _, dropped = self.training_rows(f, x_percent)
        hidden = [self.pairs[r] for r in self.plan.test_indices(f)]
        hidden += [self.pairs[r] for r in dropped]
        return LinkMask(frozenset(hidden))

    def _static_block(self, block):
        if block not in self._static:
            self._static[block] = block_matrix(block, self.pairs, self.sources)
        return self._static[block]

    def _block_rows(self, block, f, x_percent, rows):
        if block in ("ei", "ip"):
            return self._static_block(block)[rows]
        key = (block, f, x_percent)
        cached = self._fold_cache.get(key)
        if cached is None:
            train, _ = self.training_rows(f, x_percent)
            needed = np.concatenate([train, self.plan.test_indices(f)])
            mask = self.fold_mask(f, x_percent)
            mat = block_matrix(block, [self.pairs[r] for r in needed], self.sources, mask)
            cached = dict(zip(needed.tolist(), mat))
            self._fold_cache[key] = cached
        width = len(columns_for((block,)))
        return np.array([cached[r] for r in rows.tolist()]).reshape(len(rows), width)

    def fold_matrices(self, blocks, f, x_percent=100):
        train, _ = self.training_rows(f, x_percent)
        test = self.plan.test_indices(f)
        Xtr = np.hstack([self._block_rows(b, f, x_percent, train) for b in blocks])
        Xte = np.hstack([self._block_rows(b, f, x_percent, test) for b in blocks])
        return Xtr, self.labels[train], Xte, self.labels[test]

    def _run_fold(self, f, blocks, classifier, x_percent):
        test = self.plan.test_indices(f)
        ytest = self.labels[test]
        if classifier.kind == "majority":
            train, _ = self.training_rows(f, x_percent)
            probs, dec = baseline_majority(self.labels[train])(len(test))
        elif classifier.kind == "random":
            probs, dec = baseline_random(self.seed * 1000003 + f, self.rule)(len(test))
        else:
            Xtr, ytr, Xte, ytest = self.fold_matrices(blocks, f, x_percent)
            model = fit_classifier(classifier, Xtr, ytr, seed=self.seed * 1000003 + f)
            probs = model.predict_proba(Xte)
            dec = decide_all(probs, self.rule)
        return metrics(dec, probs, ytest), probs, dec, ytest

    def run(self, blocks, classifier=ClassifierConfig(), x_percent=100):
        blocks = normalize_blocks(blocks)
        for b in blocks:
            if b in ("ei", "ip"):
                self._static_block(b)
        folds = range(self.k)
        if worker_count() > 1:
            # warm per-fold caches sequentially; fitting may then run concurrently
            for f in folds:
                if classifier.kind not in ("majority", "random"):
                    self.fold_matrices(blocks, f, x_percent)
            with ThreadPoolExecutor(worker_count()) as ex:
                results = list(ex.map(lambda f: self._run_fold(f, blocks, classifier, x_percent), folds))
        else:
            results = [self._run_fold(f, blocks, classifier, x_percent) for f in folds]
        reports = [r[0] for r in results]
        pooled = metrics(
            np.concatenate([r[2] for r in results]),
            np.concatenate([r[1] for r in results]),
            np.concatenate([r[3] for r in results]),
        )
        return CVReport(
            blocks, classifier, self.k, self.seed, x_percent, reports,
            mean_report(reports), std_report(reports), pooled,
        )


def run_cv(sources, blocks, classifier=ClassifierConfig(), k=10, seed=0, rule=DEFAULT_RULE, x_percent=100):
    return CrossValidator(sources, k, seed, rule).run(blocks, classifier, x_percent)


def sparsity_sweep(sources, blocks, classifier=ClassifierConfig(), x_levels=SWEEP_LEVELS, k=10, seed=0, rule=DEFAULT_RULE, validator=None):
    """Mean AUC when each fold trains on ``x``% of its positive and negative links.

    Links left out of training are also hidden from the network, so the
    structural features see a sparser graph. The kept subsets are nested:
    a smaller ``x`` keeps a prefix of the same shuffled order.
    """
    cv = validator or CrossValidator(sources, k, seed, rule)
    rows = []
    for x in x_levels:
        report = cv.run(blocks, classifier, x)
        rows.append((x, report.mean.auc, report))
    return rows


def importance_matrix(sources, k=10, seed=0, rule=DEFAULT_RULE, lam=1.0, n_trees=200, subsets=IMPORTANCE_SUBSETS, validator=None):
    """Cross-validated logistic and random-forest metrics for each block subset.

    Returns rows ``(subset, classifier_kind, CVReport)`` in subset order,
    logistic before forest.
    """
    cv = validator or CrossValidator(sources, k, seed, rule)
    rows = []
    for subset in subsets:
        for cfg in (ClassifierConfig("logistic", lam=lam), ClassifierConfig("forest", n_trees=n_trees)):
            rows.append((subset, cfg.kind, cv.run(subset, cfg)))
    return rows


def subset_name(blocks):
    names = {"ei": "EI", "di": "DI", "ip": "IP", "all23": "All23"}
    ordered = [b for b in BLOCKS if b in blocks]
    if "all23" in ordered and len(ordered) > 1:
        ordered = ["all23"] + [b for b in ordered if b != "all23"]
    return "+".join(names[b] for b in ordered)
