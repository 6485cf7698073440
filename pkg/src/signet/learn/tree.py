"""CART classification trees (Gini) and bagged random forests."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, EmptyData
from ..rng import stream

_TIE_RTOL = 1e-12


def _targets(y):
    y = np.asarray(y)
    if np.all(np.isin(y, (-1, 1))):
        return (y > 0).astype(np.int64)
    return y.astype(np.int64)


def split_score(n_left, pos_left, n_right, pos_right):
    """Sum of per-child ``sum_c count_c^2 / n_child``; larger means lower weighted Gini."""
    neg_left = n_left - pos_left
    neg_right = n_right - pos_right
    return (pos_left**2 + neg_left**2) / n_left + (pos_right**2 + neg_right**2) / n_right


def best_split(X, t, min_leaf=1, features=None):
    """Best ``(feature, threshold, score)`` for the rows ``X``, ``t``; ``None`` if no
    split leaves ``min_leaf`` rows on both sides.

    Candidate thresholds are midpoints between consecutive distinct values;
    a row goes left when its value is ``<=`` the threshold. Ties are broken
    by lowest feature index, then lowest threshold. A split that does not
    lower the impurity is still returned (XOR needs one at the root).
    """
    n, d = X.shape
    total_pos = int(t.sum())
    best = None
    for f in range(d) if features is None else sorted(features):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cum = np.cumsum(t[order])
        n_left = np.arange(1, n)
        valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not valid.any():
            continue
        nl = n_left[valid]
        pl = cum[:-1][valid]
        scores = split_score(nl, pl, n - nl, total_pos - pl)
        top = scores.max()
        k = int(np.flatnonzero(scores >= top - _TIE_RTOL * max(1.0, abs(top)))[0])
        pos = np.flatnonzero(valid)[k]
        thr = 0.5 * (xs[pos] + xs[pos + 1])
        sc = float(scores[k])
        if best is None or sc > best[2] + _TIE_RTOL * max(1.0, abs(best[2])):
            best = (f, float(thr), sc)
    return best


@dataclass
class TreeModel:
    """Flat-array binary tree; ``feature[node] == -1`` marks a leaf."""

    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    prob: list = field(default_factory=list)
    n_features: int = 0
    max_depth: int = 8
    min_leaf: int = 5

    kind = "tree"

    def _add_leaf(self, t):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        # Laplace-smoothed probability of the positive class
        self.prob.append((float(t.sum()) + 1.0) / (len(t) + 2.0))
        return len(self.feature) - 1

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def n_leaves(self):
        return sum(1 for f in self.feature if f < 0)

    def apply(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"tree has {self.n_features} features, rows have {X.shape[1]}")
        feat = np.asarray(self.feature)
        thr = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = feat[node]
            inner = f >= 0
            if not inner.any():
                return node
            r = rows[inner]
            go_left = X[r, f[inner]] <= thr[node[inner]]
            node[r] = np.where(go_left, left[node[inner]], right[node[inner]])

    def predict_proba(self, X):
        return np.asarray(self.prob)[self.apply(X)]

    def to_dict(self):
        return {
            "kind": self.kind,
            "feature": list(map(int, self.feature)),
            "threshold": list(map(float, self.threshold)),
            "left": list(map(int, self.left)),
            "right": list(map(int, self.right)),
            "prob": list(map(float, self.prob)),
            "n_features": self.n_features,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
        }

    @classmethod
    def from_dict(cls, d):
        d = {k: v for k, v in d.items() if k != "kind"}
        return cls(**d)


def fit_tree(X, y, max_depth=8, min_leaf=5, max_features=None, rng=None):
    """Greedy CART with Gini impurity.

    ``max_features`` draws that many candidate features (without
    replacement, from ``rng``) at every split; ``None`` considers all.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    t = _targets(y)
    if len(t) == 0 or len(t) < min_leaf:
        raise EmptyData(f"need at least max(1, min_leaf={min_leaf}) rows, got {len(t)}")
    if len(t) != len(X):
        raise DimensionMismatch("X and y disagree on row count")
    d = X.shape[1]
    tree = TreeModel(n_features=d, max_depth=max_depth, min_leaf=min_leaf)

    def grow(idx, depth):
        tt = t[idx]
        pure = tt.min() == tt.max()
        if pure or depth >= max_depth or len(idx) < 2 * min_leaf:
            return tree._add_leaf(tt)
        feats = None
        if max_features is not None and max_features < d:
            feats = rng.choice(d, size=max_features, replace=False)
        split = best_split(X[idx], tt, min_leaf, feats)
        if split is None:
            return tree._add_leaf(tt)
        f, thr, _ = split
        node = len(tree.feature)
        tree.feature.append(f)
        tree.threshold.append(thr)
        tree.left.append(-1)
        tree.right.append(-1)
        tree.prob.append(float("nan"))
        go_left = X[idx, f] <= thr
        tree.left[node] = grow(idx[go_left], depth + 1)
        tree.right[node] = grow(idx[~go_left], depth + 1)
        return node

    grow(np.arange(len(t)), 0)
    return tree


@dataclass
class ForestModel:
    trees: list
    seeds: list
    max_features: int
    bootstrap: bool = True

    kind = "forest"

    @property
    def n_trees(self):
        return len(self.trees)

    def tree_probabilities(self, X):
        return np.vstack([tr.predict_proba(X) for tr in self.trees])

    def predict_proba(self, X):
        """Mean of the per-tree probabilities."""
        return self.tree_probabilities(X).mean(axis=0)

    def to_dict(self):
        return {
            "kind": self.kind,
            "trees": [tr.to_dict() for tr in self.trees],
            "seeds": list(self.seeds),
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            [TreeModel.from_dict(t) for t in d["trees"]],
            list(d["seeds"]),
            d["max_features"],
            d.get("bootstrap", True),
        )


def fit_forest(
    X, y, n_trees=200, seed=0, max_depth=8, min_leaf=5, max_features="sqrt", bootstrap=True
):
    """Bagged CART ensemble, deterministic given ``seed``.

    Tree ``b`` draws its bootstrap rows and split features from its own
    stream, so the ensemble is reproducible regardless of fitting order.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y)
    if n_trees < 1:
        raise ValueError("n_trees must be at least 1")
    if len(y) == 0:
        raise EmptyData("no rows to fit")
    n, d = X.shape
    if max_features == "sqrt":
        m = max(1, int(np.floor(np.sqrt(d))))
    elif max_features is None:
        m = d
    else:
        m = int(max_features)
    trees, seeds = [], []
    for b in range(n_trees):
        rng = stream(seed, "forest", b)
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(fit_tree(X[rows], y[rows], max_depth, min_leaf, m if m < d else None, rng))
        seeds.append(b)
    return ForestModel(trees, seeds, m, bootstrap)
