"""Pairwise feature blocks and labelled feature matrices.

Blocks, in canonical column order:

``ei``     6 emotion proportions: pair negative/positive share, the source's
           outgoing negative/positive share, the target's incoming
           negative/positive share.
``di``     2 diffusion proportions: among the source's positive followees
           (excluding the target), the share with a negative / positive link
           to the target.
``ip``     4 personality scores: source optimism, source pessimism, target
           optimism, target pessimism.
``all23``  7 degree features and 16 signed directed triad counts.

Structural blocks (``di``, ``all23``) never read the edge between the pair
being described, so hiding that edge leaves the row unchanged. Every 0/0
ratio is 0.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import MissingSource, UnknownUser
from .graph import NO_MASK

BLOCKS = ("ei", "di", "ip", "all23")
BLOCK_WIDTH = {"ei": 6, "di": 2, "ip": 4, "all23": 23}

# (source side, target side) relation codes: f = edge points along the path
# i -> w -> j, b = edge points against it; p/n = sign.
TRIAD_CODES = [
    (d1, d2, s1, s2) for d1 in "fb" for d2 in "fb" for s1 in "pn" for s2 in "pn"
]
TRIAD_INDEX = {code: n for n, code in enumerate(TRIAD_CODES)}

COLUMNS = {
    "ei": [f"ei{n}" for n in range(1, 7)],
    "di": ["di1", "di2"],
    "ip": ["ip1", "ip2", "ip3", "ip4"],
    "all23": [f"deg{n}" for n in range(1, 8)]
    + [f"triad_{d1}{d2}_{s1}{s2}" for d1, d2, s1, s2 in TRIAD_CODES],
}

# Sign of the coefficient each theory predicts for the positive class.
EXPECTED_SIGNS = {
    "ei": [-1, 1, -1, 1, -1, 1],
    "di": [-1, 1],
    "ip": [1, -1, 1, -1],
    "all23": [0] * 23,
}


def _ratio(num, den):
    return num / den if den else 0.0


def ei_features(ledger, i, j):
    if not (0 <= i < ledger.n_users and 0 <= j < ledger.n_users):
        raise UnknownUser(i if not 0 <= i < ledger.n_users else j)
    p_ij = ledger.pos.get((i, j), 0)
    n_ij = ledger.neg.get((i, j), 0)
    p_i, n_i = ledger.out_pos.get(i, 0), ledger.out_neg.get(i, 0)
    p_j, n_j = ledger.in_pos.get(j, 0), ledger.in_neg.get(j, 0)
    return [
        _ratio(n_ij, n_ij + p_ij),
        _ratio(p_ij, n_ij + p_ij),
        _ratio(n_i, n_i + p_i),
        _ratio(p_i, n_i + p_i),
        _ratio(n_j, n_j + p_j),
        _ratio(p_j, n_j + p_j),
    ]


def di_features(net, i, j, mask=NO_MASK):
    if i == j:
        raise ValueError("di_features needs two distinct users")
    followees = net.positive_out_neighbors(i, mask)
    net._check(j)
    followees.discard(j)
    if not followees:
        return [0.0, 0.0]
    neg = pos = 0
    for k in followees:
        s = net.sign_of(k, j, mask)
        if s > 0:
            pos += 1
        elif s < 0:
            neg += 1
    n = len(followees)
    return [neg / n, pos / n]


def ip_features(scores, i, j):
    return [scores.optimism(i), scores.pessimism(i), scores.optimism(j), scores.pessimism(j)]


def _relations(out_sign, in_sign):
    rel = []
    if out_sign:
        rel.append(("f", "p" if out_sign > 0 else "n"))
    if in_sign:
        rel.append(("b", "p" if in_sign > 0 else "n"))
    return rel


def triad_counts(net, i, j, mask=NO_MASK):
    """16 counts over (relation of i with w, relation of w with j) for shared w."""
    cells = [0] * 16
    for cn in net.common_neighbor_pairs(i, j, mask):
        left = _relations(cn.u_to_w, cn.w_to_u)
        right = _relations(cn.w_to_v, cn.v_to_w)
        for d1, s1 in left:
            for d2, s2 in right:
                cells[TRIAD_INDEX[(d1, d2, s1, s2)]] += 1
    return cells


def degree_features(net, i, j, mask=NO_MASK):
    """Degrees of source ``i`` (outgoing) and target ``j`` (incoming), without edge i->j,
    plus the number of shared neighbours."""
    out_pos = net.positive_out_neighbors(i, mask) - {j}
    out_neg = net.negative_out_neighbors(i, mask) - {j}
    in_pos = net.positive_in_neighbors(j, mask) - {i}
    in_neg = net.negative_in_neighbors(j, mask) - {i}
    shared = (net.neighbors(i, mask) & net.neighbors(j, mask)) - {i, j}
    return [
        len(out_pos),
        len(out_neg),
        len(in_pos),
        len(in_neg),
        len(out_pos) + len(out_neg),
        len(in_pos) + len(in_neg),
        len(shared),
    ]


def all23_features(net, i, j, mask=NO_MASK):
    if i == j:
        raise ValueError("all23_features needs two distinct users")
    return [float(x) for x in degree_features(net, i, j, mask) + triad_counts(net, i, j, mask)]


@dataclass
class Sources:
    """Inputs the feature blocks read; any may be ``None`` if unused."""

    network: object = None
    ledger: object = None
    scores: object = None


_NEEDS = {"ei": "ledger", "di": "network", "ip": "scores", "all23": "network"}


def normalize_blocks(blocks):
    if isinstance(blocks, str):
        blocks = [b for b in blocks.replace("+", ",").split(",") if b]
    blocks = [b.strip().lower() for b in blocks]
    if blocks == ["all"]:
        return BLOCKS
    unknown = [b for b in blocks if b not in BLOCKS]
    if unknown or not blocks:
        raise ValueError(f"unknown feature blocks {unknown or blocks}; choose from {BLOCKS}")
    return tuple(b for b in BLOCKS if b in blocks)


def block_matrix(block, pairs, sources, mask=NO_MASK):
    """Rows of one block for every pair, as an ``(n, width)`` float array."""
    src = getattr(sources, _NEEDS[block])
    if src is None:
        raise MissingSource(f"block {block!r} needs {_NEEDS[block]}")
    if block == "ei":
        rows = [ei_features(src, i, j) for i, j in pairs]
    elif block == "di":
        rows = [di_features(src, i, j, mask) for i, j in pairs]
    elif block == "ip":
        rows = [ip_features(src, i, j) for i, j in pairs]
    else:
        rows = [all23_features(src, i, j, mask) for i, j in pairs]
    out = np.asarray(rows, dtype=float)
    return out.reshape(len(pairs), BLOCK_WIDTH[block])


def columns_for(blocks):
    return [c for b in blocks for c in COLUMNS[b]]


def expected_signs_for(blocks):
    return [s for b in blocks for s in EXPECTED_SIGNS[b]]


@dataclass
class FeatureMatrix:
    pairs: list
    X: np.ndarray
    y: np.ndarray
    blocks: tuple
    columns: list = field(default=None)

    def __post_init__(self):
        if self.columns is None:
            self.columns = columns_for(self.blocks)
        if self.X.shape != (len(self.pairs), len(self.columns)):
            raise ValueError("feature matrix shape does not match pairs and columns")
        if self.y is not None:
            self.y = np.asarray(self.y, dtype=int)
            if len(self.y) != len(self.pairs) or not np.all(np.isin(self.y, (-1, 1))):
                raise ValueError("labels must be +1 or -1, one per pair")

    def __len__(self):
        return len(self.pairs)

    @property
    def column_mean(self):
        return self.X.mean(axis=0) if len(self.X) else np.zeros(self.X.shape[1])

    @property
    def column_std(self):
        return self.X.std(axis=0) if len(self.X) else np.zeros(self.X.shape[1])

    def standardized(self, mean=None, std=None):
        """Copy with columns centred and scaled; constant columns are only centred."""
        mean = self.column_mean if mean is None else mean
        std = self.column_std if std is None else std
        scale = np.where(std > 0, std, 1.0)
        return FeatureMatrix(self.pairs, (self.X - mean) / scale, self.y, self.blocks, self.columns)

    def subset(self, rows):
        rows = np.asarray(rows, dtype=int)
        y = None if self.y is None else self.y[rows]
        return FeatureMatrix([self.pairs[r] for r in rows], self.X[rows], y, self.blocks, self.columns)

    def select_blocks(self, blocks):
        blocks = normalize_blocks(blocks)
        missing = [b for b in blocks if b not in self.blocks]
        if missing:
            raise MissingSource(f"matrix lacks blocks {missing}")
        idx = [self.columns.index(c) for c in columns_for(blocks)]
        return FeatureMatrix(self.pairs, self.X[:, idx], self.y, blocks)


def assemble(pairs, labels, blocks, sources, mask=NO_MASK):
    """Feature matrix with one row per pair, in input order.

    ``labels`` may be ``None`` for unlabelled prediction rows. ``mask``
    applies to the structural blocks; for evaluation it should hide exactly
    the held-out pairs.
    """
    blocks = normalize_blocks(blocks)
    pairs = [(int(i), int(j)) for i, j in pairs]
    for b in blocks:
        if getattr(sources, _NEEDS[b]) is None:
            raise MissingSource(f"block {b!r} needs {_NEEDS[b]}")
    parts = [block_matrix(b, pairs, sources, mask) for b in blocks]
    X = np.hstack(parts) if parts else np.zeros((len(pairs), 0))
    return FeatureMatrix(pairs, X, None if labels is None else np.asarray(labels), blocks)
