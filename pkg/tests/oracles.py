"""Slow, obviously-correct reference implementations used by the tests.

Each oracle works from raw edge / count / rating dictionaries, never from
the package's cached indexes.
"""

from fractions import Fraction

import mpmath
import numpy as np


def random_edges(rng, n, p_edge=0.15, p_neg=0.3):
    """Random signed digraph on ``n`` nodes as ``{(s, d): sign}``."""
    edges = {}
    for s in range(n):
        for d in range(n):
            if s != d and rng.random() < p_edge:
                edges[(s, d)] = -1 if rng.random() < p_neg else 1
    return edges


def edge_list(edges):
    return [(s, d, sg) for (s, d), sg in sorted(edges.items())]


def masked(edges, hidden):
    return {p: s for p, s in edges.items() if p not in hidden}


def common_neighbors(edges, n, u, v):
    out = []
    for w in range(n):
        if w in (u, v):
            continue
        slots = (
            edges.get((u, w), 0),
            edges.get((w, u), 0),
            edges.get((w, v), 0),
            edges.get((v, w), 0),
        )
        if (slots[0] or slots[1]) and (slots[2] or slots[3]):
            out.append((w,) + slots)
    return out


def di(edges, n, i, j):
    followees = [k for k in range(n) if k != j and edges.get((i, k)) == 1]
    if not followees:
        return [0.0, 0.0]
    neg = sum(1 for k in followees if edges.get((k, j)) == -1)
    pos = sum(1 for k in followees if edges.get((k, j)) == 1)
    return [neg / len(followees), pos / len(followees)]


def triads(edges, n, i, j):
    """16 cells keyed by (i-w direction, w-j direction, i-w sign, w-j sign).

    Direction ``f`` means the edge runs along i -> w -> j, ``b`` against it.
    Cell order: direction pair outermost, then signs, both in (f, b) / (p, n).
    """
    cells = {}
    for d1 in "fb":
        for d2 in "fb":
            for s1 in "pn":
                for s2 in "pn":
                    cells[(d1, d2, s1, s2)] = 0
    sym = {1: "p", -1: "n"}
    for w in range(n):
        if w in (i, j):
            continue
        left = []
        if (i, w) in edges:
            left.append(("f", sym[edges[(i, w)]]))
        if (w, i) in edges:
            left.append(("b", sym[edges[(w, i)]]))
        right = []
        if (w, j) in edges:
            right.append(("f", sym[edges[(w, j)]]))
        if (j, w) in edges:
            right.append(("b", sym[edges[(j, w)]]))
        for d1, s1 in left:
            for d2, s2 in right:
                cells[(d1, d2, s1, s2)] += 1
    return [cells[k] for k in sorted(cells, key=lambda c: ("fb".index(c[0]), "fb".index(c[1]), "pn".index(c[2]), "pn".index(c[3])))]


def degrees(edges, n, i, j):
    others = {p: s for p, s in edges.items() if p != (i, j)}
    op = sum(1 for (s, d), sg in others.items() if s == i and sg == 1)
    on = sum(1 for (s, d), sg in others.items() if s == i and sg == -1)
    ip = sum(1 for (s, d), sg in others.items() if d == j and sg == 1)
    in_ = sum(1 for (s, d), sg in others.items() if d == j and sg == -1)
    nb_i = {d for (s, d) in others if s == i} | {s for (s, d) in others if d == i}
    nb_j = {d for (s, d) in others if s == j} | {s for (s, d) in others if d == j}
    shared = (nb_i & nb_j) - {i, j}
    return [op, on, ip, in_, op + on, ip + in_, len(shared)]


def rating_scores(ratings, n_users):
    """Optimism / pessimism from ``{(u, k): score}`` by explicit set building."""
    items = sorted({k for _, k in ratings})
    avg = {}
    for k in items:
        vals = [Fraction(r) for (u, kk), r in ratings.items() if kk == k]
        avg[k] = sum(vals) / len(vals)
    o, p = [], []
    for i in range(n_users):
        rated = {k for (u, k) in ratings if u == i}
        O_L = {k for k in rated if avg[k] <= 3}
        O_HL = {k for k in O_L if ratings[(i, k)] > 3}
        P_H = {k for k in rated if avg[k] > 3}
        P_LH = {k for k in P_H if ratings[(i, k)] <= 3}
        o.append(Fraction(len(O_HL), len(O_L)) if O_L else Fraction(0))
        p.append(Fraction(len(P_LH), len(P_H)) if P_H else Fraction(0))
    return o, p


def emotion_scores(pos, neg, n_users):
    """Optimism / pessimism from raw count maps, with exact rational means.

    Global means average the nonzero pair counts; a user's received mean
    averages the nonzero counts sent to that user.
    """

    def mean(values):
        values = [Fraction(v) for v in values if v]
        return sum(values) / len(values) if values else Fraction(0)

    P_bar = mean(pos.values())
    N_bar = mean(neg.values())
    P_recv = [mean([c for (a, b), c in pos.items() if b == j]) for j in range(n_users)]
    N_recv = [mean([c for (a, b), c in neg.items() if b == j]) for j in range(n_users)]
    o, p = [], []
    for i in range(n_users):
        O_L = {j for j in range(n_users) if pos.get((i, j), 0) != 0 and N_recv[j] > N_bar}
        O_HL = {k for k in O_L if pos.get((i, k), 0) > P_recv[k]}
        P_H = {j for j in range(n_users) if neg.get((i, j), 0) != 0 and P_recv[j] > P_bar}
        P_LH = {k for k in P_H if neg.get((i, k), 0) > N_recv[k]}
        o.append(Fraction(len(O_HL), len(O_L)) if O_L else Fraction(0))
        p.append(Fraction(len(P_LH), len(P_H)) if P_H else Fraction(0))
    return o, p


def auc_pairs(scores, labels):
    """All-pairs AUC as an exact fraction."""
    pos = [s for s, y in zip(scores, labels) if y > 0]
    neg = [s for s, y in zip(scores, labels) if y <= 0]
    wins = Fraction(0)
    for a in pos:
        for b in neg:
            if a > b:
                wins += 1
            elif a == b:
                wins += Fraction(1, 2)
    return wins / (len(pos) * len(neg))


def welch_p_quadrature(a, b):
    """Upper-tail p of the Welch statistic by integrating the t density in mpmath."""
    mpmath.mp.dps = 40
    a = [mpmath.mpf(repr(float(x))) for x in a]
    b = [mpmath.mpf(repr(float(x))) for x in b]
    na, nb = len(a), len(b)
    ma, mb = sum(a) / na, sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1)
    qa, qb = va / na, vb / nb
    t = (ma - mb) / mpmath.sqrt(qa + qb)
    df = (qa + qb) ** 2 / (qa**2 / (na - 1) + qb**2 / (nb - 1))
    c = mpmath.gamma((df + 1) / 2) / (mpmath.sqrt(df * mpmath.pi) * mpmath.gamma(df / 2))

    def density(x):
        return c * (1 + x * x / df) ** (-(df + 1) / 2)

    if t >= 0:
        p = mpmath.quad(density, [t, t + 10, mpmath.inf])
    else:
        p = 1 - mpmath.quad(density, [-t, -t + 10, mpmath.inf])
    return float(t), float(df), float(p)


def best_split_exhaustive(X, t, min_leaf=1):
    """Best (feature, threshold) by trying every midpoint and computing weighted Gini."""
    n, d = X.shape
    best = None
    for f in range(d):
        vals = sorted(set(X[:, f].tolist()))
        for a, b in zip(vals, vals[1:]):
            thr = (a + b) / 2
            left = X[:, f] <= thr
            nl, nr = left.sum(), (~left).sum()
            if nl < min_leaf or nr < min_leaf:
                continue
            gini = 0.0
            for part, m in ((t[left], nl), (t[~left], nr)):
                q = part.mean()
                gini += m / n * (1 - q * q - (1 - q) ** 2)
            key = (round(gini, 12), f, thr)
            if best is None or key < best[0]:
                best = (key, f, thr, gini)
    if best is None:
        return None
    return best[1], best[2]


def numeric_gradient(fn, theta, h=1e-5):
    g = np.zeros_like(theta)
    for k in range(len(theta)):
        e = np.zeros_like(theta)
        e[k] = h
        g[k] = (fn(theta + e) - fn(theta - e)) / (2 * h)
    return g
