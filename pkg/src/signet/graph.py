"""Immutable directed signed graph with masked pair and neighbour queries."""

from dataclasses import dataclass
from typing import NamedTuple

from .errors import ConflictingSign, InvalidMask, InvalidSign, SelfLoop, UnknownUser

EMPTY = frozenset()


@dataclass(frozen=True)
class LinkMask:
    """Ordered pairs whose edges are treated as missing."""

    hidden_pairs: frozenset = EMPTY

    def __contains__(self, pair):
        return pair in self.hidden_pairs

    def __len__(self):
        return len(self.hidden_pairs)

    def union(self, pairs):
        return LinkMask(self.hidden_pairs | frozenset(pairs))


NO_MASK = LinkMask()


class CommonNeighbor(NamedTuple):
    """A shared neighbour ``w`` of ``(u, v)`` and the four directed slots.

    Each slot holds the sign of that directed edge, or 0 when absent.
    """

    w: int
    u_to_w: int
    w_to_u: int
    w_to_v: int
    v_to_w: int


class SignedNetwork:
    """Directed signed adjacency over dense user ids ``0..n_users-1``.

    Built once via :func:`build_network`; no method mutates it afterwards,
    so instances can be shared freely between readers.
    """

    def __init__(self, n_users, edges, labels=None):
        self.n_users = n_users
        self._edges = edges
        self.labels = tuple(labels) if labels is not None else None
        out_pos = [set() for _ in range(n_users)]
        out_neg = [set() for _ in range(n_users)]
        in_pos = [set() for _ in range(n_users)]
        in_neg = [set() for _ in range(n_users)]
        for (s, d), sign in edges.items():
            if sign > 0:
                out_pos[s].add(d)
                in_pos[d].add(s)
            else:
                out_neg[s].add(d)
                in_neg[d].add(s)
        self._out_pos = [frozenset(x) for x in out_pos]
        self._out_neg = [frozenset(x) for x in out_neg]
        self._in_pos = [frozenset(x) for x in in_pos]
        self._in_neg = [frozenset(x) for x in in_neg]

    def __repr__(self):
        return f"SignedNetwork(n_users={self.n_users}, n_edges={len(self._edges)})"

    @property
    def n_edges(self):
        return len(self._edges)

    def edges(self):
        """Edges as ``(src, dst, sign)`` in sorted pair order."""
        return [(s, d, self._edges[(s, d)]) for (s, d) in sorted(self._edges)]

    def pairs(self):
        return sorted(self._edges)

    def has_edge(self, src, dst):
        return (src, dst) in self._edges

    def label_of(self, user):
        if self.labels is None:
            return str(user)
        return self.labels[user]

    def mask(self, pairs):
        """Build a :class:`LinkMask` hiding ``pairs``; every pair must be an edge."""
        hidden = frozenset(tuple(p) for p in pairs)
        missing = [p for p in hidden if p not in self._edges]
        if missing:
            raise InvalidMask(f"mask pairs are not edges: {sorted(missing)[:5]}")
        return LinkMask(hidden)

    def _check(self, u):
        if not (isinstance(u, int) or hasattr(u, "__index__")) or not 0 <= u < self.n_users:
            raise UnknownUser(u)

    def sign_of(self, src, dst, mask=NO_MASK):
        self._check(src)
        self._check(dst)
        if mask and (src, dst) in mask.hidden_pairs:
            return 0
        return self._edges.get((src, dst), 0)

    @staticmethod
    def _filter_out(u, nbrs, mask):
        if not mask:
            return set(nbrs)
        hidden = mask.hidden_pairs
        return {k for k in nbrs if (u, k) not in hidden}

    @staticmethod
    def _filter_in(v, nbrs, mask):
        if not mask:
            return set(nbrs)
        hidden = mask.hidden_pairs
        return {k for k in nbrs if (k, v) not in hidden}

    def positive_out_neighbors(self, u, mask=NO_MASK):
        self._check(u)
        return self._filter_out(u, self._out_pos[u], mask)

    def negative_out_neighbors(self, u, mask=NO_MASK):
        self._check(u)
        return self._filter_out(u, self._out_neg[u], mask)

    def positive_in_neighbors(self, v, mask=NO_MASK):
        self._check(v)
        return self._filter_in(v, self._in_pos[v], mask)

    def negative_in_neighbors(self, v, mask=NO_MASK):
        self._check(v)
        return self._filter_in(v, self._in_neg[v], mask)

    def out_neighbors(self, u, mask=NO_MASK):
        return self.positive_out_neighbors(u, mask) | self.negative_out_neighbors(u, mask)

    def in_neighbors(self, v, mask=NO_MASK):
        return self.positive_in_neighbors(v, mask) | self.negative_in_neighbors(v, mask)

    def neighbors(self, u, mask=NO_MASK):
        """Users sharing at least one edge with ``u`` in either direction."""
        return self.out_neighbors(u, mask) | self.in_neighbors(u, mask)

    def common_neighbor_pairs(self, u, v, mask=NO_MASK):
        """Shared neighbours of ``u`` and ``v`` in ascending id order."""
        self._check(u)
        self._check(v)
        if u == v:
            raise ValueError("common_neighbor_pairs needs two distinct users")
        shared = (self.neighbors(u, mask) & self.neighbors(v, mask)) - {u, v}
        return [
            CommonNeighbor(
                w,
                self.sign_of(u, w, mask),
                self.sign_of(w, u, mask),
                self.sign_of(w, v, mask),
                self.sign_of(v, w, mask),
            )
            for w in sorted(shared)
        ]


def build_network(edge_list, n_users=None, labels=None):
    """Build a :class:`SignedNetwork` from ``(src, dst, sign)`` triples.

    Duplicate pairs with the same sign collapse; a duplicate with the other
    sign raises :class:`ConflictingSign`. ``n_users`` defaults to one more
    than the largest id seen.
    """
    edges = {}
    top = -1
    for src, dst, sign in edge_list:
        src, dst, sign = int(src), int(dst), int(sign)
        if sign not in (1, -1):
            raise InvalidSign(f"sign must be +1 or -1, got {sign} for {(src, dst)}")
        if src == dst:
            raise SelfLoop((src, dst))
        if src < 0 or dst < 0:
            raise UnknownUser(min(src, dst))
        prev = edges.get((src, dst))
        if prev is not None and prev != sign:
            raise ConflictingSign((src, dst))
        edges[(src, dst)] = sign
        top = max(top, src, dst)
    if n_users is None:
        n_users = top + 1
    elif top >= n_users:
        raise UnknownUser(top)
    if labels is not None and len(labels) != n_users:
        raise ValueError("labels must name every user")
    return SignedNetwork(n_users, edges, labels)
