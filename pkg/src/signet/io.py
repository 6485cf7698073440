"""Readers and writers for the tab-separated dataset files.

Four record formats share one layout: UTF-8, one record per line, fields
separated by tabs, ``#`` comment lines and blank lines ignored.

========================  ==================================
``edges.tsv``             ``src  dst  sign``
``interactions.tsv``      ``src  dst  {pos|neg}  count``
``helpfulness.tsv``       ``src  dst  score``
``ratings.tsv``           ``user  item  score``
========================  ==================================

External ids are opaque strings. A shared :class:`IdMap` assigns dense
integer ids in first-seen order, so the same user gets the same id across
files as long as the files are read with the same map.
"""

from collections import defaultdict
from dataclasses import dataclass, field

from .errors import (
    DuplicateRating,
    MalformedRecord,
    NegativeCount,
    OutOfRangeScore,
    UnknownUser,
)
from .graph import build_network


class IdMap:
    """Stable first-seen mapping from external string ids to dense ints."""

    def __init__(self, names=()):
        self._ids = {}
        self.names = []
        for n in names:
            self.add(n)

    def add(self, name):
        idx = self._ids.get(name)
        if idx is None:
            idx = len(self.names)
            self._ids[name] = idx
            self.names.append(name)
        return idx

    def get(self, name):
        try:
            return self._ids[name]
        except KeyError:
            raise UnknownUser(name) from None

    def __contains__(self, name):
        return name in self._ids

    def __len__(self):
        return len(self.names)


class InteractionLedger:
    """Per ordered pair counts of positive and negative emotions.

    Besides the raw counts the ledger caches, for each polarity, per-user
    outgoing and incoming totals and the number of distinct partners, so
    the averages used by the emotion-based personality scores are O(1).

    ``mean_pos`` / ``mean_neg`` average the count over pairs with a nonzero
    count of that polarity. ``received_mean_pos(j)`` averages the incoming
    count over senders with a nonzero count toward ``j`` (0 if none).
    """

    def __init__(self, pos=None, neg=None, n_users=0):
        self.pos = {p: int(c) for p, c in (pos or {}).items() if c}
        self.neg = {p: int(c) for p, c in (neg or {}).items() if c}
        for table in (self.pos, self.neg):
            for pair, c in table.items():
                if c < 0:
                    raise NegativeCount(f"negative count {c} for pair {pair}")
        top = max((max(p) for p in list(self.pos) + list(self.neg)), default=-1)
        self.n_users = max(int(n_users), top + 1)
        self._cache()

    def _cache(self):
        self.out_pos = defaultdict(int)
        self.out_neg = defaultdict(int)
        self.in_pos = defaultdict(int)
        self.in_neg = defaultdict(int)
        self.in_pos_senders = defaultdict(int)
        self.in_neg_senders = defaultdict(int)
        for (i, j), c in self.pos.items():
            self.out_pos[i] += c
            self.in_pos[j] += c
            self.in_pos_senders[j] += 1
        for (i, j), c in self.neg.items():
            self.out_neg[i] += c
            self.in_neg[j] += c
            self.in_neg_senders[j] += 1
        self.mean_pos = sum(self.pos.values()) / len(self.pos) if self.pos else 0.0
        self.mean_neg = sum(self.neg.values()) / len(self.neg) if self.neg else 0.0
        self._pos_targets = defaultdict(list)
        self._neg_targets = defaultdict(list)
        for i, j in sorted(self.pos):
            self._pos_targets[i].append(j)
        for i, j in sorted(self.neg):
            self._neg_targets[i].append(j)

    def __repr__(self):
        return (
            f"InteractionLedger(n_users={self.n_users}, pos_pairs={len(self.pos)}, "
            f"neg_pairs={len(self.neg)})"
        )

    def __eq__(self, other):
        return (
            isinstance(other, InteractionLedger)
            and self.pos == other.pos
            and self.neg == other.neg
        )

    def count(self, i, j, polarity):
        table = self.pos if polarity == "pos" else self.neg
        return table.get((i, j), 0)

    def pairs(self, polarity):
        table = self.pos if polarity == "pos" else self.neg
        return sorted(table)

    def targets(self, i, polarity):
        """Users that ``i`` sent at least one emotion of ``polarity`` to, ascending."""
        src = self._pos_targets if polarity == "pos" else self._neg_targets
        return src.get(i, [])

    def received_mean_pos(self, j):
        n = self.in_pos_senders.get(j, 0)
        return self.in_pos[j] / n if n else 0.0

    def received_mean_neg(self, j):
        n = self.in_neg_senders.get(j, 0)
        return self.in_neg[j] / n if n else 0.0

    def scaled(self, factor):
        """Copy with every count multiplied by a positive integer ``factor``."""
        return InteractionLedger(
            {p: c * factor for p, c in self.pos.items()},
            {p: c * factor for p, c in self.neg.items()},
            self.n_users,
        )


@dataclass
class RatingsTable:
    """User to item rating scores in ``1..5`` with per-item averages."""

    ratings: dict
    n_users: int = 0
    n_items: int = 0
    item_labels: list = None
    item_mean: dict = field(init=False)
    by_user: dict = field(init=False)

    def __post_init__(self):
        sums = defaultdict(int)
        counts = defaultdict(int)
        by_user = defaultdict(dict)
        top_u, top_k = -1, -1
        for (u, k), r in self.ratings.items():
            if not 1 <= r <= 5:
                raise OutOfRangeScore(f"rating {r} for user {u}, item {k}")
            sums[k] += r
            counts[k] += 1
            by_user[u][k] = r
            top_u, top_k = max(top_u, u), max(top_k, k)
        self.item_mean = {k: sums[k] / counts[k] for k in sums}
        self.by_user = dict(by_user)
        self.n_users = max(self.n_users, top_u + 1)
        self.n_items = max(self.n_items, top_k + 1)

    def rating(self, user, item):
        """Score, or 0 when ``user`` has not rated ``item``."""
        return self.ratings.get((user, item), 0)

    def rated_items(self, user):
        return self.by_user.get(user, {})


@dataclass(frozen=True)
class HelpfulnessPolicy:
    """Maps helpfulness scores to emotion polarity; unlisted valid scores are neutral."""

    negative: frozenset = frozenset({1, 2})
    positive: frozenset = frozenset({4, 5, 6})
    valid: frozenset = frozenset(range(1, 7))

    def polarity(self, score):
        if score not in self.valid:
            raise OutOfRangeScore(f"helpfulness score {score} outside {sorted(self.valid)}")
        if score in self.positive:
            return "pos"
        if score in self.negative:
            return "neg"
        return None


DEFAULT_HELPFULNESS = HelpfulnessPolicy()


def _records(stream, n_fields):
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        if len(fields) != n_fields:
            raise MalformedRecord(lineno, f"expected {n_fields} fields, got {len(fields)}")
        yield lineno, [f.strip() for f in fields]


def _int(token, lineno):
    try:
        return int(token)
    except ValueError:
        raise MalformedRecord(lineno, f"not an integer: {token!r}") from None


SIGN_TOKENS = {"+1": 1, "-1": -1, "1": 1}


def read_edge_records(stream, ids, sign_tokens=None):
    """Parse edge lines into dense ``(src, dst, sign)`` triples."""
    tokens = SIGN_TOKENS if sign_tokens is None else sign_tokens
    out = []
    for lineno, (a, b, s) in _records(stream, 3):
        if s not in tokens:
            raise MalformedRecord(lineno, f"bad sign token {s!r}")
        out.append((ids.add(a), ids.add(b), tokens[s]))
    return out


def parse_edges(stream, ids=None, sign_tokens=None):
    """Read ``edges.tsv`` content into a network labelled with external ids."""
    ids = IdMap() if ids is None else ids
    records = read_edge_records(stream, ids, sign_tokens)
    return build_network(records, n_users=len(ids), labels=list(ids.names))


def parse_interactions(stream, ids=None):
    ids = IdMap() if ids is None else ids
    pos = defaultdict(int)
    neg = defaultdict(int)
    for lineno, (a, b, pol, c) in _records(stream, 4):
        count = _int(c, lineno)
        if count < 0:
            raise NegativeCount(f"negative count {count} at line {lineno}")
        if count == 0:
            raise MalformedRecord(lineno, "count must be at least 1")
        if pol not in ("pos", "neg"):
            raise MalformedRecord(lineno, f"polarity must be pos or neg, got {pol!r}")
        pair = (ids.add(a), ids.add(b))
        (pos if pol == "pos" else neg)[pair] += count
    return InteractionLedger(pos, neg, len(ids))


def read_helpfulness_records(stream, ids):
    out = []
    for lineno, (a, b, s) in _records(stream, 3):
        out.append((ids.add(a), ids.add(b), _int(s, lineno)))
    return out


def emotions_from_helpfulness(events, policy=DEFAULT_HELPFULNESS, n_users=0):
    """Aggregate ``(src, dst, helpfulness)`` events into an emotion ledger."""
    pos = defaultdict(int)
    neg = defaultdict(int)
    for src, dst, score in events:
        pol = policy.polarity(score)
        if pol == "pos":
            pos[(src, dst)] += 1
        elif pol == "neg":
            neg[(src, dst)] += 1
    return InteractionLedger(pos, neg, n_users)


def parse_ratings(stream, ids=None, items=None):
    ids = IdMap() if ids is None else ids
    items = IdMap() if items is None else items
    ratings = {}
    for lineno, (u, k, s) in _records(stream, 3):
        score = _int(s, lineno)
        if not 1 <= score <= 5:
            raise OutOfRangeScore(f"rating {score} at line {lineno}")
        key = (ids.add(u), items.add(k))
        if key in ratings:
            raise DuplicateRating(u, k)
        ratings[key] = score
    return RatingsTable(ratings, len(ids), len(items), list(items.names))


def _name(labels, i):
    return str(i) if labels is None else labels[i]


def write_edges(net, out, labels=None):
    labels = labels if labels is not None else net.labels
    for s, d, sign in net.edges():
        out.write(f"{_name(labels, s)}\t{_name(labels, d)}\t{'+1' if sign > 0 else '-1'}\n")


def write_interactions(ledger, out, labels=None):
    rows = [(p, "pos", c) for p, c in ledger.pos.items()]
    rows += [(p, "neg", c) for p, c in ledger.neg.items()]
    for (i, j), pol, c in sorted(rows):
        out.write(f"{_name(labels, i)}\t{_name(labels, j)}\t{pol}\t{c}\n")


def write_helpfulness(events, out, labels=None):
    for i, j, s in events:
        out.write(f"{_name(labels, i)}\t{_name(labels, j)}\t{s}\n")


def write_ratings(table, out, labels=None):
    items = table.item_labels
    for (u, k), r in sorted(table.ratings.items()):
        out.write(f"{_name(labels, u)}\t{_name(items, k)}\t{r}\n")


@dataclass
class Dataset:
    """The sources one experiment reads: network, emotions, and optional ratings."""

    network: object
    ledger: InteractionLedger
    ratings: RatingsTable = None
    ids: IdMap = None


def load_dataset(directory, policy=DEFAULT_HELPFULNESS):
    """Load a dataset directory written by :func:`write_dataset` or by hand.

    ``edges.tsv`` is required. Emotions come from ``interactions.tsv`` when
    present, else from ``helpfulness.tsv``. ``ratings.tsv`` is optional.
    All files share one user id map.
    """
    from pathlib import Path

    d = Path(directory)
    ids = IdMap()
    with open(d / "edges.tsv", encoding="utf-8") as fh:
        edge_records = read_edge_records(fh, ids)
    ledger = None
    if (d / "interactions.tsv").exists():
        with open(d / "interactions.tsv", encoding="utf-8") as fh:
            ledger = parse_interactions(fh, ids)
    elif (d / "helpfulness.tsv").exists():
        with open(d / "helpfulness.tsv", encoding="utf-8") as fh:
            events = read_helpfulness_records(fh, ids)
        ledger = emotions_from_helpfulness(events, policy)
    ratings = None
    if (d / "ratings.tsv").exists():
        with open(d / "ratings.tsv", encoding="utf-8") as fh:
            ratings = parse_ratings(fh, ids)
    n = len(ids)
    net = build_network(edge_records, n_users=n, labels=list(ids.names))
    if ledger is None:
        ledger = InteractionLedger(n_users=n)
    ledger.n_users = n
    if ratings is not None:
        ratings.n_users = n
    return Dataset(net, ledger, ratings, ids)


def write_dataset(directory, network, ledger, ratings=None, helpfulness=None, labels=None):
    """Write the dataset files into ``directory``; returns the paths written."""
    from pathlib import Path

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    labels = labels if labels is not None else network.labels
    written = []
    with open(d / "edges.tsv", "w", encoding="utf-8", newline="\n") as fh:
        write_edges(network, fh, labels)
    written.append(d / "edges.tsv")
    with open(d / "interactions.tsv", "w", encoding="utf-8", newline="\n") as fh:
        write_interactions(ledger, fh, labels)
    written.append(d / "interactions.tsv")
    if helpfulness is not None:
        with open(d / "helpfulness.tsv", "w", encoding="utf-8", newline="\n") as fh:
            write_helpfulness(helpfulness, fh, labels)
        written.append(d / "helpfulness.tsv")
    if ratings is not None:
        with open(d / "ratings.tsv", "w", encoding="utf-8", newline="\n") as fh:
            write_ratings(ratings, fh, labels)
        written.append(d / "ratings.tsv")
    return written
