"""Hypothesis tests checking whether the social theories hold on a dataset.

Four procedures, each reduced to a one-tailed Welch test of
``H1: treated sample > control sample``:

* emotion presence -- do pairs with emotions of a polarity carry a link of
  the matching sign more often than random control pairs from the same
  source?
* emotion strength -- ranked by emotion count and cut into ``K`` equal
  groups, do stronger groups hold more matching-sign links?
* diffusion -- is a user linked with sign ``s`` to targets that a positive
  followee links to with sign ``s`` more often than to random controls?
* personality -- ranked by optimism (pessimism) and cut into ``K`` groups,
  do higher groups create more positive (negative) links?
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError, NoEligibleControl, TooFewPairs, TooFewUsers
from .graph import NO_MASK
from .rng import stream
from .stats import welch_t_one_tailed

POLARITY_SIGN = {"pos": 1, "neg": -1}
TRAIT_SIGN = {"optimism": 1, "pessimism": -1}


@dataclass(frozen=True)
class BinPlan:
    """``K`` equal-size groups over items ordered by a non-increasing key."""

    groups: tuple
    keys: tuple

    @property
    def k(self):
        return len(self.groups)


def bin_plan(items, keys, k):
    """Sort ``items`` by ``keys`` descending (stable) and cut into ``k`` equal groups.

    Rows left over after ``len(items) // k`` per group are dropped from the tail.
    """
    if k < 1:
        raise ValueError("K must be at least 1")
    keys = np.asarray(keys, dtype=float)
    order = np.argsort(-keys, kind="stable")
    size = len(items) // k
    groups = tuple(tuple(items[o] for o in order[g * size : (g + 1) * size]) for g in range(k))
    gkeys = tuple(tuple(float(keys[o]) for o in order[g * size : (g + 1) * size]) for g in range(k))
    return BinPlan(groups, gkeys)


def group_pair_vectors(counts):
    """For every ``i < j`` return ``counts[i]`` (higher group) and ``counts[j]``."""
    k = len(counts)
    high = [counts[i] for i in range(k) for j in range(i + 1, k)]
    low = [counts[j] for i in range(k) for j in range(i + 1, k)]
    return high, low


class _ControlSampler:
    """Uniform draws without replacement per source, by rejection then by scan."""

    def __init__(self, n_users, rng):
        self.n = n_users
        self.rng = rng
        self.used = {}

    def draw(self, source, eligible):
        used = self.used.setdefault(source, set())
        for _ in range(64):
            c = int(self.rng.integers(self.n))
            if c not in used and eligible(c):
                used.add(c)
                return c
        pool = [c for c in range(self.n) if c not in used and eligible(c)]
        if not pool:
            raise NoEligibleControl(source)
        c = pool[int(self.rng.integers(len(pool)))]
        used.add(c)
        return c


def presence_vectors(net, ledger, polarity, seed):
    """Treated and control indicator vectors of the emotion presence test."""
    sign = POLARITY_SIGN[polarity]
    rng = stream(seed, "controls", 0 if polarity == "pos" else 1)
    sampler = _ControlSampler(net.n_users, rng)
    treated, control = [], []
    skipped = 0
    for i, j in ledger.pairs(polarity):
        def eligible(k, i=i, j=j):
            return k != i and k != j and ledger.count(i, k, polarity) == 0

        try:
            k = sampler.draw(i, eligible)
        except NoEligibleControl:
            skipped += 1
            continue
        treated.append(1.0 if net.sign_of(i, j) == sign else 0.0)
        control.append(1.0 if net.sign_of(i, k) == sign else 0.0)
    return treated, control, skipped


def emotion_presence_test(net, ledger, polarity="pos", seed=0):
    treated, control, skipped = presence_vectors(net, ledger, polarity, seed)
    return replace(welch_t_one_tailed(treated, control), skipped=skipped)


def strength_bins(ledger, polarity, k):
    pairs = ledger.pairs(polarity)
    if len(pairs) < k:
        raise TooFewPairs(f"{len(pairs)} pairs with {polarity} emotions, need at least K={k}")
    counts = [ledger.count(i, j, polarity) for i, j in pairs]
    return bin_plan(pairs, counts, k)


def strength_group_test(net, ledger, polarity="pos", k=10):
    sign = POLARITY_SIGN[polarity]
    plan = strength_bins(ledger, polarity, k)
    counts = [sum(1 for i, j in g if net.sign_of(i, j) == sign) for g in plan.groups]
    high, low = group_pair_vectors(counts)
    return welch_t_one_tailed(high, low)


def diffusion_pairs(net, sign, mask=NO_MASK):
    """Map ``(i, j) -> sorted friends k`` where ``i -> k`` is positive and ``k -> j``
    has ``sign``; ``j != i``."""
    out = {}
    for i in range(net.n_users):
        for k in sorted(net.positive_out_neighbors(i, mask)):
            targets = (
                net.positive_out_neighbors(k, mask) if sign > 0 else net.negative_out_neighbors(k, mask)
            )
            for j in targets:
                if j != i:
                    out.setdefault((i, j), []).append(k)
    return {p: out[p] for p in sorted(out)}


def diffusion_vectors(net, sign, seed):
    rng = stream(seed, "controls", 2 if sign > 0 else 3)
    sampler = _ControlSampler(net.n_users, rng)
    treated, control = [], []
    skipped = 0
    for (i, j), friends in diffusion_pairs(net, sign).items():
        k = friends[int(rng.integers(len(friends)))]

        def eligible(r, i=i, j=j, k=k):
            return r not in (i, j, k) and net.sign_of(k, r) != 1

        try:
            r = sampler.draw(i, eligible)
        except NoEligibleControl:
            skipped += 1
            continue
        treated.append(1.0 if net.sign_of(i, j) == sign else 0.0)
        control.append(1.0 if net.sign_of(i, r) == sign else 0.0)
    return treated, control, skipped


def diffusion_test(net, sign=1, seed=0):
    treated, control, skipped = diffusion_vectors(net, sign, seed)
    return replace(welch_t_one_tailed(treated, control), skipped=skipped)


def personality_bins(scores, trait, k):
    n = scores.n_users
    if n < k:
        raise TooFewUsers(f"{n} users, need at least K={k}")
    values = scores.o if trait == "optimism" else scores.p
    return bin_plan(list(range(n)), values, k)


def personality_group_test(net, scores, trait="optimism", k=20):
    if trait not in TRAIT_SIGN:
        raise ValueError("trait must be 'optimism' or 'pessimism'")
    plan = personality_bins(scores, trait, k)
    out_links = (
        net.positive_out_neighbors if TRAIT_SIGN[trait] > 0 else net.negative_out_neighbors
    )
    counts = [sum(len(out_links(u)) for u in g) for g in plan.groups]
    high, low = group_pair_vectors(counts)
    return welch_t_one_tailed(high, low)


def verify_all(net, ledger, scores, seed=0, k_strength=10, k_personality=20):
    """Run every procedure in a fixed order.

    Returns ``[(name, result)]`` where ``result`` is a :class:`TTestResult`,
    or the :class:`~signet.errors.DataError` the procedure raised (for
    instance both samples constant, which happens when a signal is absent).
    """
    jobs = [
        ("emotion_presence_pos", lambda: emotion_presence_test(net, ledger, "pos", seed)),
        ("emotion_presence_neg", lambda: emotion_presence_test(net, ledger, "neg", seed)),
        ("emotion_strength_pos", lambda: strength_group_test(net, ledger, "pos", k_strength)),
        ("emotion_strength_neg", lambda: strength_group_test(net, ledger, "neg", k_strength)),
        ("diffusion_pos", lambda: diffusion_test(net, 1, seed)),
        ("diffusion_neg", lambda: diffusion_test(net, -1, seed)),
        ("personality_optimism", lambda: personality_group_test(net, scores, "optimism", k_personality)),
        ("personality_pessimism", lambda: personality_group_test(net, scores, "pessimism", k_personality)),
    ]
    out = []
    for name, job in jobs:
        try:
            out.append((name, job()))
        except DataError as exc:
            out.append((name, exc))
    return out
