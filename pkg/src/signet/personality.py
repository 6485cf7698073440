"""Optimism and pessimism scores from item ratings or from pairwise emotions.

Both regimes measure how often a user goes against the crowd: optimism is
the share of below-average entities the user still treats well, pessimism
the share of above-average entities the user treats badly. A user with no
below-average (above-average) entities scores 0.
"""

from dataclasses import dataclass

import numpy as np

from .errors import UnknownUser

LOW_HIGH_CUTOFF = 3


@dataclass(frozen=True, eq=False)
class PersonalityScores:
    o: np.ndarray
    p: np.ndarray
    regime: str
    optimism_support: np.ndarray
    pessimism_support: np.ndarray

    @property
    def n_users(self):
        return len(self.o)

    def optimism(self, i):
        self._check(i)
        return float(self.o[i])

    def pessimism(self, i):
        self._check(i)
        return float(self.p[i])

    def _check(self, i):
        if not 0 <= i < len(self.o):
            raise UnknownUser(i)


def _check_user(i, n):
    if not 0 <= i < n:
        raise UnknownUser(i)


def _ratio(num, den):
    return num / den if den else 0.0


def rating_optimism_sets(table, i):
    """Return ``(low_items, low_items_rated_high)`` for user ``i``."""
    low = [k for k, r in table.rated_items(i).items() if table.item_mean[k] <= LOW_HIGH_CUTOFF]
    high_on_low = [k for k in low if table.rating(i, k) > LOW_HIGH_CUTOFF]
    return low, high_on_low


def rating_pessimism_sets(table, i):
    high = [k for k, r in table.rated_items(i).items() if table.item_mean[k] > LOW_HIGH_CUTOFF]
    low_on_high = [k for k in high if table.rating(i, k) <= LOW_HIGH_CUTOFF]
    return high, low_on_high


def rating_optimism(table, i):
    _check_user(i, table.n_users)
    low, hits = rating_optimism_sets(table, i)
    return _ratio(len(hits), len(low))


def rating_pessimism(table, i):
    _check_user(i, table.n_users)
    high, hits = rating_pessimism_sets(table, i)
    return _ratio(len(hits), len(high))


def emotion_optimism_sets(ledger, i):
    """Targets of ``i``'s positive emotions that receive above-average negativity,
    and the subset ``i`` was unusually positive toward."""
    worse = [j for j in ledger.targets(i, "pos") if ledger.received_mean_neg(j) > ledger.mean_neg]
    hits = [k for k in worse if ledger.count(i, k, "pos") > ledger.received_mean_pos(k)]
    return worse, hits


def emotion_pessimism_sets(ledger, i):
    better = [j for j in ledger.targets(i, "neg") if ledger.received_mean_pos(j) > ledger.mean_pos]
    hits = [k for k in better if ledger.count(i, k, "neg") > ledger.received_mean_neg(k)]
    return better, hits


def emotion_optimism(ledger, i):
    _check_user(i, ledger.n_users)
    worse, hits = emotion_optimism_sets(ledger, i)
    return _ratio(len(hits), len(worse))


def emotion_pessimism(ledger, i):
    _check_user(i, ledger.n_users)
    better, hits = emotion_pessimism_sets(ledger, i)
    return _ratio(len(hits), len(better))


def compute_scores(source, regime, n_users=None):
    """Scores for every user under ``regime`` (``"rating"`` or ``"emotion"``)."""
    if regime == "rating":
        opt_sets, pes_sets = rating_optimism_sets, rating_pessimism_sets
    elif regime == "emotion":
        opt_sets, pes_sets = emotion_optimism_sets, emotion_pessimism_sets
    else:
        raise ValueError(f"unknown regime {regime!r}")
    n = source.n_users if n_users is None else n_users
    o = np.zeros(n)
    p = np.zeros(n)
    o_sup = np.zeros(n, dtype=np.int64)
    p_sup = np.zeros(n, dtype=np.int64)
    for i in range(n):
        low, hits = opt_sets(source, i)
        o[i], o_sup[i] = _ratio(len(hits), len(low)), len(low)
        high, hits = pes_sets(source, i)
        p[i], p_sup[i] = _ratio(len(hits), len(high)), len(high)
    return PersonalityScores(o, p, regime, o_sup, p_sup)
