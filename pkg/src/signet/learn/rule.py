"""Thresholded decision rule turning a link probability into a sign."""

from dataclasses import dataclass

UNDETERMINED = 0


@dataclass(frozen=True)
class DecisionRule:
    eps_p: float = 0.5
    eps_n: float = 0.5

    def __post_init__(self):
        if not (0 <= self.eps_n <= 1 and 0 <= self.eps_p <= 1):
            raise ValueError("thresholds must lie in [0, 1]")
        if self.eps_p < self.eps_n:
            raise ValueError(f"eps_p ({self.eps_p}) must be >= eps_n ({self.eps_n})")


DEFAULT_RULE = DecisionRule()


def decide(p, rule=DEFAULT_RULE):
    """+1 if ``p >= eps_p``, -1 if ``p < eps_n``, else 0 (undetermined)."""
    if p >= rule.eps_p:
        return 1
    if p < rule.eps_n:
        return -1
    return UNDETERMINED


def decide_all(probs, rule=DEFAULT_RULE):
    import numpy as np

    probs = np.asarray(probs, dtype=float)
    out = np.zeros(len(probs), dtype=int)
    out[probs >= rule.eps_p] = 1
    out[probs < rule.eps_n] = -1
    return out
