"""One-tailed Welch two-sample t-test."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc

from .errors import DegenerateSamples, TooFewObservations


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value_one_tailed: float
    n_a: int
    n_b: int
    mean_a: float
    mean_b: float
    skipped: int = 0

    def rejects(self, alpha):
        return self.p_value_one_tailed < alpha


def student_t_sf(t, df):
    """Upper tail ``P(T > t)`` of Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    x = df / (df + t * t)
    half = 0.5 * float(betainc(0.5 * df, 0.5, x))
    return half if t > 0 else 1.0 - half


def welch_t_one_tailed(a, b, alternative="greater"):
    """Test ``H1: mean(a) > mean(b)`` (or ``<`` with ``alternative="less"``).

    Uses the unequal-variance statistic with Welch-Satterthwaite degrees of
    freedom. When exactly one sample has zero variance the statistic is
    still defined; when both do and the means differ the statistic is
    infinite and the p-value is 0 or 1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise TooFewObservations(f"each sample needs >= 2 observations, got {na} and {nb}")
    ma, mb = float(a.mean()), float(b.mean())
    va, vb = float(a.var(ddof=1)), float(b.var(ddof=1))
    qa, qb = va / na, vb / nb
    se2 = qa + qb
    if se2 == 0:
        if ma == mb:
            raise DegenerateSamples("both samples are constant with equal means")
        t = math.copysign(math.inf, ma - mb)
        df = float(na + nb - 2)
    else:
        t = (ma - mb) / math.sqrt(se2)
        # in variance shares, so tiny variances do not underflow when squared
        ra, rb = qa / se2, qb / se2
        df = 1.0 / (ra * ra / (na - 1) + rb * rb / (nb - 1))
    if alternative == "greater":
        p = student_t_sf(t, df)
    elif alternative == "less":
        p = student_t_sf(-t, df)
    else:
        raise ValueError("alternative must be 'greater' or 'less'")
    return TTestResult(t, df, p, na, nb, ma, mb)
