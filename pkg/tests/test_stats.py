import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from signet.errors import DegenerateSamples, TooFewObservations
from signet.stats import student_t_sf, welch_t_one_tailed


def test_identical_samples():
    r = welch_t_one_tailed([1.0, 2.0, 4.0], [1.0, 2.0, 4.0])
    assert r.t_statistic == 0 and r.p_value_one_tailed == 0.5


def test_fixture_against_quadrature():
    a, b = [2.1, 2.5, 2.3, 2.2], [1.1, 1.4, 1.2, 1.3]
    r = welch_t_one_tailed(a, b)
    t, df, p = oracles.welch_p_quadrature(a, b)
    assert r.t_statistic == pytest.approx(t, rel=1e-12)
    assert r.degrees_of_freedom == pytest.approx(df, rel=1e-12)
    assert abs(r.p_value_one_tailed - p) <= 1e-8


def test_direction():
    r = welch_t_one_tailed([1, 2, 3, 2], [5, 6, 7, 5])
    assert r.p_value_one_tailed > 0.5
    assert welch_t_one_tailed([1, 2, 3, 2], [5, 6, 7, 5], "less").p_value_one_tailed < 0.5


def test_preconditions():
    with pytest.raises(TooFewObservations):
        welch_t_one_tailed([1.0], [1.0, 2.0])
    with pytest.raises(DegenerateSamples):
        welch_t_one_tailed([1, 1, 1], [1, 1])
    r = welch_t_one_tailed([2, 2, 2], [1, 1])
    assert r.t_statistic == float("inf") and r.p_value_one_tailed == 0.0
    r = welch_t_one_tailed([2, 2, 2], [1, 1.5, 0.5])
    assert np.isfinite(r.t_statistic) and r.p_value_one_tailed < 0.5


samples = st.lists(st.floats(-50, 50, allow_nan=False), min_size=2, max_size=30)


@settings(max_examples=100, deadline=None)
@given(samples, samples)
def test_antisymmetry_and_complement(a, b):
    if np.var(a) == 0 and np.var(b) == 0:
        return
    ab, ba = welch_t_one_tailed(a, b), welch_t_one_tailed(b, a)
    assert ab.t_statistic == -ba.t_statistic
    assert ab.p_value_one_tailed + ba.p_value_one_tailed == pytest.approx(1.0, abs=1e-12)
    assert 0 <= ab.p_value_one_tailed <= 1


def test_random_pairs_against_quadrature():
    rng = np.random.default_rng(0)
    for _ in range(40):
        a = rng.normal(rng.normal(), rng.uniform(0.2, 3), int(rng.integers(2, 40)))
        b = rng.normal(rng.normal(), rng.uniform(0.2, 3), int(rng.integers(2, 40)))
        _, _, p = oracles.welch_p_quadrature(a, b)
        assert abs(welch_t_one_tailed(a, b).p_value_one_tailed - p) <= 1e-8


def test_t_tail_known_values():
    assert student_t_sf(0.0, 7) == 0.5
    # Cauchy tail at 1 is 1/4
    assert student_t_sf(1.0, 1) == pytest.approx(0.25, abs=1e-15)
    assert student_t_sf(-1.0, 1) == pytest.approx(0.75, abs=1e-15)


def test_tiny_variance_does_not_underflow():
    r = welch_t_one_tailed([0.0, 0.0], [0.0, 2.5259614173700558e-115])
    assert r.degrees_of_freedom == pytest.approx(1.0) and 0 <= r.p_value_one_tailed <= 1
