import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from signet.errors import InfeasibleSubsample, LengthMismatch, SingleClass, TooFewExamples
from signet.evaluation import (
    IMPORTANCE_SUBSETS,
    ClassifierConfig,
    CrossValidator,
    auc,
    baseline_majority,
    baseline_random,
    importance_matrix,
    metrics,
    run_cv,
    sparsity_sweep,
    stratified_folds,
)
from signet.features import Sources, block_matrix
from signet.personality import compute_scores
from signet.synth import SynthConfig, synth_generate


def test_folds_exact_divisibility():
    labels = np.array([1] * 90 + [-1] * 10)
    plan = stratified_folds(labels, 10, seed=3)
    for f in range(10):
        test = labels[plan.test_indices(f)]
        assert (test == 1).sum() == 9 and (test == -1).sum() == 1


def test_folds_need_k_per_class():
    with pytest.raises(TooFewExamples):
        stratified_folds(np.array([1] * 50 + [-1] * 5), 10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31), st.integers(20, 400), st.floats(0.05, 0.5), st.integers(2, 10))
def test_folds_partition_and_stratify(seed, n, neg_share, k):
    rng = np.random.default_rng(seed)
    n_neg = max(k, int(n * neg_share))
    labels = np.array([-1] * n_neg + [1] * max(k, n - n_neg))
    rng.shuffle(labels)
    plan = stratified_folds(labels, k, seed)
    allidx = np.concatenate(plan.test_folds)
    assert sorted(allidx.tolist()) == list(range(len(labels)))
    sizes = [len(t) for t in plan.test_folds]
    assert max(sizes) - min(sizes) <= 1
    for f in range(k):
        fold_neg = (labels[plan.test_indices(f)] == -1).sum()
        assert abs(fold_neg - n_neg / k) < 1


def test_folds_deterministic():
    labels = np.array([1, -1] * 30)
    a, b = stratified_folds(labels, 5, 9), stratified_folds(labels, 5, 9)
    assert all(np.array_equal(x, y) for x, y in zip(a.test_folds, b.test_folds))


def test_auc_examples():
    assert auc([0.1, 0.2, 0.8, 0.9], [-1, -1, 1, 1]) == 1.0
    assert auc([0.5] * 6, [1, -1, 1, -1, 1, 1]) == 0.5
    with pytest.raises(SingleClass):
        auc([0.1, 0.2], [1, 1])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 200))
def test_auc_matches_all_pairs(seed, n):
    rng = np.random.default_rng(seed)
    scores = rng.integers(0, 20, n) / 20.0
    labels = np.where(rng.random(n) < 0.4, -1, 1)
    labels[0], labels[-1] = 1, -1
    assert auc(scores, labels) == pytest.approx(float(oracles.auc_pairs(scores, labels)), abs=1e-12)


def test_metrics_hand_tally():
    dec = np.array([1, 1, 1, 1, -1, -1, -1, 1, -1, 0])
    lab = np.array([1, 1, 1, -1, -1, -1, 1, 1, -1, 1])
    probs = np.linspace(0.9, 0.1, 10)
    m = metrics(dec, probs, lab)
    # tp=4 fp=1 tn=3 fn=1, one undetermined
    assert m.precision_pos == 4 / 5 and m.recall_pos == 4 / 5
    assert m.precision_neg == 3 / 4 and m.recall_neg == 3 / 4
    assert m.acc == 7 / 9 and m.n_undetermined == 1
    assert m.f1_pos == pytest.approx(0.8)
    with pytest.raises(LengthMismatch):
        metrics(dec[:3], probs, lab)


def test_metrics_perfect():
    lab = np.array([1, -1, 1, -1])
    m = metrics(lab, (lab + 1) / 2.0, lab)
    assert all(v == 1.0 for k, v in m.as_dict().items() if k != "n_undetermined")


def test_majority_baseline_structure():
    predict = baseline_majority([1] * 90 + [-1] * 10)
    probs, dec = predict(50)
    assert set(dec.tolist()) == {1} and probs[0] == 0.9
    test = np.array([1] * 40 + [-1] * 10)
    m = metrics(dec, probs, test)
    assert (m.recall_pos, m.recall_neg, m.f1_neg) == (1.0, 0.0, 0.0)
    assert m.acc == pytest.approx(0.8)


def test_random_baseline_near_chance():
    probs, dec = baseline_random(1)(10_000)
    labels = np.where(np.random.default_rng(2).random(10_000) < 0.8, 1, -1)
    assert abs(auc(probs, labels) - 0.5) <= 0.02
    assert set(np.unique(dec)) <= {1, -1}


@pytest.fixture(scope="module")
def small():
    data = synth_generate(SynthConfig(n_users=150, density=0.04, seed=5))
    scores = compute_scores(data.ratings, "rating", data.network.n_users)
    return Sources(data.network, data.ledger, scores)


def test_run_cv_deterministic_and_report_shape(small):
    a = run_cv(small, "ei,di,ip", k=5, seed=1)
    b = run_cv(small, "ei,di,ip", k=5, seed=1)
    assert a.mean == b.mean and a.pooled == b.pooled
    assert len(a.folds) == 5
    for r in a.folds + [a.mean, a.pooled]:
        for v in r.as_dict().values():
            assert 0 <= v <= 1 or v == r.n_undetermined


def test_fold_features_hide_test_edges(small):
    cv = CrossValidator(small, 5, 0)
    net = small.network
    for f in range(5):
        mask = cv.fold_mask(f)
        test = cv.plan.test_indices(f)
        assert len(mask) == len(test)
        rows = [cv.pairs[r] for r in test[:20]]
        _, _, Xte, _ = cv.fold_matrices(("di", "all23"), f)
        want = np.hstack([block_matrix(b, rows, small, mask) for b in ("di", "all23")])
        assert np.array_equal(Xte[:20], want)
        for i, j in rows:
            assert net.sign_of(i, j, mask) == 0


def test_subsample_ratio_and_nesting(small):
    cv = CrossValidator(small, 5, 0)
    train, _ = cv.training_rows(0, 100)
    keep60, drop60 = cv.training_rows(0, 60)
    keep80, _ = cv.training_rows(0, 80)
    assert set(keep60) < set(keep80) < set(train)
    full_ratio = (cv.labels[train] > 0).mean()
    assert abs((cv.labels[keep60] > 0).mean() - full_ratio) <= 0.02
    assert set(drop60) | set(keep60) == set(train)
    with pytest.raises(InfeasibleSubsample):
        cv.training_rows(0, 0.001)


def test_sweep_at_100_equals_plain_cv(small):
    [(x, mean_auc, rep)] = sparsity_sweep(small, "ei,di", x_levels=(100,), k=5, seed=2)
    plain = run_cv(small, "ei,di", k=5, seed=2)
    assert x == 100 and mean_auc == plain.mean.auc and rep.pooled == plain.pooled


def test_importance_matrix_rows(small):
    rows = importance_matrix(small, k=3, seed=0, n_trees=3)
    assert len(rows) == 18
    assert [r[0] for r in rows[::2]] == list(IMPORTANCE_SUBSETS)
    assert [r[1] for r in rows[:2]] == ["logistic", "forest"]


def test_baselines_in_cv(small):
    rep = run_cv(small, "ei", ClassifierConfig("majority"), k=5)
    assert rep.mean.recall_pos == 1.0 and rep.mean.recall_neg == 0.0
    rep = run_cv(small, "ei", ClassifierConfig("random"), k=5)
    assert abs(rep.pooled.auc - 0.5) < 0.1


def test_emotion_only_signal_isolated():
    cfg = SynthConfig(n_users=300, density=0.02, emotion=1, diffusion=0, personality=0, seed=3)
    data = synth_generate(cfg)
    src = Sources(data.network, data.ledger, compute_scores(data.ratings, "rating"))
    cv = CrossValidator(src, 5, 3)
    ei, di, ip = (cv.run(b).mean.auc for b in ("ei", "di", "ip"))
    assert ei > di and ei > ip


def test_threads_do_not_change_results(small, monkeypatch):
    serial = run_cv(small, "ei,di,ip", k=4, seed=6)
    monkeypatch.setenv("SIGNET_THREADS", "3")
    threaded = run_cv(small, "ei,di,ip", k=4, seed=6)
    assert serial.mean == threaded.mean and serial.folds == threaded.folds
