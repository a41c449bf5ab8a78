import dataclasses
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forkguard.collusion_detector import (
    FEATURE_NAMES,
    MODEL_FORMAT,
    Decision,
    LinearModel,
    TrainingMeta,
    decide,
    defect_probability,
    detect,
    episode_features,
    evaluate,
    extract_features,
    load_model,
    logistic_gradient,
    logistic_loss,
    model_from_dict,
    model_to_dict,
    predict,
    roc_auc,
    save_model,
    score_metrics,
    train,
)
from forkguard.consortium_sim import History, Observables, generate_episode

META = {"median_v": 100.0}


def zero_model():
    return LinearModel(np.zeros(6), 0.0, TrainingMeta(0.1, 1, 0.0, 100.0))


def brute_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    wins = sum(1.0 if a > b else 0.5 if a == b else 0.0 for a, b in itertools.product(pos, neg))
    return wins / (len(pos) * len(neg))


# --- defect probability ---------------------------------------------------------

def test_defect_probability_examples():
    assert defect_probability(History(0, 0)) == 0.5
    assert defect_probability((3, 7)) == pytest.approx(4 / 9)
    assert defect_probability({"d": 0, "t": 1000}) == pytest.approx(1 / 1002)


def test_defect_probability_rejects_bad_history():
    for bad in ((3, 2), (-1, 4), (0, -1)):
        with pytest.raises(ValueError):
            defect_probability(bad)


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_defect_probability_open_interval_and_monotone(a, b):
    d, t = sorted((a, b))
    p = defect_probability((d, t))
    assert 0.0 < p < 1.0
    if d < t:
        assert defect_probability((d + 1, t)) >= p


# --- features --------------------------------------------------------------------

def test_features_zero_value_no_candidates():
    x = extract_features(Observables(0.0, 0.0, 6, {}), None, META)
    assert x.shape == (len(FEATURE_NAMES),) == (6,)
    assert x[1] == 0.0 and x[2] == 0.5 and x[3] == 0.5
    assert x[5] == pytest.approx(1 / 6)


def test_utility_signal_sign_follows_majority():
    hi = extract_features(Observables(0.6, 100.0, 6, {}), None, META)
    lo = extract_features(Observables(0.3, 100.0, 6, {}), None, META)
    assert hi[4] > 0 > lo[4]


def test_features_deterministic():
    obs = Observables(0.41, 250.0, 3, {"a": History(2, 9), "b": History(0, 9)})
    x1 = extract_features(obs, None, META)
    x2 = extract_features(obs, None, META)
    assert x1.tobytes() == x2.tobytes()
    assert x1[2] == pytest.approx(3 / 11) and x1[3] == pytest.approx((3 / 11 + 1 / 11) / 2)
    assert x1[1] == pytest.approx(250 / 350)


def test_features_missing_field_named():
    obs = {"q_observed": 0.2, "value_v": 10.0, "histories": {}}
    with pytest.raises(ValueError, match="confirmations_n"):
        extract_features(obs, None, META)


def test_features_accept_mapping_and_external_histories():
    obs = {"q_observed": 0.2, "value_v": 10.0, "confirmations_n": 2}
    x = extract_features(obs, {"a": History(1, 1)}, META)
    assert x[2] == pytest.approx(2 / 3)


@given(st.floats(0, 1), st.floats(0, 1e7), st.integers(1, 100))
def test_features_bounded(q, v, n):
    x = extract_features(Observables(q, v, n, {}), None, META)
    assert np.all(np.isfinite(x))
    assert 0 <= x[0] <= 1 and 0 <= x[1] < 1


# --- training ----------------------------------------------------------------------

def toy_separable():
    X = np.zeros((4, 6))
    X[:, 0] = [0.1, 0.2, 0.7, 0.8]
    X[:, 5] = 1 / 6
    y = np.array([0, 0, 1, 1.0])
    return X, y


def test_train_separable_toy():
    X, y = toy_separable()
    model = train(X, y, learning_rate=2.0, epochs=500, seed=0)
    assert np.all((predict(model, X) >= 0.5) == (y == 1))


def test_train_rejects_single_class():
    X, _ = toy_separable()
    with pytest.raises(ValueError, match="both classes"):
        train(X, np.ones(4))


def test_train_rejects_wrong_shape():
    with pytest.raises(ValueError):
        train(np.zeros((4, 5)), np.array([0, 1, 0, 1.0]))


def test_train_aborts_on_non_finite_loss():
    X, y = toy_separable()
    X = X * 1e300
    with pytest.raises(FloatingPointError, match="epoch"):
        train(X, y, learning_rate=1e300, epochs=5)


def test_train_deterministic():
    X, y = toy_separable()
    assert train(X, y, 0.5, 100, seed=4) == train(X, y, 0.5, 100, seed=4)


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(32, 6))
    y = (rng.random(32) < 0.4).astype(float)
    w, b = rng.normal(size=6), float(rng.normal())
    gw, gb = logistic_gradient(w, b, X, y)
    h = 1e-5
    num = np.empty(7)
    for j in range(6):
        e = np.zeros(6)
        e[j] = h
        num[j] = (logistic_loss(w + e, b, X, y) - logistic_loss(w - e, b, X, y)) / (2 * h)
    num[6] = (logistic_loss(w, b + h, X, y) - logistic_loss(w, b - h, X, y)) / (2 * h)
    ana = np.append(gw, gb)
    rel = np.abs(ana - num) / np.maximum(np.maximum(np.abs(ana), np.abs(num)), 1e-8)
    assert rel.max() <= 1e-5


def test_default_model_loss_decreases_and_finite(default_model):
    curve = default_model.loss_curve
    assert curve[-1] <= curve[0]
    assert np.all(np.isfinite(default_model.weights)) and math.isfinite(default_model.bias)


def test_default_model_heldout_accuracy(default_split, default_model):
    _, _, test = default_split
    X, y = episode_features(test.episodes, default_model.training_meta.median_v)
    assert evaluate(default_model, X, y).accuracy >= 0.85


def test_default_model_flags_forced_majority(default_split, default_model):
    scenario, train_set, _ = default_split
    params = train_set.final_params
    exact = dataclasses.replace(scenario, forced_coalition=("bank-a", "bank-b"), observation_sigma=0.0)
    rng = np.random.default_rng(77)
    for _ in range(200):
        ep = generate_episode(params, exact, rng)
        assert ep.observables.q_observed == pytest.approx(0.6)
        assert detect(default_model, ep.observables).attack_probability > 0.5
    # at the training noise level a 2-sigma low reading can slip under 0.5
    noisy = dataclasses.replace(exact, observation_sigma=scenario.observation_sigma)
    probs = [detect(default_model, generate_episode(params, noisy, rng).observables).attack_probability for _ in range(500)]
    assert np.mean(np.array(probs) > 0.5) >= 0.95


# --- prediction and gate -----------------------------------------------------------

def test_predict_zero_model_is_half():
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert predict(zero_model(), rng.normal(size=6)) == 0.5


def test_predict_length_mismatch():
    with pytest.raises(ValueError):
        predict(zero_model(), np.zeros(5))


def test_predict_monotone_in_q(default_model):
    assert default_model.weights[0] > 0
    base = extract_features(Observables(0.0, 120.0, 6, {}), None, default_model.training_meta)
    probs = []
    for q in np.linspace(0, 1, 41):
        x = base.copy()
        x[0] = q
        probs.append(predict(default_model, x))
    assert all(b >= a for a, b in zip(probs, probs[1:]))


def test_decide_examples():
    assert decide(0.7, 0.5).decision is Decision.CANCEL_AND_RETRY
    assert decide(0.5, 0.5).decision is Decision.CANCEL_AND_RETRY
    assert decide(0.49, 0.5).decision is Decision.APPROVE
    v = decide(0.3, 0.25)
    assert (v.attack_probability, v.threshold_used) == (0.3, 0.25)


def test_decide_rejects_bad_threshold():
    for t in (-0.1, 1.1):
        with pytest.raises(ValueError):
            decide(0.5, t)


@given(st.floats(0, 1), st.floats(0, 1))
def test_decide_invariant(p, t):
    v = decide(p, t)
    assert (v.decision is Decision.CANCEL_AND_RETRY) == (p >= t)


# --- evaluation ----------------------------------------------------------------------

def test_auc_perfect_and_constant():
    labels = np.array([0, 1, 0, 1, 1, 0])
    assert roc_auc(labels.astype(float), labels) == 1.0
    assert roc_auc(np.full(6, 0.3), labels) == 0.5


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(0, 5), st.booleans()), min_size=2, max_size=40))
def test_auc_matches_pairwise_enumeration(pairs):
    scores = [s / 5 for s, _ in pairs]
    labels = [y for _, y in pairs]
    if all(labels) or not any(labels):
        return
    assert roc_auc(scores, labels) == pytest.approx(brute_auc(scores, labels), abs=1e-12)


def test_metrics_confusion_and_ranges():
    m = score_metrics([0.9, 0.6, 0.4, 0.2, 0.5], [1, 0, 1, 0, 1])
    assert (m.tp, m.fp, m.tn, m.fn) == (2, 1, 1, 1)
    assert m.confusion_matrix == [[1, 1], [1, 2]]
    assert m.accuracy == 0.6 and m.precision == pytest.approx(2 / 3) and m.recall == pytest.approx(2 / 3)
    for val in (m.accuracy, m.precision, m.recall, m.auc):
        assert 0 <= val <= 1


def test_evaluate_rejects_empty():
    with pytest.raises(ValueError):
        evaluate(zero_model(), np.zeros((0, 6)), np.zeros(0))


def test_label_shuffled_auc_is_null(default_split):
    _, train_set, test = default_split
    rng = np.random.default_rng(123)
    median_v = float(np.median([e.transaction.value_v for e in train_set.episodes]))
    X, y = episode_features(train_set.episodes, median_v)
    model = train(X, rng.permutation(y), 1.0, 1000, seed=0, median_v=median_v)
    # held-out, also shuffled: 10^4 rows
    Xt, yt = episode_features(train_set.episodes[:8000] + test.episodes, median_v)
    auc = evaluate(model, Xt, rng.permutation(yt)).auc
    assert 0.45 <= auc <= 0.55


# --- model files -----------------------------------------------------------------

def test_model_file_roundtrip(tmp_path, default_model):
    path = tmp_path / "m.bin"
    save_model(default_model, path, header="# test header\n")
    assert load_model(path) == default_model
    assert path.read_text().startswith("# test header")


def test_model_format_tag_checked():
    d = model_to_dict(zero_model())
    assert d["format"] == MODEL_FORMAT
    d["format"] = "something-else"
    with pytest.raises(ValueError, match=MODEL_FORMAT):
        model_from_dict(d)


def test_model_rejects_wrong_weight_count():
    with pytest.raises(ValueError):
        LinearModel(np.zeros(5), 0.0, TrainingMeta(0.1, 1, 0.0, 1.0))


def test_fit_episodes_stores_median(default_split, default_model):
    _, train_set, _ = default_split
    med = float(np.median([e.transaction.value_v for e in train_set.episodes]))
    assert default_model.training_meta.median_v == med
