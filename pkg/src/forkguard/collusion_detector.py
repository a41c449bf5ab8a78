"""Collusion detector: defect estimates, attack classifier and approval gate.

The agent scores each transaction from what it can observe (a noisy
estimate of the colluding hashrate, the transaction value, stakeholder
histories, the confirmation count). A logistic model turns the features
into an attack probability and the gate cancels the transaction when that
probability reaches the threshold.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .consortium_sim import Episode, History, Observables
from .payoff_game import AttackStake, attack_utility
from .race_math import HashratePartition

MODEL_FORMAT = "forkguard-model-v1"
FEATURE_NAMES = (
    "q_observed",
    "v_normalized",
    "defect_prob_max",
    "defect_prob_mean",
    "utility_signal",
    "inv_confirmations",
)
N_FEATURES = len(FEATURE_NAMES)
OBSERVABLE_FIELDS = ("q_observed", "value_v", "confirmations_n", "histories")


class Decision(str, enum.Enum):
    APPROVE = "Approve"
    CANCEL_AND_RETRY = "CancelAndRetry"


@dataclass(frozen=True)
class DetectionVerdict:
    attack_probability: float
    decision: Decision
    threshold_used: float


@dataclass(frozen=True)
class TrainingMeta:
    learning_rate: float
    epochs: int
    final_loss: float
    median_v: float
    seed: int = 0


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    training_meta: TrainingMeta
    loss_curve: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} weights, got shape {w.shape}")
        if not (np.all(np.isfinite(w)) and math.isfinite(self.bias)):
            raise ValueError("model parameters must be finite")
        if not self.training_meta.final_loss >= 0:
            raise ValueError("final_loss must be non-negative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __eq__(self, other):
        if not isinstance(other, LinearModel):
            return NotImplemented
        return (
            np.array_equal(self.weights, other.weights)
            and self.bias == other.bias
            and self.training_meta == other.training_meta
        )

    __hash__ = None


# --------------------------------------------------------------------------
# part 1: per-stakeholder defect probability


def defect_probability(history) -> float:
    """Laplace-smoothed defection rate ``(d + 1) / (t + 2)``."""
    if isinstance(history, History):
        d, t = history.d, history.t
    elif isinstance(history, Mapping):
        d, t = history["d"], history["t"]
    else:
        d, t = history
    if d < 0 or t < 0 or d > t:
        raise ValueError(f"history requires 0 <= d <= t, got d={d}, t={t}")
    return (d + 1) / (t + 2)


# --------------------------------------------------------------------------
# part 2: features and classifier


def _get(obs, name):
    if isinstance(obs, Observables):
        return getattr(obs, name)
    try:
        return obs[name]
    except KeyError:
        raise ValueError(f"observables missing field {name!r}") from None


def utility_signal(v: float, q_observed: float, block_value_B: float = 0.0) -> float:
    # squashed utility of an attack with nothing pre-mined at risk (o = 0)
    u = attack_utility(AttackStake(v, 0, block_value_B), HashratePartition.from_attacker(q_observed))
    return math.tanh(u / (v + 1.0))


def extract_features(observables, histories=None, model_meta=None) -> np.ndarray:
    """Map one observation to the fixed 6-component feature vector.

    ``histories`` defaults to the snapshot inside ``observables``; every
    stakeholder in it is a collusion candidate. With no candidates the
    defect statistics fall back to the uninformed 0.5.
    """
    for name in OBSERVABLE_FIELDS:
        if name == "histories" and histories is not None:
            continue
        _get(observables, name)
    if model_meta is None:
        raise ValueError("model_meta with median_v is required")
    median_v = model_meta.median_v if hasattr(model_meta, "median_v") else model_meta["median_v"]

    q = min(1.0, max(0.0, float(_get(observables, "q_observed"))))
    v = float(_get(observables, "value_v"))
    n = int(_get(observables, "confirmations_n"))
    if v < 0 or n < 1:
        raise ValueError("value_v must be >= 0 and confirmations_n >= 1")
    hist = histories if histories is not None else _get(observables, "histories")

    v_norm = v / (v + median_v) if v > 0 else 0.0
    probs = [defect_probability(h) for h in hist.values()]
    d_max = max(probs) if probs else 0.5
    d_mean = math.fsum(probs) / len(probs) if probs else 0.5
    return np.array([q, v_norm, d_max, d_mean, utility_signal(v, q), 1.0 / n])


def episode_features(episodes: Sequence[Episode], median_v: float):
    """Feature matrix and attack labels for a list of episodes."""
    meta = {"median_v": median_v}
    X = np.array([extract_features(e.observables, None, meta) for e in episodes]).reshape(-1, N_FEATURES)
    y = np.array([float(e.attack_attempted) for e in episodes])
    return X, y


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def logistic_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray) -> float:
    z = X @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def logistic_gradient(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray):
    err = _sigmoid(X @ w + b) - y
    return X.T @ err / len(y), float(np.mean(err))


def train(
    X,
    y,
    learning_rate: float = 1.0,
    epochs: int = 3000,
    seed: int = 0,
    median_v: float = 1.0,
) -> LinearModel:
    """Full-batch gradient descent on the mean logistic loss."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[1] != N_FEATURES or len(X) != len(y):
        raise ValueError(f"expected X of shape (N, {N_FEATURES}) matching y")
    if len(np.unique(y)) < 2:
        raise ValueError("training data must contain both classes")
    if learning_rate <= 0 or epochs < 1:
        raise ValueError("learning_rate must be positive and epochs >= 1")

    rng = np.random.default_rng(seed)
    w = rng.normal(0.0, 0.01, N_FEATURES)
    b = 0.0
    curve = [logistic_loss(w, b, X, y)]
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(epochs):
            gw, gb = logistic_gradient(w, b, X, y)
            w = w - learning_rate * gw
            b = b - learning_rate * gb
            loss = logistic_loss(w, b, X, y)
            if not math.isfinite(loss):
                raise FloatingPointError(f"non-finite loss at epoch {epoch + 1} (learning_rate={learning_rate})")
            curve.append(loss)
    meta = TrainingMeta(learning_rate, epochs, curve[-1], median_v, seed)
    return LinearModel(w, float(b), meta, tuple(curve))


def fit_episodes(episodes: Sequence[Episode], learning_rate=1.0, epochs=3000, seed=0) -> LinearModel:
    """Train on simulated episodes; the median transaction value is stored in the model."""
    median_v = float(np.median([e.transaction.value_v for e in episodes]))
    if median_v <= 0:
        raise ValueError("median training value must be positive")
    X, y = episode_features(episodes, median_v)
    return train(X, y, learning_rate, epochs, seed, median_v)


def predict(model: LinearModel, features) -> np.ndarray | float:
    """Attack probability; accepts one vector or a batch of rows."""
    x = np.asarray(features, dtype=float)
    if x.shape[-1] != N_FEATURES:
        raise ValueError(f"feature length {x.shape[-1]} != {N_FEATURES}")
    p = _sigmoid(x @ model.weights + model.bias)
    return float(p) if x.ndim == 1 else p


def decide(probability: float, threshold: float = 0.5) -> DetectionVerdict:
    """Cancel when ``probability >= threshold`` (inclusive), approve otherwise."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    if not 0.0 <= probability <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {probability}")
    decision = Decision.CANCEL_AND_RETRY if probability >= threshold else Decision.APPROVE
    return DetectionVerdict(float(probability), decision, float(threshold))


def detect(model: LinearModel, observables, threshold: float = 0.5) -> DetectionVerdict:
    x = extract_features(observables, None, model.training_meta)
    return decide(predict(model, x), threshold)


# --------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    auc: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def confusion_matrix(self):
        return [[self.tn, self.fp], [self.fn, self.tp]]


def roc_auc(scores, labels) -> float:
    """Probability a positive outranks a negative; ties count one half."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes")
    ranks = rankdata(scores)  # midranks resolve ties as half-wins
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def score_metrics(scores, labels, threshold: float = 0.5) -> Metrics:
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(bool)
    if len(scores) == 0:
        raise ValueError("cannot evaluate an empty dataset")
    pred = scores >= threshold
    tp = int(np.sum(pred & labels))
    fp = int(np.sum(pred & ~labels))
    tn = int(np.sum(~pred & ~labels))
    fn = int(np.sum(~pred & labels))
    return Metrics(
        accuracy=(tp + tn) / len(scores),
        precision=tp / (tp + fp) if tp + fp else 0.0,
        recall=tp / (tp + fn) if tp + fn else 0.0,
        auc=roc_auc(scores, labels),
        tp=tp, fp=fp, tn=tn, fn=fn,
    )


def evaluate(model: LinearModel, X, y, threshold: float = 0.5) -> Metrics:
    X = np.asarray(X, dtype=float).reshape(-1, N_FEATURES)
    if len(X) == 0:
        raise ValueError("cannot evaluate an empty dataset")
    return score_metrics(predict(model, X), y, threshold)


# --------------------------------------------------------------------------
# model files


def model_to_dict(model: LinearModel) -> dict:
    m = model.training_meta
    return {
        "format": MODEL_FORMAT,
        "features": list(FEATURE_NAMES),
        "weights": [float(x) for x in model.weights],
        "bias": model.bias,
        "training_meta": {
            "learning_rate": m.learning_rate,
            "epochs": m.epochs,
            "final_loss": m.final_loss,
            "median_v": m.median_v,
            "seed": m.seed,
        },
    }


def model_from_dict(d: Mapping) -> LinearModel:
    if d.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a {MODEL_FORMAT} model (format={d.get('format')!r})")
    meta = d["training_meta"]
    tm = TrainingMeta(
        float(meta["learning_rate"]), int(meta["epochs"]), float(meta["final_loss"]),
        float(meta["median_v"]), int(meta.get("seed", 0)),
    )
    return LinearModel(np.array(d["weights"], dtype=float), float(d["bias"]), tm)


def save_model(model: LinearModel, path, header: Optional[str] = None) -> None:
    text = json.dumps(model_to_dict(model), indent=2) + "\n"
    Path(path).write_text((header or "") + text, encoding="utf-8")


def load_model(path) -> LinearModel:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    body = "\n".join(line for line in lines if not line.startswith("#"))
    return model_from_dict(json.loads(body))
