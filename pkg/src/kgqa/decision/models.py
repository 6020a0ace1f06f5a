"""Decision models deciding whether a candidate answer is correct.

Three pluggable kinds over the 4-feature vectors:

* ``mlp`` — feedforward net 4 -> 10 -> 20 -> 10 -> 1, rectifier hidden
  units, sigmoid output, binary cross-entropy, per-sample gradient descent
* ``logistic`` — a single sigmoid unit, same optimizer
* ``gaussian-bayes`` — per-class per-feature Gaussian likelihoods with
  fixed class priors, posterior by Bayes rule

The reported confidence is always the positive-class probability.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import DatasetError, ModelFormatError, TrainingError
from .evidence import FeatureVector

MODEL_FORMAT = "kgqa-model"
MODEL_VERSION = 1

DATASET_HEADER = "p_r1,p_r2,n_r1,n_r2,label"


@dataclass(frozen=True)
class LabeledExample:
    features: FeatureVector
    label: int


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 500
    hidden_layers: tuple[int, ...] = (10, 20, 10)
    priors: tuple[float, float] = (0.15, 0.85)   # p(class 0), p(class 1)
    variance_floor: float = 1e-6


def _as_xy(dataset):
    X = np.array([ex.features.as_array() for ex in dataset], dtype=np.float64)
    y = np.array([ex.label for ex in dataset], dtype=np.float64)
    return X, y


# ---------------------------------------------------------------------------
# dataset file format


def save_dataset(dataset, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(DATASET_HEADER + "\n")
        for ex in dataset:
            f = ex.features
            fh.write(f"{f.p_r1},{f.p_r2},{f.n_r1},{f.n_r2},{ex.label}\n")


def load_dataset(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0].replace(" ", "") != DATASET_HEADER:
        raise DatasetError(f"expected header {DATASET_HEADER!r}")
    dataset = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 5:
            raise DatasetError(f"line {i}: expected 5 comma-separated values")
        try:
            p_r1, p_r2 = float(parts[0]), float(parts[1])
            n_r1, n_r2, label = int(parts[2]), int(parts[3]), int(parts[4])
        except ValueError as exc:
            raise DatasetError(f"line {i}: {exc}") from exc
        if label not in (0, 1):
            raise DatasetError(f"line {i}: label must be 0 or 1")
        dataset.append(LabeledExample(FeatureVector(p_r1, p_r2, n_r1, n_r2), label))
    return dataset


# ---------------------------------------------------------------------------
# models


def _sigmoid(z):
    return np.where(z >= 0, 1.0 / (1.0 + np.exp(-z)),
                    np.exp(z) / (1.0 + np.exp(z)))


class DecisionModel:
    kind = "base"

    def predict_proba(self, features) -> float:
        raise NotImplementedError

    def predict(self, features):
        """(label, confidence); confidence is the positive-class probability."""
        proba = self.predict_proba(features)
        return (1 if proba >= 0.5 else 0), proba

    def to_dict(self) -> dict:
        raise NotImplementedError

    def save(self, path):
        payload = {"format": MODEL_FORMAT, "version": MODEL_VERSION}
        payload.update(self.to_dict())
        tmp = f"{path}.tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
        os.replace(tmp, path)


def _features_array(features) -> np.ndarray:
    if isinstance(features, FeatureVector):
        return features.as_array()
    return np.asarray(features, dtype=np.float64)


class MlpModel(DecisionModel):
    kind = "mlp"

    def __init__(self, weights, biases, seed=None, epochs=None):
        self.weights = [np.asarray(w, dtype=np.float64) for w in weights]
        self.biases = [np.asarray(b, dtype=np.float64) for b in biases]
        self.seed = seed
        self.epochs = epochs

    @classmethod
    def initialize(cls, layers, rng, seed=None, epochs=None):
        weights, biases = [], []
        for fan_in, fan_out in zip(layers[:-1], layers[1:]):
            weights.append(rng.normal(0.0, np.sqrt(2.0 / fan_in),
                                      size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases, seed=seed, epochs=epochs)

    def forward(self, x):
        """Returns (activations, pre-activations) for every layer."""
        acts, zs = [np.asarray(x, dtype=np.float64)], []
        a = acts[0]
        last = len(self.weights) - 1
        for li, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = a @ w + b
            zs.append(z)
            a = _sigmoid(z) if li == last else np.maximum(z, 0.0)
            acts.append(a)
        return acts, zs

    def predict_proba(self, features) -> float:
        acts, _ = self.forward(_features_array(features))
        return float(acts[-1][0]) if acts[-1].ndim == 1 else float(acts[-1])

    def gradients(self, X, y):
        """Mean binary cross-entropy loss and its analytic gradients."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64).reshape(-1, 1)
        acts, zs = self.forward(X)
        p = np.clip(acts[-1], 1e-12, 1.0 - 1e-12)
        n = X.shape[0]
        loss = float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))
        # sigmoid + BCE collapse to (p - y) at the output pre-activation
        delta = (acts[-1] - y) / n
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        for li in range(len(self.weights) - 1, -1, -1):
            grads_w[li] = acts[li].T @ delta
            grads_b[li] = delta.sum(axis=0)
            if li > 0:
                delta = (delta @ self.weights[li].T) * (zs[li - 1] > 0.0)
        return loss, grads_w, grads_b

    def to_dict(self):
        return {
            "kind": self.kind,
            "layers": [int(w.shape[0]) for w in self.weights]
                      + [int(self.weights[-1].shape[1])],
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "seed": self.seed,
            "epochs": self.epochs,
        }

    @classmethod
    def from_dict(cls, raw):
        return cls(raw["weights"], raw["biases"],
                   seed=raw.get("seed"), epochs=raw.get("epochs"))


class LogisticModel(DecisionModel):
    kind = "logistic"

    def __init__(self, weights, bias, seed=None, epochs=None):
        self.w = np.asarray(weights, dtype=np.float64)
        self.b = float(bias)
        self.seed = seed
        self.epochs = epochs

    def predict_proba(self, features) -> float:
        x = _features_array(features)
        return float(_sigmoid(x @ self.w + self.b))

    def to_dict(self):
        return {"kind": self.kind, "weights": self.w.tolist(), "bias": self.b,
                "seed": self.seed, "epochs": self.epochs}

    @classmethod
    def from_dict(cls, raw):
        return cls(raw["weights"], raw["bias"],
                   seed=raw.get("seed"), epochs=raw.get("epochs"))


class GaussianBayesModel(DecisionModel):
    kind = "gaussian-bayes"

    def __init__(self, means, variances, priors):
        self.means = np.asarray(means, dtype=np.float64)       # (2, d)
        self.variances = np.asarray(variances, dtype=np.float64)
        self.priors = np.asarray(priors, dtype=np.float64)     # (2,)

    def _log_posteriors(self, x):
        log_lik = -0.5 * (np.log(2.0 * np.pi * self.variances)
                          + (x - self.means) ** 2 / self.variances).sum(axis=1)
        joint = np.log(self.priors) + log_lik
        joint -= joint.max()
        post = np.exp(joint)
        return post / post.sum()

    def predict_proba(self, features) -> float:
        return float(self._log_posteriors(_features_array(features))[1])

    def predict(self, features):
        post = self._log_posteriors(_features_array(features))
        return int(np.argmax(post)), float(post[1])

    def to_dict(self):
        return {"kind": self.kind, "means": self.means.tolist(),
                "variances": self.variances.tolist(),
                "priors": self.priors.tolist()}

    @classmethod
    def from_dict(cls, raw):
        return cls(raw["means"], raw["variances"], raw["priors"])


_MODEL_KINDS = {
    "mlp": MlpModel,
    "logistic": LogisticModel,
    "gaussian-bayes": GaussianBayesModel,
}


def load_model(path) -> DecisionModel:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model snapshot: {exc}") from exc
    if raw.get("format") != MODEL_FORMAT or raw.get("version") != MODEL_VERSION:
        raise ModelFormatError("not a kgqa model snapshot (format/version)")
    kind = raw.get("kind")
    if kind not in _MODEL_KINDS:
        raise ModelFormatError(f"unknown model kind {kind!r}")
    try:
        return _MODEL_KINDS[kind].from_dict(raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model snapshot: {exc}") from exc


# ---------------------------------------------------------------------------
# training


def _sgd(model_forward_update, X, y, epochs, rng):
    n = X.shape[0]
    for _ in range(epochs):
        for idx in rng.permutation(n):
            model_forward_update(X[idx], y[idx])


def train(dataset, kind: str, config: TrainConfig | None = None,
          seed: int = 0) -> DecisionModel:
    if not dataset:
        raise TrainingError("empty training dataset")
    if kind not in _MODEL_KINDS:
        raise TrainingError(f"unknown model kind {kind!r}")
    config = config or TrainConfig()
    X, y = _as_xy(dataset)
    rng = np.random.default_rng(seed)

    if kind == "gaussian-bayes":
        classes = np.unique(y)
        if classes.size < 2:
            raise TrainingError("gaussian-bayes needs both classes present")
        means, variances = [], []
        for c in (0.0, 1.0):
            Xc = X[y == c]
            means.append(Xc.mean(axis=0))
            variances.append(np.maximum(Xc.var(axis=0), config.variance_floor))
        return GaussianBayesModel(means, variances, config.priors)

    if kind == "logistic":
        model = LogisticModel(rng.normal(0.0, 0.01, size=X.shape[1]), 0.0,
                              seed=seed, epochs=config.epochs)

        def update(x, target):
            p = model.predict_proba(x)
            g = p - target
            model.w -= config.learning_rate * g * x
            model.b -= config.learning_rate * g

        _sgd(update, X, y, config.epochs, rng)
        return model

    layers = (X.shape[1], *config.hidden_layers, 1)
    model = MlpModel.initialize(layers, rng, seed=seed, epochs=config.epochs)

    def update(x, target):
        _, gw, gb = model.gradients(x[None, :], [target])
        for li in range(len(model.weights)):
            model.weights[li] -= config.learning_rate * gw[li]
            model.biases[li] -= config.learning_rate * gb[li]

    _sgd(update, X, y, config.epochs, rng)
    return model


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class EvalMetrics:
    balanced_accuracy: float
    precision: float
    recall: float
    f1: float
    confidence_mse: float
    counts: dict = field(default_factory=dict)


def evaluate(model: DecisionModel, dataset, mse_over: str = "positives"
             ) -> EvalMetrics:
    """Confusion metrics at the model's decision threshold.

    ``confidence_mse`` follows the convention that the true confidence of a
    correct answer is 1: by default it averages (1 - confidence)^2 over the
    positive-class examples; ``mse_over='all'`` scores every example against
    its 0/1 label instead.
    """
    if not dataset:
        raise DatasetError("empty evaluation dataset")
    if mse_over not in ("positives", "all"):
        raise ValueError("mse_over must be 'positives' or 'all'")
    tp = tn = fp = fn = 0
    squared = []
    for ex in dataset:
        label, conf = model.predict(ex.features)
        if ex.label == 1:
            if mse_over == "positives":
                squared.append((1.0 - conf) ** 2)
            if label == 1:
                tp += 1
            else:
                fn += 1
        else:
            if label == 1:
                fp += 1
            else:
                tn += 1
        if mse_over == "all":
            squared.append((conf - ex.label) ** 2)
    sensitivity = tp / (tp + fn) if tp + fn else 0.0
    specificity = tn / (tn + fp) if tn + fp else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = sensitivity
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return EvalMetrics(
        balanced_accuracy=0.5 * (sensitivity + specificity),
        precision=precision,
        recall=recall,
        f1=f1,
        confidence_mse=float(np.mean(squared)) if squared else 0.0,
        counts={"tp": tp, "tn": tn, "fp": fp, "fn": fn},
    )
