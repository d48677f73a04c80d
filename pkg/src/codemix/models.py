"""Three classical classifiers behind one fit/predict contract.

Multinomial logistic regression (mini-batch gradient descent on softmax
cross-entropy), a linear one-vs-rest SVM (subgradient descent on hinge
loss), and multinomial naive Bayes (closed form with Laplace smoothing).
All training is deterministic given the seed; class order is always
negative, neutral, positive.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse

from .corpus import Sentiment
from .errors import ConfigError, DataError, NumericError
from .vectorize import SparseVector

N_CLASSES = len(Sentiment)
FORMAT_VERSION = "model v1"

_DEFAULT_LEARNING_RATE = {"lr": 0.1, "svm": 0.05}


class ModelKind(Enum):
    LR = "lr"
    MNB = "mnb"
    SVM = "svm"

    @classmethod
    def from_value(cls, value: str) -> "ModelKind":
        try:
            return cls(value)
        except ValueError:
            raise ConfigError(f"unknown model kind {value!r}") from None


@dataclass(frozen=True)
class TrainConfig:
    model_kind: ModelKind = ModelKind.SVM
    l2_lambda: float = 1e-4
    learning_rate: float | None = None  # None -> per-kind default (lr 0.1, svm 0.05)
    epochs: int = 50
    batch_size: int = 32
    mnb_alpha: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.l2_lambda < 0:
            raise ConfigError("l2_lambda must be >= 0")
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ConfigError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.mnb_alpha <= 0:
            raise ConfigError("mnb_alpha must be > 0")

    @property
    def resolved_learning_rate(self) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return _DEFAULT_LEARNING_RATE.get(self.model_kind.value, 0.1)


@dataclass(frozen=True)
class LinearModel:
    """LR or SVM parameters: class scores are weights @ x + bias."""

    kind: ModelKind
    weights: np.ndarray  # (n_classes, dim)
    bias: np.ndarray  # (n_classes,)

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class MnbModel:
    """Multinomial naive Bayes parameters in log space."""

    log_prior: np.ndarray  # (n_classes,)
    log_likelihood: np.ndarray  # (n_classes, dim)
    alpha: float

    @property
    def kind(self) -> ModelKind:
        return ModelKind.MNB

    @property
    def dim(self) -> int:
        return self.log_likelihood.shape[1]


Classifier = LinearModel | MnbModel


def to_csr(vectors: Sequence[SparseVector]) -> sparse.csr_matrix:
    """Stack sparse vectors into one CSR matrix (one row per vector)."""
    if not vectors:
        raise DataError("cannot build a matrix from zero vectors")
    dims = {vector.dim for vector in vectors}
    if len(dims) != 1:
        raise DataError(f"vectors have mixed dimensions {sorted(dims)}")
    indptr = np.cumsum([0] + [len(vector.indices) for vector in vectors])
    indices = np.concatenate([np.asarray(v.indices, dtype=np.int64) for v in vectors])
    data = np.concatenate([np.asarray(v.weights, dtype=np.float64) for v in vectors])
    return sparse.csr_matrix((data, indices, indptr), shape=(len(vectors), dims.pop()))


def softmax_cross_entropy(W: np.ndarray, b: np.ndarray, X, y_idx: np.ndarray, l2_lambda: float):
    """Mean softmax cross-entropy plus (lambda/2)*||W||^2 and its gradients.

    Returns (loss, grad_W, grad_b).  X may be dense or CSR.
    """
    n = X.shape[0]
    logits = np.asarray(X @ W.T) + b
    logits -= logits.max(axis=1, keepdims=True)
    exp = np.exp(logits)
    probs = exp / exp.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore"):
        nll = -np.log(probs[np.arange(n), y_idx])
    loss = nll.mean() + 0.5 * l2_lambda * float(np.sum(W * W))
    grad_logits = probs
    grad_logits[np.arange(n), y_idx] -= 1.0
    grad_logits /= n
    grad_W = np.asarray((X.T @ grad_logits).T) + l2_lambda * W
    grad_b = grad_logits.sum(axis=0)
    return loss, grad_W, grad_b


def ovr_hinge_objective(W: np.ndarray, b: np.ndarray, X, y_idx: np.ndarray, l2_lambda: float):
    """One-vs-rest hinge objective plus (lambda/2)*||W||^2 and a subgradient.

    Each class is a binary problem with targets +1/-1; the data term is the
    per-class mean hinge loss summed over classes.  Returns (loss, grad_W,
    grad_b).
    """
    n = X.shape[0]
    scores = np.asarray(X @ W.T) + b
    targets = np.full(scores.shape, -1.0)
    targets[np.arange(n), y_idx] = 1.0
    margins = 1.0 - targets * scores
    active = margins > 0.0
    loss = float(np.where(active, margins, 0.0).sum()) / n + 0.5 * l2_lambda * float(np.sum(W * W))
    grad_scores = np.where(active, -targets, 0.0) / n
    grad_W = np.asarray((X.T @ grad_scores).T) + l2_lambda * W
    grad_b = grad_scores.sum(axis=0)
    return loss, grad_W, grad_b


def _gradient_descent(X, y_idx: np.ndarray, n_classes: int, cfg: TrainConfig, objective):
    rng = np.random.default_rng(cfg.seed)
    n = X.shape[0]
    W = np.zeros((n_classes, X.shape[1]))
    b = np.zeros(n_classes)
    lr = cfg.resolved_learning_rate
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            rows = order[start : start + cfg.batch_size]
            loss, grad_W, grad_b = objective(W, b, X[rows], y_idx[rows], cfg.l2_lambda)
            if not math.isfinite(loss):
                raise NumericError(f"training loss became non-finite at epoch {epoch}")
            W -= lr * grad_W
            b -= lr * grad_b
    return W, b


def mnb_parameters(X, y_idx: np.ndarray, n_classes: int, alpha: float):
    """Closed-form MNB estimates from non-negative feature totals.

    log_prior[c] = ln(count_c / n) and
    log_likelihood[c, t] = ln((tf_{c,t} + alpha) / (sum_t tf_{c,t} + alpha * dim)).
    """
    n, dim = X.shape
    counts = np.zeros(n_classes)
    totals = np.zeros((n_classes, dim))
    for c in range(n_classes):
        rows = y_idx == c
        counts[c] = int(rows.sum())
        if counts[c]:
            totals[c] = np.asarray(X[rows].sum(axis=0)).ravel()
    if np.any(counts == 0):
        missing = int(np.flatnonzero(counts == 0)[0])
        raise DataError(f"class index {missing} absent from training data")
    log_prior = np.log(counts / n)
    denom = totals.sum(axis=1, keepdims=True) + alpha * dim
    log_likelihood = np.log((totals + alpha) / denom)
    return log_prior, log_likelihood


def fit(X: Sequence[SparseVector], y: Sequence[Sentiment], cfg: TrainConfig) -> Classifier:
    """Train the configured classifier; every class must appear in y."""
    if len(X) != len(y):
        raise DataError(f"got {len(X)} vectors for {len(y)} labels")
    if len(X) < N_CLASSES:
        raise DataError(f"need at least {N_CLASSES} training samples, got {len(X)}")
    for sentiment in Sentiment:
        if sentiment not in y:
            raise DataError(f"class {sentiment.label!r} absent from training data")
    matrix = to_csr(X)
    y_idx = np.asarray([int(label) for label in y])
    if cfg.model_kind is ModelKind.MNB:
        log_prior, log_likelihood = mnb_parameters(matrix, y_idx, N_CLASSES, cfg.mnb_alpha)
        return MnbModel(log_prior=log_prior, log_likelihood=log_likelihood, alpha=cfg.mnb_alpha)
    objective = softmax_cross_entropy if cfg.model_kind is ModelKind.LR else ovr_hinge_objective
    weights, bias = _gradient_descent(matrix, y_idx, N_CLASSES, cfg, objective)
    return LinearModel(kind=cfg.model_kind, weights=weights, bias=bias)


def predict_scores(model: Classifier, x: SparseVector) -> np.ndarray:
    """Raw class scores (logits, margins, or log-joint), class-ordinal order."""
    if x.dim != model.dim:
        raise DataError(f"vector dimension {x.dim} does not match model dimension {model.dim}")
    idx = np.asarray(x.indices, dtype=np.int64)
    weights = np.asarray(x.weights)
    if isinstance(model, MnbModel):
        return model.log_prior + model.log_likelihood[:, idx] @ weights
    return model.weights[:, idx] @ weights + model.bias


def predict(model: Classifier, x: SparseVector) -> Sentiment:
    """Argmax of predict_scores; ties go to the lowest class ordinal."""
    return Sentiment(int(np.argmax(predict_scores(model, x))))


def predict_batch(model: Classifier, xs: Sequence[SparseVector]) -> list[Sentiment]:
    return [predict(model, x) for x in xs]


def _format_row(values: np.ndarray) -> str:
    return " ".join(f"{value:.17g}" for value in values)


def format_model(model: Classifier) -> str:
    """Versioned text serialization, one line of parameters per class."""
    if isinstance(model, MnbModel):
        lines = [f"{FORMAT_VERSION} mnb {model.dim} {model.alpha:.17g}"]
        for c in range(N_CLASSES):
            lines.append(_format_row(np.concatenate(([model.log_prior[c]], model.log_likelihood[c]))))
    else:
        lines = [f"{FORMAT_VERSION} {model.kind.value} {model.dim}"]
        for c in range(N_CLASSES):
            lines.append(_format_row(np.concatenate((model.weights[c], [model.bias[c]]))))
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> Classifier:
    lines = [line for line in text.splitlines() if line]
    if not lines or not lines[0].startswith(FORMAT_VERSION + " "):
        raise DataError("not a model v1 file")
    fields = lines[0].split(" ")
    if len(fields) < 4 or len(lines) != 1 + N_CLASSES:
        raise DataError("malformed model file")
    try:
        kind = ModelKind.from_value(fields[2])
    except ConfigError as exc:
        raise DataError(str(exc)) from None
    try:
        dim = int(fields[3])
        rows = [np.asarray([float(value) for value in line.split(" ")]) for line in lines[1:]]
    except ValueError:
        raise DataError("malformed model parameter line") from None
    if kind is ModelKind.MNB:
        if len(fields) != 5:
            raise DataError("mnb model header must carry the smoothing alpha")
        try:
            alpha = float(fields[4])
        except ValueError:
            raise DataError(f"malformed mnb alpha {fields[4]!r}") from None
        if not (alpha > 0 and math.isfinite(alpha)):
            raise DataError(f"mnb alpha must be positive and finite, got {alpha}")
        if any(row.shape != (dim + 1,) for row in rows):
            raise DataError("model parameter lines do not match the stated dimension")
        params = np.vstack(rows)
        model: Classifier = MnbModel(
            log_prior=params[:, 0].copy(),
            log_likelihood=params[:, 1:].copy(),
            alpha=alpha,
        )
    else:
        if len(fields) != 4:
            raise DataError(f"malformed model header {lines[0]!r}")
        if any(row.shape != (dim + 1,) for row in rows):
            raise DataError("model parameter lines do not match the stated dimension")
        params = np.vstack(rows)
        model = LinearModel(kind=kind, weights=params[:, :-1].copy(), bias=params[:, -1].copy())
    if isinstance(model, MnbModel):
        finite = np.all(np.isfinite(model.log_prior)) and np.all(np.isfinite(model.log_likelihood))
    else:
        finite = np.all(np.isfinite(model.weights)) and np.all(np.isfinite(model.bias))
    if not finite:
        raise DataError("model file contains non-finite parameters")
    return model


def save_model(model: Classifier, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(format_model(model))


def load_model(path: str) -> Classifier:
    with open(path, encoding="utf-8", newline="") as handle:
        return parse_model(handle.read())
