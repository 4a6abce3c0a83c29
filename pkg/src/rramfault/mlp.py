"""Small fully connected nets trained from scratch with numpy.

One implementation covers both roles in the workbench: the 64-50-20-8-10
digit classifier whose weights get programmed onto the crossbars, and the
compact corrective nets that map a faulty circuit's 10 output voltages back
to the true digit. Hidden layers use the rectifier (so the software net and
the rectifying analog circuit compute the same function), the output is a
softmax trained with cross-entropy, and all randomness flows through one
seeded generator for bit-reproducible training runs.
"""

import json

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .validation import N_CLASSES, check_label_array

WEIGHTS_FORMAT = "mlp-weights/1"

BASELINE_WIDTHS = (64, 50, 20, 8, 10)

# Corrective-net ladder, largest to smallest: name -> hidden widths on a
# 10-input 10-output classifier.
ARCHITECTURE_LADDER = {
    "MLP(100,200)": (100, 200),
    "MLP(32,64)": (32, 64),
    "MLP(32,32)": (32, 32),
    "MLP(16,32)": (16, 32),
    "MLP(16,16)": (16, 16),
    "MLP(12,12)": (12, 12),
    "MLP(10,10)": (10, 10),
    "MLP(10,)": (10,),
    "MLP(6,6)": (6, 6),
    "MLP(6,)": (6,),
    "MLP(1,)": (1,),
}

LOSS_EPS = 1e-12  # cross-entropy clamp for vanishing probabilities


def count_params(widths):
    """Tunable-parameter count of a dense net with the given layer widths."""
    if len(widths) < 2 or any(w < 1 for w in widths):
        raise ValueError("widths must list at least input and output sizes >= 1")
    return sum(a * b + b for a, b in zip(widths[:-1], widths[1:]))


def init_params(widths, rng):
    """Fan-in-scaled uniform weights (bound sqrt(6/fan_in)), zero biases."""
    params = []
    for n_in, n_out in zip(widths[:-1], widths[1:]):
        bound = np.sqrt(6.0 / n_in)
        w = rng.uniform(-bound, bound, size=(n_in, n_out))
        params.append((w, np.zeros(n_out)))
    return params


def relu(z):
    return np.maximum(z, 0.0)


def softmax(z):
    shifted = z - z.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def logits(params, X):
    """Pre-softmax outputs; hidden layers rectified."""
    a = np.asarray(X, dtype=float)
    for w, b in params[:-1]:
        a = relu(a @ w + b)
    w, b = params[-1]
    return a @ w + b


def forward(params, X):
    """Class probabilities for a batch (or single vector) of inputs."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    p = softmax(logits(params, np.atleast_2d(X)))
    return p[0] if single else p


def cross_entropy(probs, labels):
    """Mean negative log-probability of the true class, clamped at 1e-12."""
    p = np.asarray(probs, dtype=float)
    y = np.asarray(labels)
    picked = p[np.arange(len(y)), y]
    return float(-np.log(np.clip(picked, LOSS_EPS, 1.0)).mean())


def loss_and_grads(params, X, labels, dropout=0.0, rng=None, weight_decay=0.0):
    """Batch cross-entropy loss and its analytic gradients per parameter.

    ``dropout`` applies inverted dropout to hidden activations (train-time
    only; callers evaluate with plain ``logits``). ``weight_decay`` adds the
    L2 penalty's gradient to the weight grads; the returned loss stays the
    plain data term.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(labels)
    activations = [X]
    pre = []
    masks = []
    a = X
    for w, b in params[:-1]:
        z = a @ w + b
        pre.append(z)
        a = relu(z)
        if dropout:
            m = (rng.random(a.shape) >= dropout) / (1.0 - dropout)
            a = a * m
            masks.append(m)
        activations.append(a)
    w, b = params[-1]
    z_out = a @ w + b
    probs = softmax(z_out)
    loss = cross_entropy(probs, y)

    n = len(X)
    delta = probs.copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grads = [None] * len(params)
    for k in range(len(params) - 1, -1, -1):
        gw = activations[k].T @ delta
        if weight_decay:
            gw += weight_decay * params[k][0]
        grads[k] = (gw, delta.sum(axis=0))
        if k > 0:
            delta = (delta @ params[k][0].T) * (pre[k - 1] > 0)
            if dropout:
                delta = delta * masks[k - 1]
    return loss, grads


def stack_bias(params):
    """Fold each bias under its weight matrix as a final input row.

    The stacked (n_in+1, n_out) matrices are what gets programmed onto the
    crossbar arrays, whose bias row is driven at the read voltage.
    """
    return [np.vstack([w, b[None, :]]) for w, b in params]


def unstack_bias(matrices):
    """Inverse of stack_bias."""
    return [(m[:-1, :].copy(), m[-1, :].copy()) for m in matrices]


def save_params(path, params):
    payload = {
        "format": WEIGHTS_FORMAT,
        "widths": [params[0][0].shape[0]] + [w.shape[1] for w, _ in params],
        "weights": [[float(v) for v in w.ravel()] for w, _ in params],
        "biases": [[float(v) for v in b] for _, b in params],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_params(path):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != WEIGHTS_FORMAT:
        raise ValueError(f"unsupported weights format: {payload.get('format')!r}")
    widths = payload["widths"]
    params = []
    for k, (n_in, n_out) in enumerate(zip(widths[:-1], widths[1:])):
        w = np.asarray(payload["weights"][k], dtype=float).reshape(n_in, n_out)
        b = np.asarray(payload["biases"][k], dtype=float)
        if b.shape != (n_out,):
            raise ValueError(f"bias {k} has wrong length")
        params.append((w, b))
    return params


class MLPClassifier(BaseEstimator, ClassifierMixin):
    """Seeded mini-batch trainer for the dense nets used throughout.

    ``optimizer`` is "adam" (adaptive moments, the default) or "sgd".
    With ``early_stopping`` a validation slice is held out of the training
    data; training stops once validation accuracy has not improved for
    ``patience`` epochs and the best-seen parameters are restored. Identical
    constructor arguments and data give bit-identical fitted parameters.
    """

    def __init__(
        self,
        hidden_widths=(10, 10),
        learning_rate=1e-3,
        epochs=200,
        batch_size=32,
        optimizer="adam",
        seed=0,
        early_stopping=True,
        validation_fraction=0.1,
        patience=25,
        n_classes=N_CLASSES,
        output_bias_init=0.0,
        dropout=0.0,
        weight_decay=0.0,
    ):
        self.hidden_widths = hidden_widths
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.optimizer = optimizer
        self.seed = seed
        self.early_stopping = early_stopping
        self.validation_fraction = validation_fraction
        self.patience = patience
        self.n_classes = n_classes
        self.output_bias_init = output_bias_init
        self.dropout = dropout
        self.weight_decay = weight_decay

    def _validate_config(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.optimizer not in ("sgd", "adam"):
            raise ValueError(f"optimizer must be 'sgd' or 'adam', got {self.optimizer!r}")
        if self.early_stopping and not 0 < self.validation_fraction < 1:
            raise ValueError("validation_fraction must lie in (0, 1)")
        if not 0 <= self.dropout < 1:
            raise ValueError("dropout must lie in [0, 1)")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be nonnegative")

    def fit(self, X, y, validation_data=None):
        """Fit on (X, y); ``validation_data`` is an optional (X_val, y_val)
        pair used for early stopping in place of the internal held-out slice,
        so all of X trains while selection happens on an external set."""
        self._validate_config()
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("X must be a nonempty 2-D array")
        if not np.all(np.isfinite(X)):
            raise ValueError("X contains non-finite values")
        y = check_label_array(y, n_samples=X.shape[0])
        if y.size and y.max() >= self.n_classes:
            raise ValueError(f"labels must lie in 0..{self.n_classes - 1}")

        rng = np.random.default_rng(self.seed)
        widths = (X.shape[1], *self.hidden_widths, self.n_classes)
        params = init_params(widths, rng)
        # Softmax training is shift-invariant, so a positive starting output
        # bias rides through unchanged and nets destined for the analog
        # circuit keep their winning column above the rectifier's dead zone.
        if self.output_bias_init:
            out_bias = params[-1][1]
            out_bias += self.output_bias_init

        n = X.shape[0]
        if self.early_stopping and validation_data is not None:
            X_val = np.asarray(validation_data[0], dtype=float)
            y_val = check_label_array(validation_data[1], n_samples=X_val.shape[0])
            X_tr, y_tr = X, y
        elif self.early_stopping:
            n_val = max(1, int(round(self.validation_fraction * n)))
            if n_val >= n:
                raise ValueError("validation slice leaves no training data")
            order = rng.permutation(n)
            val_idx, train_idx = order[:n_val], order[n_val:]
            X_val, y_val = X[val_idx], y[val_idx]
            X_tr, y_tr = X[train_idx], y[train_idx]
        else:
            X_tr, y_tr = X, y
            X_val = y_val = None

        state = _AdamState(params) if self.optimizer == "adam" else None
        best_val = -1.0
        best_params = None
        stale = 0
        self.loss_curve_ = []
        n_tr = X_tr.shape[0]
        for epoch in range(self.epochs):
            order = rng.permutation(n_tr)
            epoch_loss = 0.0
            for start in range(0, n_tr, self.batch_size):
                batch = order[start : start + self.batch_size]
                loss, grads = loss_and_grads(
                    params, X_tr[batch], y_tr[batch],
                    dropout=self.dropout, rng=rng, weight_decay=self.weight_decay,
                )
                epoch_loss += loss * len(batch)
                if state is None:
                    for (w, b), (gw, gb) in zip(params, grads):
                        w -= self.learning_rate * gw
                        b -= self.learning_rate * gb
                else:
                    state.step(params, grads, self.learning_rate)
            epoch_loss /= n_tr
            if not np.isfinite(epoch_loss):
                raise RuntimeError(
                    f"training diverged at epoch {epoch}: loss={epoch_loss!r}; "
                    "lower the learning rate"
                )
            self.loss_curve_.append(epoch_loss)
            if self.early_stopping:
                val_acc = float(
                    (np.argmax(logits(params, X_val), axis=1) == y_val).mean()
                )
                if val_acc > best_val:
                    best_val = val_acc
                    best_params = [(w.copy(), b.copy()) for w, b in params]
                    stale = 0
                else:
                    stale += 1
                    if stale >= self.patience:
                        break

        if best_params is not None:
            params = best_params
        self.params_ = params
        self.classes_ = np.arange(self.n_classes)
        self.n_features_in_ = X.shape[1]
        self.train_accuracy_ = float(
            (np.argmax(logits(params, X_tr), axis=1) == y_tr).mean()
        )
        self.validation_accuracy_ = best_val if self.early_stopping else None
        return self

    def decision_function(self, X):
        return logits(self.params_, np.asarray(X, dtype=float))

    def predict_proba(self, X):
        return softmax(self.decision_function(X))

    def predict(self, X):
        return self.classes_[np.argmax(self.decision_function(X), axis=1)]

    def weight_matrices(self):
        """Fitted layer weights with biases folded in as the last row."""
        return stack_bias(self.params_)


class _AdamState:
    """Adaptive-moment update state (beta1 0.9, beta2 0.999, eps 1e-8)."""

    BETA1 = 0.9
    BETA2 = 0.999
    EPS = 1e-8

    def __init__(self, params):
        self.m = [(np.zeros_like(w), np.zeros_like(b)) for w, b in params]
        self.v = [(np.zeros_like(w), np.zeros_like(b)) for w, b in params]
        self.t = 0

    def step(self, params, grads, learning_rate):
        self.t += 1
        correction1 = 1.0 - self.BETA1**self.t
        correction2 = 1.0 - self.BETA2**self.t
        for k, ((w, b), (gw, gb)) in enumerate(zip(params, grads)):
            mw, mb = self.m[k]
            vw, vb = self.v[k]
            mw *= self.BETA1
            mw += (1 - self.BETA1) * gw
            mb *= self.BETA1
            mb += (1 - self.BETA1) * gb
            vw *= self.BETA2
            vw += (1 - self.BETA2) * gw * gw
            vb *= self.BETA2
            vb += (1 - self.BETA2) * gb * gb
            w -= learning_rate * (mw / correction1) / (np.sqrt(vw / correction2) + self.EPS)
            b -= learning_rate * (mb / correction1) / (np.sqrt(vb / correction2) + self.EPS)
