"""One-hidden-layer network trained by backpropagation.

The hypothesis is  out(x) = s_out( v . s(W x + b) + c )  with D hidden
units, hidden activation s in {logistic_sigmoid, relu} and output
activation s_out in {identity, logistic_sigmoid}.  Training is plain
full-batch gradient descent on the mean squared loss at a fixed
learning rate; the returned parameters are the best iterate seen, which
keeps runs reproducible despite the non-convex objective.

Classification thresholds the output at 0 (identity) or 0.5 (sigmoid),
with the threshold itself going to +1.  Targets are the labels for an
identity output and {0, 1} for a sigmoid output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .base import DecisionFunction, as_matrix
from .data import LabeledDataset
from .exceptions import DivergenceError
from .linear import TrainInfo

HIDDEN_ACTIVATIONS = ("logistic_sigmoid", "relu")
OUTPUT_ACTIVATIONS = ("identity", "logistic_sigmoid")


def _act(name, z):
    if name == "relu":
        return np.maximum(z, 0.0)
    return expit(z)


def _act_deriv(name, z, activated):
    if name == "relu":
        return (z > 0.0).astype(float)  # subgradient 0 at the kink
    return activated * (1.0 - activated)


@dataclass(frozen=True)
class OneHiddenLayerNet(DecisionFunction):
    hidden_weights: np.ndarray  # (D, d)
    hidden_biases: np.ndarray  # (D,)
    output_weights: np.ndarray  # (D,)
    output_bias: float
    hidden_activation: str = "logistic_sigmoid"
    output_activation: str = "identity"
    info: TrainInfo | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(f"unknown hidden activation {self.hidden_activation!r}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"unknown output activation {self.output_activation!r}")

    @property
    def dim(self) -> int:
        return self.hidden_weights.shape[1]

    @property
    def threshold(self) -> float:
        return 0.5 if self.output_activation == "logistic_sigmoid" else 0.0

    def forward(self, X) -> np.ndarray:
        X = as_matrix(X, self.dim)
        hidden = _act(self.hidden_activation, X @ self.hidden_weights.T + self.hidden_biases)
        pre = hidden @ self.output_weights + self.output_bias
        if self.output_activation == "identity":
            return pre
        return expit(pre)

    def decision_function(self, X):
        return self.forward(X) - self.threshold


def net_forward(net: OneHiddenLayerNet, x):
    out = net.forward(as_matrix(x, net.dim))
    return float(out[0]) if np.ndim(x) == 1 else out


@dataclass(frozen=True)
class NetTrainConfig:
    hidden_units: int = 4
    learning_rate: float = 0.1
    max_iters: int = 2000
    init_scale: float = 0.5
    seed: int = 0
    hidden_activation: str = "logistic_sigmoid"
    output_activation: str = "identity"

    def __post_init__(self):
        if self.hidden_units < 1:
            raise ValueError("hidden_units must be at least 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.init_scale < 0:
            raise ValueError("init_scale must be nonnegative")


def _targets(labels, output_activation):
    if output_activation == "logistic_sigmoid":
        return (labels + 1.0) / 2.0
    return labels.astype(float)


def net_objective(net: OneHiddenLayerNet, X, targets) -> float:
    out = net.forward(X)
    with np.errstate(over="ignore"):  # inf here is the divergence signal
        return float(np.mean((out - targets) ** 2))


def net_gradient(net: OneHiddenLayerNet, X, targets):
    """Exact mean-squared-loss gradient for every parameter.

    Returns (dW, db, dv, dc) matching the shapes of the net's fields.
    """
    X = as_matrix(X, net.dim)
    n = X.shape[0]
    z = X @ net.hidden_weights.T + net.hidden_biases
    hidden = _act(net.hidden_activation, z)
    pre = hidden @ net.output_weights + net.output_bias
    if net.output_activation == "identity":
        out = pre
        dout_dpre = np.ones_like(pre)
    else:
        out = expit(pre)
        dout_dpre = out * (1.0 - out)
    dpre = 2.0 * (out - targets) * dout_dpre / n
    dv = hidden.T @ dpre
    dc = float(dpre.sum())
    dhidden = np.outer(dpre, net.output_weights)
    dz = dhidden * _act_deriv(net.hidden_activation, z, hidden)
    dW = dz.T @ X
    db = dz.sum(axis=0)
    return dW, db, dv, dc


def train_net(ds: LabeledDataset, config: NetTrainConfig) -> OneHiddenLayerNet:
    """Gradient descent from a seeded uniform init; best iterate wins."""
    rng = np.random.default_rng(config.seed)
    d, D = ds.dim, config.hidden_units
    span = config.init_scale
    W = rng.uniform(-span, span, size=(D, d))
    b = rng.uniform(-span, span, size=D)
    v = rng.uniform(-span, span, size=D)
    c = float(rng.uniform(-span, span))
    X = ds.features
    targets = _targets(ds.labels, config.output_activation)

    def build(W, b, v, c):
        return OneHiddenLayerNet(
            W.copy(), b.copy(), v.copy(), float(c),
            config.hidden_activation, config.output_activation,
        )

    best = build(W, b, v, c)
    best_obj = net_objective(best, X, targets)
    net = best
    for it in range(config.max_iters):
        dW, db, dv, dc = net_gradient(net, X, targets)
        W = net.hidden_weights - config.learning_rate * dW
        b = net.hidden_biases - config.learning_rate * db
        v = net.output_weights - config.learning_rate * dv
        c = net.output_bias - config.learning_rate * dc
        net = build(W, b, v, c)
        obj = net_objective(net, X, targets)
        if not np.isfinite(obj):
            raise DivergenceError(f"objective became non-finite at iteration {it + 1}")
        if obj < best_obj:
            best, best_obj = net, obj
    info = TrainInfo(
        iterations=config.max_iters,
        converged=False,
        termination="max_iters",
        objective=best_obj,
    )
    return OneHiddenLayerNet(
        best.hidden_weights,
        best.hidden_biases,
        best.output_weights,
        best.output_bias,
        config.hidden_activation,
        config.output_activation,
        info,
    )
