"""Margin-based loss functions with values and (sub)gradients.

Every loss here depends on score a and label b only through the margin
m = b*a.  The six surrogate kinds are convex upper bounds of the 0-1
loss; at their kinks (hinge and absolute at m = 1) the reported
subgradient is 0, so a zero gradient at the optimum stays meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LN2 = float(np.log(2.0))


def _zero_one(a, b):
    # sign(0) = +1: a >= 0 predicts +1
    return np.where(np.where(a >= 0.0, 1, -1) != b, 1.0, 0.0)


def _logistic(m):
    # log2(1 + e^-m), stable for large |m|
    return np.logaddexp(0.0, -m) / LN2


def _logistic_grad(m):
    # -sigmoid(-m) / ln 2
    return -0.5 * (1.0 - np.tanh(0.5 * m)) / LN2


_VALUES = {
    "logistic": _logistic,
    "hinge": lambda m: np.maximum(1.0 - m, 0.0),
    "squared": lambda m: (1.0 - m) ** 2,
    "exponential": lambda m: np.exp(-m),
    "truncated_squared": lambda m: np.maximum(1.0 - m, 0.0) ** 2,
    "absolute": lambda m: np.abs(1.0 - m),
}

_MARGIN_GRADS = {
    "logistic": _logistic_grad,
    "hinge": lambda m: np.where(m < 1.0, -1.0, 0.0),
    "squared": lambda m: -2.0 * (1.0 - m),
    "exponential": lambda m: -np.exp(-m),
    "truncated_squared": lambda m: -2.0 * np.maximum(1.0 - m, 0.0),
    "absolute": lambda m: -np.sign(1.0 - m),
}

LOSS_NAMES = ("zero_one",) + tuple(_VALUES)


@dataclass(frozen=True)
class Loss:
    """A named margin loss; ``value`` and ``grad`` broadcast over arrays."""

    kind: str

    def __post_init__(self):
        if self.kind not in LOSS_NAMES:
            raise ValueError(
                f"unknown loss {self.kind!r}; choose from {', '.join(LOSS_NAMES)}"
            )

    @property
    def differentiable(self) -> bool:
        return self.kind != "zero_one"

    def value(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b)
        if self.kind == "zero_one":
            out = _zero_one(a, b)
        else:
            out = _VALUES[self.kind](b * a)
        return out if out.ndim else float(out)

    def grad(self, a, b):
        """Derivative with respect to the score a (subgradient 0 at kinks)."""
        if self.kind == "zero_one":
            raise ValueError("the 0-1 loss has no usable gradient")
        a = np.asarray(a, dtype=float)
        b = np.asarray(b)
        out = b * _MARGIN_GRADS[self.kind](b * a)
        return out if out.ndim else float(out)


def get_loss(name: str) -> Loss:
    return Loss(name)


def loss_value(loss: Loss, a, b):
    return loss.value(a, b)


def loss_grad(loss: Loss, a, b):
    return loss.grad(a, b)
