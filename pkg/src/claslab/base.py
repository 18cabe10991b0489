"""The decision-function contract shared by every classifier.

A classifier exposes ``decision_function(X) -> scores`` returning one
real score per row and classifies by the sign of the score.  A score of
exactly 0 maps to +1; that single tie rule is used everywhere in the
package (loss kinks, vote ties, leaf-label ties, threshold hits).
"""

import numpy as np


def sign_labels(scores) -> np.ndarray:
    """Map real scores to labels in {-1, +1}; zero goes to +1."""
    return np.where(np.asarray(scores, dtype=float) >= 0.0, 1, -1)


class DecisionFunction:
    """Mixin deriving ``predict`` from ``decision_function``."""

    def decision_function(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        return sign_labels(self.decision_function(X))


def as_matrix(X, dim: int) -> np.ndarray:
    """Coerce a single vector or a batch to an (n, dim) float matrix."""
    arr = np.atleast_2d(np.asarray(X, dtype=float))
    if arr.shape[1] != dim:
        raise ValueError(f"expected {dim}-dimensional inputs, got {arr.shape[1]}")
    return arr
