"""k-nearest-neighbor classification (Euclidean, odd k, brute force)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .base import DecisionFunction, as_matrix
from .data import LabeledDataset

_CHUNK = 1024  # query rows per distance block


@dataclass(frozen=True)
class KnnClassifier(DecisionFunction):
    """Vote of the k nearest stored points.

    k must be odd so two-class votes cannot tie.  Exact distance ties
    are resolved toward the lower stored row index (stable sort on
    distance keeps original order among equals).
    """

    k: int
    dataset: LabeledDataset
    metric: str = "euclidean"

    @property
    def dim(self) -> int:
        return self.dataset.dim

    def decision_function(self, X):
        X = as_matrix(X, self.dim)
        votes = np.empty(X.shape[0])
        stored = self.dataset.features
        labels = self.dataset.labels
        k, n = self.k, stored.shape[0]
        for lo in range(0, X.shape[0], _CHUNK):
            block = X[lo : lo + _CHUNK]
            # squared distances order identically to Euclidean ones
            dist = cdist(block, stored, "sqeuclidean")
            if k == n:
                votes[lo : lo + block.shape[0]] = labels.mean()
                continue
            part = np.argpartition(dist, k - 1, axis=1)[:, :k]
            rows = np.arange(block.shape[0])[:, None]
            kth = dist[rows, part].max(axis=1)
            # rows with several points exactly at the k-th distance need the
            # stable order to honor the lower-index tie rule
            tied = (dist <= kth[:, None]).sum(axis=1) > k
            mean_votes = labels[part].mean(axis=1)
            for r in np.flatnonzero(tied):
                order = np.argsort(dist[r], kind="stable")[:k]
                mean_votes[r] = labels[order].mean()
            votes[lo : lo + block.shape[0]] = mean_votes
        return votes


def fit_knn(ds: LabeledDataset, k: int) -> KnnClassifier:
    """Store the data verbatim; all work happens at query time."""
    if not 1 <= k <= ds.n:
        raise ValueError(f"k must lie in [1, N={ds.n}]")
    if k % 2 == 0:
        raise ValueError("even k can tie a two-class vote; use odd k")
    return KnnClassifier(k, ds)


def knn_classify(model: KnnClassifier, x):
    """Majority label among the k nearest stored points."""
    pred = model.predict(as_matrix(x, model.dim))
    return int(pred[0]) if np.ndim(x) == 1 else pred
