"""Kernels, kernel ridge machines, and the dissimilarity representation.

The kernel machine realizes the representer form
score(x) = sum_i a_i k(x_i, x) + a0 and is trained with squared loss
only (kernel ridge), so the solver stays a single symmetric solve:

    a  = (H K H + lambda I)^-1 (y - ybar),   H = I - 11^T/N
    a0 = ybar - (1/N) a^T K 1

Centering plays the role of the unpenalized bias; for the linear kernel
this reproduces the primal ridge classifier exactly.

The dissimilarity representation swaps inner products for an arbitrary
nonnegative measure against a prototype set: an object becomes the
vector of its dissimilarities to the prototypes, and any classifier can
then be trained on that vector.  The measure does not need to be a
kernel, a metric, or even symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .base import DecisionFunction, as_matrix
from .data import LabeledDataset
from .exceptions import NumericError

KERNEL_KINDS = ("linear", "poly2_homogeneous", "poly2_inhomogeneous", "rbf")


@dataclass(frozen=True)
class Kernel:
    """A named positive-semidefinite similarity on R^d.

    linear                z . x
    poly2_homogeneous     (z . x)^2          -- all degree-2 monomials
    poly2_inhomogeneous   (z . x + c^2)^2    -- degree <= 2, offset c
    rbf                   exp(-||x - z||^2 / sigma^2)
    """

    kind: str
    c: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel {self.kind!r}")
        if self.kind == "rbf" and self.sigma <= 0:
            raise ValueError("rbf kernel needs sigma > 0")

    def matrix(self, Z, X) -> np.ndarray:
        """Cross-kernel matrix with entries k(Z[i], X[j])."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if Z.shape[1] != X.shape[1]:
            raise ValueError("kernel arguments must have equal dimension")
        if self.kind == "linear":
            return Z @ X.T
        if self.kind == "poly2_homogeneous":
            return (Z @ X.T) ** 2
        if self.kind == "poly2_inhomogeneous":
            return (Z @ X.T + self.c**2) ** 2
        return np.exp(-cdist(Z, X, "sqeuclidean") / self.sigma**2)


def kernel_eval(kernel: Kernel, z, x) -> float:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(kernel.matrix(z[None, :], x[None, :])[0, 0])


def gram_matrix(kernel: Kernel, ds: LabeledDataset) -> np.ndarray:
    """N x N kernel matrix of the dataset, exactly symmetric."""
    K = kernel.matrix(ds.features, ds.features)
    upper = np.triu(K)
    return upper + np.triu(K, 1).T


@dataclass(frozen=True)
class KernelMachine(DecisionFunction):
    """Representer-form classifier over stored support points."""

    coefficients: np.ndarray
    bias: float
    support_points: np.ndarray
    kernel: Kernel

    @property
    def dim(self) -> int:
        return self.support_points.shape[1]

    def decision_function(self, X):
        X = as_matrix(X, self.dim)
        return self.kernel.matrix(X, self.support_points) @ self.coefficients + self.bias


def train_kernel_machine(
    ds: LabeledDataset, kernel: Kernel, lam: float
) -> KernelMachine:
    """Kernel ridge fit (squared loss, centered bias); needs lam > 0."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    K = gram_matrix(kernel, ds)
    n = ds.n
    y = ds.labels.astype(float)
    ybar = float(y.mean())
    H = np.eye(n) - np.full((n, n), 1.0 / n)
    try:
        coef = np.linalg.solve(H @ K @ H + lam * np.eye(n), y - ybar)
    except np.linalg.LinAlgError:
        raise NumericError("kernel ridge system could not be solved") from None
    if not np.all(np.isfinite(coef)):
        raise NumericError("kernel ridge solve produced non-finite coefficients")
    bias = ybar - float(coef @ K.mean(axis=1))
    return KernelMachine(coef, bias, ds.features, kernel)


def km_decision(km: KernelMachine, x):
    scores = km.decision_function(as_matrix(x, km.dim))
    return float(scores[0]) if np.ndim(x) == 1 else scores


def euclidean_measure(p, o) -> float:
    p = np.asarray(p, dtype=float)
    o = np.asarray(o, dtype=float)
    return float(np.sqrt(np.sum((p - o) ** 2)))


@dataclass(frozen=True)
class DissimilarityMap:
    """D prototypes plus a nonnegative measure delta(prototype, object)."""

    prototypes: np.ndarray
    measure: object = None  # None means built-in Euclidean distance

    def __post_init__(self):
        protos = np.atleast_2d(np.asarray(self.prototypes, dtype=float))
        if protos.shape[0] < 1:
            raise ValueError("need at least one prototype")
        protos.setflags(write=False)
        object.__setattr__(self, "prototypes", protos)

    @property
    def n_prototypes(self) -> int:
        return self.prototypes.shape[0]


def dissim_embed(objects: LabeledDataset, dmap: DissimilarityMap) -> LabeledDataset:
    """Represent every object by its dissimilarities to the prototypes."""
    if dmap.measure is None:
        emb = cdist(objects.features, dmap.prototypes, "euclidean")
    else:
        emb = np.array(
            [
                [float(dmap.measure(p, o)) for p in dmap.prototypes]
                for o in objects.features
            ]
        )
    if not np.all(np.isfinite(emb)) or np.any(emb < 0):
        raise ValueError("dissimilarity measure must return finite nonnegative values")
    names = tuple(f"delta_p{i}" for i in range(dmap.n_prototypes))
    return LabeledDataset(emb, objects.labels, names)


def select_prototypes(
    ds: LabeledDataset, d_protos: int, strategy: str = "random", seed: int = 0
) -> DissimilarityMap:
    """Pick prototype rows from the dataset.

    ``random`` draws uniformly without replacement.  ``farthest_first``
    runs a greedy max-min-distance traversal whose starting reference is
    the point closest to the dataset mean (the reference itself is only
    selected if it wins a greedy round); argmax ties break toward the
    lower row index.
    """
    if not 1 <= d_protos <= ds.n:
        raise ValueError(f"d_protos must lie in [1, {ds.n}]")
    X = ds.features
    if strategy == "random":
        rng = np.random.default_rng(seed)
        chosen = np.sort(rng.choice(ds.n, size=d_protos, replace=False))
    elif strategy == "farthest_first":
        center_dist = np.sqrt(np.sum((X - X.mean(axis=0)) ** 2, axis=1))
        start = int(np.argmin(center_dist))
        min_dist = np.sqrt(np.sum((X - X[start]) ** 2, axis=1))
        chosen = []
        available = np.ones(ds.n, dtype=bool)
        for _ in range(d_protos):
            masked = np.where(available, min_dist, -np.inf)
            pick = int(np.argmax(masked))  # argmax takes the first (lowest) index
            chosen.append(pick)
            available[pick] = False
            dist_new = np.sqrt(np.sum((X - X[pick]) ** 2, axis=1))
            min_dist = np.minimum(min_dist, dist_new)
        chosen = np.array(chosen)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return DissimilarityMap(X[chosen])


def load_dissimilarity_csv(matrix_path, labels_path) -> LabeledDataset:
    """Read an expert-provided dissimilarity matrix plus its labels.

    The matrix file is headerless CSV, rows = objects and columns =
    prototypes, entries nonnegative reals.  The labels file holds one
    label (-1, 1 or +1) per line, in object order.
    """
    matrix = np.loadtxt(matrix_path, delimiter=",", ndmin=2)
    with open(labels_path, encoding="utf-8") as fh:
        raw = [ln.strip() for ln in fh if ln.strip()]
    from .data import LABEL_STRINGS

    try:
        labels = [LABEL_STRINGS[r] for r in raw]
    except KeyError as exc:
        raise ValueError(f"label {exc.args[0]!r} is not -1, 1 or +1") from None
    if np.any(matrix < 0) or not np.all(np.isfinite(matrix)):
        raise ValueError("dissimilarity entries must be finite and nonnegative")
    names = tuple(f"delta_p{i}" for i in range(matrix.shape[1]))
    return LabeledDataset(matrix, np.array(labels), names)
