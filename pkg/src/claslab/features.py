"""Feature transformations and wrapper-style forward selection.

Transform kinds:

* ``poly2_expand`` -- append every unique degree-2 monomial, cross
  terms scaled by sqrt(2), so a plain dot product of two appended
  blocks equals the homogeneous quadratic kernel.
* ``standardize`` -- shift/scale to zero mean and unit variance; the
  parameters are learned once from the dataset the transform was fitted
  on and reused verbatim afterwards, so applying a fitted transform to
  test data cannot leak test statistics into training.
* ``append_noise`` -- add label-independent standard-normal columns
  (the raw material of dimensionality-curse experiments).
* ``select`` -- keep an explicit index subset.

A transform spec string names a chain: ``"standardize+poly2"``,
``"noise:5"``, ``"select:0,2"`` combined left-to-right with ``+``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset, child_seed


class FeatureTransform:
    """Deterministic map from one dataset to another; labels untouched."""

    def output_dim(self, d: int) -> int:
        raise NotImplementedError

    def map(self, X: np.ndarray) -> np.ndarray:
        """Rowwise feature map, usable on unlabeled query points."""
        raise NotImplementedError

    def apply(self, ds: LabeledDataset) -> LabeledDataset:
        return LabeledDataset(self.map(ds.features), ds.labels)


def poly2_block(X: np.ndarray) -> np.ndarray:
    """All unique degree-2 monomials of the rows, cross terms * sqrt(2)."""
    n, d = X.shape
    cols = []
    for i in range(d):
        for j in range(i, d):
            if i == j:
                cols.append(X[:, i] * X[:, i])
            else:
                cols.append(np.sqrt(2.0) * X[:, i] * X[:, j])
    return np.column_stack(cols) if cols else np.empty((n, 0))


@dataclass(frozen=True)
class Poly2Expand(FeatureTransform):
    def output_dim(self, d):
        return d + d * (d + 1) // 2

    def map(self, X):
        return np.hstack([X, poly2_block(X)])


@dataclass(frozen=True)
class Standardize(FeatureTransform):
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, ds: LabeledDataset) -> "Standardize":
        mean = ds.features.mean(axis=0)
        std = ds.features.std(axis=0)
        std = np.where(std == 0.0, 1.0, std)
        return cls(mean, std)

    def output_dim(self, d):
        return d

    def map(self, X):
        return (X - self.mean) / self.std


@dataclass(frozen=True)
class AppendNoise(FeatureTransform):
    count: int
    seed: int = 0

    def output_dim(self, d):
        return d + self.count

    def map(self, X):
        raise ValueError(
            "noise columns are drawn per dataset, not per point; "
            "apply this transform to a dataset before training"
        )

    def apply(self, ds):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        rng = np.random.default_rng(self.seed)
        noise = rng.standard_normal((ds.n, self.count))
        return LabeledDataset(np.hstack([ds.features, noise]), ds.labels)


@dataclass(frozen=True)
class Select(FeatureTransform):
    indices: tuple

    def output_dim(self, d):
        return len(self.indices)

    def map(self, X):
        idx = np.asarray(self.indices, dtype=int)
        if idx.size == 0 or idx.min() < 0 or idx.max() >= X.shape[1]:
            raise ValueError(f"select indices must lie in [0, {X.shape[1]})")
        return X[:, idx]


def apply_transform(t: FeatureTransform, ds: LabeledDataset) -> LabeledDataset:
    return t.apply(ds)


def append_noise(ds: LabeledDataset, count: int, seed: int = 0) -> LabeledDataset:
    return AppendNoise(count, seed).apply(ds)


def parse_transform_spec(spec: str, seed: int = 0):
    """Turn ``"standardize+poly2"`` &c. into a list of transform stubs.

    Standardize is returned unfitted (None placeholder params) and must
    be fitted on the training data by the caller; see
    :func:`fit_transform_chain`.
    """
    chain = []
    for i, part in enumerate(p.strip() for p in spec.split("+")):
        if part == "poly2":
            chain.append(Poly2Expand())
        elif part == "standardize":
            chain.append(("standardize",))
        elif part.startswith("noise:"):
            chain.append(AppendNoise(int(part[len("noise:"):]), child_seed(seed, i)))
        elif part.startswith("select:"):
            idx = tuple(int(s) for s in part[len("select:"):].split(","))
            chain.append(Select(idx))
        else:
            raise ValueError(f"unknown transform {part!r}")
    return chain


def fit_transform_chain(chain, ds: LabeledDataset):
    """Fit any unfitted standardize steps on ds; return (transforms, mapped ds)."""
    fitted = []
    current = ds
    for step in chain:
        if step == ("standardize",):
            step = Standardize.fit(current)
        current = step.apply(current)
        fitted.append(step)
    return fitted, current


def apply_transform_chain(chain, ds: LabeledDataset) -> LabeledDataset:
    current = ds
    for step in chain:
        current = step.apply(current)
    return current


@dataclass(frozen=True)
class PipelineClassifier:
    """A fitted transform chain in front of a fitted classifier.

    The chain was fitted on the training data only, so evaluating new
    points reuses the stored training statistics.
    """

    transforms: tuple
    model: object

    def _map(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        for step in self.transforms:
            X = step.map(X)
        return X

    def decision_function(self, X):
        return self.model.decision_function(self._map(X))

    def predict(self, X):
        return self.model.predict(self._map(X))


def split_transform_spec(spec: str):
    """Split a chain into (dataset-level noise prefix, pointwise remainder).

    Noise steps draw fresh columns per dataset and therefore cannot sit
    inside a prediction pipeline; they are only allowed as a prefix of
    the chain, to be applied to the data before training or estimating.
    """
    parts = [p.strip() for p in spec.split("+")] if spec else []
    noise_parts, rest = [], []
    for part in parts:
        if part.startswith("noise:"):
            if rest:
                raise ValueError(
                    "noise steps must come before pointwise transforms"
                )
            noise_parts.append(part)
        else:
            rest.append(part)
    return "+".join(noise_parts), "+".join(rest)


def make_pipeline_trainer(spec: str, base_trainer, seed: int = 0):
    """Trainer fitting a pointwise transform chain and the base model together.

    The chain (standardize parameters included) is fitted on whatever
    training set the trainer receives, then replayed on query points by
    the returned pipeline, so estimator resampling never leaks test
    statistics into the fit.
    """
    chain = parse_transform_spec(spec, seed) if spec else []
    if any(isinstance(t, AppendNoise) for t in chain):
        raise ValueError(
            "noise steps belong to the dataset, not a pipeline; "
            "see split_transform_spec"
        )

    def train(ds: LabeledDataset) -> PipelineClassifier:
        fitted, mapped = fit_transform_chain(chain, ds)
        return PipelineClassifier(tuple(fitted), base_trainer(mapped))

    return train


def forward_select(
    ds: LabeledDataset,
    trainer,
    max_features: int,
    folds: int = 5,
    seed: int = 0,
):
    """Greedy wrapper selection driven by k-fold cross-validation error.

    At each step the feature whose addition gives the lowest CV error
    joins the subset (ties break toward the lower index).  The whole
    greedy trajectory is returned as (feature index, cv error) pairs so
    the caller can cut it at the error minimum.
    """
    from .evaluation import kfold_cv  # local import: evaluation imports us

    if not 1 <= max_features <= ds.dim:
        raise ValueError(f"max_features must lie in [1, d={ds.dim}]")
    if folds < 2:
        raise ValueError("folds must be at least 2")
    chosen: list[int] = []
    trajectory = []
    remaining = list(range(ds.dim))
    for step in range(max_features):
        best = None  # (error, feature)
        for j in remaining:
            sub = Select(tuple(chosen + [j])).apply(ds)
            err = kfold_cv(trainer, sub, folds, stratified=False, seed=child_seed(seed, step)).value
            if best is None or err < best[0]:
                best = (err, j)
        err, j = best
        chosen.append(j)
        remaining.remove(j)
        trajectory.append((j, err))
    return trajectory
