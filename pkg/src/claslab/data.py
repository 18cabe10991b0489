"""Datasets with two-class labels, CSV ingestion, splits, folds, bootstraps.

A dataset is an immutable pair of an ``(N, d)`` feature matrix and a
length-``N`` label vector with entries in ``{-1, +1}``.  All resampling
helpers are pure functions of their inputs plus an integer seed, so any
two runs with the same seed produce identical partitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataFormatError

LABEL_STRINGS = {"-1": -1, "1": 1, "+1": 1}


def child_seed(seed: int, *path: int) -> int:
    """Derive a deterministic 64-bit sub-seed for a nested computation.

    ``child_seed(s, i)`` and ``child_seed(s, j)`` are independent streams
    for i != j, so parallel per-chunk work can reproduce a sequential run.
    """
    ss = np.random.SeedSequence([int(seed)] + [int(p) for p in path])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class LabeledDataset:
    """N points in R^d with labels in {-1, +1}.

    Feature and label arrays are copied and frozen at construction;
    instances are safe to share between threads.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        feats = np.array(self.features, dtype=float)
        labs = np.array(self.labels, dtype=int)
        if feats.ndim != 2:
            raise ValueError("features must be a 2-D array")
        if feats.shape[0] != labs.shape[0]:
            raise ValueError(
                f"feature rows ({feats.shape[0]}) != labels ({labs.shape[0]})"
            )
        if feats.shape[0] < 1 or feats.shape[1] < 1:
            raise ValueError("dataset needs at least one row and one column")
        if not np.all(np.isfinite(feats)):
            raise ValueError("features contain non-finite values")
        if not np.all(np.isin(labs, (-1, 1))):
            raise ValueError("labels must be -1 or +1")
        if self.feature_names is not None:
            names = tuple(self.feature_names)
            if len(names) != feats.shape[1]:
                raise ValueError("feature_names length does not match d")
            object.__setattr__(self, "feature_names", names)
        feats.setflags(write=False)
        labs.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def n_pos(self) -> int:
        return int(np.sum(self.labels == 1))

    @property
    def n_neg(self) -> int:
        return int(np.sum(self.labels == -1))

    def subset(self, indices) -> "LabeledDataset":
        """Dataset restricted to the given row indices (order preserved)."""
        idx = np.asarray(indices, dtype=int)
        return LabeledDataset(
            self.features[idx], self.labels[idx], self.feature_names
        )

    def __eq__(self, other):
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (
            np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
            and self.feature_names == other.feature_names
        )

    def __hash__(self):
        return hash((self.features.tobytes(), self.labels.tobytes()))


@dataclass(frozen=True, eq=False)
class FoldAssignment:
    """Partition of N indices into k folds whose sizes differ by at most 1."""

    fold_index: np.ndarray
    k: int

    def __post_init__(self):
        idx = np.asarray(self.fold_index, dtype=int)
        idx.setflags(write=False)
        object.__setattr__(self, "fold_index", idx)
        counts = np.bincount(idx, minlength=self.k)
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if counts.size > self.k or np.any(counts == 0):
            raise ValueError("every fold must be nonempty")
        if counts.max() - counts.min() > 1:
            raise ValueError("fold sizes may differ by at most 1")

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_index == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_index != fold)


@dataclass(frozen=True, eq=False)
class BootstrapSample:
    """N indices drawn with replacement plus the sorted out-of-bag set."""

    indices: np.ndarray
    out_of_bag: np.ndarray = field(default=None)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        n = idx.shape[0]
        oob = np.setdiff1d(np.arange(n), idx)
        idx.setflags(write=False)
        oob.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "out_of_bag", oob)


def load_csv(path) -> LabeledDataset:
    """Read a dataset from a headered, comma-separated UTF-8 file.

    Exactly one column must be named ``label`` and hold -1, 1 or +1; every
    other column is parsed as a decimal real.  Quoting and escaping are
    not supported.
    """
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n").rstrip("\r") for ln in fh]
    lines = [ln for ln in lines if ln != ""]
    if not lines:
        raise DataFormatError(f"{path}: empty file")
    header = [c.strip() for c in lines[0].split(",")]
    if header.count("label") != 1:
        raise DataFormatError(f"{path}: need exactly one 'label' column")
    label_col = header.index("label")
    names = tuple(c for i, c in enumerate(header) if i != label_col)
    if not names:
        raise DataFormatError(f"{path}: no feature columns")
    if len(lines) == 1:
        raise DataFormatError(f"{path}: empty dataset")

    rows, labels = [], []
    for r, line in enumerate(lines[1:], start=2):
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != len(header):
            raise DataFormatError(
                f"{path}: row {r} has {len(cells)} cells, expected {len(header)}"
            )
        lab = cells[label_col]
        if lab not in LABEL_STRINGS:
            raise DataFormatError(
                f"{path}: row {r}: label {lab!r} is not -1, 1 or +1"
            )
        labels.append(LABEL_STRINGS[lab])
        feat = []
        for c, cell in enumerate(cells):
            if c == label_col:
                continue
            try:
                value = float(cell)
            except ValueError:
                raise DataFormatError(
                    f"{path}: row {r}, column {header[c]!r}: "
                    f"cannot parse {cell!r} as a number"
                ) from None
            if not np.isfinite(value):
                raise DataFormatError(
                    f"{path}: row {r}, column {header[c]!r}: non-finite value"
                )
            feat.append(value)
        rows.append(feat)
    return LabeledDataset(np.array(rows), np.array(labels), names)


def save_csv(ds: LabeledDataset, path) -> None:
    """Write a dataset in the format accepted by :func:`load_csv`."""
    names = ds.feature_names or tuple(f"f{j}" for j in range(ds.dim))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(names) + ",label\n")
        for row, lab in zip(ds.features, ds.labels):
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write(f",{int(lab)}\n")


def _class_test_quota(n_pos: int, n_neg: int, n_test: int, fraction: float):
    # Largest-remainder apportionment keeps each class within 1 of its
    # exact share n_c * fraction.
    quotas = np.array([n_pos * fraction, n_neg * fraction])
    base = np.floor(quotas).astype(int)
    short = n_test - int(base.sum())
    order = np.argsort(-(quotas - base))  # largest fractional part first
    for i in range(short):
        base[order[i % 2]] += 1
    return base  # (test_pos, test_neg)


def split_holdout(
    ds: LabeledDataset,
    test_fraction: float,
    stratified: bool = False,
    seed: int = 0,
):
    """Split into (train, test) with round(N * test_fraction) test points.

    Stratified mode keeps each class's test count within 1 of its exact
    proportional share.  The two index sets are disjoint and exhaustive.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie strictly between 0 and 1")
    n = ds.n
    n_test = int(np.floor(n * test_fraction + 0.5))
    if n_test < 1 or n - n_test < 1:
        raise ValueError(
            f"test_fraction={test_fraction} leaves an empty side for N={n}"
        )
    rng = np.random.default_rng(seed)
    if stratified:
        quota_pos, quota_neg = _class_test_quota(
            ds.n_pos, ds.n_neg, n_test, test_fraction
        )
        test_idx = []
        for label, quota in ((1, quota_pos), (-1, quota_neg)):
            members = np.flatnonzero(ds.labels == label)
            perm = rng.permutation(members.size)
            test_idx.append(members[perm[:quota]])
        test_idx = np.sort(np.concatenate(test_idx))
    else:
        perm = rng.permutation(n)
        test_idx = np.sort(perm[:n_test])
    mask = np.zeros(n, dtype=bool)
    mask[test_idx] = True
    train_idx = np.flatnonzero(~mask)
    return ds.subset(train_idx), ds.subset(test_idx)


def make_folds(
    ds: LabeledDataset, k: int, stratified: bool = False, seed: int = 0
) -> FoldAssignment:
    """Assign each index to one of k folds; k = N gives leave-one-out.

    Indices are shuffled by the seed and dealt round-robin; in stratified
    mode the deal runs class by class with a shared counter, so per-fold
    class counts also differ by at most 1.
    """
    n = ds.n
    if k < 2 or k > n:
        raise ValueError(f"k must satisfy 2 <= k <= N (got k={k}, N={n})")
    rng = np.random.default_rng(seed)
    fold_index = np.empty(n, dtype=int)
    counter = 0
    if stratified:
        groups = [np.flatnonzero(ds.labels == lab) for lab in (1, -1)]
    else:
        groups = [np.arange(n)]
    for members in groups:
        perm = rng.permutation(members.size)
        for idx in members[perm]:
            fold_index[idx] = counter % k
            counter += 1
    return FoldAssignment(fold_index, k)


def bootstrap_sample(ds: LabeledDataset, seed: int = 0) -> BootstrapSample:
    """Draw N indices with replacement; out-of-bag indices come along."""
    rng = np.random.default_rng(seed)
    indices = rng.integers(0, ds.n, size=ds.n)
    return BootstrapSample(indices)
