"""Synthetic two-class Gaussian problems with exactly known optima.

A problem is one Gaussian per class plus a class prior.  Because the
joint density is known in closed form we can sample labeled data, make
optimal (minimum-error) decisions, and compute the minimum achievable
error rate -- in closed form for d = 1, by Monte Carlo otherwise.  That
gives every classifier in the package an exact reference to be tested
against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .base import DecisionFunction, as_matrix, sign_labels
from .data import LabeledDataset, child_seed

LOG_2PI = float(np.log(2.0 * np.pi))


def _check_cov(cov, d, name):
    cov = np.array(cov, dtype=float)
    if cov.shape != (d, d):
        raise ValueError(f"{name} must be {d}x{d}")
    if not np.allclose(cov, cov.T, atol=1e-10):
        raise ValueError(f"{name} must be symmetric")
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} must be positive definite") from None
    cov.setflags(write=False)
    return cov


@dataclass(frozen=True)
class GaussianMixtureProblem:
    """Class-conditional Gaussians g(x | mean_c, cov_c) with prior prior_pos."""

    prior_pos: float
    mean_pos: np.ndarray
    mean_neg: np.ndarray
    cov_pos: np.ndarray
    cov_neg: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.prior_pos <= 1.0:
            raise ValueError("prior_pos must lie in [0, 1]")
        mp = np.atleast_1d(np.asarray(self.mean_pos, dtype=float))
        mn = np.atleast_1d(np.asarray(self.mean_neg, dtype=float))
        if mp.shape != mn.shape or mp.ndim != 1:
            raise ValueError("means must be vectors of equal dimension")
        d = mp.shape[0]
        mp.setflags(write=False)
        mn.setflags(write=False)
        object.__setattr__(self, "mean_pos", mp)
        object.__setattr__(self, "mean_neg", mn)
        object.__setattr__(self, "cov_pos", _check_cov(self.cov_pos, d, "cov_pos"))
        object.__setattr__(self, "cov_neg", _check_cov(self.cov_neg, d, "cov_neg"))

    @property
    def dim(self) -> int:
        return self.mean_pos.shape[0]

    @property
    def prior_neg(self) -> float:
        return 1.0 - self.prior_pos


def equal_cov_problem(prior_pos, mean_pos, mean_neg, cov=None) -> GaussianMixtureProblem:
    """Problem with one shared covariance (identity when omitted)."""
    mean_pos = np.atleast_1d(np.asarray(mean_pos, dtype=float))
    if cov is None:
        cov = np.eye(mean_pos.shape[0])
    return GaussianMixtureProblem(prior_pos, mean_pos, mean_neg, cov, cov)


def _log_density(X, mean, cov):
    """Log of the Gaussian density, evaluated rowwise via Cholesky."""
    d = mean.shape[0]
    chol = np.linalg.cholesky(cov)
    diff = X - mean
    sol = np.linalg.solve(chol, diff.T)
    maha = np.sum(sol * sol, axis=0)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    return -0.5 * (d * LOG_2PI + logdet + maha)


def _log_joint_margin(problem, X):
    """log(prior_pos g_pos) - log(prior_neg g_neg), finite priors aside."""
    lp = _log_density(X, problem.mean_pos, problem.cov_pos)
    ln = _log_density(X, problem.mean_neg, problem.cov_neg)
    with np.errstate(divide="ignore"):
        log_prior_pos = np.log(problem.prior_pos)
        log_prior_neg = np.log(problem.prior_neg)
    return (log_prior_pos + lp) - (log_prior_neg + ln)


def sample(problem: GaussianMixtureProblem, n: int, seed: int = 0) -> LabeledDataset:
    """Draw n labeled points: labels Bernoulli(prior_pos), then the class Gaussian."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    labels = np.where(rng.random(n) < problem.prior_pos, 1, -1)
    z = rng.standard_normal((n, problem.dim))
    chol_pos = np.linalg.cholesky(problem.cov_pos)
    chol_neg = np.linalg.cholesky(problem.cov_neg)
    pos = labels == 1
    feats = np.empty((n, problem.dim))
    feats[pos] = problem.mean_pos + z[pos] @ chol_pos.T
    feats[~pos] = problem.mean_neg + z[~pos] @ chol_neg.T
    return LabeledDataset(feats, labels)


def bayes_classify(problem: GaussianMixtureProblem, x) -> np.ndarray:
    """Assign each point to the class with the larger weighted density.

    Exact ties (and zero-prior degeneracies that leave both sides equal)
    go to +1.  Returns a scalar for a single vector, else an array.
    """
    X = as_matrix(x, problem.dim)
    margin = _log_joint_margin(problem, X)
    # -inf vs -inf (both priors degenerate) counts as a tie -> +1
    labels = np.where(np.nan_to_num(margin, nan=0.0) >= 0.0, 1, -1)
    if np.ndim(x) == 1:
        return int(labels[0])
    return labels


class BayesClassifier(DecisionFunction):
    """The optimal decision rule of a known problem, as a classifier object."""

    def __init__(self, problem: GaussianMixtureProblem):
        self.problem = problem

    def decision_function(self, X):
        X = as_matrix(X, self.problem.dim)
        margin = _log_joint_margin(self.problem, X)
        return np.nan_to_num(margin, nan=0.0)


def _crossings_1d(problem):
    """Roots of log(prior_pos g_pos) = log(prior_neg g_neg) on the line."""
    mp, mn = problem.mean_pos[0], problem.mean_neg[0]
    vp, vn = problem.cov_pos[0, 0], problem.cov_neg[0, 0]
    pp, pn = problem.prior_pos, problem.prior_neg
    a = 0.5 / vn - 0.5 / vp
    b = mp / vp - mn / vn
    c = (
        mn * mn / (2.0 * vn)
        - mp * mp / (2.0 * vp)
        + np.log(pp / pn)
        + 0.5 * np.log(vn / vp)
    )
    if a == 0.0:
        if b == 0.0:
            return []
        return [-c / b]
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return []
    root = np.sqrt(disc)
    return sorted([(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)])


def _closed_form_bayes_error_1d(problem):
    pp, pn = problem.prior_pos, problem.prior_neg
    if pp == 0.0 or pn == 0.0:
        return 0.0
    mp, mn = problem.mean_pos[0], problem.mean_neg[0]
    sp = np.sqrt(problem.cov_pos[0, 0])
    sn = np.sqrt(problem.cov_neg[0, 0])
    cuts = _crossings_1d(problem)
    edges = [-np.inf] + cuts + [np.inf]

    def weighted_logdiff(x):
        arr = _log_joint_margin(problem, np.array([[x]]))
        return float(arr[0])

    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if np.isinf(lo) and np.isinf(hi):
            probe = 0.5 * (mp + mn)
        elif np.isinf(lo):
            probe = hi - max(1.0, abs(hi))
        elif np.isinf(hi):
            probe = lo + max(1.0, abs(lo))
        else:
            probe = 0.5 * (lo + hi)
        # the pointwise minimum on this interval is the losing class's mass
        if weighted_logdiff(probe) >= 0.0:
            mean, std, prior = mn, sn, pn
        else:
            mean, std, prior = mp, sp, pp
        lo_t = -np.inf if np.isinf(lo) else (lo - mean) / std
        hi_t = np.inf if np.isinf(hi) else (hi - mean) / std
        total += prior * (ndtr(hi_t) - ndtr(lo_t))
    return float(total)


def bayes_error(
    problem: GaussianMixtureProblem,
    method: str = "closed_form_1d",
    n_mc: int = 100_000,
    seed: int = 0,
) -> float:
    """Minimum achievable error rate of the problem.

    ``closed_form_1d`` integrates the pointwise minimum of the two
    weighted densities between their crossing points (d = 1 only);
    ``monte_carlo`` counts disagreements between sampled labels and the
    optimal rule.
    """
    if method == "closed_form_1d":
        if problem.dim != 1:
            raise ValueError("closed_form_1d is only available for d = 1")
        return _closed_form_bayes_error_1d(problem)
    if method == "monte_carlo":
        return true_error(BayesClassifier(problem), problem, n_mc, seed)
    raise ValueError(f"unknown method {method!r}")


def true_error(
    classifier, problem: GaussianMixtureProblem, n_mc: int, seed: int = 0
) -> float:
    """Monte-Carlo estimate of the misclassified probability mass."""
    if n_mc < 1:
        raise ValueError("n_mc must be at least 1")
    ds = sample(problem, n_mc, seed)
    pred = classifier.predict(ds.features)
    return float(np.mean(pred != ds.labels))


def problem_to_json(problem: GaussianMixtureProblem) -> dict:
    return {
        "prior_pos": problem.prior_pos,
        "mean_pos": problem.mean_pos.tolist(),
        "mean_neg": problem.mean_neg.tolist(),
        "cov_pos": problem.cov_pos.tolist(),
        "cov_neg": problem.cov_neg.tolist(),
    }


def problem_from_json(obj: dict) -> GaussianMixtureProblem:
    try:
        return GaussianMixtureProblem(
            float(obj["prior_pos"]),
            obj["mean_pos"],
            obj["mean_neg"],
            obj["cov_pos"],
            obj["cov_neg"],
        )
    except KeyError as exc:
        raise ValueError(f"problem file is missing field {exc.args[0]!r}") from None


def load_problem(path) -> GaussianMixtureProblem:
    with open(path, encoding="utf-8") as fh:
        return problem_from_json(json.load(fh))
