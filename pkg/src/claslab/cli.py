"""Command-line experiment driver.

Five subcommands, all driven by a JSON config file plus optional
``--seed`` / ``--out`` overrides:

  gen    sample a dataset from a problem file into CSV
  train  fit a named trainer, save the model (JSON) and a training report
  eval   run one error estimator, save the estimate as JSON
  curve  emit a learning or feature curve as CSV
  bench  compare several trainers under one estimator (CSV table)

Every command is a pure function of (config, input files): rerunning
with identical inputs writes byte-identical outputs.  Exit codes:
0 success, 2 bad usage or config, 3 runtime/numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import evaluation
from .data import child_seed, load_csv, save_csv
from .ensembles import TreeConfig, adaboost, bagging, random_subspace
from .exceptions import DivergenceError, EstimationError, FitError, NumericError
from .features import make_pipeline_trainer, parse_transform_spec, split_transform_spec
from .generative import fit_lda, fit_parzen
from .kernels import Kernel, train_kernel_machine
from .linear import TrainConfig, train_least_squares, train_linear, train_logistic
from .neighbors import fit_knn
from .neural import NetTrainConfig, train_net
from .oracle import BayesClassifier, load_problem, sample
from .serialize import save_model
from .trees import fit_tree

_USAGE_ERRORS = (
    ValueError,
    KeyError,
    FileNotFoundError,
    IsADirectoryError,
    json.JSONDecodeError,
)
_RUNTIME_ERRORS = (FitError, NumericError, DivergenceError, EstimationError)

# sub-seed roles, so data sampling, training and estimation draw from
# independent streams of the one config seed
_DATA, _TRAIN, _EST, _CURVE = 0, 1, 2, 3


def _take(params, key, default=None, required=False):
    if required and key not in params:
        raise ValueError(f"trainer parameter {key!r} is required")
    return params.pop(key, default)


def build_trainer(name: str, params: dict, seed: int, problem=None):
    """Resolve a registered trainer name to a callable(dataset) -> model."""
    params = dict(params or {})
    if name == "lda":
        kwargs = {
            "laplace_priors": bool(_take(params, "laplace_priors", False)),
            "unbiased_cov": bool(_take(params, "unbiased_cov", False)),
            "ridge_cov": float(_take(params, "ridge_cov", 0.0)),
        }
        trainer = lambda ds: fit_lda(ds, **kwargs)
    elif name == "parzen":
        bandwidth = float(_take(params, "bandwidth", required=True))
        trainer = lambda ds: fit_parzen(ds, bandwidth)
    elif name == "logistic":
        lam = float(_take(params, "lambda", 0.0))
        overrides = {
            k: type_(_take(params, k, default))
            for k, default, type_ in (
                ("max_iters", 1000, int),
                ("step_size", 1.0, float),
                ("tolerance", 1e-6, float),
            )
        }
        trainer = lambda ds: train_logistic(ds, lam, **overrides)
    elif name == "least_squares":
        lam = float(_take(params, "lambda", 0.0))
        trainer = lambda ds: train_least_squares(ds, lam)
    elif name == "linear":
        config = TrainConfig(
            loss=str(_take(params, "loss", required=True)),
            lam=float(_take(params, "lambda", 0.0)),
            max_iters=int(_take(params, "max_iters", 1000)),
            step_size=float(_take(params, "step_size", 1.0)),
            tolerance=float(_take(params, "tolerance", 1e-6)),
            seed=seed,
        )
        trainer = lambda ds: train_linear(ds, config)
    elif name == "kernel_ridge":
        kernel = Kernel(
            str(_take(params, "kernel", "rbf")),
            c=float(_take(params, "c", 1.0)),
            sigma=float(_take(params, "sigma", 1.0)),
        )
        lam = float(_take(params, "lambda", required=True))
        trainer = lambda ds: train_kernel_machine(ds, kernel, lam)
    elif name == "knn":
        k = int(_take(params, "k", required=True))
        trainer = lambda ds: fit_knn(ds, k)
    elif name == "tree":
        depth = int(_take(params, "max_depth", required=True))
        leaf = int(_take(params, "min_leaf_size", 1))
        trainer = lambda ds: fit_tree(ds, depth, leaf)
    elif name in ("bagging", "random_subspace"):
        base = TreeConfig(
            int(_take(params, "max_depth", 3)),
            int(_take(params, "min_leaf_size", 1)),
        )
        m_rounds = int(_take(params, "m_rounds", required=True))
        if name == "bagging":
            trainer = lambda ds: bagging(ds, base, m_rounds, seed)
        else:
            sub_dim = int(_take(params, "subspace_dim", required=True))
            trainer = lambda ds: random_subspace(ds, base, m_rounds, sub_dim, seed)
    elif name == "adaboost":
        t_rounds = int(_take(params, "t_rounds", required=True))
        trainer = lambda ds: adaboost(ds, t_rounds)
    elif name == "net":
        config = NetTrainConfig(
            hidden_units=int(_take(params, "hidden_units", 4)),
            learning_rate=float(_take(params, "learning_rate", 0.1)),
            max_iters=int(_take(params, "max_iters", 2000)),
            init_scale=float(_take(params, "init_scale", 0.5)),
            seed=seed,
            hidden_activation=str(_take(params, "hidden_activation", "logistic_sigmoid")),
            output_activation=str(_take(params, "output_activation", "identity")),
        )
        trainer = lambda ds: train_net(ds, config)
    elif name == "bayes":
        if problem is None:
            raise ValueError("trainer 'bayes' needs a problem, not a dataset")
        oracle = BayesClassifier(problem)
        trainer = lambda ds: oracle
    else:
        raise ValueError(f"unknown trainer {name!r}")
    if params:
        raise ValueError(
            f"unknown parameters for trainer {name!r}: {sorted(params)}"
        )
    return trainer


def _load_config(args):
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.out is not None:
        cfg["out"] = args.out
    if "seed" not in cfg:
        cfg["seed"] = 0
    cfg["seed"] = int(cfg["seed"])
    if cfg["seed"] < 0:
        raise ValueError("seed must be a nonnegative integer")
    return cfg


def _require_out(cfg) -> Path:
    if "out" not in cfg:
        raise ValueError("config needs an 'out' path (or pass --out)")
    return Path(cfg["out"])


def _load_source(cfg, need_data: bool = True):
    """Return (problem or None, dataset or None) from the config."""
    has_problem = "problem" in cfg
    has_dataset = "dataset" in cfg
    if has_problem == has_dataset:
        raise ValueError("config needs exactly one of 'problem' or 'dataset'")
    if has_problem:
        problem = load_problem(cfg["problem"])
        ds = None
        if need_data:
            if "n" not in cfg:
                raise ValueError("sampling from a problem needs 'n' in the config")
            ds = sample(problem, int(cfg["n"]), child_seed(cfg["seed"], _DATA))
        return problem, ds
    return None, load_csv(cfg["dataset"])


def _prepare(cfg, need_data: bool = True):
    """Resolve source and transform chain; returns (problem, ds, pipeline spec)."""
    problem, ds = _load_source(cfg, need_data)
    pointwise = ""
    if cfg.get("transform"):
        noise_spec, pointwise = split_transform_spec(cfg["transform"])
        if noise_spec:
            if ds is None:
                raise ValueError("noise transforms need a dataset to apply to")
            chain = parse_transform_spec(noise_spec, child_seed(cfg["seed"], _DATA, 1))
            for step in chain:
                ds = step.apply(ds)
    return problem, ds, pointwise


def _resolve_trainer(cfg, spec, problem):
    name = spec.get("name")
    if name is None:
        raise ValueError("trainer spec needs a 'name'")
    base = build_trainer(name, spec.get("params"), child_seed(cfg["seed"], _TRAIN), problem)
    _, _, pointwise = cfg["_prepared"]
    # the oracle rule acts on raw coordinates; transforms belong to trainers
    if pointwise and name != "bayes":
        return name, make_pipeline_trainer(pointwise, base, child_seed(cfg["seed"], _TRAIN, 1))
    return name, base


def _run_estimator(cfg, trainer, ds):
    spec = dict(cfg.get("estimator") or {})
    method = spec.pop("method", None)
    if method == "apparent":
        est = evaluation.apparent_error(trainer(ds), ds)
    elif method == "holdout":
        est = evaluation.holdout_error(
            trainer,
            ds,
            float(spec.pop("test_fraction", 0.3)),
            child_seed(cfg["seed"], _EST),
            bool(spec.pop("stratified", False)),
        )
    elif method == "kfold":
        est = evaluation.kfold_cv(
            trainer,
            ds,
            int(spec.pop("k", 5)),
            bool(spec.pop("stratified", False)),
            child_seed(cfg["seed"], _EST),
        )
    elif method == "loo":
        est = evaluation.loo_cv(trainer, ds)
    elif method == "bootstrap_corrected":
        est = evaluation.bootstrap_corrected(
            trainer, ds, int(spec.pop("m_rounds", 100)), child_seed(cfg["seed"], _EST)
        )
    elif method == "e632":
        est = evaluation.e632(
            trainer, ds, int(spec.pop("m_rounds", 100)), child_seed(cfg["seed"], _EST)
        )
    else:
        raise ValueError(f"unknown estimator method {method!r}")
    if spec:
        raise ValueError(f"unknown estimator parameters: {sorted(spec)}")
    return est


def _write_json(obj, path: Path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_gen(cfg) -> int:
    if "problem" not in cfg:
        raise ValueError("gen needs a 'problem' file in the config")
    problem = load_problem(cfg["problem"])
    if "n" not in cfg:
        raise ValueError("gen needs 'n' in the config")
    out = _require_out(cfg)
    ds = sample(problem, int(cfg["n"]), cfg["seed"])
    save_csv(ds, out)
    print(f"wrote {out} ({ds.n} rows, d={ds.dim})")
    return 0


def cmd_train(cfg) -> int:
    cfg["_prepared"] = _prepare(cfg)
    problem, ds, _ = cfg["_prepared"]
    out = _require_out(cfg)
    spec = cfg.get("trainer") or {}
    if spec.get("name") == "bayes":
        raise ValueError("the bayes oracle is not trainable; use it via bench")
    name, trainer = _resolve_trainer(cfg, spec, problem)
    model = trainer(ds)
    save_model(model, out)
    inner = getattr(model, "model", model)  # unwrap pipelines for the report
    info = getattr(inner, "info", None)
    report = {
        "trainer": name,
        "apparent_error": evaluation.zero_one_error(model, ds),
        "n_train": ds.n,
        "iterations": None if info is None else info.iterations,
        "objective": None if info is None else info.objective,
        "termination": None if info is None else info.termination,
    }
    report_path = out.parent / (out.stem + ".report.json")
    _write_json(report, report_path)
    print(f"wrote {out} and {report_path}")
    return 0


def cmd_eval(cfg) -> int:
    cfg["_prepared"] = _prepare(cfg)
    problem, ds, _ = cfg["_prepared"]
    out = _require_out(cfg)
    name, trainer = _resolve_trainer(cfg, cfg.get("trainer") or {}, problem)
    est = _run_estimator(cfg, trainer, ds)
    payload = {
        "trainer": name,
        "value": est.value,
        "method": est.method,
        "std": est.std,
        "components": est.components,
    }
    _write_json(payload, out)
    print(f"wrote {out} (value={est.value})")
    return 0


def cmd_curve(cfg) -> int:
    spec = dict(cfg.get("curve") or {})
    kind = spec.pop("kind", None)
    out = _require_out(cfg)
    seed = child_seed(cfg["seed"], _CURVE)
    if kind == "learning":
        cfg["_prepared"] = _prepare(cfg, need_data=False)
        problem, _, _ = cfg["_prepared"]
        if problem is None:
            raise ValueError("a learning curve needs a 'problem' source")
        name, trainer = _resolve_trainer(cfg, cfg.get("trainer") or {}, problem)
        curves = evaluation.learning_curve(
            trainer,
            problem,
            [int(s) for s in spec.pop("sizes")],
            int(spec.pop("repeats", 10)),
            int(spec.pop("n_test_mc", 20000)),
            seed,
            trainer_name=name,
        )
    elif kind == "feature":
        cfg["_prepared"] = _prepare(cfg, need_data=False)
        problem, ds, _ = cfg["_prepared"]
        source = problem if problem is not None else ds
        name, trainer = _resolve_trainer(cfg, cfg.get("trainer") or {}, problem)
        curves = [
            evaluation.feature_curve(
                trainer,
                source,
                [int(d) for d in spec.pop("dims")],
                int(spec.pop("repeats", 10)),
                seed,
                n_train=int(spec.pop("n_train", 100)),
                n_test_mc=int(spec.pop("n_test_mc", 20000)),
                folds=int(spec.pop("folds", 5)),
                trainer_name=name,
            )
        ]
    else:
        raise ValueError(f"unknown curve kind {kind!r}")
    if spec:
        raise ValueError(f"unknown curve parameters: {sorted(spec)}")
    evaluation.write_curves_csv(curves, out)
    print(f"wrote {out}")
    return 0


def cmd_bench(cfg) -> int:
    cfg["_prepared"] = _prepare(cfg)
    problem, ds, _ = cfg["_prepared"]
    out = _require_out(cfg)
    specs = cfg.get("trainers") or []
    if not specs:
        raise ValueError("bench needs a nonempty 'trainers' list")
    rows = []
    for spec in specs:
        name, trainer = _resolve_trainer(cfg, spec, problem)
        est = _run_estimator(cfg, trainer, ds)
        std = est.std if est.std is not None else evaluation.error_std(est.value, ds.n)
        rows.append((name, est.method, ds.n, est.value, std))
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("trainer,method,n,value,std\n")
        for name, method, n, value, std in rows:
            fh.write(f"{name},{method},{n},{value!r},{std!r}\n")
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


_COMMANDS = {
    "gen": cmd_gen,
    "train": cmd_train,
    "eval": cmd_eval,
    "curve": cmd_curve,
    "bench": cmd_bench,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claslab",
        description="Run classification experiments from a JSON config.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="override config output path")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        return _COMMANDS[args.command](cfg)
    except _RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _USAGE_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
