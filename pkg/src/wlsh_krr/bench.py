"""Benchmark runner: exact KRR, WLSH-sketched KRR and RFF on a dataset.

The report is line-delimited text.  Every line is a sequence of
``key=value`` tokens with a fixed key order per record type:

    record=config dataset=.. n=.. d=.. method=.. m=.. D=.. lambda_grid=.. seeds=.. train_frac=.. n_train=.. scale=.. val_frac=.. cg_tol=.. cg_max_iter=.. preprocessing=..
    record=seed method=.. seed=.. n_train=.. n_test=.. rmse=.. fit_time=.. predict_time=.. lambda=.. cg_iterations=.. cg_converged=.. cg_residual=..
    record=aggregate method=.. seeds=.. rmse_mean=.. rmse_sd=.. fit_time_mean=.. predict_time_mean=..
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import krr, rff
from .data import Dataset, standardize
from .errors import InvalidArgument
from .kernels import KernelSpec, kernel_matrix, parse_kernel, worker_count
from .shapes import BucketShape, make_rect, parse_shape
from .sketch import build_sketch
from .solver import DEFAULT_MAX_ITER, DEFAULT_TOL
from .widths import WidthDistribution, gamma, parse_dist

CONFIG_KEYS = ("record", "dataset", "n", "d", "method", "m", "D", "lambda_grid", "seeds", "train_frac",
               "n_train", "scale", "val_frac", "cg_tol", "cg_max_iter", "preprocessing")
SEED_KEYS = ("record", "method", "seed", "n_train", "n_test", "rmse", "fit_time", "predict_time", "lambda",
             "cg_iterations", "cg_converged", "cg_residual")
AGGREGATE_KEYS = ("record", "method", "seeds", "rmse_mean", "rmse_sd", "fit_time_mean", "predict_time_mean")

PREPROCESSING = "standardize_features_on_train+center_labels"


@dataclass
class Method:
    """A parsed ``--method`` value."""

    kind: str  # "exact", "wlsh" or "rff"
    kernel: KernelSpec | None = None
    shape: BucketShape | None = None
    dist: WidthDistribution | None = None

    @property
    def label(self) -> str:
        if self.kind == "exact":
            return f"exact:{self.kernel.spec}"
        if self.kind == "wlsh":
            return f"wlsh:{self.shape.spec}:{self.dist.spec}"
        return "rff"


def parse_method(text: str) -> Method:
    """``exact:<kernel>``, ``wlsh`` (rect / gamma:2), ``wlsh:<shape>:<dist>`` or ``rff``."""
    text = text.strip()
    low = text.lower()
    if low.startswith("exact:"):
        return Method("exact", kernel=parse_kernel(text[len("exact:"):]))
    if low == "wlsh":
        return Method("wlsh", shape=make_rect(), dist=gamma(2))
    if low.startswith("wlsh:"):
        k = parse_kernel(text)
        return Method("wlsh", shape=k.shape, dist=k.dist)
    if low == "rff":
        return Method("rff")
    raise InvalidArgument(f"unknown method {text!r}")


@dataclass
class BenchConfig:
    method: str
    m: int | None = None
    rff_features: int | None = None
    lambda_grid: list[float] | str = "auto"
    seeds: list[int] = field(default_factory=lambda: [0])
    train_frac: float = 0.8
    n_train: int | None = None
    scale: float = 1.0
    val_frac: float = 0.2
    cg_tol: float = DEFAULT_TOL
    cg_max_iter: int = DEFAULT_MAX_ITER
    parallel_seeds: bool = False

    def validate(self) -> Method:
        meth = parse_method(self.method)
        if not self.seeds:
            raise InvalidArgument("at least one seed is required")
        if not 0 < self.train_frac < 1:
            raise InvalidArgument("train_frac must be in (0, 1)")
        if not 0 < self.val_frac < 1:
            raise InvalidArgument("val_frac must be in (0, 1)")
        if not 0 < self.scale <= 1:
            raise InvalidArgument("scale must be in (0, 1]")
        if meth.kind == "wlsh" and not (self.m and self.m >= 1):
            raise InvalidArgument("wlsh needs --m")
        if meth.kind == "rff" and not (self.rff_features and self.rff_features >= 1):
            raise InvalidArgument("rff needs --rff-features")
        if self.lambda_grid != "auto" and (not self.lambda_grid or min(self.lambda_grid) <= 0):
            raise InvalidArgument("lambda grid values must be positive")
        return meth

    def lambdas(self, n: int) -> list[float]:
        """The explicit grid, or ``n * 10**j`` for ``j = -6..0``."""
        if self.lambda_grid == "auto":
            return [n * 10.0**j for j in range(-6, 1)]
        return [float(v) for v in self.lambda_grid]


@dataclass
class BenchReport:
    config: dict
    seeds: list[dict]
    aggregate: dict

    def lines(self) -> list[str]:
        return [format_record(self.config, CONFIG_KEYS)] + [format_record(r, SEED_KEYS) for r in self.seeds] + [
            format_record(self.aggregate, AGGREGATE_KEYS)
        ]

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".6g")
    if isinstance(v, (list, tuple)):
        return ",".join(_fmt(x) for x in v)
    return "none" if v is None else str(v)


def format_record(rec: dict, keys) -> str:
    return " ".join(f"{k}={_fmt(rec[k])}" for k in keys)


def parse_report(text: str) -> list[dict]:
    """Inverse of :meth:`BenchReport.text`; values stay strings."""
    out = []
    for line in text.splitlines():
        if line.strip():
            out.append(dict(tok.split("=", 1) for tok in line.split()))
    return out


def split_indices(n: int, seed: int, train_frac: float, n_train: int | None, scale: float):
    """Shuffled (optionally subsampled) train/test indices."""
    perm = np.random.default_rng([seed, 101]).permutation(n)
    keep = max(2, int(round(scale * n)))
    perm = perm[:keep]
    if n_train is not None:
        ntr = int(round(n_train * keep / n)) if scale < 1 else int(n_train)
    else:
        ntr = int(round(train_frac * keep))
    if not 2 <= ntr < keep:
        raise InvalidArgument(f"train size {ntr} incompatible with {keep} rows")
    return perm[:ntr], perm[ntr:]


class _Fitter:
    """Fit/predict for one method on one training set, reusable across lambdas."""

    def __init__(self, meth: Method, cfg: BenchConfig, X, seed):
        self.meth, self.cfg, self.X = meth, cfg, X
        if meth.kind == "exact":
            self.K = kernel_matrix(meth.kernel, X)
        elif meth.kind == "wlsh":
            self.sketch = build_sketch(X, meth.shape, meth.dist, cfg.m, seed)
        else:
            self.map = rff.build_rff(X.shape[1], cfg.rff_features, seed)
            self.Phi = rff.featurize(self.map, X)

    def fit(self, y, lam):
        cfg = self.cfg
        if self.meth.kind == "exact":
            model = krr.fit_exact(self.meth.kernel, self.X, y, lam, cfg.cg_tol, cfg.cg_max_iter, center=True, K=self.K)
            return model, model.stats
        if self.meth.kind == "wlsh":
            model = krr.fit_wlsh(self.sketch, y, lam, cfg.cg_tol, cfg.cg_max_iter, center=True)
            return model, model.stats
        offset = float(np.mean(y))
        w, stats = rff.fit_rff(self.Phi, y - offset, lam, cfg.cg_tol, cfg.cg_max_iter)
        return (w, offset), stats

    def predict(self, model, Xq):
        if self.meth.kind == "rff":
            w, offset = model
            return rff.predict_rff(self.map, w, Xq) + offset
        return krr.predict(model, Xq)


def run_seed(cfg: BenchConfig, meth: Method, ds: Dataset, seed: int) -> dict:
    tr, te = split_indices(ds.n, seed, cfg.train_frac, cfg.n_train, cfg.scale)
    train = standardize(ds.subset(tr))
    Xtr, ytr = train.features, train.labels
    Xte, yte = train.transform(ds.features[te]), ds.labels[te]

    lambdas = cfg.lambdas(len(tr))
    if len(lambdas) == 1:
        lam = lambdas[0]
    else:
        perm = np.random.default_rng([seed, 202]).permutation(len(tr))
        nval = max(1, int(round(cfg.val_frac * len(tr))))
        va, fi = perm[:nval], perm[nval:]
        fitter = _Fitter(meth, cfg, Xtr[fi], seed)
        scores = []
        for lam_j in cfg.lambdas(len(fi)):
            model, _ = fitter.fit(ytr[fi], lam_j)
            scores.append(krr.rmse(fitter.predict(model, Xtr[va]), ytr[va]))
        best = int(np.argmin(scores))
        # Scale the chosen lambda from the fit subset to the full training set.
        lam = cfg.lambdas(len(fi))[best] * (len(tr) / len(fi) if cfg.lambda_grid == "auto" else 1.0)

    t0 = time.perf_counter()
    fitter = _Fitter(meth, cfg, Xtr, seed)
    model, stats = fitter.fit(ytr, lam)
    t1 = time.perf_counter()
    pred = fitter.predict(model, Xte)
    t2 = time.perf_counter()
    return {
        "record": "seed", "method": meth.label, "seed": seed, "n_train": len(tr), "n_test": len(te),
        "rmse": krr.rmse(pred, yte), "fit_time": t1 - t0, "predict_time": t2 - t1, "lambda": float(lam),
        "cg_iterations": stats.iterations, "cg_converged": bool(stats.converged),
        "cg_residual": float(stats.final_relative_residual),
    }


def run_benchmark(config: BenchConfig, ds: Dataset) -> BenchReport:
    """Run every seed and aggregate RMSE and timings."""
    meth = config.validate()
    cfg_rec = {
        "record": "config", "dataset": ds.name or "unnamed", "n": ds.n, "d": ds.d, "method": meth.label,
        "m": config.m, "D": config.rff_features,
        "lambda_grid": config.lambda_grid if config.lambda_grid == "auto" else list(config.lambda_grid),
        "seeds": list(config.seeds), "train_frac": float(config.train_frac), "n_train": config.n_train,
        "scale": float(config.scale), "val_frac": float(config.val_frac), "cg_tol": float(config.cg_tol),
        "cg_max_iter": config.cg_max_iter, "preprocessing": PREPROCESSING,
    }

    def one(seed):
        try:
            return run_seed(config, meth, ds, seed)
        except (InvalidArgument, ArithmeticError, ValueError) as exc:
            raise type(exc)(f"[method={meth.label} seed={seed}] {exc}") from exc

    if config.parallel_seeds and len(config.seeds) > 1:
        with ThreadPoolExecutor(max_workers=min(worker_count(), len(config.seeds))) as ex:
            records = list(ex.map(one, config.seeds))
    else:
        records = [one(s) for s in config.seeds]
    rm = np.array([r["rmse"] for r in records])
    agg = {
        "record": "aggregate", "method": meth.label, "seeds": len(records), "rmse_mean": float(rm.mean()),
        "rmse_sd": float(rm.std(ddof=1)) if len(rm) > 1 else 0.0,
        "fit_time_mean": float(np.mean([r["fit_time"] for r in records])),
        "predict_time_mean": float(np.mean([r["predict_time"] for r in records])),
    }
    return BenchReport(cfg_rec, records, agg)
