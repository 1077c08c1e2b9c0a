"""``wlsh-krr`` command line."""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import verify
from .bench import BenchConfig, run_benchmark
from .data import Dataset, load_csv, save_csv
from .errors import IngestionError, InvalidArgument, NumericFailure
from .gp import make_gp_task
from .kernels import kernel_matrix, parse_kernel, wlsh, wlsh_1d, worker_count
from .shapes import parse_shape
from .solver import DEFAULT_MAX_ITER, DEFAULT_TOL
from .widths import parse_dist


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def _lambda_grid(text):
    return "auto" if text.strip().lower() == "auto" else _floats(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wlsh-krr", description="Weighted-LSH kernel ridge regression tools.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="benchmark a regression method on a CSV dataset")
    b.add_argument("--data", required=True)
    b.add_argument("--method", required=True, help="exact:<kernel> | wlsh[:<shape>:<dist>] | rff")
    b.add_argument("--m", type=int)
    b.add_argument("--rff-features", type=int)
    b.add_argument("--lambda-grid", type=_lambda_grid, default="auto")
    b.add_argument("--seeds", type=_ints, default=[0])
    b.add_argument("--train-frac", type=float, default=0.8)
    b.add_argument("--n-train", type=int)
    b.add_argument("--scale", type=float, default=1.0)
    b.add_argument("--val-frac", type=float, default=0.2)
    b.add_argument("--cg-tol", type=float, default=DEFAULT_TOL)
    b.add_argument("--cg-max-iter", type=int, default=DEFAULT_MAX_ITER)
    b.add_argument("--label-column", default="last")
    b.add_argument("--has-header", action="store_true")
    b.add_argument("--delimiter")
    b.add_argument("--name", help="dataset name (wine, insurance, ct, covertype enable shape checks)")
    b.add_argument("--parallel-seeds", action="store_true")

    v = sub.add_parser("verify", help="spectral verification harnesses")
    vsub = v.add_subparsers(dest="check", required=True)
    o = vsub.add_parser("ose", help="OSE distortion of sketches against the exact WLSH kernel")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--d", type=int, required=True)
    o.add_argument("--lambda", dest="lam", type=float, required=True)
    o.add_argument("--shape", default="rect")
    o.add_argument("--dist", default="gamma:2")
    o.add_argument("--m", type=int, help="default: ceil(8 ||f||^2d (n/lambda) ln n)")
    o.add_argument("--trials", type=int, default=1)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--data-seed", type=int, default=0)
    lb = vsub.add_parser("lower-bound", help="two-cluster lower-bound instance")
    lb.add_argument("--n", type=int, required=True)
    lb.add_argument("--lambda", dest="lam", type=float, required=True)
    lb.add_argument("--trials", type=int, required=True)
    lb.add_argument("--d", type=int, default=1)
    lb.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("synth", help="write a synthetic GP regression dataset")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--cov", required=True, help="laplace | se | matern52 | wlsh:<shape>:<dist>")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--train", type=int, required=True)
    s.add_argument("--noise", type=float, default=0.1)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=0)

    k = sub.add_parser("kernel", help="kernel utilities")
    ksub = k.add_subparsers(dest="action", required=True)
    ke = ksub.add_parser("eval", help="print 1-d WLSH kernel values")
    ke.add_argument("--shape", required=True)
    ke.add_argument("--dist", required=True)
    ke.add_argument("--r", type=_floats, required=True)
    return p


def _emit(stream, **fields):
    stream.write(" ".join(f"{k}={_val(v)}" for k, v in fields.items()) + "\n")


def _val(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


def cmd_bench(args, out):
    ds = load_csv(args.data, label_column=args.label_column, has_header=args.has_header,
                  delimiter=args.delimiter, name=args.name)
    cfg = BenchConfig(args.method, m=args.m, rff_features=args.rff_features, lambda_grid=args.lambda_grid,
                      seeds=args.seeds, train_frac=args.train_frac, n_train=args.n_train, scale=args.scale,
                      val_frac=args.val_frac, cg_tol=args.cg_tol, cg_max_iter=args.cg_max_iter,
                      parallel_seeds=args.parallel_seeds)
    out.write(run_benchmark(cfg, ds).text())


def cmd_verify_ose(args, out):
    shape, dist = parse_shape(args.shape), parse_dist(args.dist)
    m = args.m or verify.recommended_m(args.n, args.lam, shape=shape, d=args.d)
    X = np.random.default_rng(args.data_seed).uniform(0.0, 1.0, size=(args.n, args.d))
    K = kernel_matrix(wlsh(shape, dist), X)

    def trial(t):
        return verify.ose_trial(X, shape, dist, m, args.lam, args.seed + t, K=K)

    with ThreadPoolExecutor(max_workers=worker_count()) as ex:
        reports = list(ex.map(trial, range(args.trials)))
    for t, r in enumerate(reports):
        _emit(out, record="trial", trial=t, seed=r.seed, m=r.m, n=r.n, **{"lambda": r.lam}, epsilon_star=r.epsilon_star)
    eps = np.array([r.epsilon_star for r in reports])
    _emit(out, record="summary", trials=len(eps), m=m, shape=shape.spec, dist=dist.spec,
          epsilon_median=float(np.median(eps)), epsilon_max=float(eps.max()),
          fraction_at_most_half=float(np.mean(eps <= 0.5)))


def cmd_verify_lower_bound(args, out):
    pts, beta = verify.lower_bound_instance(args.n, args.d, args.lam)
    res = verify.quadratic_form_trials(pts, beta, trials=args.trials, seed=args.seed)
    for t, v in enumerate(res.values):
        _emit(out, record="trial", trial=t, seed=args.seed, m=1, quadratic_form=float(v))
    expected = 1.0 - math.exp(-2.0 * args.lam / args.n)
    se = math.sqrt(expected * (1 - expected) / args.trials)
    _emit(out, record="summary", trials=args.trials, n=args.n, **{"lambda": args.lam}, p_hat=res.p_hat,
          p_expected=expected, binomial_se=se,
          histogram=";".join(f"{k:g}:{c}" for k, c in sorted(res.histogram.items())))


def cmd_synth(args, out):
    cov = parse_kernel(args.cov)
    task = make_gp_task(args.d, cov, args.n, args.train, args.noise, args.seed)
    path = Path(args.out)
    ds = Dataset(task.points, task.labels, path.stem, header=[f"x{i}" for i in range(args.d)] + ["y"])
    save_csv(ds, path, header=True)
    meta = {"covariance": cov.spec, "d": args.d, "n": args.n, "n_train": args.train, "noise_sd": args.noise,
            "seed": args.seed, "jitter": task.jitter, "train_idx": task.train_idx.tolist(),
            "test_idx": task.test_idx.tolist(), "eta": task.values.tolist()}
    meta_path = path.with_suffix(".meta.json")
    meta_path.write_text(json.dumps(meta))
    _emit(out, record="synth", out=str(path), meta=str(meta_path), n=args.n, d=args.d, jitter=task.jitter)


def cmd_kernel_eval(args, out):
    shape, dist = parse_shape(args.shape), parse_dist(args.dist)
    for r in args.r:
        _emit(out, r=r, value=wlsh_1d(shape, dist, r))


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        if args.command == "bench":
            cmd_bench(args, out)
        elif args.command == "verify":
            (cmd_verify_ose if args.check == "ose" else cmd_verify_lower_bound)(args, out)
        elif args.command == "synth":
            cmd_synth(args, out)
        else:
            cmd_kernel_eval(args, out)
    except (InvalidArgument, IngestionError, NumericFailure) as exc:
        print(f"wlsh-krr: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
