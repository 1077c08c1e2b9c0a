"""Exact KRR, sketched KRR and random Fourier features on a synthetic GP task."""

import time

import numpy as np

from wlsh_krr import build_sketch, fit_exact, fit_wlsh, gamma, make_rect, parse_kernel, predict, rmse
from wlsh_krr.gp import make_gp_task
from wlsh_krr.rff import build_rff, featurize, fit_rff, predict_rff

task = make_gp_task(3, parse_kernel("laplace"), 3000, 2500, noise_sd=0.1, seed=0)
lam = 1.0

t0 = time.perf_counter()
exact = fit_exact(parse_kernel("laplace"), task.X_train, task.y_train, lam, center=True)
print(f"exact laplace    rmse {rmse(predict(exact, task.X_test), task.eta_test):.4f}  {time.perf_counter() - t0:.2f}s")

for m in (20, 100, 500):
    t0 = time.perf_counter()
    sk = build_sketch(task.X_train, make_rect(), gamma(2), m, seed=m)
    model = fit_wlsh(sk, task.y_train, lam, center=True)
    pred = predict(model, task.X_test)
    print(f"wlsh m={m:<4d}      rmse {rmse(pred, task.eta_test):.4f}  {time.perf_counter() - t0:.2f}s"
          f"  cg iterations {model.stats.iterations}")

for D in (100, 1000):
    t0 = time.perf_counter()
    fmap = build_rff(3, D, seed=0)
    mu = task.y_train.mean()
    w, _ = fit_rff(featurize(fmap, task.X_train), task.y_train - mu, lam)
    pred = predict_rff(fmap, w, task.X_test) + mu
    print(f"rff D={D:<5d}      rmse {rmse(pred, task.eta_test):.4f}  {time.perf_counter() - t0:.2f}s")
