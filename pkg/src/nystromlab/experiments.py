"""Seeded experiment drivers shared by the CLI, the scripts and the acceptance suite.

Every trial draws its randomness from :func:`derive_seed`, a pure function of
``(master_seed, index)``, so results do not depend on how trials are scheduled.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from nystromlab.bounds import lower_bounds
from nystromlab.classifier import predict, recommended_m, train_full, train_restricted
from nystromlab.kernels import KernelFunction, gram
from nystromlab.linalg import DEFAULT_RANK_TOL
from nystromlab.nystrom import approximation_error, fit, sample_uniform
from nystromlab.spectrum import hs_distance
from nystromlab.synth import bernoulli_lower_bound_kernel, bernoulli_top_eigenvalues, power_law_classification


def derive_seed(master_seed, index):
    """Stable 64-bit seed for trial ``index``."""
    return int(np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1, np.uint64)[0])


def trial_seeds(master_seed, count):
    return [derive_seed(master_seed, i) for i in range(count)]


def run_trials(fn, items, workers=1):
    """``[fn(x) for x in items]``, optionally on a thread pool; output order follows ``items``."""
    items = list(items)
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def loglog_slope(x, y):
    """Least-squares slope of ``ln y`` against ``ln x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def scaling_experiment(source, m_grid, seeds, rank_tol=DEFAULT_RANK_TOL, workers=1):
    """Nyström error for every ``(m, seed)`` cell plus the log-log slope of the per-m median.

    ``source`` is a kernel matrix or a callable ``m -> K`` for spectra that depend on ``m``.
    """
    kernels = {m: (source(m) if callable(source) else source) for m in m_grid}
    cells = [(m, s) for m in m_grid for s in seeds]

    def trial(cell):
        m, s = cell
        K = kernels[m]
        return approximation_error(fit(K, sample_uniform(K.shape[0], m, s), rank_tol=rank_tol), K)

    errors = run_trials(trial, cells, workers)
    rows = [{"m": int(m), "seed": int(s), "error": e} for (m, s), e in zip(cells, errors)]
    medians = [float(np.median([r["error"] for r in rows if r["m"] == m])) for m in m_grid]
    return {"rows": rows, "m_grid": [int(m) for m in m_grid], "median_error": medians,
            "slope": loglog_slope(m_grid, medians)}


def lowerbound_trial(N, m, seed, samplings=10, rank_tol=DEFAULT_RANK_TOL):
    """One random-sign witness kernel: its top eigenvalues and the Nyström error of ``samplings`` uniform draws."""
    top = bernoulli_top_eigenvalues(N, m, seed)
    lo, hi = N / (2.0 * (m + 1)), 3.0 * N / (2.0 * (m + 1))
    in_band = bool(np.all((top >= lo) & (top <= hi)))
    K = bernoulli_lower_bound_kernel(N, m, seed)
    errs = []
    for j in range(samplings):
        model = fit(K, sample_uniform(N, m, derive_seed(seed, j)), rank_tol=rank_tol)
        errs.append(approximation_error(model, K))
    return {"seed": int(seed), "top_eigenvalues": top.tolist(), "in_band": in_band,
            "errors": errs, "median_error": float(np.median(errs)), "lower_general": lower_bounds(N, m)[0]}


def hs_trials(K, m, seeds):
    return [hs_distance(K, sample_uniform(K.shape[0], m, s)) for s in seeds]


def _test_loss(model, loss, kv, y):
    return float(loss.value(y * predict(model, kernel_values=kv)).mean())


def generalization_trial(N, p, seed, m=None, loss="logistic", lam_grid=(1e-1, 1e-2, 1e-3), n_test=1000,
                         n_val=500, n_freq=1024, tol=1e-8, rank_tol=DEFAULT_RANK_TOL, include_full_rank=False):
    """Held-out loss of the full classifier and of restricted ones at ``m/2``, ``m``, ``2m`` landmarks.

    ``lambda`` is chosen on a validation split with the full model. Default
    ``m`` is :func:`recommended_m`.
    """
    m = recommended_m(N, p) if m is None else int(m)
    train, _ = power_law_classification(N, p, derive_seed(seed, 0), n_freq)
    val, _ = power_law_classification(n_val, p, derive_seed(seed, 1), n_freq)
    test, _ = power_law_classification(n_test, p, derive_seed(seed, 2), n_freq)
    k = KernelFunction("linear")
    K = gram(train, k)
    Kval, Ktest = k(val.points, train.points), k(test.points, train.points)

    val_loss = {}
    for lam in lam_grid:
        model = train_full(K, train.labels, lam, loss, tol=1e-6)
        val_loss[lam] = _test_loss(model, model.loss, Kval, val.labels)
    lam = min(lam_grid, key=lambda v: (val_loss[v], -v))

    full = train_full(K, train.labels, lam, loss, tol=tol)
    full_loss = _test_loss(full, full.loss, Ktest, test.labels)
    ms = sorted({max(1, m // 2), m, min(N, 2 * m)} | ({N} if include_full_rank else set()))
    rows = []
    for mm in ms:
        nys = fit(K, sample_uniform(N, mm, derive_seed(seed, 3 + mm)), rank_tol=rank_tol)
        rm = train_restricted(nys, train.labels, lam, full.loss, tol=tol)
        tl = _test_loss(rm, full.loss, Ktest[:, nys.sample.indices], test.labels)
        rows.append({"m": mm, "rank": nys.rank, "test_loss": tl, "gap": tl - full_loss,
                     "support": int(np.count_nonzero(rm.z))})
    return {"seed": int(seed), "lambda": lam, "m": m, "full_test_loss": full_loss,
            "full_support": int(np.count_nonzero(full.alpha)), "restricted": rows}


def generalization_experiment(N, p, seeds, workers=1, **kwargs):
    """:func:`generalization_trial` over seeds, with per-``m`` median gaps."""
    trials = run_trials(lambda s: generalization_trial(N, p, s, **kwargs), seeds, workers)
    ms = sorted({r["m"] for t in trials for r in t["restricted"]})
    median_gap = {mm: float(np.median([r["gap"] for t in trials for r in t["restricted"] if r["m"] == mm])) for mm in ms}
    return {"N": N, "p": p, "recommended_m": trials[0]["m"], "trials": trials, "median_gap": median_gap}
