"""Command-line front end.

    nystromlab scaling --N 2000 --p 2 --m-grid 20,40,80,160,320 --seeds 10 --out scaling.json

Settings come from built-in defaults, then an optional INI file (``--config``,
section ``[experiment]``, keys named like the long flags), then the flags
themselves. The whole configuration is validated before any computation and
embedded in the report. Reports are a pure function of the configuration and
the master seed: the worker count and output path are deliberately left out.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from nystromlab.bounds import BOUND_NAMES, HOLD_SLACK, UPPER_BOUNDS, ConstantsConfig, compare
from nystromlab.classifier import (
    LOSSES,
    make_loss,
    predict,
    recommended_m,
    restricted_objective,
    train_full,
    train_restricted,
)
from nystromlab.data import ingest
from nystromlab.errors import ConfigError, DataError, NumericalError, NystromLabError
from nystromlab.experiments import derive_seed, generalization_trial, lowerbound_trial, run_trials, scaling_experiment, trial_seeds
from nystromlab.kernels import FAMILIES, KernelFunction, gram
from nystromlab.linalg import DEFAULT_RANK_TOL, eigh_descending
from nystromlab.nystrom import approximation_error, fit, sample_uniform
from nystromlab.spectrum import coherence, eigengap_profile, fit_power_law, fixed_point_epsilon
from nystromlab.synth import SpectrumSpec, eigengap_spectrum, power_law_spectrum, spectrum_vectors, synth_kernel

logger = logging.getLogger("nystromlab")

SCHEMA_VERSION = 1
COMMANDS = ("approx", "bounds", "spectrum", "lowerbound", "classify", "scaling")
SPECTRA = ("powerlaw", "eigengap")
VECTORS = ("random_orthogonal", "hadamard", "identity")
# fields that affect scheduling or destination only; kept out of reports
_NOT_REPORTED = ("out", "workers", "config")


def _ints(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from exc


def _bool(text):
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


@dataclass
class ExperimentConfig:
    command: str
    data: str | None = None
    format: str = "csv"
    kernel: str = "rbf"
    width: float = 1.0
    degree: int = 2
    offset: float = 1.0
    normalize: bool = False
    N: int | None = None
    spectrum: str = "powerlaw"
    p: float | None = None
    c: float = 1.0
    r: int | None = None
    rho: float | None = None
    vectors: str = "random_orthogonal"
    m: int | None = None
    m_grid: list = field(default_factory=list)
    seeds: int = 10
    seed_list: list = field(default_factory=list)
    master_seed: int = 0
    delta: float = 0.05
    rank_tol: float = DEFAULT_RANK_TOL
    lam: float | None = None
    loss: str = "logistic"
    which: list = field(default_factory=lambda: list(BOUND_NAMES))
    c_dm: float = 1.0
    C_ab: float = 1.0
    gamma: float = 1.0
    samplings: int = 10
    test_fraction: float = 0.25
    out: str | None = None
    out_format: str = "json"
    workers: int = 1
    config: str | None = None

    @property
    def constants(self):
        return ConstantsConfig(self.c_dm, self.C_ab, self.gamma)

    def trial_seeds(self):
        return list(self.seed_list) if self.seed_list else trial_seeds(self.master_seed, self.seeds)

    def resolved(self):
        d = asdict(self)
        for k in _NOT_REPORTED:
            d.pop(k)
        d["trial_seeds"] = self.trial_seeds()
        return d


_CASTS = {
    "width": float, "degree": int, "offset": float, "normalize": _bool, "N": int, "p": float, "c": float,
    "r": int, "rho": float, "m": int, "m_grid": _ints, "seeds": int, "seed_list": _ints, "master_seed": int,
    "delta": float, "rank_tol": float, "lam": float, "c_dm": float, "C_ab": float, "gamma": float,
    "samplings": int, "test_fraction": float, "workers": int,
    "which": lambda v: v if isinstance(v, list) else [s for s in str(v).replace(" ", "").split(",") if s],
}
_ALIASES = {"lambda": "lam"}


def _cast(key, value):
    try:
        return _CASTS.get(key, str)(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc


def read_config_file(path):
    """Key/value settings from an INI file; keys may use dashes or underscores."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not text.lstrip().startswith("["):
        text = "[experiment]\n" + text
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if not parser.has_section("experiment"):
        raise ConfigError(f"config file {path} has no [experiment] section")
    known = {f.name for f in fields(ExperimentConfig)}
    out = {}
    for k, v in parser.items("experiment"):
        key = _ALIASES.get(k.replace("-", "_"), k.replace("-", "_"))
        if key not in known or key in ("config",):
            raise ConfigError(f"unknown config key {k!r}")
        out[key] = _cast(key, v)
    return out


def validate(cfg: ExperimentConfig, n_points=None):
    """Raise :class:`ConfigError` for anything that would fail later. ``n_points`` is the dataset size, if any."""
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    if (cfg.data is None) == (cfg.N is None) and cfg.command != "lowerbound":
        raise ConfigError("give exactly one source: --data FILE or a synthetic --N")
    if cfg.command == "lowerbound" and cfg.N is None:
        raise ConfigError("lowerbound needs --N")
    if cfg.N is not None and cfg.N < 2:
        raise ConfigError("N must be >= 2")
    N = n_points if n_points is not None else cfg.N
    if cfg.kernel not in FAMILIES:
        raise ConfigError(f"unknown kernel {cfg.kernel!r}; choose from {FAMILIES}")
    if cfg.format not in ("csv", "sparse", "matrix"):
        raise ConfigError(f"unknown data format {cfg.format!r}")
    if cfg.data is not None and cfg.format != "matrix" and cfg.kernel == "precomputed":
        raise ConfigError("a precomputed kernel is read with --format matrix")
    if cfg.spectrum not in SPECTRA:
        raise ConfigError(f"unknown spectrum {cfg.spectrum!r}; choose from {SPECTRA}")
    if cfg.vectors not in VECTORS:
        raise ConfigError(f"unknown vector source {cfg.vectors!r}; choose from {VECTORS}")
    synthetic_kernel = cfg.data is None and cfg.command not in ("lowerbound", "classify")
    if synthetic_kernel and cfg.spectrum == "powerlaw" and cfg.p is None:
        raise ConfigError("a power-law spectrum needs --p")
    if synthetic_kernel and cfg.spectrum == "eigengap":
        if cfg.r is None or cfg.rho is None:
            raise ConfigError("an eigengap spectrum needs --r and --rho")
        if not 0 < cfg.rho <= 0.5:
            raise ConfigError("rho must lie in (0, 1/2]")
        if not 1 <= cfg.r < cfg.N:
            raise ConfigError("need 1 <= r < N")
    if cfg.command == "classify" and cfg.data is None and (cfg.p is None or not cfg.p > 1):
        raise ConfigError("synthetic classification needs --p > 1")
    if cfg.p is not None and not cfg.p > 0:
        raise ConfigError("p must be > 0")
    if cfg.seeds < 1:
        raise ConfigError("seeds must be >= 1")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    if not 0 < cfg.delta < 1:
        raise ConfigError("delta must lie in (0, 1)")
    if not 0 < cfg.rank_tol < 1:
        raise ConfigError("rank-tol must lie in (0, 1)")
    if cfg.lam is not None and not cfg.lam > 0:
        raise ConfigError("lambda must be > 0")
    if cfg.loss not in LOSSES:
        raise ConfigError(f"unknown loss {cfg.loss!r}; choose from {LOSSES}")
    if cfg.out_format not in ("json", "csv"):
        raise ConfigError("out-format must be json or csv")
    if cfg.samplings < 1:
        raise ConfigError("samplings must be >= 1")
    if not 0 < cfg.test_fraction < 1:
        raise ConfigError("test-fraction must lie in (0, 1)")
    bad = [w for w in cfg.which if w not in BOUND_NAMES]
    if bad:
        raise ConfigError(f"unknown bound names {bad}; choose from {BOUND_NAMES}")
    ms = ([cfg.m] if cfg.m is not None else []) + list(cfg.m_grid)
    if cfg.command in ("bounds", "scaling") and not cfg.m_grid and cfg.m is None:
        raise ConfigError(f"{cfg.command} needs --m or --m-grid")
    if cfg.command in ("approx", "lowerbound") and cfg.m is None:
        raise ConfigError(f"{cfg.command} needs --m")
    if cfg.command == "scaling" and len(cfg.m_grid) < 2:
        raise ConfigError("scaling needs at least two --m-grid values")
    if synthetic_kernel and cfg.spectrum == "eigengap" and any(m < 2 for m in ms):
        raise ConfigError("an eigengap spectrum needs m >= 2")
    for m in ms:
        if m < 1:
            raise ConfigError(f"m must be >= 1, got {m}")
        if N is not None and m > N:
            raise ConfigError(f"m={m} exceeds N={N}")
    if cfg.command == "lowerbound" and cfg.m + 1 > cfg.N:
        raise ConfigError("lowerbound needs N >= m + 1")
    if cfg.command == "classify" and N is not None and n_points is not None:
        if int(round(n_points * (1 - cfg.test_fraction))) < 2:
            raise ConfigError("too few training points after the test split")
    cfg.constants  # noqa: B018 - validates the constants
    if cfg.command == "spectrum" and cfg.r is not None and N is not None and not 1 <= cfg.r < N:
        raise ConfigError("need 1 <= r < N")


# ---------------------------------------------------------------- sources


def _kernel_function(cfg, matrix=None):
    return KernelFunction(cfg.kernel, cfg.width, cfg.degree, cfg.offset, cfg.normalize, matrix)


def _load(cfg):
    """Data-file source: ``(Dataset or None, K)``. Parsing problems raise :class:`DataError`."""
    if cfg.format == "matrix":
        try:
            K = np.loadtxt(cfg.data, delimiter=",", ndmin=2)
        except OSError as exc:
            raise DataError(f"cannot read {cfg.data}: {exc}") from exc
        except ValueError as exc:
            raise DataError(f"cannot parse kernel matrix {cfg.data}: {exc}") from exc
        if K.shape[0] != K.shape[1]:
            raise DataError(f"kernel matrix must be square, got {K.shape}")
        if not np.all(np.isfinite(K)):
            raise DataError("kernel matrix has non-finite entries")
        if np.abs(K - K.T).max() > 1e-8 * max(1.0, np.abs(K).max()):
            raise DataError("kernel matrix is not symmetric")
        return None, 0.5 * (K + K.T)
    try:
        data = ingest(cfg.data, cfg.format)
    except OSError as exc:
        raise DataError(f"cannot read {cfg.data}: {exc}") from exc
    return data, None


def _spectrum_source(cfg, N):
    """Synthetic kernel: a callable ``m -> (K, EigenSystem)``."""
    if cfg.spectrum == "powerlaw":
        spec = SpectrumSpec(power_law_spectrum(N, cfg.p, cfg.c, scale_N=True), cfg.vectors, cfg.master_seed)
        K, eig = synth_kernel(spec)
        return lambda m: (K, eig)
    vectors = spectrum_vectors(SpectrumSpec(np.ones(N), cfg.vectors, cfg.master_seed))
    cache = {}

    def source(m):
        if m not in cache:
            spec = SpectrumSpec(eigengap_spectrum(N, m, cfg.r, cfg.rho), cfg.vectors, cfg.master_seed)
            cache[m] = synth_kernel(spec, vectors)
        return cache[m]

    return source


def _kernel_source(cfg, data, K):
    """``(N, m -> (K, EigenSystem))`` for every kernel-matrix command."""
    if cfg.data is None:
        return cfg.N, _spectrum_source(cfg, cfg.N)
    if K is None:
        K = gram(data, _kernel_function(cfg))
    eig = eigh_descending(K)
    return K.shape[0], lambda m: (K, eig)


# ---------------------------------------------------------------- commands


def _lambda_next(eig, m):
    lam = eig.eigenvalues
    return float(max(lam[m], 0.0)) if m < lam.size else 0.0


def cmd_approx(cfg, data, K):
    N, source = _kernel_source(cfg, data, K)
    K, eig = source(cfg.m)
    seeds = cfg.trial_seeds()
    def trial(s):
        model = fit(K, sample_uniform(N, cfg.m, s), rank_tol=cfg.rank_tol)
        return {"m": cfg.m, "seed": s, "rank": model.rank, "error": approximation_error(model, K)}

    rows = run_trials(trial, seeds, cfg.workers)
    errs = [r["error"] for r in rows]
    summary = {"N": N, "m": cfg.m, "median_error": float(np.median(errs)), "max_error": float(np.max(errs)),
               "lambda_m_plus_1": _lambda_next(eig, cfg.m), "trace": float(np.clip(eig.eigenvalues, 0, None).sum())}
    return summary, rows


def cmd_bounds(cfg, data, K):
    N, source = _kernel_source(cfg, data, K)
    grid = cfg.m_grid or [cfg.m]
    reports = compare(source, grid, cfg.trial_seeds(), which=cfg.which, delta=cfg.delta, constants=cfg.constants,
                      r=cfg.r, p=cfg.p, rank_tol=cfg.rank_tol, workers=cfg.workers)
    rows = []
    for rep in reports:
        for t in rep.trials:
            row = {"m": rep.context["m"], "seed": t["seed"], "error": t["error"]}
            row.update(rep.bounds)
            row.update({f"holds_{k}": t["error"] <= v + HOLD_SLACK for k, v in rep.bounds.items() if k in UPPER_BOUNDS})
            rows.append(row)
    return {"N": N, "reports": [rep.to_dict() for rep in reports]}, rows


def cmd_spectrum(cfg, data, K):
    N, source = _kernel_source(cfg, data, K)
    m = cfg.m if cfg.m is not None else (cfg.m_grid[0] if cfg.m_grid else None)
    K, eig = source(m if m is not None else 2)
    lam = np.clip(eig.eigenvalues, 0.0, None)
    out = {"N": N, "trace": float(lam.sum()), "lambda_max": float(lam[0]), "coherence": coherence(eig.vectors)}
    try:
        pf = fit_power_law(lam)
        out["power_law"] = {"p": pf.p, "c": pf.c, "fit_range": list(pf.fit_range), "residual": pf.residual}
    except NystromLabError as exc:
        out["power_law"] = {"error": str(exc)}
    out["epsilon"] = fixed_point_epsilon(lam, N, normalized=True)
    if m is not None and m >= 2:
        if cfg.r is not None:
            r = cfg.r
        else:
            # most pronounced relative gap among the leading min(m, N-1) eigenvalues
            top = min(m, N - 1)
            ratios = lam[:top] / np.maximum(lam[1 : top + 1], np.finfo(float).tiny)
            r = int(np.argmax(ratios)) + 1
        if lam[r - 1] > 0:
            prof = eigengap_profile(lam, N, m, r)
            out["eigengap"] = {"m": m, "r": prof.r, "rho": prof.rho, "lambda_r": prof.lambda_r,
                               "lambda_r_plus_1": prof.lambda_r_plus_1}
    rows = [{"k": k + 1, "eigenvalue": float(v)} for k, v in enumerate(eig.eigenvalues)]
    return out, rows


def cmd_lowerbound(cfg, data, K):
    trials = run_trials(lambda s: lowerbound_trial(cfg.N, cfg.m, s, cfg.samplings, cfg.rank_tol), cfg.trial_seeds(), cfg.workers)
    lo = trials[0]["lower_general"]
    rows = [{"seed": t["seed"], "in_band": t["in_band"], "min_top_eigenvalue": min(t["top_eigenvalues"]),
             "max_top_eigenvalue": max(t["top_eigenvalues"]), "median_error": t["median_error"],
             "lower_general": lo, "error_above_lower": t["median_error"] >= lo - 1e-6} for t in trials]
    in_band = [t for t in trials if t["in_band"]]
    summary = {"N": cfg.N, "m": cfg.m, "lower_general": lo, "band": [lo, 3.0 * lo],
               "in_band_fraction": len(in_band) / len(trials),
               "in_band_error_above_lower_fraction": (float(np.mean([t["median_error"] >= lo - 1e-6 for t in in_band]))
                                                      if in_band else None),
               "trials": trials}
    return summary, rows


def _split(n, fraction, seed):
    perm = np.random.default_rng(seed).permutation(n)
    n_test = int(round(n * fraction))
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def cmd_classify(cfg, data, K):
    lam = cfg.lam if cfg.lam is not None else 1e-2
    seeds = cfg.trial_seeds()
    if cfg.data is None:
        kw = {"loss": cfg.loss, "rank_tol": cfg.rank_tol}
        if cfg.m is not None:
            kw["m"] = cfg.m
        if cfg.lam is not None:
            kw["lam_grid"] = (cfg.lam,)
        trials = run_trials(lambda s: generalization_trial(cfg.N, cfg.p, s, **kw), seeds, cfg.workers)
        rows = [{"seed": t["seed"], "lambda": t["lambda"], "full_test_loss": t["full_test_loss"], **r}
                for t in trials for r in t["restricted"]]
        ms = sorted({r["m"] for r in rows})
        med = {str(mm): float(np.median([r["gap"] for r in rows if r["m"] == mm])) for mm in ms}
        summary = {"N": cfg.N, "p": cfg.p, "recommended_m": recommended_m(cfg.N, cfg.p), "m": trials[0]["m"],
                   "median_gap": med, "trials": trials}
        return summary, rows

    if K is not None:
        raise ConfigError("classify needs labelled data, not a kernel matrix")
    kern = _kernel_function(cfg)
    tr, te = _split(len(data), cfg.test_fraction, derive_seed(cfg.master_seed, 2**32))
    train, test = data.subset(tr), data.subset(te)
    Ktr = gram(train, kern)
    Kte = kern(test.points, train.points)
    N = len(train)
    eigs = np.clip(eigh_descending(Ktr).eigenvalues, 0.0, None)
    try:
        p_fit = fit_power_law(eigs).p
    except NystromLabError:
        p_fit = None
    m = cfg.m if cfg.m is not None else (recommended_m(N, p_fit) if p_fit is not None and p_fit > 1 else max(1, N // 4))
    m = min(m, N)
    loss = make_loss(cfg.loss, lam, float(np.diag(Ktr).max()))
    full = train_full(Ktr, train.labels, lam, loss, tol=1e-9)
    full_test = float(loss.value(test.labels * predict(full, kernel_values=Kte)).mean())
    rows = []
    for s in seeds:
        nys = fit(Ktr, sample_uniform(N, m, s), rank_tol=cfg.rank_tol)
        rm = train_restricted(nys, train.labels, lam, loss, tol=1e-9)
        obj = restricted_objective(rm, train.labels)
        err = approximation_error(nys, Ktr)
        test_loss = float(loss.value(test.labels * predict(rm, kernel_values=Kte[:, nys.sample.indices])).mean())
        rows.append({"m": m, "seed": s, "rank": nys.rank, "objective": obj, "objective_gap": obj - full.objective,
                     "approximation_error": err,
                     "objective_bound": full.objective + loss.lipschitz**2 / (2 * lam * N) * err,
                     "test_loss": test_loss, "gap": test_loss - full_test, "support": int(np.count_nonzero(rm.z))})
    summary = {"N": N, "n_test": len(test), "lambda": lam, "loss": cfg.loss, "m": m, "fitted_p": p_fit,
               "recommended_m": recommended_m(N, p_fit) if p_fit is not None and p_fit > 1 else None,
               "full": {"objective": full.objective, "duality_gap": full.solution.gap, "test_loss": full_test,
                        "support": int(full.support.size)},
               "median_gap": float(np.median([r["gap"] for r in rows]))}
    return summary, rows


def cmd_scaling(cfg, data, K):
    N, source = _kernel_source(cfg, data, K)
    res = scaling_experiment(lambda m: source(m)[0], cfg.m_grid, cfg.trial_seeds(), cfg.rank_tol, cfg.workers)
    rows = res.pop("rows")
    res["N"] = N
    if cfg.p is not None and cfg.data is None and cfg.spectrum == "powerlaw":
        res["reference_slope"] = -(cfg.p - 1.0)
    return res, rows


COMMAND_FUNCS = {"approx": cmd_approx, "bounds": cmd_bounds, "spectrum": cmd_spectrum,
                 "lowerbound": cmd_lowerbound, "classify": cmd_classify, "scaling": cmd_scaling}


# ---------------------------------------------------------------- output


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def render(cfg, summary, rows):
    if cfg.out_format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": cfg.command, "config": cfg.resolved(),
               "report": summary, "trials": rows}
        return json.dumps(_clean(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"
    buf = io.StringIO()
    rows = _clean(rows)
    cols = list(dict.fromkeys(k for r in rows for k in r))
    w = csv.DictWriter(buf, cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(cfg: ExperimentConfig):
    """Validate, compute, render; returns the report text and writes it when ``cfg.out`` is set."""
    validate(cfg)
    data = K = None
    if cfg.data is not None:
        data, K = _load(cfg)
        validate(cfg, n_points=K.shape[0] if K is not None else len(data))
    summary, rows = COMMAND_FUNCS[cfg.command](cfg, data, K)
    text = render(cfg, summary, rows)
    if cfg.out:
        write_atomic(cfg.out, text)
    return text


# ---------------------------------------------------------------- argument parsing


def build_parser():
    ap = argparse.ArgumentParser(prog="nystromlab", description="Nyström approximation experiments.")
    ap.add_argument("command", choices=COMMANDS)
    S = argparse.SUPPRESS
    g = ap.add_argument_group("source")
    g.add_argument("--data", default=S, help="dataset file (csv / sparse) or kernel matrix (--format matrix)")
    g.add_argument("--format", default=S, choices=("csv", "sparse", "matrix"))
    g.add_argument("--kernel", default=S, choices=FAMILIES)
    g.add_argument("--width", type=float, default=S)
    g.add_argument("--degree", type=int, default=S)
    g.add_argument("--offset", type=float, default=S)
    g.add_argument("--normalize", action="store_const", const=True, default=S)
    g.add_argument("--N", type=int, default=S, help="size of a synthetic kernel")
    g.add_argument("--spectrum", default=S, choices=SPECTRA)
    g.add_argument("--p", type=float, default=S, help="power-law exponent")
    g.add_argument("--c", type=float, default=S, help="power-law scale: lambda_i = c N i^-p")
    g.add_argument("--r", type=int, default=S)
    g.add_argument("--rho", type=float, default=S)
    g.add_argument("--vectors", default=S, choices=VECTORS)
    g = ap.add_argument_group("experiment")
    g.add_argument("--m", type=int, default=S)
    g.add_argument("--m-grid", dest="m_grid", type=_ints, default=S, help="comma-separated")
    g.add_argument("--seeds", type=int, default=S, help="number of trials")
    g.add_argument("--seed-list", dest="seed_list", type=_ints, default=S, help="explicit trial seeds")
    g.add_argument("--master-seed", dest="master_seed", type=int, default=S)
    g.add_argument("--delta", type=float, default=S)
    g.add_argument("--rank-tol", dest="rank_tol", type=float, default=S)
    g.add_argument("--lambda", dest="lam", type=float, default=S)
    g.add_argument("--loss", default=S, choices=LOSSES)
    g.add_argument("--which", type=_CASTS["which"], default=S, help="comma-separated bound names")
    g.add_argument("--c-dm", dest="c_dm", type=float, default=S)
    g.add_argument("--C-ab", dest="C_ab", type=float, default=S)
    g.add_argument("--gamma", type=float, default=S)
    g.add_argument("--samplings", type=int, default=S)
    g.add_argument("--test-fraction", dest="test_fraction", type=float, default=S)
    g.add_argument("--workers", type=int, default=S)
    g = ap.add_argument_group("output")
    g.add_argument("--out", default=S)
    g.add_argument("--out-format", dest="out_format", default=S, choices=("json", "csv"))
    g.add_argument("--config", default=S, help="INI file with an [experiment] section")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def config_from_args(argv=None) -> tuple[ExperimentConfig, bool]:
    ns = vars(build_parser().parse_args(argv))
    verbose = ns.pop("verbose")
    settings = read_config_file(ns["config"]) if "config" in ns else {}
    settings.pop("command", None)
    settings.update(ns)
    return ExperimentConfig(**settings), verbose


def main(argv=None):
    try:
        cfg, verbose = config_from_args(argv)
    except NystromLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        text = run(cfg)
    except NystromLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"NumericalError: {exc}", file=sys.stderr)
        return NumericalError.exit_code
    if not cfg.out:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
