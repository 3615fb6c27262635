"""Closed-form approximation-error bounds and measured-versus-bound reports.

Bound names used in reports:

``uniform_baseline``
    ``lambda_{m+1} + c_dm * N / sqrt(m)``, the classical additive bound for uniform sampling.
``eigengap``
    ``16 ln(2/delta)^2 N^2 / (m lambda_r) + lambda_{r+1}``, minimised over ``r`` unless ``r`` is given.
``incoherent_rank_r``
    ``max(16 mu^2 r / m * sum_{i>r} lambda_i, lambda_{r+1})``.
``power_law``
    ``max(16 mu^2 r / m, 1) * sum_{i>r} lambda_i`` with ``r = floor(m / (mu^2 C_ab ln(3 N^3)))``.
``lower_general``
    ``N / (2 (m + 1))``, the smallest top eigenvalue of the random-sign witness kernel.
``lower_power_law``
    ``N / m^p`` with unit constant (scaling reference only).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from nystromlab.errors import ConfigError
from nystromlab.linalg import DEFAULT_RANK_TOL
from nystromlab.nystrom import approximation_error, fit, sample_uniform
from nystromlab.spectrum import coherence

logger = logging.getLogger(__name__)

BOUND_NAMES = ("uniform_baseline", "eigengap", "incoherent_rank_r", "power_law", "lower_general", "lower_power_law")
HOLD_SLACK = 1e-9


@dataclass(frozen=True)
class ConstantsConfig:
    """Constants that only appear as O(.) or 'some constant'; 1.0 is a placeholder for each."""

    c_dm: float = 1.0
    C_ab: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("c_dm", "C_ab", "gamma"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"constant {name} must be > 0")

    def to_dict(self):
        d = asdict(self)
        d["note"] = "placeholder values; the true constants are unspecified"
        return d


def uniform_baseline_bound(N, m, lambda_m_plus_1, c_dm=1.0):
    return lambda_m_plus_1 + c_dm * N / math.sqrt(m)


def eigengap_bound(N, m, lambda_r, lambda_r_plus_1, delta):
    """Holds with probability ``1 - delta`` simultaneously for every ``r``."""
    if not lambda_r > 0:
        raise ConfigError("lambda_r must be positive")
    if not 0 < delta < 1:
        raise ConfigError("delta must lie in (0, 1)")
    with np.errstate(over="ignore"):  # subnormal lambda_r: the bound is +inf
        return float(np.float64(16.0 * math.log(2.0 / delta) ** 2 * N**2) / (m * lambda_r) + lambda_r_plus_1)


def best_eigengap_bound(eigs, N, m, delta):
    """Minimum of :func:`eigengap_bound` over ``r``; returns ``(value, r)`` with 1-based ``r``."""
    eigs = np.asarray(eigs, dtype=float)
    pos = np.nonzero(eigs[:-1] > 0)[0]
    if pos.size == 0:
        return float(eigs[0]), 0
    c = 16.0 * math.log(2.0 / delta) ** 2 * N**2 / m
    with np.errstate(over="ignore"):
        vals = c / eigs[pos] + eigs[pos + 1]
    j = int(np.argmin(vals))
    return float(vals[j]), int(pos[j] + 1)


def incoherent_rank_bound(mu, r, m, tail_sum):
    """``16 mu^2 r tail_sum / m``: error on the top-``r`` eigenspace under incoherence."""
    return 16.0 * mu**2 * r * tail_sum / m


def incoherent_conditions(mu, r, m, N, constants: ConstantsConfig):
    """Whether ``r`` and ``m`` satisfy the sample-size conditions of the rank-``r`` bound."""
    L = math.log(3.0 * N**3)
    lnN_g = math.log(N) / constants.gamma
    return r > max(constants.C_ab * L, 4.0 * lnN_g) and mu**2 * max(r * constants.C_ab * L, 16.0 * lnN_g**2) <= m < mu**2 * r**2


def incoherent_sample_threshold(mu, N, constants: ConstantsConfig):
    """``mu^2 max(16 (ln N / gamma)^2, 2 C_ab ln(3N^3), 4 C_ab^2 ln^2(3N^3))``; m must exceed it."""
    L = math.log(3.0 * N**3)
    return mu**2 * max(16.0 * (math.log(N) / constants.gamma) ** 2, 2.0 * constants.C_ab * L, 4.0 * constants.C_ab**2 * L**2)


def power_law_rank(mu, m, N, constants: ConstantsConfig):
    return int(math.floor(m / (mu**2 * constants.C_ab * math.log(3.0 * N**3))))


def power_law_bound(eigs, mu, m, N, constants: ConstantsConfig):
    """``max(16 mu^2 r / m, 1) * sum_{i>r} lambda_i`` at the rank chosen by :func:`power_law_rank`."""
    eigs = np.asarray(eigs, dtype=float)
    r = min(power_law_rank(mu, m, N, constants), eigs.size)
    return max(16.0 * mu**2 * r / m, 1.0) * float(eigs[r:].sum())


def lower_bounds(N, m, p=None):
    """``(N / (2 (m+1)), N / m**p)``; the second entry is None without ``p``."""
    if m < 1:
        raise ConfigError("m must be >= 1")
    return N / (2.0 * (m + 1)), (None if p is None else N / m**p)


@dataclass
class BoundReport:
    context: dict
    bounds: dict
    measured: float | None = None
    trials: list = field(default_factory=list)
    holds_fraction: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "context": self.context,
            "bounds": self.bounds,
            "measured": self.measured,
            "trials": self.trials,
            "holds_fraction": self.holds_fraction,
        }


def evaluate_bounds(eigs, mu, N, m, delta, constants: ConstantsConfig, r=None, p=None, which=BOUND_NAMES):
    """All requested bound values for a kernel with spectrum ``eigs`` and coherence ``mu``."""
    eigs = np.asarray(eigs, dtype=float)
    out, ctx = {}, {}
    lam_next = float(eigs[m]) if m < eigs.size else 0.0
    if "uniform_baseline" in which:
        out["uniform_baseline"] = uniform_baseline_bound(N, m, lam_next, constants.c_dm)
    if "eigengap" in which:
        if r is not None and eigs[r - 1] > 0:
            out["eigengap"] = eigengap_bound(N, m, float(eigs[r - 1]), float(eigs[r]), delta)
            ctx["eigengap_r"] = int(r)
        else:
            out["eigengap"], ctx["eigengap_r"] = best_eigengap_bound(eigs, N, m, delta)
    if "incoherent_rank_r" in which:
        rr = r if r is not None else max(1, power_law_rank(mu, m, N, constants))
        rr = min(rr, eigs.size - 1)
        tail = float(eigs[rr:].sum())
        out["incoherent_rank_r"] = max(incoherent_rank_bound(mu, rr, m, tail), float(eigs[rr]))
        ctx["incoherent_r"] = int(rr)
        ctx["incoherent_conditions_met"] = bool(incoherent_conditions(mu, rr, m, N, constants))
    if "power_law" in which:
        out["power_law"] = power_law_bound(eigs, mu, m, N, constants)
        ctx["power_law_r"] = power_law_rank(mu, m, N, constants)
        ctx["sample_threshold"] = incoherent_sample_threshold(mu, N, constants)
    lo_gen, lo_pow = lower_bounds(N, m, p)
    if "lower_general" in which:
        out["lower_general"] = lo_gen
    if "lower_power_law" in which and lo_pow is not None:
        out["lower_power_law"] = lo_pow
    return out, ctx


UPPER_BOUNDS = ("uniform_baseline", "eigengap", "incoherent_rank_r", "power_law")


def compare(source, m_grid, seeds, which=BOUND_NAMES, delta=0.05, constants=None, r=None, p=None,
            rank_tol=DEFAULT_RANK_TOL, workers=1):
    """Measured Nyström error against every requested bound, one :class:`BoundReport` per ``m``.

    ``source`` is ``(K, EigenSystem)`` or a callable ``m -> (K, EigenSystem)``
    for spectra that depend on ``m``. Each trial samples ``m`` columns with
    the corresponding entry of ``seeds``.
    """
    constants = constants or ConstantsConfig()
    seeds = [int(s) for s in seeds]
    reports = []
    for m in m_grid:
        K, eig = source(m) if callable(source) else source
        N = K.shape[0]
        if m > N:
            raise ConfigError(f"m={m} exceeds N={N}")
        eigs = np.clip(eig.eigenvalues, 0.0, None)
        mu = coherence(eig.vectors)

        def trial(seed, K=K, m=m):
            model = fit(K, sample_uniform(N, m, seed), rank_tol=rank_tol)
            return approximation_error(model, K)

        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                errors = list(pool.map(trial, seeds))
        else:
            errors = [trial(s) for s in seeds]
        bounds, ctx = evaluate_bounds(eigs, mu, N, m, delta, constants, r=r, p=p, which=which)
        errs = np.array(errors)
        holds = {k: float(np.mean(errs <= v + HOLD_SLACK)) for k, v in bounds.items() if k in UPPER_BOUNDS}
        context = {"N": N, "m": int(m), "r": r, "delta": delta, "mu": mu, "p": p,
                   "trace": float(eigs.sum()), "constants": constants.to_dict(), **ctx}
        trials = [{"seed": s, "error": e} for s, e in zip(seeds, errors)]
        reports.append(BoundReport(context, bounds, float(np.median(errs)), trials, holds))
    return reports
