"""Spectrum diagnostics: coherence, power-law fits, eigengap profiles, the sub-root fixed point and operator distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nystromlab.errors import DomainError, InputError
from nystromlab.nystrom import SampleSet

_REL_SLACK = 1e-12


def coherence(V, orth_tol=1e-6):
    """``sqrt(N) * max |V_ij|`` of an orthogonal matrix; lies in ``[1, sqrt(N)]``."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise InputError(f"expected a square matrix, got shape {V.shape}")
    n = V.shape[0]
    if np.abs(V.T @ V - np.eye(n)).max() > orth_tol:
        raise DomainError("matrix is not orthogonal")
    return float(np.sqrt(n) * np.abs(V).max())


@dataclass(frozen=True)
class PowerLawFit:
    p: float
    c: float
    fit_range: tuple[int, int]
    residual: float


def default_fit_range(eigs):
    """1-based inclusive ``(2, stop)``; stop is ``N // 2`` or the last index before the ``1e-12 * lambda_1`` floor."""
    eigs = np.asarray(eigs, dtype=float)
    stop = eigs.size // 2
    small = np.nonzero(eigs < 1e-12 * eigs[0])[0]
    if small.size:
        stop = min(stop, int(small[0]))
    return 2, stop


def fit_power_law(eigs, fit_range=None) -> PowerLawFit:
    """Least-squares line through ``(ln k, ln lambda_k)``; ``p`` is minus the slope.

    ``fit_range`` is a 1-based inclusive index interval.
    """
    eigs = np.asarray(eigs, dtype=float)
    lo, hi = default_fit_range(eigs) if fit_range is None else fit_range
    lo, hi = max(int(lo), 1), min(int(hi), eigs.size)
    k = np.arange(lo, hi + 1)
    lam = eigs[lo - 1 : hi]
    if k.size < 3 or np.any(lam <= 0):
        raise DomainError(f"power-law fit needs >= 3 positive eigenvalues in range [{lo}, {hi}]")
    x, y = np.log(k), np.log(lam)
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return PowerLawFit(float(-slope), float(np.exp(intercept)), (lo, hi), rms)


@dataclass(frozen=True)
class EigengapProfile:
    """``rho`` is None when no value in (0, 1/2] makes ``r`` a large-gap rank."""

    r: int
    rho: float | None
    lambda_r: float
    lambda_r_plus_1: float

    @property
    def has_gap(self):
        return self.rho is not None


def eigengap_profile(eigs, N, m, r, tol=1e-12) -> EigengapProfile:
    """Smallest ``rho`` in (0, 1/2] with ``lambda_r >= N / m**rho`` and ``lambda_{r+1} <= N / m**(1 - rho)``.

    ``r`` is 1-based. Both conditions are monotone in ``rho``, so the
    feasible set is an interval ending at 1/2 and bisection finds its left end.
    """
    eigs = np.asarray(eigs, dtype=float)
    if not 1 <= r < eigs.size:
        raise InputError(f"need 1 <= r < {eigs.size}, got {r}")
    if m < 2:
        raise InputError("m must be >= 2")
    lam_r, lam_next = float(eigs[r - 1]), float(eigs[r])
    if lam_r <= 0:
        raise DomainError("lambda_r must be positive")

    def feasible(rho):
        return lam_r >= N / m**rho * (1 - _REL_SLACK) and lam_next <= N / m ** (1 - rho) * (1 + _REL_SLACK)

    if not feasible(0.5):
        return EigengapProfile(r, None, lam_r, lam_next)
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return EigengapProfile(r, hi, lam_r, lam_next)


def _scaled(eigs, N, normalized):
    lam = np.asarray(eigs, dtype=float)
    if np.any(lam < 0):
        raise DomainError("eigenvalues must be nonnegative")
    return lam / N if normalized else lam


def psi(delta, eigs, N, normalized=True):
    """``sqrt(2/N * sum_i min(delta^2, lambda_i))``; ``normalized`` divides the eigenvalues by N first."""
    lam = _scaled(eigs, N, normalized)
    return float(np.sqrt(2.0 / N * np.minimum(delta * delta, lam).sum()))


def sub_root_fixed_point(eigs, N, normalized=True, tol=1e-10):
    """Positive root of ``delta^2 = psi(delta)`` (0 for a zero spectrum).

    ``psi(delta) / delta`` is nonincreasing, so ``delta - psi(delta) / delta``
    changes sign once on ``(0, sqrt(2)]``.
    """
    lam = _scaled(eigs, N, normalized)
    if not np.any(lam > 0):
        return 0.0

    def h(d):
        return d - np.sqrt(2.0 / N * np.minimum(d * d, lam).sum()) / d

    lo, hi = 0.0, np.sqrt(2.0)
    # iterate well past tol so that the fixed-point residual is near machine precision
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if h(mid) >= 0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * 1e-4:
            break
    return float(hi)


def fixed_point_epsilon(eigs, N, normalized=True):
    """``max(eps_tilde, sqrt(6 ln N / N))`` with ``eps_tilde`` from :func:`sub_root_fixed_point`."""
    if N < 2:
        raise InputError("N must be >= 2")
    return max(sub_root_fixed_point(eigs, N, normalized), float(np.sqrt(6.0 * np.log(N) / N)))


def hs_distance(K, sample):
    """Hilbert-Schmidt distance between the full-sample and landmark averaging operators.

    Uses ``<xi(x), xi(y)>_HS = k(x, y)^2`` for the rank-one operators
    ``xi(x) f = k(x, .) f(x)``.
    """
    K = np.asarray(K, dtype=float)
    idx = sample.indices if isinstance(sample, SampleSet) else np.asarray(sample, dtype=int)
    N, m = K.shape[0], idx.size
    K2 = K * K
    full = K2.sum() / N**2
    cross = K2[:, idx].sum() / (N * m)
    sub = K2[np.ix_(idx, idx)].sum() / m**2
    return float(np.sqrt(max(full - 2.0 * cross + sub, 0.0)))
