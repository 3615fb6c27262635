"""Synthetic kernel matrices with prescribed spectra, and labelled synthetic data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import hadamard

from nystromlab.data import Dataset
from nystromlab.errors import ConfigError
from nystromlab.linalg import EigenSystem, as_symmetric, random_orthogonal

VECTOR_SOURCES = ("random_orthogonal", "hadamard", "identity", "explicit")


@dataclass(frozen=True)
class SpectrumSpec:
    """Eigenvalues (absolute scale, descending) plus where the eigenvectors come from."""

    eigenvalues: np.ndarray
    vector_source: str = "random_orthogonal"
    seed: int = 0
    vectors: np.ndarray | None = None

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        object.__setattr__(self, "eigenvalues", lam)
        if lam.ndim != 1 or lam.size < 1:
            raise ConfigError("eigenvalues must be a non-empty 1-d sequence")
        if np.any(lam < 0) or np.any(np.diff(lam) > 0):
            raise ConfigError("eigenvalues must be nonnegative and descending")
        if self.vector_source not in VECTOR_SOURCES:
            raise ConfigError(f"unknown vector source {self.vector_source!r}")
        n = lam.size
        if self.vector_source == "hadamard" and (n & (n - 1)) != 0:
            raise ConfigError(f"hadamard vectors need n to be a power of 2, got {n}")
        if self.vector_source == "explicit":
            if self.vectors is None or np.shape(self.vectors) != (n, n):
                raise ConfigError("explicit vector source needs an n x n matrix")

    @property
    def n(self):
        return self.eigenvalues.size


def spectrum_vectors(spec: SpectrumSpec):
    n = spec.n
    if spec.vector_source == "random_orthogonal":
        return random_orthogonal(n, spec.seed)
    if spec.vector_source == "hadamard":
        return hadamard(n).astype(float) / np.sqrt(n)
    if spec.vector_source == "identity":
        return np.eye(n)
    return np.asarray(spec.vectors, dtype=float)


def synth_kernel(spec: SpectrumSpec, vectors=None):
    """``K = V diag(eigenvalues) V^T``; returns ``(K, EigenSystem)``.

    ``vectors`` lets callers reuse an already generated ``V`` across spectra.
    """
    V = spectrum_vectors(spec) if vectors is None else np.asarray(vectors, dtype=float)
    lam = spec.eigenvalues
    K = as_symmetric((V * lam) @ V.T, asym_tol=np.inf)
    return K, EigenSystem(lam.copy(), np.array(V, dtype=float))


def power_law_spectrum(n, p, c=1.0, scale_N=False):
    """``c * k**-p`` for ``k = 1..n``, times ``n`` when ``scale_N`` is set."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    lam = c * np.arange(1, n + 1, dtype=float) ** (-float(p))
    return lam * n if scale_N else lam


def eigengap_spectrum(n, m, r, rho):
    """Two-level spectrum: ``r`` eigenvalues at ``n / m**rho``, the rest at ``n / m**(1 - rho)``."""
    if not 1 <= r < n:
        raise ConfigError(f"need 1 <= r < n, got r={r}, n={n}")
    if not 0 < rho <= 0.5:
        raise ConfigError("rho must lie in (0, 1/2]")
    lam = np.full(n, n / m ** (1.0 - rho))
    lam[:r] = n / m**rho
    return lam


def _bernoulli_columns(N, m, seed):
    rng = np.random.default_rng(seed)
    return rng.choice(np.array([-1.0, 1.0]), size=(N, m + 1))


def bernoulli_lower_bound_kernel(N, m, seed):
    """``U U^T / (m + 1)`` with ``U`` an ``N x (m+1)`` matrix of random signs.

    Every diagonal entry is exactly 1 and the rank is at most ``m + 1``.
    """
    if N < m + 1:
        raise ConfigError(f"need N >= m + 1, got N={N}, m={m}")
    U = _bernoulli_columns(N, m, seed)
    K = (U @ U.T) / (m + 1)
    np.fill_diagonal(K, 1.0)
    return as_symmetric(K, asym_tol=np.inf)


def bernoulli_top_eigenvalues(N, m, seed):
    """Nonzero eigenvalues of :func:`bernoulli_lower_bound_kernel`, via the small ``U^T U`` Gram."""
    U = _bernoulli_columns(N, m, seed)
    w = np.linalg.eigvalsh(U.T @ U / (m + 1))
    return w[::-1].copy()


def _fourier_features(x, p, n_freq):
    k = np.arange(1, n_freq + 1, dtype=float)
    amp = np.sqrt(2.0) * k ** (-p / 2.0)
    z = np.sqrt(1.0 + (amp**2).sum())
    ang = 2.0 * np.pi * np.outer(x, k)
    return np.hstack([np.ones((x.size, 1)), np.cos(ang) * amp, np.sin(ang) * amp]) / z


def target_function(x):
    return np.sin(2.0 * np.pi * x) + 0.5 * np.sin(6.0 * np.pi * x + 1.0)


def power_law_classification(N, p, seed, n_freq=1024, flip=0.1):
    """Labelled points on the circle whose linear-kernel Gram has a ``p``-power-law spectrum.

    Each scalar ``x ~ U[0, 1)`` is mapped to weighted Fourier features so that
    ``<phi(x), phi(y)> = (1 + 2 sum_k k^-p cos(2 pi k (x - y))) / Z`` with
    ``phi(x)`` of unit norm. Labels are ``sign`` of a fixed smooth target with
    a fraction ``flip`` of them inverted. Returns ``(Dataset, x)``.
    """
    rng = np.random.default_rng(seed)
    x = rng.random(N)
    y = np.where(target_function(x) >= 0, 1.0, -1.0)
    y[rng.random(N) < flip] *= -1.0
    return Dataset(_fourier_features(x, p, n_freq), y), x
