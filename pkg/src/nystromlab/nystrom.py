"""Column sampling and the Nyström approximation ``K_b pinv(K_hat) K_b^T``."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse.linalg import LinearOperator

from nystromlab.errors import ConfigError, DomainError, InputError, NumericalError
from nystromlab.kernels import KernelFunction, cross_gram, gram
from nystromlab.linalg import DEFAULT_RANK_TOL, DENSE_NORM_LIMIT, EigenSystem, as_symmetric, check_psd, eigh_descending, spectral_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SampleSet:
    indices: np.ndarray
    seed: int | None = None
    scheme: str = "uniform_without_replacement"

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int).ravel()
        if np.unique(idx).size != idx.size:
            raise InputError("sample indices must be distinct")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return self.indices.size

    def check(self, N):
        if self.indices.size == 0 or self.indices.min() < 0 or self.indices.max() >= N:
            raise InputError(f"sample indices must lie in [0, {N})")


def sample_uniform(N, m, seed) -> SampleSet:
    """``m`` distinct indices drawn uniformly from ``range(N)``."""
    if not 1 <= m <= N:
        raise ConfigError(f"need 1 <= m <= N, got m={m}, N={N}")
    idx = np.random.default_rng(seed).choice(N, size=m, replace=False)
    return SampleSet(idx, seed)


@dataclass(frozen=True, eq=False)
class NystromModel:
    """Fitted Nyström model.

    ``kb`` is the N x m cross-Gram, ``khat_eig`` the eigendecomposition of the
    m x m landmark block. Only the leading ``rank`` eigenpairs are used.
    ``kernel`` and ``landmarks`` are set when the model was fitted from data
    and enable out-of-sample feature maps.
    """

    sample: SampleSet
    khat_eig: EigenSystem
    rank: int
    kb: np.ndarray
    rank_tol: float = DEFAULT_RANK_TOL
    kernel: KernelFunction | None = None
    landmarks: np.ndarray | None = None

    @property
    def n(self):
        return self.kb.shape[0]

    @property
    def m(self):
        return self.kb.shape[1]

    @cached_property
    def projection(self):
        """m x rank matrix ``V_r diag(d_r)^{-1/2}``; features are ``k(x) @ projection``."""
        w = self.khat_eig.eigenvalues[: self.rank]
        return self.khat_eig.vectors[:, : self.rank] / np.sqrt(w)

    @cached_property
    def features(self):
        """N x rank feature matrix ``F`` with ``F F^T`` the approximation."""
        F = self.kb @ self.projection
        F.setflags(write=False)
        return F

    def khat_pinv(self):
        """Rank-truncated pseudo-inverse of the landmark block."""
        P = self.projection
        return P @ P.T


def fit(source, sample: SampleSet, data=None, rank=None, rank_tol=DEFAULT_RANK_TOL) -> NystromModel:
    """Fit a Nyström model.

    ``source`` is either a full kernel matrix (columns are read from it) or a
    :class:`KernelFunction` evaluated on ``data``. By default the rank is the
    number of landmark-block eigenvalues ``>= rank_tol * lambda_max``.
    """
    if isinstance(source, KernelFunction):
        if data is None:
            raise ConfigError("a kernel function needs data to fit on")
        X = data.points if hasattr(data, "points") else np.atleast_2d(np.asarray(data, dtype=float))
        sample.check(X.shape[0])
        L = X[sample.indices]
        khat = gram(L, source)
        kb = cross_gram(X, L, source)
        kernel, landmarks = source, L
    else:
        K = np.asarray(source, dtype=float)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise InputError(f"expected a square kernel matrix, got shape {K.shape}")
        sample.check(K.shape[0])
        idx = sample.indices
        kb = K[:, idx].copy()
        khat = as_symmetric(K[np.ix_(idx, idx)], asym_tol=np.inf)
        kernel, landmarks = None, None

    eig = eigh_descending(khat)
    try:
        check_psd(eig)
    except DomainError as exc:
        raise NumericalError(f"landmark block is indefinite: {exc}") from exc

    available = eig.count_above(rank_tol)
    if rank is None:
        rank = available
    else:
        if not 1 <= rank <= len(sample):
            raise ConfigError(f"rank must lie in [1, m={len(sample)}], got {rank}")
        if rank > available:
            logger.warning("requested rank %d exceeds numerical rank %d of the landmark block; using %d", rank, available, available)
            rank = available
    kb.setflags(write=False)
    return NystromModel(sample, eig, int(rank), kb, rank_tol, kernel, landmarks)


def approximate(model: NystromModel):
    """The N x N approximation ``K_b pinv_r(K_hat) K_b^T`` (symmetric PSD)."""
    if model.rank == 0:
        logger.warning("landmark block has no eigenvalue above tolerance; approximation is zero")
        return np.zeros((model.n, model.n))
    F = model.features
    return as_symmetric(F @ F.T, asym_tol=np.inf)


def residual_operator(model: NystromModel, K):
    """Matrix-free ``u -> K u - F (F^T u)``."""
    F = model.features
    K = np.asarray(K, dtype=float)

    def mv(u):
        u = np.ravel(u)
        return K @ u - F @ (F.T @ u)

    return LinearOperator(K.shape, matvec=mv, rmatvec=mv, dtype=float)


def approximation_error(model: NystromModel, K, method="auto"):
    """Spectral norm of ``K - approximate(model)``.

    Small problems form the residual explicitly; larger ones (N > 512) use a
    matrix-free Lanczos iteration on :func:`residual_operator`.
    """
    K = np.asarray(K, dtype=float)
    if K.shape != (model.n, model.n):
        raise InputError(f"kernel shape {K.shape} does not match model dimension {model.n}")
    if method == "auto":
        method = "explicit" if model.n <= DENSE_NORM_LIMIT else "matrix_free"
    if method == "explicit":
        value = spectral_norm(K - approximate(model), method="eigh")
    elif method == "matrix_free":
        value = spectral_norm(residual_operator(model, K), method="lanczos")
    else:
        raise ValueError(f"unknown method {method!r}")
    return max(float(value), 0.0)


def feature_map(model: NystromModel, x=None, kernel_column=None):
    """``diag(d)^{-1/2} V^T (k(x_hat_1, x), ..., k(x_hat_m, x))`` for one point or a batch.

    Pass either raw points ``x`` (needs a model fitted from data) or the
    precomputed landmark kernel values ``kernel_column`` (length m, or n x m).
    """
    if kernel_column is None:
        if x is None:
            raise InputError("pass x or kernel_column")
        if model.kernel is None:
            raise InputError("model was fitted from a matrix; pass kernel_column instead of x")
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        kc = model.kernel(np.atleast_2d(x), model.landmarks)
    else:
        kc = np.asarray(kernel_column, dtype=float)
        single = kc.ndim == 1
        kc = np.atleast_2d(kc)
    if kc.shape[1] != model.m:
        raise InputError(f"expected {model.m} landmark kernel values, got {kc.shape[1]}")
    phi = kc @ model.projection
    return phi[0] if single else phi
