"""Dense symmetric linear algebra used throughout the package.

Symmetric matrices are plain ``numpy`` arrays; :func:`as_symmetric` validates
and mirrors the upper triangle so that ``A[i, j] == A[j, i]`` holds exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from nystromlab.errors import DomainError, InputError, NumericalError

logger = logging.getLogger(__name__)

PSD_TOL = 1e-8
DEFAULT_RANK_TOL = 1e-10
DENSE_NORM_LIMIT = 512


def as_symmetric(A, asym_tol=1e-8):
    """Return a float copy of ``A`` whose lower triangle mirrors the upper one.

    Raises InputError for non-square, empty or non-finite input, or when
    ``A`` is asymmetric beyond ``asym_tol`` relative to its largest entry.
    """
    A = np.array(A, dtype=float, copy=True)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] < 1:
        raise InputError("matrix must have dimension n >= 1")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    scale = np.abs(A).max()
    if scale > 0 and np.abs(A - A.T).max() > asym_tol * scale:
        raise InputError("matrix is not symmetric")
    upper = np.triu(A)
    return upper + np.triu(A, 1).T


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs with eigenvalues in descending order; ``vectors[:, i]`` pairs with ``eigenvalues[i]``."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.vectors.setflags(write=False)

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        V = self.vectors
        A = (V * self.eigenvalues) @ V.T
        return as_symmetric(A, asym_tol=np.inf)

    def count_above(self, rel_tol):
        """Number of eigenvalues ``>= rel_tol * lambda_max`` (zero if lambda_max <= 0)."""
        top = self.eigenvalues[0]
        if top <= 0:
            return 0
        return int(np.count_nonzero(self.eigenvalues >= rel_tol * top))


def _fix_signs(V):
    # largest-magnitude component of each column made positive; argmax picks the lowest index on ties
    rows = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[rows, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def eigh_descending(A) -> EigenSystem:
    """Full eigendecomposition of a symmetric matrix, eigenvalues sorted descending."""
    A = as_symmetric(A)
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed to converge (n={A.shape[0]}): {exc}") from exc
    w = w[::-1].copy()
    V = _fix_signs(V[:, ::-1])
    return EigenSystem(w, np.ascontiguousarray(V))


def check_psd(eig: EigenSystem, tol=PSD_TOL):
    """Raise DomainError unless ``min eigenvalue >= -tol * max(lambda_max, 0)``."""
    top = max(eig.eigenvalues[0], 0.0)
    low = eig.eigenvalues[-1]
    if low < -tol * top or (top == 0.0 and low < 0.0):
        raise DomainError(f"matrix is indefinite: min eigenvalue {low:.3e}, max {eig.eigenvalues[0]:.3e}")


def pinv_psd(A, rank_tol=DEFAULT_RANK_TOL):
    """Moore-Penrose pseudo-inverse of a PSD matrix.

    Eigenvalues at or below ``rank_tol * lambda_max`` are treated as zero.
    """
    eig = eigh_descending(A)
    check_psd(eig)
    w, V = eig.eigenvalues, eig.vectors
    keep = w > rank_tol * w[0] if w[0] > 0 else np.zeros_like(w, dtype=bool)
    Vk = V[:, keep]
    return as_symmetric((Vk / w[keep]) @ Vk.T, asym_tol=np.inf)


def power_iteration(A, tol=1e-9, max_iter=10_000, seed=0):
    """Largest-magnitude eigenvalue of a symmetric operator by power iteration.

    ``A`` may be an array or a ``LinearOperator``. Returns ``(value, converged)``
    where ``value`` is ``max |lambda|`` estimated as ``||A x||`` for the current
    unit iterate; convergence is declared when its relative change drops below ``tol``.
    """
    n = A.shape[0]
    x = np.random.default_rng(seed).standard_normal(n)
    x /= np.linalg.norm(x)
    prev = 0.0
    for _ in range(max_iter):
        y = A @ x
        est = float(np.linalg.norm(y))
        if est == 0.0:
            return 0.0, True
        if abs(est - prev) <= tol * est:
            return est, True
        prev = est
        x = y / est
    return prev, False


def _lanczos_norm(A, n):
    v0 = np.random.default_rng(0).standard_normal(n)
    op = A if isinstance(A, LinearOperator) else LinearOperator((n, n), matvec=lambda u: A @ u, dtype=float)
    try:
        vals = eigsh(op, k=1, which="LM", v0=v0, tol=0, return_eigenvectors=False, maxiter=20 * n)
    except ArpackNoConvergence as exc:
        raise NumericalError(f"Lanczos did not converge for n={n}") from exc
    return float(abs(vals[0]))


def spectral_norm(A, tol=1e-9, method="auto"):
    """``max_i |lambda_i(A)|`` for a symmetric matrix or ``LinearOperator``.

    Methods: ``"eigh"`` (full decomposition), ``"power"`` (power iteration,
    falls back to a full decomposition on stall), ``"lanczos"`` (ARPACK,
    matrix-free) and ``"auto"`` (``eigh`` for dense n <= 512, otherwise Lanczos).
    """
    matrix_free = isinstance(A, LinearOperator)
    if not matrix_free:
        A = as_symmetric(A)
    n = A.shape[0]
    if method == "auto":
        method = "eigh" if (not matrix_free and n <= DENSE_NORM_LIMIT) else "lanczos"
    if n == 1 and not matrix_free:
        return float(abs(A[0, 0]))
    if method == "eigh":
        if matrix_free:
            A = A @ np.eye(n)
        w = np.linalg.eigvalsh(A)
        return float(max(abs(w[0]), abs(w[-1])))
    if method == "power":
        value, converged = power_iteration(A, tol=tol)
        if converged:
            return value
        logger.warning("power iteration stalled (n=%d); falling back to full decomposition", n)
        return spectral_norm(A, tol=tol, method="eigh")
    if method == "lanczos":
        if n <= 2:
            return spectral_norm(A, tol=tol, method="eigh")
        return _lanczos_norm(A, n)
    raise ValueError(f"unknown method {method!r}")


def random_orthogonal(n, seed):
    """Haar-distributed orthogonal matrix from the QR factorisation of a Gaussian matrix.

    The signs of R's diagonal are folded into Q, which makes the draw unique for the seed.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    G = np.random.default_rng(seed).standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d
