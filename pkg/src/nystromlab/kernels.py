"""Kernel functions and Gram-matrix construction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from nystromlab.data import Dataset
from nystromlab.errors import ConfigError, InputError
from nystromlab.linalg import as_symmetric

FAMILIES = ("rbf", "linear", "polynomial", "precomputed")


@dataclass(frozen=True)
class KernelFunction:
    """A positive semi-definite kernel.

    ``rbf`` is ``exp(-||x - y||^2 / (2 width^2))``; ``polynomial`` is
    ``(<x, y> + offset)^degree``. With ``normalize`` set, the kernel is
    rescaled to ``k(x, y) / sqrt(k(x, x) k(y, y))`` so ``k(x, x) <= 1``.
    For ``precomputed`` the data points are single-column integer indices
    into ``matrix``.
    """

    family: str = "rbf"
    width: float = 1.0
    degree: int = 2
    offset: float = 1.0
    normalize: bool = False
    matrix: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown kernel family {self.family!r}; choose from {FAMILIES}")
        if self.family == "rbf" and not self.width > 0:
            raise ConfigError("rbf width must be > 0")
        if self.family == "polynomial" and (int(self.degree) != self.degree or self.degree < 1 or self.offset < 0):
            raise ConfigError("polynomial kernel needs integer degree >= 1 and offset >= 0")
        if self.family == "precomputed" and self.matrix is None:
            raise ConfigError("precomputed kernel needs a matrix")

    def _raw(self, X, Y):
        if self.family == "rbf":
            return np.exp(-cdist(X, Y, "sqeuclidean") / (2.0 * self.width**2))
        if self.family == "linear":
            return X @ Y.T
        if self.family == "polynomial":
            return (X @ Y.T + self.offset) ** int(self.degree)
        rows = X[:, 0].astype(int)
        cols = Y[:, 0].astype(int)
        return np.asarray(self.matrix, dtype=float)[np.ix_(rows, cols)]

    def _diag(self, X):
        if self.family == "rbf":
            return np.ones(X.shape[0])
        if self.family == "linear":
            return (X * X).sum(1)
        if self.family == "polynomial":
            return ((X * X).sum(1) + self.offset) ** int(self.degree)
        idx = X[:, 0].astype(int)
        return np.asarray(self.matrix, dtype=float)[idx, idx]

    def __call__(self, X, Y):
        """Kernel values between the rows of ``X`` and the rows of ``Y``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if X.shape[1] != Y.shape[1]:
            raise InputError(f"feature dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
        G = self._raw(X, Y)
        if self.normalize and self.family != "rbf":
            dx, dy = self._diag(X), self._diag(Y)
            with np.errstate(divide="ignore", invalid="ignore"):
                G = G / np.sqrt(np.outer(dx, dy))
            G[~np.isfinite(G)] = 0.0
        return G

    def to_dict(self):
        d = {"family": self.family, "normalize": self.normalize}
        if self.family == "rbf":
            d["width"] = self.width
        elif self.family == "polynomial":
            d.update(degree=int(self.degree), offset=self.offset)
        return d

    @classmethod
    def from_dict(cls, d, matrix=None):
        return cls(matrix=matrix, **d)


def _points(data):
    return data.points if isinstance(data, Dataset) else np.atleast_2d(np.asarray(data, dtype=float))


def gram(data, k: KernelFunction):
    """N x N kernel matrix; the upper triangle is computed and mirrored."""
    X = _points(data)
    if X.shape[0] == 0:
        raise InputError("empty dataset")
    return as_symmetric(k(X, X), asym_tol=np.inf)


def cross_gram(data, landmarks, k: KernelFunction):
    """N x m matrix of kernel values between data points and landmarks."""
    X, L = _points(data), _points(landmarks)
    if X.shape[1] != L.shape[1]:
        raise InputError(f"feature dimension mismatch: data {X.shape[1]}, landmarks {L.shape[1]}")
    return k(X, L)
