"""Regularised kernel classification: full dual, low-rank dual, and the landmark-restricted primal.

All three solve

    min_f  lam/2 ||f||^2 + 1/N sum_i loss(y_i f(x_i))

over different function classes. The dual variables follow the convention
``loss(z) = max_a a z - loss*(a)`` and the primal is recovered as
``f = -1/(N lam) sum_i alpha_i y_i k(x_i, .)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.special import expit, xlogy

from nystromlab.errors import ConfigError, InputError, NumericalError
from nystromlab.kernels import KernelFunction
from nystromlab.nystrom import NystromModel, SampleSet

LOSSES = ("squared", "logistic")


@dataclass(frozen=True)
class LossFunction:
    """A smooth, strongly convex margin loss on the prediction domain ``|z| <= bound``.

    squared: ``(1 - z)^2 / 2``; logistic: ``ln(1 + exp(-z))``.
    """

    family: str = "logistic"
    bound: float = math.inf

    def __post_init__(self):
        if self.family not in LOSSES:
            raise ConfigError(f"unknown loss {self.family!r}; choose from {LOSSES}")

    def value(self, z):
        z = np.asarray(z, dtype=float)
        if self.family == "squared":
            return 0.5 * (1.0 - z) ** 2
        return np.logaddexp(0.0, -z)

    def derivative(self, z):
        z = np.asarray(z, dtype=float)
        if self.family == "squared":
            return z - 1.0
        return -expit(-z)

    def second_derivative(self, z):
        z = np.asarray(z, dtype=float)
        if self.family == "squared":
            return np.ones_like(z)
        return expit(z) * expit(-z)

    def conjugate(self, a):
        """``loss*(a)``; the logistic conjugate is finite on ``[-1, 0]`` only."""
        a = np.asarray(a, dtype=float)
        if self.family == "squared":
            return a + 0.5 * a * a
        if np.any((a < -1.0) | (a > 0.0)):
            return np.full_like(a, np.inf)
        return xlogy(-a, -a) + xlogy(1.0 + a, 1.0 + a)

    @property
    def lipschitz(self):
        """``sup |loss'(z)|`` over the prediction domain."""
        return 1.0 + self.bound if self.family == "squared" else 1.0

    @property
    def modulus(self):
        """``inf loss''(z)`` over the prediction domain."""
        if self.family == "squared":
            return 1.0
        b = self.bound
        return 0.0 if math.isinf(b) else float(expit(b) * expit(-b))

    def dual_step(self, q, b, start=None):
        """Maximiser of ``-loss*(a) - q a^2 / 2 - b a`` (one exact coordinate step).

        ``start`` is a warm-start guess for the logistic Newton iteration.
        """
        if self.family == "squared":
            return -(1.0 + b) / (1.0 + q)
        # a = -expit(u): solve g(u) = b - u - q expit(u) = 0, decreasing with root in [b - q, b]
        lo, hi = b - q, b
        u = b - 0.5 * q
        if start is not None and -1.0 < start < 0.0:
            u = min(max(math.log(-start / (1.0 + start)), lo), hi)
        for _ in range(200):
            e = 1.0 / (1.0 + math.exp(-u)) if u > -700.0 else 0.0
            g = b - u - q * e
            if g > 0.0:
                lo = u
            else:
                hi = u
            step = g / (1.0 + q * e * (1.0 - e))
            if abs(step) <= 1e-12 * (1.0 + abs(u)):  # quadratic convergence: u + step is accurate to rounding
                u += step
                break
            u = u + step if lo < u + step < hi else 0.5 * (lo + hi)
        return -1.0 / (1.0 + math.exp(-u)) if u > -700.0 else -math.exp(u)


def make_loss(family, lam, max_diag=1.0):
    """Loss restricted to the domain reachable by any minimiser: ``|f(x)| <= sqrt(2 loss(0) max k(x,x) / lam)``."""
    l0 = 0.5 if family == "squared" else math.log(2.0)
    return LossFunction(family, math.sqrt(2.0 * l0 * max_diag / lam))


def _check_labels(y, N):
    y = np.asarray(y, dtype=float).ravel()
    if y.size != N or not np.all(np.isin(y, (-1.0, 1.0))):
        raise InputError(f"labels must be {N} values in {{-1, +1}}")
    return y


@dataclass(frozen=True)
class DualSolution:
    alpha: np.ndarray
    primal: float
    dual: float
    gap: float
    epochs: int


class _DenseGram:
    def __init__(self, K):
        self.K = K
        self.diag = np.diag(K).copy()

    def matvec(self, v):
        return self.K @ v

    def start(self, beta):
        self.g = self.K @ beta

    def others(self, i, beta_i):
        return float(self.g[i]) - self.diag[i] * beta_i

    def update(self, i, delta):
        self.g += self.K[i] * delta  # row i equals column i (symmetric)

    def shifted_solve(self, y, c, rhs):
        """``(I + c diag(y) K diag(y))^{-1} rhs``."""
        A = c * (self.K * np.outer(y, y))
        A[np.diag_indices_from(A)] += 1.0
        return scipy.linalg.solve(A, rhs, assume_a="pos")


class _FactorGram:
    def __init__(self, F):
        self.F = F
        self.diag = np.einsum("ij,ij->i", F, F)

    def matvec(self, v):
        return self.F @ (self.F.T @ v)

    def start(self, beta):
        self.u = self.F.T @ beta

    def others(self, i, beta_i):
        return float(self.F[i] @ self.u) - self.diag[i] * beta_i

    def update(self, i, delta):
        self.u += self.F[i] * delta

    def shifted_solve(self, y, c, rhs):
        """``(I + c diag(y) F F^T diag(y))^{-1} rhs`` by the Woodbury identity."""
        B = self.F * y[:, None]
        A = B.T @ B
        A[np.diag_indices_from(A)] += 1.0 / c
        return rhs - B @ scipy.linalg.solve(A, B.T @ rhs, assume_a="pos")


def _objectives(G, alpha, y, lam, loss):
    N = y.size
    beta = alpha * y
    g = G.matvec(beta)
    quad = float(beta @ g) / (2.0 * lam * N * N)
    f = -g / (lam * N)
    primal = quad + float(loss.value(y * f).mean())
    dual = -float(loss.conjugate(alpha).mean()) - quad
    return primal, dual


def _dual_ascent(G, y, lam, loss, tol, max_epochs):
    """Exact cyclic coordinate ascent on the dual, sweeping ``i = 0..N-1`` each epoch.

    The squared-loss dual is an unconstrained quadratic, so it is first solved
    directly; the sweeps then only polish (usually zero epochs).
    """
    N = y.size
    scale = lam * N
    if loss.family == "squared":
        # stationarity: (I + Y G Y / (lam N)) alpha = -1
        alpha = G.shifted_solve(y, 1.0 / scale, -np.ones(N))
    else:
        alpha = np.full(N, float(loss.derivative(0.0)))
    G.start(alpha * y)
    primal, dual = _objectives(G, alpha, y, lam, loss)
    if primal - dual <= tol:
        return DualSolution(alpha, primal, dual, primal - dual, 0)
    ys, q = y.tolist(), (G.diag / scale).tolist()
    step, others, update = loss.dual_step, G.others, G.update
    for epoch in range(1, max_epochs + 1):
        a_list = alpha.tolist()
        for i in range(N):
            ai, yi = a_list[i], ys[i]
            s = others(i, ai * yi)
            a = step(q[i], yi * s / scale, ai)
            if a != ai:
                a_list[i] = a
                update(i, (a - ai) * yi)
        alpha = np.array(a_list)
        G.start(alpha * y)
        primal, dual = _objectives(G, alpha, y, lam, loss)
        if primal - dual <= tol:
            return DualSolution(alpha, primal, dual, primal - dual, epoch)
    raise NumericalError(f"dual ascent did not reach gap {tol:g} in {max_epochs} epochs (gap {primal - dual:.3e})")


@dataclass(frozen=True, eq=False)
class FullModel:
    """Solution of the full kernel problem; predictions use every training point."""

    alpha: np.ndarray
    labels: np.ndarray
    lam: float
    loss: LossFunction
    solution: DualSolution
    K: np.ndarray | None = None
    points: np.ndarray | None = None
    kernel: KernelFunction | None = None

    @property
    def n_train(self):
        return self.alpha.size

    @property
    def objective(self):
        return self.solution.primal

    @property
    def support(self):
        return np.nonzero(self.alpha != 0)[0]


def train_full(K, y, lam, loss="logistic", tol=1e-9, max_epochs=20_000, data=None, kernel=None) -> FullModel:
    """Solve the full kernel problem through its dual.

    Stops when the duality gap is at most ``tol``. ``data`` and ``kernel`` are
    kept for out-of-sample prediction.
    """
    K = np.asarray(K, dtype=float)
    y = _check_labels(y, K.shape[0])
    if not lam > 0:
        raise ConfigError("lambda must be > 0")
    if isinstance(loss, str):
        loss = make_loss(loss, lam, float(np.diag(K).max()))
    sol = _dual_ascent(_DenseGram(K), y, lam, loss, tol, max_epochs)
    points = None if data is None else getattr(data, "points", data)
    return FullModel(sol.alpha, y, lam, loss, sol, K, points, kernel)


def train_dual_approx(nys: NystromModel, y, lam, loss="logistic", tol=1e-9, max_epochs=20_000) -> DualSolution:
    """Dual problem with ``K`` replaced by the Nyström approximation, applied through its factor."""
    y = _check_labels(y, nys.n)
    if not lam > 0:
        raise ConfigError("lambda must be > 0")
    G = _FactorGram(nys.features)
    if isinstance(loss, str):
        loss = make_loss(loss, lam, float(G.diag.max()) if G.diag.size else 1.0)
    return _dual_ascent(G, y, lam, loss, tol, max_epochs)


@dataclass(frozen=True, eq=False)
class RestrictedModel:
    """Classifier supported on the landmarks only.

    ``f = -1/(N lam) sum_j z_j y_j k(x_hat_j, .)`` where ``y_j`` are the landmark labels.
    """

    z: np.ndarray
    sample: SampleSet
    landmark_labels: np.ndarray
    n_train: int
    lam: float
    loss: LossFunction
    nystrom: NystromModel | None = None
    kernel: KernelFunction | None = None
    landmarks: np.ndarray | None = None

    @property
    def coefficients(self):
        """Expansion weights ``c`` with ``f = sum_j c_j k(x_hat_j, .)``."""
        return -self.z * self.landmark_labels / (self.n_train * self.lam)

    @property
    def support(self):
        return self.sample.indices[self.z != 0]


def map_dual_to_restricted(alpha, nys: NystromModel, y, lam, loss="logistic") -> RestrictedModel:
    """Turn a low-rank dual solution into the landmark-restricted classifier.

    ``z = y_S * pinv(K_hat) K_b^T (alpha * y)``, so that the label weighting
    in the expansion of ``f`` cancels the one applied here.
    """
    alpha = np.asarray(alpha, dtype=float)
    y = _check_labels(y, nys.n)
    if alpha.size != nys.n:
        raise InputError(f"alpha has length {alpha.size}, model has {nys.n} points")
    if isinstance(loss, str):
        loss = make_loss(loss, lam, float(np.einsum("ij,ij->i", nys.features, nys.features).max()))
    yS = y[nys.sample.indices]
    z = yS * (nys.khat_pinv() @ (nys.kb.T @ (alpha * y)))
    return RestrictedModel(z, nys.sample, yS, nys.n, lam, loss, nys, nys.kernel, nys.landmarks)


def train_restricted(nys: NystromModel, y, lam, loss="logistic", tol=1e-9, max_iter=200) -> RestrictedModel:
    """Minimise the objective over ``span{k(x_hat_j, .)}`` as a linear model on Nyström features.

    Damped Newton in feature space; stops when the gradient norm is at most ``tol``.
    """
    y = _check_labels(y, nys.n)
    if not lam > 0:
        raise ConfigError("lambda must be > 0")
    F = nys.features
    N, r = F.shape
    if isinstance(loss, str):
        loss = make_loss(loss, lam, float(np.einsum("ij,ij->i", F, F).max()) if r else 1.0)

    def objective(w):
        return 0.5 * lam * float(w @ w) + float(loss.value(y * (F @ w)).mean())

    w = np.zeros(r)
    for _ in range(max_iter):
        margins = y * (F @ w)
        grad = lam * w + F.T @ (y * loss.derivative(margins)) / N
        if np.linalg.norm(grad) <= tol:
            break
        H = lam * np.eye(r) + (F.T * loss.second_derivative(margins)) @ F / N
        step = np.linalg.solve(H, grad)
        J0, t = objective(w), 1.0
        while objective(w - t * step) > J0 - 0.25 * t * float(grad @ step) and t > 1e-12:
            t *= 0.5
        w = w - t * step
    else:
        raise NumericalError(f"restricted Newton did not converge in {max_iter} iterations")
    c = nys.projection @ w
    yS = y[nys.sample.indices]
    z = -c * yS * (N * lam)
    return RestrictedModel(z, nys.sample, yS, N, lam, loss, nys, nys.kernel, nys.landmarks)


def restricted_objective(model: RestrictedModel, y):
    """Training objective of a restricted model (needs its Nyström model)."""
    nys = model.nystrom
    y = _check_labels(y, nys.n)
    c = model.coefficients
    eig = nys.khat_eig
    norm2 = float(np.sum(np.clip(eig.eigenvalues, 0.0, None) * (eig.vectors.T @ c) ** 2))
    f = nys.kb @ c
    return 0.5 * model.lam * norm2 + float(model.loss.value(y * f).mean())


def full_objective(model: FullModel):
    return model.solution.primal


def predict(model, x=None, kernel_values=None):
    """Scores ``f(x)``.

    Without arguments, scores at the training points. ``kernel_values`` holds
    kernel values against the model's expansion points (training points for a
    full model, landmarks for a restricted one), one row per query.
    """
    if isinstance(model, FullModel):
        w = -(model.alpha * model.labels) / (model.n_train * model.lam)
        if x is None and kernel_values is None:
            if model.K is None:
                raise InputError("model has no stored kernel matrix")
            return model.K @ w
        if kernel_values is None:
            if model.kernel is None or model.points is None:
                raise InputError("model has no kernel/points for out-of-sample prediction")
            kernel_values = model.kernel(np.atleast_2d(x), model.points)
    else:
        w = model.coefficients
        if x is None and kernel_values is None:
            if model.nystrom is None:
                raise InputError("model has no Nyström model for training-point prediction")
            return model.nystrom.kb @ w
        if kernel_values is None:
            if model.kernel is None or model.landmarks is None:
                raise InputError("model has no kernel/landmarks for out-of-sample prediction")
            kernel_values = model.kernel(np.atleast_2d(x), model.landmarks)
    kv = np.asarray(kernel_values, dtype=float)
    scores = np.atleast_2d(kv) @ w
    return scores[0] if kv.ndim == 1 else scores


def classify(scores):
    """Sign of the scores with ties sent to +1."""
    return np.where(np.asarray(scores) >= 0, 1, -1)


def budget_exponent(p):
    if not p > 1:
        raise ConfigError("the support-vector budget needs p > 1")
    return 2.0 * p / (p * p - 1.0)


def recommended_m(N, p):
    """``ceil(N ** (2p / (p^2 - 1)))`` capped to ``[1, N]``; the cap binds when ``p <= 1 + sqrt(2)``."""
    e = budget_exponent(p)
    if e >= 1.0:
        return int(N)
    # guard against 999.9999... or 1000.0000...1 where the exact power is an integer
    return int(min(N, max(1, math.ceil(N**e * (1.0 - 1e-12)))))


def budget_is_sublinear(p):
    return budget_exponent(p) < 1.0 and not math.isclose(budget_exponent(p), 1.0, rel_tol=1e-12)


def model_to_dict(model, seed=None):
    if isinstance(model, FullModel):
        d = {"kind": "full", "alpha": model.alpha.tolist(), "labels": model.labels.tolist()}
        if model.points is not None:
            d["points"] = np.asarray(model.points).tolist()
    else:
        d = {
            "kind": "restricted",
            "z": model.z.tolist(),
            "sample_indices": model.sample.indices.tolist(),
            "landmark_labels": model.landmark_labels.tolist(),
            "n_train": model.n_train,
        }
        if model.landmarks is not None:
            d["landmarks"] = np.asarray(model.landmarks).tolist()
        seed = model.sample.seed if seed is None else seed
    d.update(loss=model.loss.family, loss_bound=model.loss.bound, **{"lambda": model.lam})
    d["kernel"] = None if model.kernel is None else model.kernel.to_dict()
    d["seed"] = seed
    return d


def model_from_dict(d):
    loss = LossFunction(d["loss"], float(d["loss_bound"]))
    kernel = None if d.get("kernel") is None else KernelFunction.from_dict(d["kernel"])
    if d["kind"] == "full":
        alpha = np.array(d["alpha"], dtype=float)
        sol = DualSolution(alpha, math.nan, math.nan, math.nan, 0)
        pts = None if "points" not in d else np.array(d["points"], dtype=float)
        return FullModel(alpha, np.array(d["labels"], dtype=float), d["lambda"], loss, sol, None, pts, kernel)
    lm = None if "landmarks" not in d else np.array(d["landmarks"], dtype=float)
    sample = SampleSet(np.array(d["sample_indices"], dtype=int), d.get("seed"))
    return RestrictedModel(np.array(d["z"], dtype=float), sample, np.array(d["landmark_labels"], dtype=float),
                           int(d["n_train"]), d["lambda"], loss, None, kernel, lm)


def save_model(path, model, seed=None):
    with open(path, "w") as fh:
        json.dump(model_to_dict(model, seed), fh)


def load_model(path):
    with open(path) as fh:
        return model_from_dict(json.load(fh))
