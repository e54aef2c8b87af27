"""Private Frank-Wolfe over the l1 ball, and its sparse logistic regression
specialization used by every learner.

The constraint set is the l1 ball of a given radius; its vertices are the
2*dim signed scaled basis vectors.  Each iteration adds independent Laplace
noise to every vertex score and picks the noisy minimizer (first index wins
ties), then steps with mu_t = 2/(t+2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import stream
from .privacy import Accountant, frank_wolfe_noise_scale, laplace_noise

FEASIBILITY_SLACK = 1e-9


@dataclass(frozen=True)
class PolytopeConstraint:
    """l1 ball of the given radius; |C|_1 equals the radius."""

    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def norm_bound(self) -> float:
        return self.radius


@dataclass(frozen=True)
class FWConfig:
    T: int
    L1: float
    gamma_curv: float
    rho: float
    seed: int = 0
    non_private: bool = False  # zero-noise test mode, bypasses the accountant

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.L1 <= 0:
            raise ValueError("L1 must be positive")
        if self.rho < 0:
            raise ValueError("rho must be nonnegative")
        if self.rho == 0 and not self.non_private:
            raise ValueError("rho = 0 requires the explicit non-private flag")


@dataclass(frozen=True)
class LogisticProblem:
    """Dense features with |x|_inf <= 1 and labels in {-1,+1}."""

    features: np.ndarray  # (n, dim)
    labels: np.ndarray  # (n,)

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError("features must be (n, dim) with matching labels")
        if X.size and np.max(np.abs(X)) > 1 + 1e-12:
            raise ValueError("feature entries must lie in [-1, 1]")
        if not set(np.unique(y)).issubset({-1.0, 1.0}):
            raise ValueError("labels must lie in {-1, +1}")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


def logistic_loss(problem: LogisticProblem, w: np.ndarray) -> float:
    m = problem.labels * (problem.features @ w)
    return float(np.mean(np.logaddexp(0.0, -m)))


def logistic_gradient(problem: LogisticProblem, w: np.ndarray) -> np.ndarray:
    """Gradient of the mean logistic loss in one pass over the data."""
    m = problem.labels * (problem.features @ w)
    coef = -problem.labels / (1.0 + np.exp(m))  # -y * sigma(-y<w,x>)
    return problem.features.T @ coef / problem.n


def private_frank_wolfe(
    problem: LogisticProblem,
    constraint: PolytopeConstraint,
    cfg: FWConfig,
    accountant: Accountant | None = None,
    label: str = "frank-wolfe",
    w0: np.ndarray | None = None,
) -> np.ndarray:
    """Run the private Frank-Wolfe loop; one accountant charge of cfg.rho."""
    if problem.n == 0:
        raise ValueError("empty dataset")
    if cfg.non_private:
        scale = 0.0
    else:
        if accountant is None:
            raise ValueError("private runs require an accountant")
        accountant.spend(label, cfg.rho)
        scale = frank_wolfe_noise_scale(
            cfg.L1, constraint.norm_bound, cfg.T, problem.n, cfg.rho
        )
    rng = stream(cfg.seed, "pfw", label)
    r = constraint.radius
    if w0 is None:
        w = np.zeros(problem.dim)
    else:
        w = np.asarray(w0, dtype=float).copy()
        if np.sum(np.abs(w)) > r + FEASIBILITY_SLACK:
            raise ValueError("start point outside the constraint set")
    for t in range(1, cfg.T):
        grad = logistic_gradient(problem, w)
        # score of +r*e_i is r*grad_i (index 2i), of -r*e_i is -r*grad_i (2i+1)
        scores = np.empty(2 * problem.dim)
        scores[0::2] = r * grad
        scores[1::2] = -r * grad
        scores += laplace_noise(scale, rng, size=2 * problem.dim)
        best = int(np.argmin(scores))
        vertex = np.zeros(problem.dim)
        vertex[best // 2] = r if best % 2 == 0 else -r
        mu = 2.0 / (t + 2.0)
        w = (1.0 - mu) * w + mu * vertex
    return w


def default_iterations(lambda_radius: float, n: int, rho: float, normalized: bool = False) -> int:
    """Iteration count from the sparse-logistic specialization.

    The default uses T = lambda^{2/3} (n sqrt(rho))^{2/3}; the normalized
    variant divides by (L1 |C|_1)^{2/3} with L1 = 2.  Non-private callers pass
    rho = 0 and get the same formula with the sqrt(rho) factor dropped.
    """
    scale = n * math.sqrt(rho) if rho > 0 else float(n)
    T = (lambda_radius ** (2.0 / 3.0)) * (scale ** (2.0 / 3.0))
    if normalized:
        T /= (2.0 * lambda_radius) ** (2.0 / 3.0)
    return max(1, round(T))


def sparse_logistic_fit(
    problem: LogisticProblem,
    lambda_radius: float,
    rho: float,
    accountant: Accountant | None = None,
    T_override: int | None = None,
    seed: int = 0,
    non_private: bool = False,
    normalized_T: bool = False,
    label: str = "sparse-logistic",
) -> np.ndarray:
    """l1-constrained logistic fit: L1 = 2, curvature bound lambda_radius^2."""
    T = T_override if T_override is not None else default_iterations(
        lambda_radius, problem.n, rho if not non_private else 0.0, normalized_T
    )
    cfg = FWConfig(
        T=T, L1=2.0, gamma_curv=lambda_radius**2, rho=rho,
        seed=seed, non_private=non_private,
    )
    return private_frank_wolfe(
        problem, PolytopeConstraint(lambda_radius), cfg, accountant, label=label
    )
