"""Ground-truth model types: Ising, pairwise over [k], binary higher-order MRF.

Nodes are 1-based in external interfaces (pair keys, monomials); internal
arrays are 0-based numpy.  Width and minimum-edge magnitudes are computed on
demand and never cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from .polynomial import MultilinearPolynomial


class NoEdgesError(ValueError):
    """Raised when a minimum-edge query is made on an edgeless model."""


@dataclass(frozen=True)
class IsingModel:
    """Distribution on {-1,+1}^p with pairwise weights A and biases theta."""

    p: int
    A: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        if A.shape != (self.p, self.p):
            raise ValueError(f"A must be {self.p}x{self.p}")
        if theta.shape != (self.p,):
            raise ValueError(f"theta must have length {self.p}")
        if not np.allclose(A, A.T, atol=1e-12):
            raise ValueError("A must be symmetric")
        if np.any(np.abs(np.diag(A)) > 0):
            raise ValueError("A must have zero diagonal")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "theta", theta)

    @property
    def k(self) -> int:
        return 2


@dataclass(frozen=True)
class PairwiseModel:
    """Distribution on [k]^p with kxk weight matrices per pair.

    W holds one matrix per unordered pair keyed by (i, j) with 1 <= i < j <= p;
    the reverse direction is the transpose.  Theta is a p x k array.
    """

    p: int
    k: int
    W: Dict[Tuple[int, int], np.ndarray]
    Theta: np.ndarray

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("alphabet size must be >= 2")
        W = {}
        for (i, j), mat in self.W.items():
            if not (1 <= i < j <= self.p):
                raise ValueError(f"pair key {(i, j)} must satisfy 1 <= i < j <= p")
            mat = np.asarray(mat, dtype=float)
            if mat.shape != (self.k, self.k):
                raise ValueError(f"W[{i},{j}] must be {self.k}x{self.k}")
            W[(i, j)] = mat
        Theta = np.asarray(self.Theta, dtype=float)
        if Theta.shape != (self.p, self.k):
            raise ValueError(f"Theta must be {self.p}x{self.k}")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "Theta", Theta)

    def weight(self, i: int, j: int) -> np.ndarray:
        """W_{i,j} for any ordered pair i != j (transpose for i > j)."""
        if i < j:
            return self.W.get((i, j), np.zeros((self.k, self.k)))
        return self.W.get((j, i), np.zeros((self.k, self.k))).T


@dataclass(frozen=True)
class BinaryMRF:
    """Distribution on {-1,+1}^p proportional to exp(h) with deg(h) <= t."""

    p: int
    t: int
    h: MultilinearPolynomial

    def __post_init__(self):
        if self.h.p != self.p:
            raise ValueError("polynomial dimension must match p")
        for mono in self.h.terms:
            if len(mono) > self.t:
                raise ValueError(f"monomial {mono} exceeds interaction order {self.t}")

    @property
    def k(self) -> int:
        return 2


Model = IsingModel | PairwiseModel | BinaryMRF


# -- widths and edge magnitudes -------------------------------------------


def ising_width(m: IsingModel) -> float:
    """max_i (sum_j |A_ij| + |theta_i|)."""
    if m.p == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(m.A), axis=1) + np.abs(m.theta)))


def ising_min_edge(m: IsingModel) -> float:
    """Minimum |A_ij| over nonzero entries."""
    mask = m.A != 0
    if not mask.any():
        raise NoEdgesError("model has no edges")
    return float(np.min(np.abs(m.A[mask])))


def pairwise_width(m: PairwiseModel) -> float:
    """max over (i, a) of sum_{j != i} max_b |W_ij(a, b)| + |theta_i(a)|."""
    best = 0.0
    for i in range(1, m.p + 1):
        row = np.abs(m.Theta[i - 1]).astype(float).copy()
        for j in range(1, m.p + 1):
            if j != i:
                row += np.max(np.abs(m.weight(i, j)), axis=1)
        best = max(best, float(np.max(row)) if m.k else 0.0)
    return best


def pairwise_min_edge(m: PairwiseModel) -> float:
    """min over present edges of max_{a,b} |W_ij(a,b)|."""
    mags = [np.max(np.abs(mat)) for mat in m.W.values() if np.any(mat != 0)]
    if not mags:
        raise NoEdgesError("model has no edges")
    return float(min(mags))


def mrf_width(m: BinaryMRF) -> float:
    """max_i l1 norm of the i-th partial derivative of h."""
    return max(
        (m.h.partial_derivative((i,)).l1_norm() for i in range(1, m.p + 1)),
        default=0.0,
    )


def model_width(m: Model) -> float:
    if isinstance(m, IsingModel):
        return ising_width(m)
    if isinstance(m, PairwiseModel):
        return pairwise_width(m)
    return mrf_width(m)


# -- centering -------------------------------------------------------------


def center_pairwise(m: PairwiseModel) -> PairwiseModel:
    """Doubly center every weight matrix, folding compensations into Theta.

    Row-centering W_{i,j} compensates theta_i; row-centering the transposed
    direction W_{j,i} (= column-centering W_{i,j}) compensates theta_j.  The
    distribution is unchanged at each step.
    """
    Theta = m.Theta.copy()
    W = {}
    for (i, j), mat in m.W.items():
        mat = mat.copy()
        row_means = mat.mean(axis=1)
        mat -= row_means[:, None]
        Theta[i - 1] += row_means
        col_means = mat.mean(axis=0)
        mat -= col_means[None, :]
        Theta[j - 1] += col_means
        W[(i, j)] = mat
    return PairwiseModel(m.p, m.k, W, Theta)


# -- conversions and bounds ------------------------------------------------


def to_mrf(m: IsingModel) -> BinaryMRF:
    """Ising as the t=2 binary MRF: h(z) = sum A_ij z_i z_j + sum theta_i z_i."""
    terms = {}
    for i in range(m.p):
        if m.theta[i] != 0:
            terms[(i + 1,)] = m.theta[i]
        for j in range(i + 1, m.p):
            if m.A[i, j] != 0:
                terms[(i + 1, j + 1)] = m.A[i, j]
    return BinaryMRF(m.p, 2, MultilinearPolynomial(m.p, terms))


def delta_unbiased_bound(m: Model) -> float:
    """Lower bound on every single-site conditional probability."""
    lam = model_width(m)
    if isinstance(m, PairwiseModel):
        return math.exp(-2.0 * lam) / m.k
    # Ising (k = 2) and binary MRF share the e^{-2 lambda}/2 bound
    return math.exp(-2.0 * lam) / 2.0


# -- fixtures --------------------------------------------------------------


def matched_pairs_ising(p: int, eta: float | Sequence[float], theta=None) -> IsingModel:
    """Perfect matching on (1,2), (3,4), ... where eta is each pair's log
    odds of agreement: Pr(equal) = e^eta / (e^eta + 1), pair parity
    (e^eta - 1)/(e^eta + 1).  The coupling coefficient is eta/2.

    eta may be a scalar (shared weight) or a length-p/2 sequence.
    """
    if p % 2 != 0:
        raise ValueError("p must be even for the matched-pairs fixture")
    etas = np.full(p // 2, eta, dtype=float) if np.isscalar(eta) else np.asarray(eta, dtype=float)
    if etas.shape != (p // 2,):
        raise ValueError(f"need {p // 2} pair weights, got {etas.shape}")
    A = np.zeros((p, p))
    for i in range(p // 2):
        A[2 * i, 2 * i + 1] = A[2 * i + 1, 2 * i] = etas[i] / 2.0
    th = np.zeros(p) if theta is None else np.asarray(theta, dtype=float)
    return IsingModel(p, A, th)


def matched_pairs_edges(p: int) -> set:
    return {(2 * i + 1, 2 * i + 2) for i in range(p // 2)}


# -- serialization ---------------------------------------------------------


def model_to_json(m: Model) -> dict:
    if isinstance(m, IsingModel):
        return {"type": "ising", "p": m.p, "A": m.A.tolist(), "theta": m.theta.tolist()}
    if isinstance(m, PairwiseModel):
        return {
            "type": "pairwise",
            "p": m.p,
            "k": m.k,
            "W": {f"{i},{j}": mat.tolist() for (i, j), mat in sorted(m.W.items())},
            "Theta": m.Theta.tolist(),
        }
    return {"type": "mrf", "p": m.p, "t": m.t, "h": m.h.to_json()}


def model_from_json(obj: dict) -> Model:
    kind = obj["type"]
    if kind == "ising":
        return IsingModel(obj["p"], np.asarray(obj["A"]), np.asarray(obj["theta"]))
    if kind == "pairwise":
        W = {}
        for key, mat in obj["W"].items():
            i, j = (int(s) for s in key.split(","))
            W[(i, j)] = np.asarray(mat)
        return PairwiseModel(obj["p"], obj["k"], W, np.asarray(obj["Theta"]))
    if kind == "mrf":
        return BinaryMRF(obj["p"], obj["t"], MultilinearPolynomial.from_json(obj["h"]))
    raise ValueError(f"unknown model type {kind!r}")
