"""Parameter learners: Ising and pairwise models via per-node sparse logistic
regression, and binary higher-order MRFs in l1 (direct read-back) and l_inf
(derivative polynomials combined with released parity estimates).

Each edge is estimated from both endpoint nodes; the two estimates are
averaged and clamped to [-lambda, lambda], both being privacy-free
post-processing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ._rng import trial_seed
from .polynomial import Monomial, MultilinearPolynomial
from .privacy import Accountant
from .pfw import LogisticProblem, sparse_logistic_fit
from .query_release import ParityTable, empirical_parities, pmw_release
from .sampler import Dataset

DEFAULT_FEATURE_CAP = 20000


class TooManyFeaturesError(ValueError):
    """The node feature map exceeds the configured cap."""


@dataclass
class IsingEstimate:
    A_hat: np.ndarray
    theta_hat: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.A_hat.shape[0]


@dataclass
class PairwiseEstimate:
    p: int
    k: int
    W_hat: Dict[Tuple[int, int], np.ndarray]  # every ordered pair (i, j), i != j
    warnings: List[str] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


@dataclass
class MRFEstimate:
    u: MultilinearPolynomial
    t: int
    metadata: dict = field(default_factory=dict)


# -- feature maps ----------------------------------------------------------


def node_monomials(p: int, i: int, t: int) -> List[Monomial]:
    """Monomials over [p] \\ {i} of size <= t-1, canonical order, () first.

    The empty monomial is the intercept slot; the ordering must match the
    coefficient read-back exactly.
    """
    others = [j for j in range(1, p + 1) if j != i]
    out: List[Monomial] = []
    for size in range(0, t):
        out.extend(itertools.combinations(others, size))
    return out


def monomial_features(rows: np.ndarray, monos: List[Monomial]) -> np.ndarray:
    """Column per monomial: the product of the named +-1 data columns."""
    n = rows.shape[0]
    X = np.empty((n, len(monos)), dtype=float)
    for c, mono in enumerate(monos):
        if mono:
            X[:, c] = np.prod(rows[:, [j - 1 for j in mono]], axis=1)
        else:
            X[:, c] = 1.0
    return X


def one_hot_encode(s, k: int) -> np.ndarray:
    """Row r is the standard basis vector for symbol s_r in [k]."""
    s = np.asarray(s, dtype=np.int64)
    if s.size and (s.min() < 1 or s.max() > k):
        raise ValueError(f"symbols must lie in [1, {k}]")
    out = np.zeros((s.shape[0], k))
    out[np.arange(s.shape[0]), s - 1] = 1.0
    return out


def center_rows_eq1(w: np.ndarray) -> np.ndarray:
    """Zero-mean the first p-1 rows, folding the removed mass into row p."""
    w = np.asarray(w, dtype=float)
    p, k = w.shape
    out = w.copy()
    row_means = w[: p - 1].mean(axis=1)
    out[: p - 1] -= row_means[:, None]
    out[p - 1] += row_means.sum()
    return out


def _require_binary(data: Dataset) -> None:
    if data.k != 2:
        raise ValueError("learner requires binary (+-1) data")
    if data.n == 0:
        raise ValueError("empty dataset")
    if data.rows.size and not set(np.unique(data.rows)) <= {-1, 1}:
        raise ValueError("binary data must use the -1/+1 convention")


# -- Ising -----------------------------------------------------------------


def learn_ising(
    data: Dataset,
    lam: float,
    rho: float,
    accountant: Accountant | None = None,
    seed: int = 0,
    non_private: bool = False,
    T_override: int | None = None,
) -> IsingEstimate:
    """Per-node logistic fits on features [z_{-i}, 1] at budget rho/p each."""
    _require_binary(data)
    p = data.p
    rows = data.rows.astype(float)
    A_raw = np.zeros((p, p))
    theta = np.zeros(p)
    for i in range(p):
        X = np.column_stack([np.delete(rows, i, axis=1), np.ones(data.n)])
        problem = LogisticProblem(X, rows[:, i])
        w = sparse_logistic_fit(
            problem, 2.0 * lam, rho / p, accountant,
            T_override=T_override, seed=trial_seed(seed, "ising-node", i),
            non_private=non_private, label=f"ising-node-{i + 1}",
        )
        for j in range(p):
            if j != i:
                jt = j if j < i else j - 1
                A_raw[i, j] = 0.5 * w[jt]
        theta[i] = 0.5 * w[p - 1]
    A_hat = np.clip((A_raw + A_raw.T) / 2.0, -lam, lam)
    np.fill_diagonal(A_hat, 0.0)
    return IsingEstimate(A_hat, np.clip(theta, -lam, lam), metadata={
        "seed": int(seed), "rho": float(rho), "lambda": float(lam),
        "non_private": bool(non_private),
    })


# -- pairwise --------------------------------------------------------------


def learn_pairwise(
    data: Dataset,
    k: int,
    lam: float,
    rho: float,
    accountant: Accountant | None = None,
    seed: int = 0,
    non_private: bool = False,
    T_override: int | None = None,
) -> PairwiseEstimate:
    """Per-(node, symbol-pair) fits on one-hot features, centered and averaged.

    Each unordered symbol pair is fit once at budget rho/(k^2 p); the reverse
    direction reuses the negated fit.  An empty sample slice yields a zero
    block plus a warning (the budget is still charged).
    """
    if data.k != k:
        raise ValueError("dataset alphabet does not match k")
    if data.n == 0:
        raise ValueError("empty dataset")
    if data.rows.min() < 1 or data.rows.max() > k:
        raise ValueError("pairwise data must use symbols in [1, k]")
    p = data.p
    rho_fit = rho / (k * k * p)
    warnings: List[str] = []
    directional: Dict[Tuple[int, int], np.ndarray] = {}
    for i in range(1, p + 1):
        # U[(u, v)] approximates W_{i,j}(u,.) - W_{i,j}(v,.) stacked over j
        U: Dict[Tuple[int, int], np.ndarray] = {}
        for u in range(1, k + 1):
            U[(u, u)] = np.zeros((p, k))
        for u, v in itertools.combinations(range(1, k + 1), 2):
            mask = (data.rows[:, i - 1] == u) | (data.rows[:, i - 1] == v)
            sub = data.rows[mask]
            label = f"pairwise-node-{i}-pair-{u}-{v}"
            if sub.shape[0] == 0:
                warnings.append(f"empty sample slice for node {i}, symbols ({u},{v})")
                if not non_private and accountant is not None:
                    accountant.spend(label, rho_fit)
                U[(u, v)] = np.zeros((p, k))
                U[(v, u)] = np.zeros((p, k))
                continue
            reduced = np.column_stack([
                np.delete(sub, i - 1, axis=1),
                np.ones(sub.shape[0], dtype=np.int64),
            ])
            X = one_hot_encode(reduced.ravel(), k).reshape(sub.shape[0], p * k)
            y = np.where(sub[:, i - 1] == u, 1.0, -1.0)
            w = sparse_logistic_fit(
                LogisticProblem(X, y), 2.0 * lam * k, rho_fit, accountant,
                T_override=T_override,
                seed=trial_seed(seed, "pairwise-node", i, u, v),
                non_private=non_private, label=label,
            ).reshape(p, k)
            U[(u, v)] = center_rows_eq1(w)
            U[(v, u)] = -U[(u, v)]
        for j in range(1, p + 1):
            if j == i:
                continue
            jt = j - 1 if j < i else j - 2  # 0-based row of node j in [z_{-i}, 1]
            block = np.zeros((k, k))
            for u in range(1, k + 1):
                block[u - 1] = np.mean(
                    [U[(u, v)][jt] for v in range(1, k + 1)], axis=0
                )
            directional[(i, j)] = block
    W_hat: Dict[Tuple[int, int], np.ndarray] = {}
    for i in range(1, p + 1):
        for j in range(i + 1, p + 1):
            avg = np.clip((directional[(i, j)] + directional[(j, i)].T) / 2.0, -lam, lam)
            W_hat[(i, j)] = avg
            W_hat[(j, i)] = avg.T
    return PairwiseEstimate(p, k, W_hat, warnings, metadata={
        "seed": int(seed), "rho": float(rho), "lambda": float(lam),
        "non_private": bool(non_private),
    })


# -- binary t-wise MRF -----------------------------------------------------


def _check_feature_cap(p: int, t: int, cap: int) -> None:
    count = sum(
        1 for _ in itertools.chain.from_iterable(
            itertools.combinations(range(p - 1), s) for s in range(t)
        )
    )
    if count > cap:
        raise TooManyFeaturesError(f"{count} monomial features exceed cap {cap}")


def learn_mrf_l1(
    data: Dataset,
    t: int,
    lam: float,
    rho: float,
    accountant: Accountant | None = None,
    seed: int = 0,
    non_private: bool = False,
    T_override: int | None = None,
    feature_cap: int = DEFAULT_FEATURE_CAP,
) -> MRFEstimate:
    """Per-node fits on parity features; coefficients read back at the node
    with the smallest index in each monomial."""
    _require_binary(data)
    if t < 1:
        raise ValueError("interaction order t must be >= 1")
    p = data.p
    _check_feature_cap(p, t, feature_cap)
    rows = data.rows.astype(float)
    terms: Dict[Monomial, float] = {}
    for i in range(1, p + 1):
        monos = node_monomials(p, i, t)
        X = monomial_features(rows, monos)
        w = sparse_logistic_fit(
            LogisticProblem(X, rows[:, i - 1]), 2.0 * lam, rho / p, accountant,
            T_override=T_override, seed=trial_seed(seed, "mrf-node", i),
            non_private=non_private, label=f"mrf-node-{i}",
        )
        for c, mono in enumerate(monos):
            target = tuple(sorted(mono + (i,)))
            if min(target) == i:
                terms[target] = 0.5 * w[c]
    return MRFEstimate(MultilinearPolynomial(p, terms), t, metadata={
        "seed": int(seed), "rho": float(rho), "lambda": float(lam),
        "non_private": bool(non_private), "objective": "l1",
    })


def learn_mrf_linf(
    data: Dataset,
    t: int,
    lam: float,
    rho: float,
    accountant: Accountant | None = None,
    seed: int = 0,
    split: float = 0.5,
    non_private: bool = False,
    T_override: int | None = None,
    pmw_rounds: int | None = None,
    qhat: ParityTable | None = None,
    feature_cap: int = DEFAULT_FEATURE_CAP,
) -> MRFEstimate:
    """Split the data: rho/2 on parity release over the second half, rho/(2p)
    per node fit on the first half; read coefficients back through the
    derivative polynomials evaluated against the released parities.

    Passing qhat (e.g. exact oracle parities) bypasses the private release;
    this is a test mode and skips that half of the budget.
    """
    _require_binary(data)
    if t < 1:
        raise ValueError("interaction order t must be >= 1")
    p = data.p
    _check_feature_cap(p, t, feature_cap)
    n1 = int(data.n * split)
    n2 = data.n - n1
    if n1 < 1 or (qhat is None and n2 < 1):
        raise ValueError(f"split leaves an empty half (n1={n1}, n2={n2})")
    fit_rows = data.rows[:n1].astype(float)
    if qhat is None:
        parity_half = Dataset(p, 2, data.rows[n1:])
        release = pmw_release(
            parity_half, t, rho / 2.0, accountant,
            rounds=pmw_rounds, seed=trial_seed(seed, "pmw"),
            non_private=non_private,
        )
        qhat = release.table
    terms: Dict[Monomial, float] = {}
    for i in range(1, p + 1):
        monos = node_monomials(p, i, t)
        X = monomial_features(fit_rows, monos)
        w = sparse_logistic_fit(
            LogisticProblem(X, fit_rows[:, i - 1]), 2.0 * lam, rho / (2.0 * p),
            accountant, T_override=T_override,
            seed=trial_seed(seed, "mrf-node", i),
            non_private=non_private, label=f"mrf-node-{i}",
        )
        v_i = MultilinearPolynomial(p, {mono: 0.5 * w[c] for c, mono in enumerate(monos)})
        for mono in monos:
            target = tuple(sorted(mono + (i,)))
            if min(target) != i:
                continue
            deriv = v_i.partial_derivative(mono)
            terms[target] = sum(
                coef * qhat.value(sub) for sub, coef in deriv.terms.items()
            )
    return MRFEstimate(MultilinearPolynomial(p, terms), t, metadata={
        "seed": int(seed), "rho": float(rho), "lambda": float(lam),
        "non_private": bool(non_private), "objective": "linf",
        "n1": n1, "n2": n2,
    })
