"""Exact brute-force distribution computations over the full state space.

State order is mixed-radix little-endian over coordinates: coordinate 1 is the
least significant digit.  Symbol order is (-1, +1) for binary models and
(1, ..., k) otherwise.  Normalization runs in the log domain with a single
max shift.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .models import BinaryMRF, IsingModel, Model, PairwiseModel

DEFAULT_STATE_CAP = 2**20
STATE_CAP_ENV = "PRIVMRF_STATE_CAP"


class StateSpaceTooLargeError(ValueError):
    """Raised when k^p exceeds the configured enumeration cap."""


def state_cap() -> int:
    return int(os.environ.get(STATE_CAP_ENV, DEFAULT_STATE_CAP))


@dataclass(frozen=True)
class ExactDistribution:
    p: int
    k: int
    probs: np.ndarray  # length k^p, sums to 1

    def __post_init__(self):
        object.__setattr__(self, "probs", np.asarray(self.probs, dtype=float))


def enumerate_states(p: int, k: int, signed: bool | None = None) -> np.ndarray:
    """All k^p states as a (k^p, p) array in little-endian mixed-radix order.

    signed selects the symbol convention: -1/+1 (default for k = 2, used by
    Ising and binary MRFs) versus 1..k (pairwise models, any k).
    """
    signed = k == 2 if signed is None else signed
    n = k**p
    idx = np.arange(n)
    digits = np.empty((n, p), dtype=np.int64)
    for i in range(p):
        digits[:, i] = (idx // (k**i)) % k
    if signed:
        return 2 * digits - 1  # digit 0 -> -1, digit 1 -> +1
    return digits + 1  # digit d -> symbol d+1


def state_index(z, k: int, signed: bool | None = None) -> int:
    """Index of one assignment under the enumeration order."""
    signed = k == 2 if signed is None else signed
    idx = 0
    for i, v in enumerate(z):
        digit = (int(v) + 1) // 2 if signed else int(v) - 1
        idx += digit * (k**i)
    return idx


def _signed_symbols(model: Model) -> bool:
    return not isinstance(model, PairwiseModel) and model.k == 2


def _log_weights(model: Model, states: np.ndarray) -> np.ndarray:
    if isinstance(model, IsingModel):
        Z = states.astype(float)
        return 0.5 * np.einsum("si,ij,sj->s", Z, model.A, Z) + Z @ model.theta
    if isinstance(model, PairwiseModel):
        logw = np.zeros(states.shape[0])
        digits = states - 1
        for i in range(model.p):
            logw += model.Theta[i, digits[:, i]]
        for (i, j), mat in model.W.items():
            logw += mat[digits[:, i - 1], digits[:, j - 1]]
        return logw
    if isinstance(model, BinaryMRF):
        Z = states.astype(float)
        logw = np.zeros(states.shape[0])
        for mono, coef in model.h.terms.items():
            if mono:
                logw += coef * np.prod(Z[:, [i - 1 for i in mono]], axis=1)
            else:
                logw += coef
        return logw
    raise TypeError(f"unsupported model type {type(model).__name__}")


def exact_distribution(model: Model, cap: int | None = None) -> ExactDistribution:
    """Normalized probability table over all k^p states."""
    k = model.k
    cap = state_cap() if cap is None else cap
    if k**model.p > cap:
        raise StateSpaceTooLargeError(f"{k}^{model.p} states exceed cap {cap}")
    states = enumerate_states(model.p, k, signed=_signed_symbols(model))
    logw = _log_weights(model, states)
    shift = logw.max() if logw.size else 0.0
    w = np.exp(logw - shift)
    return ExactDistribution(model.p, k, w / w.sum())


def exact_conditional(
    model: Model,
    i: int,
    value: int,
    x,
    dist: ExactDistribution | None = None,
) -> float:
    """Pr(Z_i = value | Z_{-i} = x); i is 1-based, x covers the other sites."""
    if dist is None:
        dist = exact_distribution(model)
    k = dist.k
    signed = _signed_symbols(model)
    symbols = (-1, 1) if signed else range(1, k + 1)
    x = list(x)
    probs = []
    target = None
    for s in symbols:
        z = x[: i - 1] + [s] + x[i - 1 :]
        pr = dist.probs[state_index(z, k, signed)]
        probs.append(pr)
        if s == value:
            target = pr
    if target is None:
        raise ValueError(f"value {value} outside alphabet")
    return float(target / sum(probs))


def exact_parity(model: Model, index_set, dist: ExactDistribution | None = None) -> float:
    """E[prod_{i in I} Z_i] for a binary model."""
    if dist is None:
        dist = exact_distribution(model)
    if dist.k != 2:
        raise ValueError("parities are defined for binary models only")
    iset = tuple(index_set)
    if not iset:
        return 1.0
    states = enumerate_states(dist.p, 2)
    chi = np.prod(states[:, [i - 1 for i in iset]], axis=1)
    return float(np.dot(dist.probs, chi))


def tv_distance(d1: ExactDistribution, d2: ExactDistribution) -> float:
    if d1.p != d2.p or d1.k != d2.k:
        raise ValueError("distributions live on different spaces")
    return 0.5 * float(np.sum(np.abs(d1.probs - d2.probs)))


def dump_distribution_csv(dist: ExactDistribution, path) -> None:
    """Golden-file dump: one (state index, probability) row per state."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for idx, pr in enumerate(dist.probs):
            writer.writerow([idx, repr(float(pr))])
