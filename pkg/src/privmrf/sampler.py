"""I.i.d. sample generation: exact inverse-CDF draws and restart Gibbs.

Gibbs runs one fresh chain per retained sample (all chains advanced together,
vectorized over samples); site updates use the closed-form single-site
conditionals, never the enumeration oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rng import stream
from .models import BinaryMRF, IsingModel, Model, PairwiseModel
from .oracle import exact_distribution


@dataclass
class Dataset:
    p: int
    k: int
    rows: np.ndarray  # (n, p) ints: -1/+1 for k=2, 1..k otherwise
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64).reshape(-1, self.p)
        present = set(np.unique(rows).tolist()) if rows.size else set()
        # k = 2 admits either convention: signed -1/+1 or integer {1, 2}
        symbols = set(range(1, self.k + 1))
        if not (present <= symbols or (self.k == 2 and present <= {-1, 1})):
            raise ValueError(f"entries {present - symbols} outside the alphabet")
        self.rows = rows

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def save_csv(self, path) -> None:
        with open(path, "w") as fh:
            for row in self.rows:
                fh.write(",".join(str(int(v)) for v in row) + "\n")

    @classmethod
    def load_csv(cls, path, k: int = 2) -> "Dataset":
        rows = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rows.append([int(v) for v in line.split(",")])
        arr = np.asarray(rows, dtype=np.int64)
        p = arr.shape[1] if arr.size else 0
        return cls(p, k, arr.reshape(-1, p), meta={"source": str(path)})


def _decode_states(indices: np.ndarray, p: int, k: int, signed: bool) -> np.ndarray:
    out = np.empty((indices.shape[0], p), dtype=np.int64)
    rem = indices.copy()
    for i in range(p):
        digit = rem % k
        rem //= k
        out[:, i] = 2 * digit - 1 if signed else digit + 1
    return out


def exact_sample(model: Model, n: int, seed: int, cap: int | None = None) -> Dataset:
    """n i.i.d. draws by inverse-CDF over the exact probability table."""
    dist = exact_distribution(model, cap=cap)
    rng = stream(seed, "exact-sample")
    u = rng.random(n)
    cdf = np.cumsum(dist.probs)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, u, side="right")
    signed = not isinstance(model, PairwiseModel) and model.k == 2
    rows = _decode_states(idx, model.p, model.k, signed)
    return Dataset(model.p, model.k, rows, meta={"generator": "exact", "seed": int(seed), "n": int(n)})


def _gibbs_site_probs(model: Model, chains: np.ndarray, i: int) -> np.ndarray:
    """Conditional law at 0-based site i for every chain.

    Returns (n,) Pr(Z_i=+1 | rest) for binary models, (n, k) for pairwise.
    """
    if isinstance(model, IsingModel):
        logit = 2.0 * (chains @ model.A[:, i] + model.theta[i])
        return 1.0 / (1.0 + np.exp(-logit))
    if isinstance(model, BinaryMRF):
        d = model.h.partial_derivative((i + 1,))
        val = np.zeros(chains.shape[0])
        for mono, coef in d.terms.items():
            if mono:
                val += coef * np.prod(chains[:, [j - 1 for j in mono]], axis=1)
            else:
                val += coef
        return 1.0 / (1.0 + np.exp(-2.0 * val))
    if isinstance(model, PairwiseModel):
        scores = np.tile(model.Theta[i], (chains.shape[0], 1))
        for j in range(model.p):
            if j != i:
                scores += model.weight(i + 1, j + 1)[:, chains[:, j] - 1].T
        scores -= scores.max(axis=1, keepdims=True)
        w = np.exp(scores)
        return w / w.sum(axis=1, keepdims=True)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def gibbs_sample(model: Model, n: int, seed: int, burn_in: int = 100, thin: int = 0) -> Dataset:
    """n samples from independent restart chains after burn_in (+thin) sweeps."""
    rng = stream(seed, "gibbs-sample")
    p, k = model.p, model.k
    signed = not isinstance(model, PairwiseModel) and k == 2
    if signed:
        chains = rng.integers(0, 2, size=(n, p)) * 2 - 1
    else:
        chains = rng.integers(1, k + 1, size=(n, p))
    for _ in range(burn_in + thin):
        for i in range(p):
            u = rng.random(n)
            probs = _gibbs_site_probs(model, chains, i)
            if signed:
                chains[:, i] = np.where(u < probs, 1, -1)
            else:
                cdf = np.cumsum(probs, axis=1)
                cdf[:, -1] = 1.0
                chains[:, i] = 1 + (u[:, None] > cdf).sum(axis=1)
    return Dataset(p, k, chains, meta={
        "generator": "gibbs", "seed": int(seed), "n": int(n),
        "burn_in": int(burn_in), "thin": int(thin),
    })
