"""(eps, delta)-DP structure learning: a non-private thresholding base learner
wrapped in a sub-sample-and-mode release with a distance-to-instability test.

The wrapper splits the rows into blocks, runs the base per block, and releases
the modal edge set only if its noisy count margin clears ln(1/delta)/eps + 1;
otherwise it returns bottom.  Privacy is enforced solely at this boundary, so
the base always runs in zero-noise mode and never touches an accountant.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, FrozenSet, Tuple

import numpy as np

from ._rng import stream, trial_seed
from .privacy import laplace_noise
from .sampler import Dataset

Edge = Tuple[int, int]


class InsufficientDataError(ValueError):
    """Fewer rows than blocks."""


@dataclass(frozen=True)
class GraphEstimate:
    p: int
    edges: FrozenSet[Edge]
    released: bool = True  # False = bottom

    def __post_init__(self):
        for i, j in self.edges:
            if not (1 <= i < j <= self.p):
                raise ValueError(f"edge {(i, j)} must satisfy 1 <= i < j <= p")
        if not self.released and self.edges:
            raise ValueError("bottom carries no edges")
        object.__setattr__(self, "edges", frozenset(self.edges))

    def encoding(self) -> str:
        """Canonical encoding used for mode counting and tie-breaking."""
        return ";".join(f"{i}-{j}" for i, j in sorted(self.edges))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "released": self.released,
            "edges": [list(e) for e in sorted(self.edges)],
        }


def bottom(p: int) -> GraphEstimate:
    return GraphEstimate(p, frozenset(), released=False)


@dataclass(frozen=True)
class StabilityConfig:
    eps: float
    delta: float
    blocks: int | None = None  # None = default rule

    def __post_init__(self):
        if self.eps <= 0 or not (0 < self.delta < 1):
            raise ValueError("need eps > 0 and delta in (0, 1)")
        if self.blocks is not None and self.blocks < 3:
            raise ValueError("need at least 3 blocks")

    def effective_blocks(self) -> int:
        if self.blocks is not None:
            return self.blocks
        return math.ceil(12.0 * (1.0 + math.log(1.0 / self.delta) / self.eps))

    def release_threshold(self) -> float:
        return math.log(1.0 / self.delta) / self.eps + 1.0


# -- base learner ----------------------------------------------------------

# Coarse fits suffice for eta/2 thresholding; a short fixed Frank-Wolfe
# schedule keeps block sweeps fast.
BASE_FIT_ITERS = 200


def base_structure(
    data: Dataset,
    model_kind: str,
    lam: float,
    eta: float,
    t_or_k: int | None = None,
    seed: int = 0,
    fit_iters: int | None = BASE_FIT_ITERS,
) -> GraphEstimate:
    """Zero-noise parameter fit, then keep edges strictly above eta/2."""
    from .learners import learn_ising, learn_mrf_l1, learn_pairwise

    if eta <= 0:
        raise ValueError("eta must be positive")
    half = eta / 2.0
    edges = set()
    if model_kind == "ising":
        est = learn_ising(data, lam, 0.0, seed=seed, non_private=True, T_override=fit_iters)
        for i in range(1, data.p + 1):
            for j in range(i + 1, data.p + 1):
                if abs(est.A_hat[i - 1, j - 1]) > half:
                    edges.add((i, j))
    elif model_kind == "pairwise":
        k = t_or_k if t_or_k is not None else data.k
        est = learn_pairwise(data, k, lam, 0.0, seed=seed, non_private=True, T_override=fit_iters)
        for i in range(1, data.p + 1):
            for j in range(i + 1, data.p + 1):
                if np.max(np.abs(est.W_hat[(i, j)])) > half:
                    edges.add((i, j))
    elif model_kind == "mrf":
        if t_or_k is None:
            raise ValueError("mrf base needs the interaction order t")
        est = learn_mrf_l1(data, t_or_k, lam, 0.0, seed=seed, non_private=True, T_override=fit_iters)
        for mono, coef in est.u.terms.items():
            if abs(coef) > half and len(mono) >= 2:
                for a in range(len(mono)):
                    for b in range(a + 1, len(mono)):
                        edges.add((mono[a], mono[b]))
    else:
        raise ValueError(f"unknown model kind {model_kind!r}")
    return GraphEstimate(data.p, frozenset(edges))


# -- private wrapper -------------------------------------------------------


def mode_margin(counts) -> tuple[str, float]:
    """Modal encoding (lexicographic tie-break) and d = (c1 - c2)/2."""
    counter = Counter(counts)
    top = max(counter.values())
    mode = min(enc for enc, c in counter.items() if c == top)
    second = max((c for enc, c in counter.items() if enc != mode), default=0)
    return mode, (top - second) / 2.0


def stable_mode_structure(
    data: Dataset,
    base: Callable[[Dataset], GraphEstimate],
    cfg: StabilityConfig,
    seed: int = 0,
    noise_disabled: bool = False,
) -> GraphEstimate:
    """Run the base per contiguous block and release the mode past the noisy
    distance-to-instability threshold, else bottom."""
    k = cfg.effective_blocks()
    if data.n < k:
        raise InsufficientDataError(f"{data.n} rows < {k} blocks")
    size = data.n // k
    outputs = {}
    encodings = []
    for b in range(k):
        block = Dataset(data.p, data.k, data.rows[b * size : (b + 1) * size])
        est = base(block)
        outputs[est.encoding()] = est
        encodings.append(est.encoding())
    mode, d = mode_margin(encodings)
    noise = 0.0 if noise_disabled else laplace_noise(
        1.0 / cfg.eps, stream(seed, "stability-release")
    )
    if d + noise > cfg.release_threshold():
        return outputs[mode]
    return bottom(data.p)
