"""Parity query release: exact empirical tables and a private multiplicative
weights mechanism maintaining a dense synthetic distribution over {-1,+1}^p.

Each round splits its epsilon evenly between noisy-max selection and a noisy
answer, then nudges the synthetic distribution toward the answer.  The
released values are parity expectations under the final synthetic table, so
they are jointly realizable by construction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from ._rng import stream
from .oracle import StateSpaceTooLargeError, enumerate_states, state_cap
from .polynomial import Monomial
from .privacy import Accountant, laplace_noise
from .sampler import Dataset

LEARNING_RATE_CAP = 0.25


@dataclass
class ParityTable:
    """Map from index sets of size <= t (including the empty set) to values
    in [-1, 1]; the empty set always answers 1."""

    t: int
    entries: Dict[Monomial, float]

    def __post_init__(self):
        self.entries = dict(self.entries)
        self.entries[()] = 1.0

    def value(self, mono) -> float:
        key = tuple(sorted(mono))
        if key not in self.entries:
            raise KeyError(f"no parity entry for {key}")
        return self.entries[key]

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "entries": [
                {"vars": list(m), "value": v}
                for m, v in sorted(self.entries.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ParityTable":
        return cls(obj["t"], {tuple(e["vars"]): e["value"] for e in obj["entries"]})


@dataclass
class PMWRelease:
    table: ParityTable
    history: List[float] = field(default_factory=list)  # max |error| after each round
    per_round_charges: List[float] = field(default_factory=list)
    rounds: int = 0


def parity_queries(p: int, t: int) -> List[Monomial]:
    """All nonempty index sets of size <= t, by size then lexicographic."""
    out: List[Monomial] = []
    for size in range(1, t + 1):
        out.extend(itertools.combinations(range(1, p + 1), size))
    return out


def empirical_parities(data: Dataset, t: int) -> ParityTable:
    """Exact empirical means of all parities of order <= t."""
    if data.k != 2:
        raise ValueError("parities require binary data")
    if data.n == 0:
        raise ValueError("empty dataset")
    if not set(np.unique(data.rows)) <= {-1, 1}:
        raise ValueError("parities require the -1/+1 convention")
    rows = data.rows.astype(float)
    entries = {
        q: float(np.mean(np.prod(rows[:, [i - 1 for i in q]], axis=1)))
        for q in parity_queries(data.p, t)
    }
    return ParityTable(t, entries)


def default_rounds(n_queries: int, n: int) -> int:
    return min(n_queries, math.ceil(math.sqrt(n)))


def pmw_release(
    data: Dataset,
    t: int,
    rho: float,
    accountant: Accountant | None = None,
    rounds: int | None = None,
    seed: int = 0,
    non_private: bool = False,
    cap: int | None = None,
) -> PMWRelease:
    """Release private estimates of all parities of order <= t.

    In the zero-noise test mode the round update pins the selected parity
    exactly (parities are orthogonal, so prior corrections are untouched) and
    selection skips already-corrected queries; with rounds >= #queries the
    empirical table is recovered exactly.
    """
    if data.k != 2:
        raise ValueError("parity release requires binary data")
    p, n2 = data.p, data.n
    cap = state_cap() if cap is None else cap
    if 2**p > cap:
        raise StateSpaceTooLargeError(f"2^{p} states exceed cap {cap}")
    queries = parity_queries(p, t)
    rounds = default_rounds(len(queries), n2) if rounds is None else rounds
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if not non_private:
        if accountant is None:
            raise ValueError("private release requires an accountant")
        accountant.spend("pmw-release", rho)
    eps0 = math.sqrt(rho / rounds) if rho > 0 else 0.0
    sel_scale = 8.0 / (n2 * eps0) if not non_private else 0.0
    ans_scale = 4.0 / (n2 * eps0) if not non_private else 0.0

    truth = empirical_parities(data, t)
    states = enumerate_states(p, 2).astype(float)
    chi = np.column_stack([np.prod(states[:, [i - 1 for i in q]], axis=1) for q in queries])
    target = np.array([truth.value(q) for q in queries])
    dist = np.full(2**p, 1.0 / 2**p)

    rng = stream(seed, "pmw")
    answered: set[int] = set()
    history: List[float] = []
    charges: List[float] = []
    for _ in range(rounds):
        synth = chi.T @ dist
        errors = target - synth
        if non_private:
            pool = [q for q in range(len(queries)) if q not in answered] or list(range(len(queries)))
            q_sel = pool[int(np.argmax(np.abs(errors[pool])))]
            answer = target[q_sel]
        else:
            scores = np.abs(errors) + laplace_noise(sel_scale, rng, size=len(queries))
            q_sel = int(np.argmax(scores))
            answer = float(np.clip(target[q_sel] + laplace_noise(ans_scale, rng), -1.0, 1.0))
        charges.extend([eps0**2 / 2.0, eps0**2 / 2.0])
        gap = answer - synth[q_sel]
        if non_private:
            # orthogonal additive correction: pins this parity, leaves others
            dist = dist + gap * chi[:, q_sel] / 2**p
            answered.add(q_sel)
        else:
            eta = min(LEARNING_RATE_CAP, LEARNING_RATE_CAP * abs(gap))
            dist = dist * np.exp(eta * np.sign(gap) * chi[:, q_sel])
            dist /= dist.sum()
        history.append(float(np.max(np.abs(target - chi.T @ dist))))

    released = chi.T @ dist
    entries = {q: float(np.clip(released[c], -1.0, 1.0)) for c, q in enumerate(queries)}
    return PMWRelease(ParityTable(t, entries), history, charges, rounds)
