"""Privacy calculus: DP variant conversions, a zCDP spend ledger, and the
Laplace noise primitive.

All iterative algorithms in this package budget natively in rho-zCDP; the
(eps, delta) structure-learning path keeps its own accounting and does not
route through rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

SPEND_SLACK = 1e-12


class BudgetExceededError(RuntimeError):
    """A spend would overdraw the accountant's total budget."""


@dataclass(frozen=True)
class PrivacyBudget:
    """One of pure(eps), zcdp(rho), approx(eps, delta)."""

    kind: str
    eps: float = 0.0
    rho: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("pure", "zcdp", "approx"):
            raise ValueError(f"unknown budget kind {self.kind!r}")
        if self.eps < 0 or self.rho < 0 or not (0 <= self.delta < 1):
            raise ValueError("budget parameters out of range")


def pure_to_zcdp(eps: float) -> float:
    """(eps, 0)-DP implies eps^2/2-zCDP."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return eps * eps / 2.0


def zcdp_to_approx(rho: float, delta: float) -> float:
    """rho-zCDP implies (rho + 2*sqrt(rho*log(1/delta)), delta)-DP."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    if not (0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    return rho + 2.0 * math.sqrt(rho * math.log(1.0 / delta))


@dataclass
class Accountant:
    """zCDP composition ledger: spends are additive and must not overdraw."""

    total: float
    ledger: List[Tuple[str, float]] = field(default_factory=list)

    @property
    def spent(self) -> float:
        return math.fsum(r for _, r in self.ledger)

    @property
    def remaining(self) -> float:
        return self.total - self.spent

    def spend(self, label: str, rho: float) -> None:
        if rho < 0:
            raise ValueError("cannot spend a negative budget")
        if self.remaining < rho - SPEND_SLACK:
            raise BudgetExceededError(
                f"spend {rho} for {label!r} exceeds remaining budget {self.remaining}"
            )
        self.ledger.append((label, float(rho)))

    def ledger_csv(self) -> str:
        lines = ["label,rho"]
        lines += [f"{label},{rho!r}" for label, rho in self.ledger]
        return "\n".join(lines) + "\n"


def laplace_noise(scale: float, rng: np.random.Generator, size=None):
    """Mean-zero Laplace via inverse CDF; scale 0 is the exact no-noise mode."""
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    if scale == 0:
        return 0.0 if size is None else np.zeros(size)
    u = rng.random(size) - 0.5
    draw = -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))
    return float(draw) if size is None else draw


def frank_wolfe_noise_scale(L1: float, C1: float, T: int, n: int, rho: float) -> float:
    """Per-iteration Laplace scale L1*|C|_1*sqrt(T) / (n*sqrt(rho))."""
    if rho <= 0:
        raise ValueError("rho must be positive for a noise scale")
    return L1 * C1 * math.sqrt(T) / (n * math.sqrt(rho))
