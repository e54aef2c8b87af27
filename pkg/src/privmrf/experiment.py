"""Experiment harness: seeded sweeps over (n, trial) grids with per-trial
results, summary tables, and plot-ready curves.

All randomness flows from the spec's master seed; per-trial seeds are derived
by stable hashing of (n, trial index), so reordering the grid does not change
any individual trial.  The results CSV carries only deterministic columns so
a replay reproduces it byte for byte; wall times live in the summary only.
"""

from __future__ import annotations

import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ._rng import trial_seed
from .learners import learn_ising, learn_mrf_l1, learn_mrf_linf, learn_pairwise
from .models import (
    BinaryMRF,
    IsingModel,
    PairwiseModel,
    matched_pairs_edges,
    matched_pairs_ising,
    model_from_json,
)
from .privacy import Accountant
from .sampler import exact_sample, gibbs_sample
from .structure import StabilityConfig, base_structure, stable_mode_structure

RESULT_COLUMNS = [
    "n", "trial", "seed", "status", "max_entry_error",
    "exact_recovery", "bottom", "budget_spent",
]
SUMMARY_COLUMNS = ["n", "success_rate", "median_error", "bottom_rate", "mean_wall_time"]

DEFAULT_TIME_LIMIT = 300.0


@dataclass(frozen=True)
class ExperimentSpec:
    task: str  # "parameters" | "structure"
    grid: tuple
    trials: int
    lam: float
    alpha: float
    privacy: dict
    model: object  # a Model instance
    true_edges: frozenset
    eta: float = 0.0
    t: int = 2
    master_seed: int = 0
    sampler: str = "exact"
    time_limit: float = DEFAULT_TIME_LIMIT
    fit_iters: int | None = None
    blocks: int | None = None

    def __post_init__(self):
        if self.task not in ("parameters", "structure"):
            raise ValueError(f"unknown task {self.task!r}")
        if self.trials < 1 or not self.grid:
            raise ValueError("need trials >= 1 and a nonempty grid")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")


@dataclass
class TrialResult:
    n: int
    trial: int
    seed: int
    status: str = "ok"
    max_entry_error: float | None = None
    exact_recovery: bool | None = None
    bottom: bool = False
    wall_time: float = 0.0
    budget_spent: float = 0.0
    success: bool = False


def spec_from_json(obj: dict) -> ExperimentSpec:
    if "fixture" in obj:
        fx = obj["fixture"]
        if fx["name"] != "matched_pairs":
            raise ValueError(f"unknown fixture {fx['name']!r}")
        model = matched_pairs_ising(fx["p"], fx["eta"])
        edges = frozenset(matched_pairs_edges(fx["p"]))
    else:
        model = model_from_json(obj["model"])
        edges = frozenset(_model_edges(model))
    return ExperimentSpec(
        task=obj["task"],
        grid=tuple(int(n) for n in obj["grid"]),
        trials=int(obj["trials"]),
        lam=float(obj["lambda"]),
        alpha=float(obj.get("alpha", 0.1)),
        privacy=obj.get("privacy", {"kind": "none"}),
        model=model,
        true_edges=edges,
        eta=float(obj.get("eta", 0.0)),
        t=int(obj.get("t", 2)),
        master_seed=int(obj.get("master_seed", 0)),
        sampler=obj.get("sampler", "exact"),
        time_limit=float(obj.get("time_limit", DEFAULT_TIME_LIMIT)),
        fit_iters=obj.get("fit_iters"),
        blocks=obj.get("blocks"),
    )


def _model_edges(model) -> set:
    if isinstance(model, IsingModel):
        return {
            (i + 1, j + 1)
            for i in range(model.p)
            for j in range(i + 1, model.p)
            if model.A[i, j] != 0
        }
    if isinstance(model, PairwiseModel):
        return {(i, j) for (i, j), mat in model.W.items() if np.any(mat != 0)}
    edges = set()
    for mono in model.h.terms:
        for a in range(len(mono)):
            for b in range(a + 1, len(mono)):
                edges.add((mono[a], mono[b]))
    return edges


def _max_param_error(spec: ExperimentSpec, estimate) -> float:
    model = spec.model
    if isinstance(model, IsingModel):
        return float(np.max(np.abs(model.A - estimate.A_hat)))
    if isinstance(model, PairwiseModel):
        worst = 0.0
        for (i, j), mat in estimate.W_hat.items():
            worst = max(worst, float(np.max(np.abs(model.weight(i, j) - mat))))
        return worst
    monos = set(model.h.terms) | set(estimate.u.terms)
    return max(
        (abs(model.h.coefficient(m) - estimate.u.coefficient(m)) for m in monos),
        default=0.0,
    )


def _run_trial(spec: ExperimentSpec, n: int, trial: int) -> TrialResult:
    seed = trial_seed(spec.master_seed, n, trial)
    result = TrialResult(n=n, trial=trial, seed=seed)
    start = time.perf_counter()
    try:
        if spec.sampler == "gibbs":
            data = gibbs_sample(spec.model, n, seed)
        else:
            data = exact_sample(spec.model, n, seed)
        if spec.task == "parameters":
            kind = spec.privacy.get("kind", "none")
            rho = float(spec.privacy.get("rho", 0.0)) if kind == "zcdp" else 0.0
            acct = Accountant(rho) if kind == "zcdp" else None
            non_private = kind != "zcdp"
            model = spec.model
            if isinstance(model, IsingModel):
                est = learn_ising(data, spec.lam, rho, acct, seed=seed,
                                  non_private=non_private, T_override=spec.fit_iters)
            elif isinstance(model, PairwiseModel):
                est = learn_pairwise(data, model.k, spec.lam, rho, acct, seed=seed,
                                     non_private=non_private, T_override=spec.fit_iters)
            else:
                est = learn_mrf_l1(data, spec.t, spec.lam, rho, acct, seed=seed,
                                   non_private=non_private, T_override=spec.fit_iters)
            result.max_entry_error = _max_param_error(spec, est)
            result.success = result.max_entry_error <= spec.alpha
            result.budget_spent = acct.spent if acct else 0.0
            if acct is not None and acct.spent > acct.total + 1e-9:
                raise RuntimeError("budget leak")
        else:
            kind = spec.privacy.get("kind", "none")
            model = spec.model
            model_kind = (
                "ising" if isinstance(model, IsingModel)
                else "pairwise" if isinstance(model, PairwiseModel)
                else "mrf"
            )
            t_or_k = model.k if model_kind == "pairwise" else spec.t
            base = lambda block: base_structure(
                block, model_kind, spec.lam, spec.eta, t_or_k,
                seed=seed, fit_iters=spec.fit_iters or 200,
            )
            if kind == "approx":
                cfg = StabilityConfig(
                    eps=float(spec.privacy["eps"]),
                    delta=float(spec.privacy["delta"]),
                    blocks=spec.blocks,
                )
                graph = stable_mode_structure(data, base, cfg, seed=seed)
            else:
                graph = base(data)
            result.bottom = not graph.released
            result.exact_recovery = graph.released and graph.edges == spec.true_edges
            result.success = bool(result.exact_recovery)
    except Exception as exc:  # per-trial failures are recorded, not fatal
        result.status = "error"
        result.success = False
        result.max_entry_error = None
    result.wall_time = time.perf_counter() - start
    if result.status == "ok" and result.wall_time > spec.time_limit:
        result.status = "timeout"
        result.success = False
    return result


def run_experiment(spec: ExperimentSpec) -> List[TrialResult]:
    results = [
        _run_trial(spec, n, trial)
        for n in spec.grid
        for trial in range(spec.trials)
    ]
    results.sort(key=lambda r: (r.n, r.trial))
    return results


def results_csv(results: List[TrialResult]) -> str:
    """Deterministic per-trial table (wall times are excluded on purpose)."""
    buf = io.StringIO()
    buf.write(",".join(RESULT_COLUMNS) + "\n")
    for r in results:
        err = "" if r.max_entry_error is None else repr(float(r.max_entry_error))
        rec = "" if r.exact_recovery is None else int(r.exact_recovery)
        buf.write(
            f"{r.n},{r.trial},{r.seed},{r.status},{err},{rec},"
            f"{int(r.bottom)},{repr(float(r.budget_spent))}\n"
        )
    return buf.getvalue()


def summarize(results: List[TrialResult]) -> tuple[str, list]:
    """Per-n summary rows and their CSV rendering."""
    rows = []
    for n in sorted({r.n for r in results}):
        group = [r for r in results if r.n == n]
        errors = [r.max_entry_error for r in group if r.max_entry_error is not None]
        rows.append({
            "n": n,
            "success_rate": sum(r.success for r in group) / len(group),
            "median_error": float(np.median(errors)) if errors else math.nan,
            "bottom_rate": sum(r.bottom for r in group) / len(group),
            "mean_wall_time": float(np.mean([r.wall_time for r in group])),
        })
    buf = io.StringIO()
    buf.write(",".join(SUMMARY_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(repr(float(row[c])) if c != "n" else str(row[c]) for c in SUMMARY_COLUMNS) + "\n")
    return buf.getvalue(), rows


def plot_data(rows: list) -> str:
    """Per-curve (n, success_rate) pairs for external plotting."""
    lines = ["n,success_rate"]
    lines += [f"{row['n']},{repr(float(row['success_rate']))}" for row in rows]
    return "\n".join(lines) + "\n"
