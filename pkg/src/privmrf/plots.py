"""Report figures rendered next to the experiment CSVs.

Everything draws through the Agg backend so the harness works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_success_curve(rows: list, path) -> None:
    """Success rate against sample size, log-scaled x axis."""
    ns = [row["n"] for row in rows]
    rates = [row["success_rate"] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, rates, marker="o")
    ax.set_xscale("log")
    ax.set_ylim(-0.05, 1.05)
    ax.set_xlabel("sample size n")
    ax.set_ylabel("success rate")
    ax.set_title("Recovery success rate vs sample size")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_error_curve(rows: list, path) -> None:
    """Median max-entry error against sample size on log-log axes."""
    pts = [(row["n"], row["median_error"]) for row in rows
           if row["median_error"] == row["median_error"]]  # drop NaN
    if not pts:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([n for n, _ in pts], [e for _, e in pts], marker="s", color="tab:red")
    ax.set_xscale("log")
    if all(e > 0 for _, e in pts):
        ax.set_yscale("log")
    ax.set_xlabel("sample size n")
    ax.set_ylabel("median max-entry error")
    ax.set_title("Parameter error vs sample size")
    ax.grid(True, alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_pmw_history(history: list, path) -> None:
    """Worst remaining parity error after each release round."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(range(1, len(history) + 1), history, marker=".")
    ax.set_xlabel("round")
    ax.set_ylabel("max |target - synthetic|")
    ax.set_title("Query release convergence")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
