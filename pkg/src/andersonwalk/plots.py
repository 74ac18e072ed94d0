"""Figure rendering for the CLI report paths.

Each helper writes a PNG next to the delimited output and returns the
path.  Uses the Agg backend so runs work headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_ids",
    "plot_tail",
    "plot_ratio_grid",
    "plot_lyapunov_samples",
]


def plot_ids(est, bounds, path):
    """log-log mu_hat vs width, with error bars and the ceiling curve."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(est.lambda_grid, est.mu_hat, yerr=3 * est.stderr,
                fmt="o-", ms=3, lw=1, capsize=2, label="mu_hat (3 SE)")
    if bounds is not None:
        ax.plot(est.lambda_grid, bounds, "k--", lw=1, label="bound")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("interval width")
    ax.set_ylabel("E N_n / n")
    ax.set_title(f"IDS window mass, lambda0={est.lambda0:g}, n={est.n}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_tail(table, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(table.b_grid, table.p_hat, yerr=3 * table.stderr,
                fmt="o-", ms=3, lw=1, capsize=2, label="empirical (3 SE)")
    ax.plot(table.b_grid, table.bound, "k--", lw=1, label="2 exp(-B (1-...))")
    ax.set_yscale("log")
    ax.set_xlabel("backtrack size B")
    ax.set_ylabel("P(max backtrack >= B)")
    ax.set_title(f"backtrack tail, {table.reps} runs of n={table.n}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_ratio_grid(alphas, ratios, e_neg_kappa, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(alphas, ratios - e_neg_kappa, lw=1)
    ax.axhline(0.0, color="k", ls="--", lw=1)
    ax.set_xlabel("anchor phase angle")
    ax.set_ylabel("one-step ratio - exp(-kappa)")
    ax.set_title("conditional expectation margin (must stay <= 0)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_lyapunov_samples(est, prediction, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(est.samples, bins=max(10, len(est.samples) // 20), alpha=0.7)
    ax.axvline(est.gamma_hat, color="C1", lw=2, label="gamma_hat")
    if prediction is not None:
        ax.axvline(prediction, color="k", ls="--", lw=1,
                   label="sigma^2/(8 sin^2 theta)")
    ax.set_xlabel("(1/n) log ||W_n e_1||")
    ax.set_ylabel("count")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
