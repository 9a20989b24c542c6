"""Matplotlib renderings of the report outputs, written next to the data.

All functions take an output path, render to it with the Agg backend, and
return the path. Matplotlib is imported lazily so data-only runs never pay
for it.
"""

from __future__ import annotations

__all__ = [
    "save_trajectory",
    "save_autocorr",
    "save_residuals",
    "save_unique_curves",
]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_trajectory(path, series):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(series.trajectory, lw=0.8)
    ax.set_xlabel("step")
    ax.set_ylabel("cumulative displacement")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_autocorr(path, report):
    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.2))
    axes[0].plot(report.gamma, lw=0.9)
    axes[0].axhline(0.0, color="k", lw=0.6)
    axes[0].set_xlabel("lag k")
    axes[0].set_ylabel("autocovariance")
    axes[0].set_title(f"observable: {report.observable}")
    axes[1].plot(range(0, 2 * len(report.gamma_pairs), 2), report.gamma_pairs, lw=0.9)
    axes[1].axhline(0.0, color="k", lw=0.6)
    if report.cutoff_lag is not None:
        axes[1].axvline(report.cutoff_lag, color="r", lw=0.8, ls="--")
        axes[1].set_title(f"paired sums, cutoff lag {report.cutoff_lag}")
    else:
        axes[1].set_title("paired sums, censored")
    axes[1].set_xlabel("lag")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_residuals(path, residual_sets, title="class multiplicity residuals"):
    """residual_sets: mapping label -> residual sequence (first-encounter order)."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 3.2))
    for label, res in residual_sets.items():
        ax.plot(res, marker="o", ms=2.5, lw=0.7, label=label)
    ax.axhline(0.0, color="k", lw=0.6)
    ax.set_xlabel("class (first-encounter order)")
    ax.set_ylabel("(count - mean) / total")
    ax.set_title(title)
    if len(residual_sets) > 1:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_unique_curves(path, checkpoints, curves):
    """curves: mapping label -> unique-state counts aligned with checkpoints."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 3.8))
    for label, counts in curves.items():
        ax.plot(checkpoints, counts, lw=1.1, label=label)
    ax.set_xlabel("accepted transitions / samples")
    ax.set_ylabel("unique geometric states")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
