"""Mixing diagnostics: displacement series, autocovariance, class spread.

The walk's signed displacement ``delta_i = popcount(C_{i-1}) -
popcount(C_i)`` is zero on rejected steps and is the default observable
for autocorrelation.  Its cumulative sum telescopes to ``popcount(C_0) -
popcount(C_i)``, a one-dimensional projection of the chain that
mean-reverts once the chain reaches equilibrium; reports can be computed
on that trajectory instead by selecting the "trajectory" observable.

Autocovariance uses the biased 1/s normalization

    gamma_k = (1/s) * sum_{i=1..s-k} (x_i - mean)(x_{i+k} - mean)

and the cutoff pairs adjacent lags, ``Gamma_k = gamma_{2k} +
gamma_{2k+1}``, reporting the first nonpositive pair: ``cutoff_lag =
2*k'`` at the first ``Gamma_{k'} <= 0``, censored if no pair within range
is nonpositive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

__all__ = [
    "DEFAULT_OBSERVABLE",
    "OBSERVABLES",
    "DisplacementSeries",
    "AutocorrReport",
    "displacement_series",
    "autocovariance",
    "gcm_cutoff",
    "autocorr_report",
    "unique_states_curve",
    "multiplicity_residuals",
]

OBSERVABLES = ("delta", "trajectory")
DEFAULT_OBSERVABLE = "delta"


@dataclass(frozen=True, eq=False)
class DisplacementSeries:
    """Per-step displacements and their cumulative-sum trajectory."""

    deltas: np.ndarray
    trajectory: np.ndarray

    def observable(self, name: str) -> np.ndarray:
        if name not in OBSERVABLES:
            raise ValueError(f"unknown observable {name!r}, expected one of {OBSERVABLES}")
        return self.deltas if name == "delta" else self.trajectory

    def __len__(self) -> int:
        return len(self.deltas)


def displacement_series(transitions) -> DisplacementSeries:
    """Build the series from transitions (or raw displacement integers)."""
    values = [
        t.displacement if hasattr(t, "displacement") else int(t) for t in transitions
    ]
    if not values:
        raise ValueError("empty transition sequence")
    deltas = np.asarray(values, dtype=np.int64)
    return DisplacementSeries(deltas=deltas, trajectory=np.cumsum(deltas))


def autocovariance(values, k_max: int | None = None) -> np.ndarray:
    """gamma_0..gamma_k_max with 1/s normalization (defaults: min(s//4, 512))."""
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a one-dimensional series")
    s = len(x)
    if k_max is None:
        k_max = min(s // 4, 512)
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if s <= k_max:
        raise ValueError(f"series of length {s} too short for k_max={k_max}")
    centered = x - x.mean()
    gammas = np.empty(k_max + 1, dtype=np.float64)
    for k in range(k_max + 1):
        gammas[k] = np.dot(centered[: s - k], centered[k:]) / s
    return gammas


@dataclass(frozen=True, eq=False)
class CutoffResult:
    pairs: np.ndarray
    cutoff_lag: int | None
    censored: bool


def gcm_cutoff(gammas) -> CutoffResult:
    """Pair adjacent autocovariances and locate the first nonpositive pair."""
    g = np.asarray(gammas, dtype=np.float64)
    if len(g) < 2:
        raise ValueError("need at least two autocovariances to form a pair")
    pair_count = len(g) // 2
    pairs = g[: 2 * pair_count : 2] + g[1 : 2 * pair_count : 2]
    nonpos = np.nonzero(pairs <= 0.0)[0]
    if len(nonpos) == 0:
        return CutoffResult(pairs=pairs, cutoff_lag=None, censored=True)
    return CutoffResult(pairs=pairs, cutoff_lag=2 * int(nonpos[0]), censored=False)


@dataclass(frozen=True, eq=False)
class AutocorrReport:
    """Autocorrelation summary of one observable of a walk run."""

    observable: str
    mean: float
    gamma: np.ndarray
    gamma_pairs: np.ndarray
    cutoff_lag: int | None
    censored: bool


def autocorr_report(
    series: DisplacementSeries,
    observable: str = DEFAULT_OBSERVABLE,
    k_max: int | None = None,
) -> AutocorrReport:
    values = series.observable(observable)
    gammas = autocovariance(values, k_max=k_max)
    cut = gcm_cutoff(gammas)
    return AutocorrReport(
        observable=observable,
        mean=float(np.mean(values)),
        gamma=gammas,
        gamma_pairs=cut.pairs,
        cutoff_lag=cut.cutoff_lag,
        censored=cut.censored,
    )


def unique_states_curve(keys: Iterable[Hashable], checkpoints: Sequence[int]) -> tuple[int, ...]:
    """Distinct-key counts after each checkpoint's worth of the stream."""
    points = [int(k) for k in checkpoints]
    if not points:
        raise ValueError("need at least one checkpoint")
    if points[0] < 1 or any(b <= a for a, b in zip(points, points[1:])):
        raise ValueError("checkpoints must be strictly increasing and positive")
    seen: set[Hashable] = set()
    counts: list[int] = []
    target = iter(points)
    nxt = next(target)
    consumed = 0
    for key in keys:
        seen.add(key)
        consumed += 1
        while nxt is not None and consumed == nxt:
            counts.append(len(seen))
            nxt = next(target, None)
    if len(counts) != len(points):
        raise ValueError("stream shorter than the last checkpoint")
    return tuple(counts)


def multiplicity_residuals(counts: Sequence[int]) -> np.ndarray:
    """Signed residuals (count - mean) / total over observed classes.

    The residuals sum to zero; their spread (max - min) measures how far
    the empirical class multiplicities sit from a flat profile.
    """
    c = np.asarray([int(v) for v in counts], dtype=np.float64)
    if len(c) == 0:
        raise ValueError("no classes")
    if np.any(c < 0):
        raise ValueError("counts must be nonnegative")
    total = c.sum()
    if total <= 0:
        raise ValueError("empty sample")
    return (c - c.mean()) / total
