"""Exhaustive enumeration of labeled states for small vertex counts.

Two independent routes are provided on purpose: a level-by-level DFS that
only ever constructs closed states, and a brute-force filter that tests
every bitmask (n <= 4).  Their agreement is part of the test gate, so do
not fold one into the other.

State counts grow like the Dedekind numbers, so materializing results is
allowed for n <= 5 only; n = 6 is reachable as a stream behind
``allow_large=True`` and takes minutes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Sequence

from scipy import stats

from .core import LabeledComplex, build_layout, validate_closure
from .isomorphism import GeometricKey, canonical_key

__all__ = [
    "ENUMERATE_N_MAX",
    "EnumerationResult",
    "ExactDistribution",
    "UniformityReport",
    "iter_labeled",
    "enumerate_labeled",
    "brute_force_labeled",
    "exact_distribution",
    "uniformity_test",
]

ENUMERATE_N_MAX = 5


def iter_labeled(n: int, allow_large: bool = False) -> Iterator[int]:
    """Yield the bitmask of every closed labeled state, DFS order.

    Levels are filled top-down from the roots: at level ``d`` every subset
    of the *eligible* nodes (those whose faces were all chosen at level
    ``d-1``) extends the partial state, and every closed state arises from
    exactly one choice sequence, so states stream out without duplicates.
    """
    if n > ENUMERATE_N_MAX and not allow_large:
        raise ValueError(
            f"enumeration above n={ENUMERATE_N_MAX} must be requested with allow_large=True"
        )
    layout = build_layout(n)

    def rec(bits: int, d: int) -> Iterator[int]:
        if d > n:
            yield bits
            return
        eligible = []
        for i in layout.level_ranges[d - 1]:
            for f in layout.faces[i]:
                if not (bits >> f) & 1:
                    break
            else:
                eligible.append(i)
        for sub in range(1 << len(eligible)):
            nb = bits
            s = sub
            while s:
                low = s & -s
                nb |= 1 << eligible[low.bit_length() - 1]
                s ^= low
            yield from rec(nb, d + 1)

    return rec(layout.root_bits, 2)


@dataclass(frozen=True)
class EnumerationResult:
    """All labeled states for one ``n``, with class structure on demand."""

    n: int
    states: tuple[LabeledComplex, ...]

    @property
    def labeled_count(self) -> int:
        return len(self.states)

    @cached_property
    def classes(self) -> dict[GeometricKey, tuple[LabeledComplex, ...]]:
        grouped: dict[GeometricKey, list[LabeledComplex]] = {}
        for c in self.states:
            grouped.setdefault(canonical_key(c), []).append(c)
        return {k: tuple(v) for k, v in grouped.items()}

    @property
    def geometric_count(self) -> int:
        return len(self.classes)


def enumerate_labeled(n: int) -> EnumerationResult:
    """Materialize every labeled state (DFS route); n <= 5."""
    if n > ENUMERATE_N_MAX:
        raise ValueError(f"enumerate_labeled is capped at n <= {ENUMERATE_N_MAX}")
    states = tuple(LabeledComplex(n, b) for b in iter_labeled(n))
    return EnumerationResult(n=n, states=states)


def brute_force_labeled(n: int) -> EnumerationResult:
    """Independent route: test every mask over the non-root bits (n <= 4)."""
    if n > 4:
        raise ValueError("brute-force filtering is capped at n <= 4")
    layout = build_layout(n)
    free = layout.size - n
    states = []
    for pattern in range(1 << free):
        c = LabeledComplex(n, layout.root_bits | (pattern << n))
        if validate_closure(c):
            states.append(c)
    return EnumerationResult(n=n, states=tuple(states))


@dataclass(frozen=True)
class ExactDistribution:
    """Exact law of a sampler over the full labeled state space."""

    n: int
    per_state: dict[int, float]
    per_class: dict[GeometricKey, float]
    total: float


def exact_distribution(log_prob: Callable[[LabeledComplex], float], n: int) -> ExactDistribution:
    """Evaluate ``log_prob`` on every labeled state and aggregate by class.

    ``total`` is the normalization sum; for a correctly normalized sampler
    it is 1 up to roundoff.
    """
    result = enumerate_labeled(n)
    per_state: dict[int, float] = {}
    per_class: dict[GeometricKey, float] = {}
    for c in result.states:
        p = math.exp(log_prob(c))
        per_state[c.bits] = p
        key = canonical_key(c)
        per_class[key] = per_class.get(key, 0.0) + p
    return ExactDistribution(
        n=n, per_state=per_state, per_class=per_class, total=math.fsum(per_state.values())
    )


@dataclass(frozen=True)
class UniformityReport:
    statistic: float
    dof: int
    p_value: float
    residuals: tuple[float, ...]


def uniformity_test(
    multiplicities: Sequence[int], expected: Sequence[float] | None = None
) -> UniformityReport:
    """Pearson chi-square of observed class counts against a law.

    ``expected`` gives per-class probabilities (default: uniform over the
    observed classes).  Residuals are the signed Pearson residuals
    ``(obs - exp) / sqrt(exp)``.
    """
    counts = [int(m) for m in multiplicities]
    if len(counts) < 2:
        raise ValueError("need at least two classes")
    if any(m < 0 for m in counts):
        raise ValueError("multiplicities must be nonnegative")
    total = sum(counts)
    if total == 0:
        raise ValueError("empty sample")
    if expected is None:
        probs = [1.0 / len(counts)] * len(counts)
    else:
        probs = [float(p) for p in expected]
        if len(probs) != len(counts):
            raise ValueError("expected distribution length mismatch")
        if any(p <= 0 for p in probs):
            raise ValueError("expected probabilities must be positive")
        norm = math.fsum(probs)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("expected probabilities must sum to 1")
    exp_counts = [total * p for p in probs]
    statistic, p_value = stats.chisquare(counts, f_exp=exp_counts)
    residuals = tuple((o - e) / math.sqrt(e) for o, e in zip(counts, exp_counts))
    return UniformityReport(
        statistic=float(statistic),
        dof=len(counts) - 1,
        p_value=float(p_value),
        residuals=residuals,
    )
