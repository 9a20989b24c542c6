"""Random generation of labeled states and their exact probabilities.

Two samplers over the states on ``n`` vertices:

* ``kahle_sample``: inductive growth.  Level by level, every node whose
  faces all made it in is included independently with the level's
  probability ``p_d``.  The law of a state factorizes over levels, so its
  probability is available in closed form.

* ``balanced_sample``: destructive.  Start from the complete state; at
  each level ``d`` pick a removal count ``i_d`` where the *zero* count
  absorbs the probability not assigned to positive counts, remove a
  uniformly chosen ``i_d``-subset of the still-present level-``d`` nodes,
  and prune their cofaces.  The count law at level ``d`` puts probability
  ``1/T_d`` on every positive count and ``(T_d - L_d)/T_d`` on zero, with
  ``T_d = 1 +`` (number of still-present nodes at levels >= ``d``) and
  ``L_d`` the still-present level-``d`` count.  This tilts mass toward
  sparse states that inductive growth essentially never reaches.

A key structural fact: the removal trace of a balanced run is a function
of the final state alone (``balanced_trace_of`` reconstructs it), so the
labeled probability is a product over levels with no path sum at all.

Probabilities are kept as integer level records; both float
log-probabilities and exact ``Fraction`` values derive from the same
integers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .core import (
    LabeledComplex,
    build_layout,
    validate_closure,
)
from .isomorphism import orbit_masks

__all__ = [
    "KahleParams",
    "LevelRecord",
    "ProbabilityTrace",
    "kahle_sample",
    "kahle_log_prob",
    "kahle_min_prob",
    "kahle_min_prob_exact",
    "balanced_level_prob",
    "balanced_sample",
    "balanced_trace_of",
    "balanced_log_prob_labeled",
    "balanced_prob_exact",
    "geometric_prob",
    "geometric_prob_exact",
    "balanced_min_prob_estimate",
]


@dataclass(frozen=True)
class KahleParams:
    """Per-level inclusion probabilities ``p_2 .. p_n``.

    The closed interval [0, 1] is accepted so the degenerate limits are
    exact: ``p_d = 1`` for all d yields the complete state, ``p_2 = 0``
    yields the empty state.
    """

    n: int
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        build_layout(self.n)
        if len(self.probs) != self.n - 1:
            raise ValueError(f"need {self.n - 1} probabilities p_2..p_{self.n}")
        for p in self.probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"inclusion probability {p} outside [0, 1]")

    @classmethod
    def uniform(cls, n: int, p: float) -> "KahleParams":
        return cls(n=n, probs=tuple([p] * (n - 1)))

    def p_for_level(self, d: int) -> float:
        return self.probs[d - 2]


def kahle_sample(params: KahleParams, rng: random.Random) -> LabeledComplex:
    """One inductive draw: include each eligible node with its level's p."""
    layout = build_layout(params.n)
    bits = layout.root_bits
    for d in range(2, params.n + 1):
        p = params.probs[d - 2]
        for i in layout.level_ranges[d - 1]:
            for f in layout.faces[i]:
                if not (bits >> f) & 1:
                    break
            else:
                if rng.random() < p:
                    bits |= 1 << i
    return LabeledComplex(params.n, bits)


def kahle_log_prob(c: LabeledComplex, params: KahleParams) -> float:
    """Log-probability of a closed state under the inductive law.

    Per level: every eligible node (all faces present in ``c``) is an
    independent coin, so the contribution is
    ``present * log(p) + (eligible - present) * log(1 - p)``.
    Counts are aggregated per distinct probability before multiplying so
    that power-of-two parameters give exact logs.  Returns ``-inf`` for
    states impossible under degenerate parameters.
    """
    if c.n != params.n:
        raise ValueError("state and parameters disagree on n")
    if not validate_closure(c):
        raise ValueError("state is not downward closed")
    layout = build_layout(c.n)
    bits = c.bits
    hits: dict[float, int] = {}
    misses: dict[float, int] = {}
    for d in range(2, c.n + 1):
        p = params.probs[d - 2]
        eligible = 0
        present = 0
        for i in layout.level_ranges[d - 1]:
            for f in layout.faces[i]:
                if not (bits >> f) & 1:
                    break
            else:
                eligible += 1
                present += (bits >> i) & 1
        if present:
            hits[p] = hits.get(p, 0) + present
        if eligible - present:
            misses[p] = misses.get(p, 0) + (eligible - present)
    total = 0.0
    for p, k in hits.items():
        if p == 0.0:
            return -math.inf
        total += k * math.log(p)
    for p, k in misses.items():
        if p == 1.0:
            return -math.inf
        total += k * math.log1p(-p)
    return total


def _min_prob_exponent(n: int) -> int:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return (1 << n) - n - 1


def kahle_min_prob(n: int) -> float:
    """The least likely labeled state at p = 1/2: ``(1/2)**(2**n - n - 1)``.

    Every state's probability at p = 1/2 is ``(1/2)**(eligible coins)``,
    and the eligible count is largest (all ``2**n - n - 1`` non-root
    nodes) for the complete state, so this is the floor of the law.  A
    closed form in ``n`` alone, not capped by the mask layout; underflows
    to 0.0 around n = 11, where :func:`kahle_min_prob_exact` still works.
    """
    return 0.5 ** _min_prob_exponent(n)


def kahle_min_prob_exact(n: int) -> Fraction:
    return Fraction(1, 1 << _min_prob_exponent(n))


@dataclass(frozen=True)
class LevelRecord:
    """One level of a destructive run, as integers.

    ``total_remaining`` is ``T_d`` (1 + still-present nodes at levels
    >= d when the level was processed), ``available`` is the still-present
    level-``d`` count ``L_d``, ``removed`` is the drawn count ``i_d``.
    """

    level: int
    available: int
    removed: int
    total_remaining: int

    def __post_init__(self) -> None:
        if not 0 <= self.removed <= self.available:
            raise ValueError("removed count outside [0, available]")
        if self.total_remaining < 1 + self.available:
            raise ValueError("total_remaining must cover the level itself plus one")

    @property
    def p_move(self) -> float:
        """Probability of each positive removal count at this level."""
        return 1.0 / self.total_remaining

    @property
    def p_zero(self) -> float:
        """Probability of removing nothing at this level."""
        return (self.total_remaining - self.available) / self.total_remaining

    @property
    def selection_count(self) -> int:
        """Number of equally likely ``removed``-subsets of the available nodes."""
        return math.comb(self.available, self.removed)


def balanced_level_prob(remaining_total: int, remaining_level: int) -> tuple[float, float]:
    """(probability of each positive count, probability of count zero).

    ``remaining_total`` is ``T_d``, ``remaining_level`` is ``L_d``; the
    positive counts ``1..L_d`` get ``1/T_d`` each and zero absorbs the
    rest, so an isolated level (``T=2, L=1``) splits 1/2 vs 1/2 and a
    fully exhausted level (``L=0``) keeps probability 1 on zero.
    """
    if remaining_level < 0:
        raise ValueError("remaining_level must be nonnegative")
    if remaining_total < 1 + remaining_level:
        raise ValueError("remaining_total must be at least remaining_level + 1")
    p_move = 1.0 / remaining_total
    p_zero = (remaining_total - remaining_level) / remaining_total
    return p_move, p_zero


@dataclass(frozen=True)
class ProbabilityTrace:
    """Removal trace of a destructive run: one record per level 2..n."""

    n: int
    records: tuple[LevelRecord, ...]

    def log_prob(self) -> float:
        """Log-probability of the run (equivalently, of its final state)."""
        total = 0.0
        for r in self.records:
            if r.removed == 0:
                total += math.log(r.total_remaining - r.available) - math.log(
                    r.total_remaining
                )
            else:
                total -= math.log(r.total_remaining) + math.log(r.selection_count)
        return total

    def prob_exact(self) -> Fraction:
        """Exact rational probability of the run."""
        out = Fraction(1)
        for r in self.records:
            if r.removed == 0:
                out *= Fraction(r.total_remaining - r.available, r.total_remaining)
            else:
                out *= Fraction(1, r.total_remaining * r.selection_count)
        return out


def balanced_sample(n: int, rng: random.Random) -> tuple[LabeledComplex, ProbabilityTrace]:
    """One destructive draw from the complete state, with its trace."""
    layout = build_layout(n)
    bits = layout.full_bits
    records = []
    for d in range(2, n + 1):
        total = 1 + (bits & layout.suffix_bits[d - 1]).bit_count()
        present = [i for i in layout.level_ranges[d - 1] if (bits >> i) & 1]
        level = len(present)
        # Integer categorical draw: slots 0..total-level-1 mean "remove
        # nothing", the rest map to counts 1..level with mass 1/total each.
        slot = rng.randrange(total)
        removed = max(0, slot - (total - level) + 1)
        if removed:
            for idx in rng.sample(present, removed):
                bits &= ~layout.clear_mask(idx)
        records.append(
            LevelRecord(level=d, available=level, removed=removed, total_remaining=total)
        )
    return LabeledComplex(n, bits), ProbabilityTrace(n=n, records=tuple(records))


def balanced_trace_of(c: LabeledComplex) -> ProbabilityTrace:
    """Reconstruct the unique destructive trace that produces ``c``.

    Replays the run against ``c``: the nodes removed *directly* at level
    ``d`` are exactly the level-``d`` nodes absent from ``c`` whose faces
    are all present in ``c`` (anything else absent at that level fell to
    an earlier prune).  Raises if ``c`` is not closed.
    """
    if not validate_closure(c):
        raise ValueError("state is not downward closed")
    layout = build_layout(c.n)
    target = c.bits
    bits = layout.full_bits
    records = []
    for d in range(2, c.n + 1):
        total = 1 + (bits & layout.suffix_bits[d - 1]).bit_count()
        level = (bits & layout.level_bits[d - 1]).bit_count()
        direct = []
        for i in layout.level_ranges[d - 1]:
            if (target >> i) & 1:
                continue
            for f in layout.faces[i]:
                if not (target >> f) & 1:
                    break
            else:
                direct.append(i)
        for idx in direct:
            bits &= ~layout.clear_mask(idx)
        records.append(
            LevelRecord(level=d, available=level, removed=len(direct), total_remaining=total)
        )
    assert bits == target, "trace replay must land on the input state"
    return ProbabilityTrace(n=c.n, records=tuple(records))


def balanced_log_prob_labeled(c: LabeledComplex) -> float:
    """Log-probability of a labeled state under the destructive law."""
    return balanced_trace_of(c).log_prob()


def balanced_prob_exact(c: LabeledComplex) -> Fraction:
    """Exact rational probability of a labeled state under the destructive law."""
    return balanced_trace_of(c).prob_exact()


def geometric_prob(c: LabeledComplex) -> float:
    """Probability of the geometric class of ``c`` under the destructive law.

    Literal sum of the labeled probabilities over the orbit.  The law is
    relabeling-invariant, so this equals orbit size times the labeled
    probability; summing explicitly keeps the check honest.
    """
    return math.fsum(
        math.exp(balanced_log_prob_labeled(LabeledComplex(c.n, b))) for b in orbit_masks(c)
    )


def geometric_prob_exact(c: LabeledComplex) -> Fraction:
    total = Fraction(0)
    for b in orbit_masks(c):
        total += balanced_prob_exact(LabeledComplex(c.n, b))
    return total


def _half_up(x: int) -> int:
    """x/2 for even x, (x+1)/2 for odd x."""
    return (x + 1) // 2


def balanced_min_prob_estimate(n: int) -> float:
    """Heuristic scale of the least likely destructive-draw probability.

    Product over levels d = 2 .. _half_up(n) of

        (1 + sum_{k=d..n} C(n,k)) / C(C(n,d), _half_up(C(n,d)))

    evaluated in log space.  This is a coarse order-of-magnitude estimate,
    not a probability: for small n it exceeds 1 (n=3 gives 5/3).  Its use
    is comparison against the inductive benchmark ``kahle_min_prob``,
    against which it is larger and grows without bound.
    """
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    log_total = 0.0
    for d in range(2, _half_up(n) + 1):
        tail = 1 + sum(math.comb(n, k) for k in range(d, n + 1))
        level_size = math.comb(n, d)
        log_total += math.log(tail) - math.log(math.comb(level_size, _half_up(level_size)))
    return math.exp(log_total)
