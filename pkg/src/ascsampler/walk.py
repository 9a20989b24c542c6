"""Local Metropolis random walk over closed states, plus a mixture kernel.

One local proposal: flip a fair direction coin (add vs. remove), draw a
distance ``delta`` from the truncated exponential law with weights
proportional to ``exp(-delta / n_star)`` over ``1..n_star`` (``n_star =
2**n - 1 - n`` is the non-root node count), then flip a uniformly chosen
``delta``-subset of the unconstrained pool in that direction.  A draw
whose ``delta`` exceeds the pool is discarded and *both* the direction
and the distance are drawn again; such internal resamples are not chain
steps.  The realized proposal law is therefore conditioned on
admissibility, with state-dependent mass

    Z(x) = (W(|addable(x)|) + W(|removable(x)|)) / 2,

where ``W(m)`` is the total weight of distances ``1..m``.

Acceptance targets the uniform law over labeled states:

    ratio = [C(|U_F|, delta) / C(|U_B|, delta)] * [Z(current) / Z(candidate)]

with ``U_F`` the forward pool and ``U_B`` the pool of the reverse move in
the candidate.  The ``Z`` factor corrects for the admissibility
truncation; without it the chain is not reversible with respect to the
uniform law, because states near the boundary of the state space condition
away more of the proposal mass.  The factor appears in every transition
record and trace row via the ``ratio`` field.

Flipping a whole subset at once is sound: removable nodes have no present
cofaces and their faces live one level down, so removing several at once
never strands a subset, and symmetrically for additions.  After a removal
every removed node is addable in the result, and vice versa, which is what
makes the reverse-move pool counts above well defined.
"""

from __future__ import annotations

import bisect
import itertools
import math
import random
from dataclasses import dataclass
from functools import cached_property

from .core import LabeledComplex, build_layout, unconstrained_sets, validate_closure
from .samplers import balanced_log_prob_labeled, balanced_sample

__all__ = [
    "WalkConfig",
    "Proposal",
    "WalkTransition",
    "propose",
    "metropolis_step",
    "mixture_step",
    "central_start",
    "corner_start",
]


@dataclass(frozen=True)
class WalkConfig:
    """Walk parameters for ``n`` vertices.

    ``mixture_lambda`` is the probability of a local step in
    :func:`mixture_step`; the complement proposes an independent
    destructive draw.  ``max_internal_resamples`` bounds the
    admissibility-resampling loop (hitting it raises, it does not bias).
    """

    n: int
    mixture_lambda: float = 1.0
    max_internal_resamples: int = 1_000_000

    def __post_init__(self) -> None:
        build_layout(self.n)
        if not 0.0 <= self.mixture_lambda <= 1.0:
            raise ValueError("mixture_lambda must lie in [0, 1]")
        if self.max_internal_resamples < 1:
            raise ValueError("max_internal_resamples must be positive")

    @cached_property
    def n_star(self) -> int:
        """Number of non-root nodes; maximum flip distance."""
        return (1 << self.n) - 1 - self.n

    @cached_property
    def distance_weights(self) -> tuple[float, ...]:
        """Normalized weights of distances 1..n_star, exponentially decaying."""
        raw = [math.exp(-d / self.n_star) for d in range(1, self.n_star + 1)]
        total = math.fsum(raw)
        return tuple(r / total for r in raw)

    @cached_property
    def _distance_cdf(self) -> tuple[float, ...]:
        acc = list(itertools.accumulate(self.distance_weights))
        acc[-1] = 1.0
        return tuple(acc)

    def admissible_mass(self, pool_size: int) -> float:
        """W(m): total distance weight realizable against a pool of ``m`` nodes."""
        if pool_size <= 0:
            return 0.0
        return self._distance_cdf[min(pool_size, self.n_star) - 1]


@dataclass(frozen=True)
class Proposal:
    """One admissible local proposal, before the accept decision."""

    direction: str
    delta: int
    indices: tuple[int, ...]
    candidate: LabeledComplex
    u_forward: int
    u_backward: int
    ratio: float
    resamples: int


@dataclass(frozen=True)
class WalkTransition:
    """Outcome of one chain step; ``state`` is the new current state.

    ``displacement`` is popcount(before) - popcount(after), so removals
    are positive, additions negative, and rejections zero.
    """

    direction: str
    delta: int
    u_forward: int
    u_backward: int
    ratio: float
    accepted: bool
    state: LabeledComplex
    displacement: int


def propose(c: LabeledComplex, cfg: WalkConfig, rng: random.Random) -> Proposal:
    """Draw one admissible proposal from ``c`` and compute its ratio."""
    if c.n != cfg.n:
        raise ValueError("state and config disagree on n")
    if not validate_closure(c):
        raise ValueError("state is not downward closed")
    sets = unconstrained_sets(c)
    pools = {"add": sets.addable, "remove": sets.removable}
    cdf = cfg._distance_cdf

    resamples = 0
    while True:
        direction = "add" if rng.random() < 0.5 else "remove"
        delta = bisect.bisect_right(cdf, rng.random()) + 1
        pool = pools[direction]
        if delta <= len(pool):
            break
        resamples += 1
        if resamples > cfg.max_internal_resamples:
            raise RuntimeError("internal resampling limit exceeded")

    indices = tuple(sorted(rng.sample(pool, delta)))
    flip = 0
    for i in indices:
        flip |= 1 << i
    if direction == "add":
        candidate = LabeledComplex(c.n, c.bits | flip)
    else:
        candidate = LabeledComplex(c.n, c.bits & ~flip)
    cand_sets = unconstrained_sets(candidate)

    u_forward = len(pool)
    u_backward = len(cand_sets.removable if direction == "add" else cand_sets.addable)
    z_current = cfg.admissible_mass(len(sets.addable)) + cfg.admissible_mass(
        len(sets.removable)
    )
    z_candidate = cfg.admissible_mass(len(cand_sets.addable)) + cfg.admissible_mass(
        len(cand_sets.removable)
    )
    ratio = (
        math.comb(u_forward, delta) / math.comb(u_backward, delta)
    ) * (z_current / z_candidate)
    return Proposal(
        direction=direction,
        delta=delta,
        indices=indices,
        candidate=candidate,
        u_forward=u_forward,
        u_backward=u_backward,
        ratio=ratio,
        resamples=resamples,
    )


def metropolis_step(c: LabeledComplex, cfg: WalkConfig, rng: random.Random) -> WalkTransition:
    """One local step: propose, then accept with min(1, ratio)."""
    prop = propose(c, cfg, rng)
    accepted = prop.ratio >= 1.0 or rng.random() < prop.ratio
    state = prop.candidate if accepted else c
    return WalkTransition(
        direction=prop.direction,
        delta=prop.delta,
        u_forward=prop.u_forward,
        u_backward=prop.u_backward,
        ratio=prop.ratio,
        accepted=accepted,
        state=state,
        displacement=c.popcount - state.popcount,
    )


def mixture_step(c: LabeledComplex, cfg: WalkConfig, rng: random.Random) -> WalkTransition:
    """Local step with probability ``mixture_lambda``, else an independence
    step whose proposal is a fresh destructive draw.

    The mixture coin is only consumed for 0 < lambda < 1, so the degenerate
    settings are stream-identical to the pure kernels.
    """
    lam = cfg.mixture_lambda
    if 0.0 < lam < 1.0:
        take_local = rng.random() < lam
    else:
        take_local = lam >= 1.0
    if take_local:
        return metropolis_step(c, cfg, rng)

    candidate, trace = balanced_sample(cfg.n, rng)
    diff = balanced_log_prob_labeled(c) - trace.log_prob()
    try:
        ratio = math.exp(diff)
    except OverflowError:
        ratio = math.inf
    accepted = ratio >= 1.0 or rng.random() < ratio
    state = candidate if accepted else c
    return WalkTransition(
        direction="global",
        delta=(c.bits ^ candidate.bits).bit_count(),
        u_forward=0,
        u_backward=0,
        ratio=ratio,
        accepted=accepted,
        state=state,
        displacement=c.popcount - state.popcount,
    )


def central_start(n: int) -> LabeledComplex:
    """The ceil(n/2)-skeleton: every subset of size at most ceil(n/2)."""
    layout = build_layout(n)
    bits = 0
    for lb in layout.level_bits[: (n + 1) // 2]:
        bits |= lb
    return LabeledComplex(n, bits)


def corner_start(n: int) -> LabeledComplex:
    """The complete state (a corner of the state space)."""
    return LabeledComplex(n, build_layout(n).full_bits)
