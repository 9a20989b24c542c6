"""Shared test plumbing.

Two things live here: the acceptance-criteria result collector (each
criterion test prints and registers a single PASS/FAIL line, repeated in
the terminal summary so it survives output capture), and an analytically
assembled transition kernel for the local walk at small n, built
independently of the walk module's sampling loop so kernel-level checks
do not reuse the code path they are checking.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from ascsampler.core import unconstrained_sets
from ascsampler.enumeration import enumerate_labeled
from ascsampler.walk import WalkConfig

_criterion_lines: list[tuple[int, str]] = []


def record_criterion(number: int, passed: bool, detail: str) -> bool:
    line = f"[criterion-{number}] {'PASS' if passed else 'FAIL'} {detail}"
    _criterion_lines.append((number, line))
    print(line, flush=True)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not _criterion_lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_criterion_lines):
        terminalreporter.write_line(line)


def build_exact_kernel(n: int):
    """Full transition matrix of the local Metropolis walk, assembled by
    enumerating every (direction, distance, subset) proposal analytically.

    The proposal law conditions on admissibility: an unconditioned draw
    picks a direction with probability 1/2 and a distance delta with the
    configured weight, so the admissible mass at state x is
    (W(|addable|) + W(|removable|)) / 2 and each admissible subset S gets

        q(x -> y) = (1/2) w(delta) / (C(|U|, delta) * mass(x)).

    Acceptance is min(1, q(y -> x) / q(x -> y)), which reduces to the
    combinatorial ratio times the mass ratio.  Returns (states, P) with
    states a list of bitmasks indexing the matrix rows.
    """
    cfg = WalkConfig(n=n)
    result = enumerate_labeled(n)
    states = [c.bits for c in result.states]
    index = {b: i for i, b in enumerate(states)}
    w = cfg.distance_weights

    def halfmass(c):
        s = unconstrained_sets(c)
        return 0.5 * (
            cfg.admissible_mass(len(s.addable)) + cfg.admissible_mass(len(s.removable))
        )

    size = len(states)
    P = np.zeros((size, size))
    for c in result.states:
        i = index[c.bits]
        sets = unconstrained_sets(c)
        mass_c = halfmass(c)
        for direction, pool in (("add", sets.addable), ("remove", sets.removable)):
            for delta in range(1, len(pool) + 1):
                for subset in itertools.combinations(pool, delta):
                    flip = 0
                    for idx in subset:
                        flip |= 1 << idx
                    bits = c.bits | flip if direction == "add" else c.bits & ~flip
                    cand = type(c)(c.n, bits)
                    q_fwd = 0.5 * w[delta - 1] / (math.comb(len(pool), delta) * mass_c)
                    back_pool = unconstrained_sets(cand)
                    back = (
                        back_pool.removable if direction == "add" else back_pool.addable
                    )
                    q_bwd = (
                        0.5
                        * w[delta - 1]
                        / (math.comb(len(back), delta) * halfmass(cand))
                    )
                    accept = min(1.0, q_bwd / q_fwd)
                    P[i, index[bits]] += q_fwd * accept
    for i in range(size):
        off = P[i].sum() - P[i, i]
        P[i, i] = 1.0 - off
    return states, P
