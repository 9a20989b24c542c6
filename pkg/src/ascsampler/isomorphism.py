"""Geometric (relabeling-invariant) classification of labeled states.

Two labeled states are geometrically equivalent when some permutation of
the vertex set maps one mask onto the other.  The canonical representative
of a class is the lexicographically smallest mask string over the whole
orbit, which makes equality of classes a plain integer comparison.

Canonicalization is brute force over all ``n!`` vertex permutations,
vectorized with numpy (one fancy-index per orbit), and is capped at
``n <= 8`` where ``8! = 40320`` rows are still cheap.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .core import LabeledComplex, build_layout

__all__ = [
    "CANONICAL_N_MAX",
    "GeometricKey",
    "BinEntry",
    "BinReport",
    "canonical_key",
    "orbit_masks",
    "bin_samples",
]

CANONICAL_N_MAX = 8


@dataclass(frozen=True)
class GeometricKey:
    """Canonical identifier of a geometric class.

    ``bits`` is the lex-min mask over the orbit (in layout order, index 0
    the most significant character of the mask string).  ``orbit_size`` is
    the number of distinct labeled states in the class; it is derived from
    ``(n, bits)`` and excluded from equality.
    """

    n: int
    bits: int
    orbit_size: int = field(compare=False)

    @property
    def hex(self) -> str:
        width = (build_layout(self.n).size + 3) // 4
        return f"{self.bits:0{width}x}"

    @property
    def mask_string(self) -> str:
        size = build_layout(self.n).size
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(size))

    def state(self) -> LabeledComplex:
        """The canonical representative as a labeled state."""
        return LabeledComplex(self.n, self.bits)


@functools.lru_cache(maxsize=None)
def _inverse_perm_tables(n: int) -> np.ndarray:
    """(n!, size) table: row p, column j holds the source index that the
    p-th vertex permutation sends to position j, so ``mask_vec[row]`` is
    the permuted mask vector."""
    import itertools

    layout = build_layout(n)
    size = layout.size
    member_matrix = np.zeros((size, n), dtype=np.int64)
    for i, m in enumerate(layout.members):
        for v in m:
            member_matrix[i, v - 1] = 1
    pow2 = 1 << np.arange(n, dtype=np.int64)
    word_to_index = np.zeros(1 << n, dtype=np.int64)
    words = member_matrix @ pow2
    word_to_index[words] = np.arange(size)

    perms = list(itertools.permutations(range(n)))
    fwd = np.empty((len(perms), size), dtype=np.int64)
    for r, sigma in enumerate(perms):
        permuted_words = member_matrix[:, list(sigma)] @ pow2
        fwd[r] = word_to_index[permuted_words]
    inv = np.empty_like(fwd)
    rows = np.arange(len(perms))[:, None]
    inv[rows, fwd] = np.arange(size)[None, :]
    dtype = np.uint8 if size <= 255 else np.uint16
    return inv.astype(dtype)


def _bits_vector(bits: int, size: int) -> np.ndarray:
    return np.fromiter(((bits >> i) & 1 for i in range(size)), dtype=np.uint8, count=size)


def _vector_bits(vec: np.ndarray) -> int:
    bits = 0
    for i, b in enumerate(vec):
        if b:
            bits |= 1 << i
    return bits


def _orbit_rows(n: int, bits: int) -> np.ndarray:
    """Distinct permuted masks, packed to bytes and lex-sorted ascending."""
    layout = build_layout(n)
    table = _inverse_perm_tables(n)
    vec = _bits_vector(bits, layout.size)
    permuted = vec[table]
    packed = np.packbits(permuted, axis=1)
    return np.unique(packed, axis=0)


@functools.lru_cache(maxsize=262144)
def _canonical(n: int, bits: int) -> GeometricKey:
    uniq = _orbit_rows(n, bits)
    size = build_layout(n).size
    min_vec = np.unpackbits(uniq[0])[:size]
    return GeometricKey(n=n, bits=_vector_bits(min_vec), orbit_size=uniq.shape[0])


def canonical_key(c: LabeledComplex) -> GeometricKey:
    """Canonical class key of ``c``; brute force over n! permutations."""
    if c.n > CANONICAL_N_MAX:
        raise ValueError(f"canonical labeling is capped at n <= {CANONICAL_N_MAX}")
    return _canonical(c.n, c.bits)


def orbit_masks(c: LabeledComplex) -> tuple[int, ...]:
    """All distinct masks in the orbit of ``c``, ascending as mask strings."""
    if c.n > CANONICAL_N_MAX:
        raise ValueError(f"orbit enumeration is capped at n <= {CANONICAL_N_MAX}")
    size = build_layout(c.n).size
    uniq = _orbit_rows(c.n, c.bits)
    flat = np.unpackbits(uniq, axis=1)[:, :size]
    return tuple(_vector_bits(row) for row in flat)


@dataclass(frozen=True)
class BinEntry:
    key: GeometricKey
    multiplicity: int
    first_seen_index: int


@dataclass(frozen=True)
class BinReport:
    """Class multiplicities of a sample stream, first-encounter order."""

    n: int
    total: int
    entries: tuple[BinEntry, ...]

    @property
    def counts(self) -> dict[GeometricKey, int]:
        return {e.key: e.multiplicity for e in self.entries}


def bin_samples(stream: Iterable[LabeledComplex]) -> BinReport:
    """Bin labeled states by geometric class, preserving first-encounter order."""
    order: dict[GeometricKey, int] = {}
    counts: list[int] = []
    first: list[int] = []
    n = None
    total = 0
    for i, c in enumerate(stream):
        if n is None:
            n = c.n
        elif c.n != n:
            raise ValueError(f"mixed vertex counts in stream: {n} and {c.n}")
        key = canonical_key(c)
        slot = order.get(key)
        if slot is None:
            order[key] = len(counts)
            counts.append(1)
            first.append(i)
        else:
            counts[slot] += 1
        total += 1
    if n is None:
        raise ValueError("empty sample stream")
    entries = tuple(
        BinEntry(key=k, multiplicity=counts[s], first_seen_index=first[s])
        for k, s in order.items()
    )
    return BinReport(n=n, total=total, entries=entries)
