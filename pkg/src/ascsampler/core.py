"""Labeled abstract simplicial complexes on a fixed vertex set.

A state is a downward-closed family of nonempty subsets of ``{1, .., n}``
that contains every singleton.  States are stored as bitmasks over a fixed
*level-canonical* index layout: subsets ordered by size (level ``d`` holds
the ``d``-element subsets, i.e. the ``(d-1)``-simplices), lexicographic
within a level.  The ``n`` singletons ("roots") occupy indices ``0..n-1``
and are present in every valid state; they are never removable.

For ``n = 3`` the layout is::

    index    0    1    2    3      4      5      6
    subset  {1}  {2}  {3}  {1,2}  {1,3}  {2,3}  {1,2,3}

so the complete state is the mask ``1111111`` and the mask ``1111100``
denotes the state holding all three vertices plus the edges ``{1,2}`` and
``{1,3}``.

The plain-text state format mirrors the mask: line one is ``n``, line two
is the ``2**n - 1`` mask characters in layout order.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

__all__ = [
    "N_MIN",
    "N_MAX",
    "LevelLayout",
    "LabeledComplex",
    "NodeSets",
    "build_layout",
    "complete_state",
    "empty_state",
    "validate_closure",
    "prune_cofaces",
    "unconstrained_sets",
    "level_census",
    "mask_string",
    "format_state",
    "parse_state",
    "read_state",
    "write_state",
]

N_MIN = 2
N_MAX = 16


class LevelLayout:
    """Fixed index layout for the nonempty subsets of ``{1, .., n}``.

    Attributes
    ----------
    n : int
        Number of vertices.
    size : int
        Total number of indices, ``2**n - 1``.
    members : tuple[tuple[int, ...], ...]
        Sorted vertex tuple of each index, levels ascending and
        lexicographic within a level.
    level_of : tuple[int, ...]
        Level (subset size) of each index.
    level_ranges : tuple[range, ...]
        ``level_ranges[d-1]`` is the index range of level ``d``.
    faces : tuple[tuple[int, ...], ...]
        Codimension-1 face indices of each index (empty for roots).
    cofaces : tuple[tuple[int, ...], ...]
        Codimension-1 coface indices of each index.
    root_bits, full_bits : int
        Bitmask of the ``n`` root indices / of every index.
    level_bits : tuple[int, ...]
        ``level_bits[d-1]`` is the bitmask of the level-``d`` indices.
    suffix_bits : tuple[int, ...]
        ``suffix_bits[d-1]`` is the bitmask of all indices at level >= ``d``.
    """

    __slots__ = (
        "n",
        "size",
        "members",
        "level_of",
        "level_ranges",
        "faces",
        "cofaces",
        "root_bits",
        "full_bits",
        "level_bits",
        "suffix_bits",
        "_word_index",
        "_words",
        "_clear_cache",
    )

    def __init__(self, n: int) -> None:
        if not N_MIN <= n <= N_MAX:
            raise ValueError(f"n must be in [{N_MIN}, {N_MAX}], got {n}")
        self.n = n
        self.size = (1 << n) - 1

        members: list[tuple[int, ...]] = []
        level_ranges: list[range] = []
        for d in range(1, n + 1):
            start = len(members)
            members.extend(itertools.combinations(range(1, n + 1), d))
            level_ranges.append(range(start, len(members)))
        self.members = tuple(members)
        self.level_ranges = tuple(level_ranges)
        self.level_of = tuple(len(m) for m in members)

        # Vertex-bitmask form of each subset, used for index arithmetic.
        words = tuple(sum(1 << (v - 1) for v in m) for m in members)
        self._words = words
        self._word_index = {w: i for i, w in enumerate(words)}

        faces: list[tuple[int, ...]] = []
        cofaces: list[list[int]] = [[] for _ in range(self.size)]
        for i, m in enumerate(members):
            if len(m) == 1:
                faces.append(())
                continue
            fs = sorted(self._word_index[words[i] & ~(1 << (v - 1))] for v in m)
            faces.append(tuple(fs))
            for f in fs:
                cofaces[f].append(i)
        self.faces = tuple(faces)
        self.cofaces = tuple(tuple(sorted(cf)) for cf in cofaces)

        level_bits = []
        for rng in level_ranges:
            bits = 0
            for i in rng:
                bits |= 1 << i
            level_bits.append(bits)
        self.level_bits = tuple(level_bits)
        suffix = []
        acc = 0
        for bits in reversed(level_bits):
            acc |= bits
            suffix.append(acc)
        self.suffix_bits = tuple(reversed(suffix))
        self.root_bits = level_bits[0]
        self.full_bits = (1 << self.size) - 1
        self._clear_cache: dict[int, int] = {}

    def index_of(self, vertices) -> int:
        """Index of the subset given as an iterable of vertices in ``1..n``."""
        word = 0
        for v in vertices:
            if not 1 <= v <= self.n:
                raise ValueError(f"vertex {v} outside 1..{self.n}")
            word |= 1 << (v - 1)
        if word == 0:
            raise ValueError("the empty subset has no index")
        return self._word_index[word]

    def clear_mask(self, index: int) -> int:
        """Bitmask of ``index`` together with every superset index.

        Computed by walking the submasks of the vertex-complement and
        cached per layout, so repeated pruning of the same index is O(1).
        """
        cached = self._clear_cache.get(index)
        if cached is not None:
            return cached
        word = self._words[index]
        comp = ((1 << self.n) - 1) & ~word
        mask = 0
        sub = comp
        while True:
            mask |= 1 << self._word_index[word | sub]
            if sub == 0:
                break
            sub = (sub - 1) & comp
        self._clear_cache[index] = mask
        return mask


@functools.lru_cache(maxsize=None)
def build_layout(n: int) -> LevelLayout:
    """Layout for ``n`` vertices; cached, so repeated calls are free."""
    return LevelLayout(n)


@dataclass(frozen=True)
class LabeledComplex:
    """A labeled state: bitmask ``bits`` over the layout for ``n`` vertices.

    Construction checks the bitmask range and that every root is present.
    Downward closure is *not* checked here; use :func:`validate_closure`
    (samplers and the walk maintain closure by construction).
    """

    n: int
    bits: int

    def __post_init__(self) -> None:
        layout = build_layout(self.n)
        if not 0 <= self.bits <= layout.full_bits:
            raise ValueError("bits outside the layout range")
        if self.bits & layout.root_bits != layout.root_bits:
            raise ValueError("every state must contain all roots")

    @property
    def popcount(self) -> int:
        """Number of present indices."""
        return self.bits.bit_count()

    def contains(self, index: int) -> bool:
        return (self.bits >> index) & 1 == 1


@dataclass(frozen=True)
class NodeSets:
    """Indices whose single flip preserves closure, in ascending order."""

    removable: tuple[int, ...]
    addable: tuple[int, ...]


def complete_state(n: int) -> LabeledComplex:
    """The state containing every subset."""
    return LabeledComplex(n, build_layout(n).full_bits)


def empty_state(n: int) -> LabeledComplex:
    """The state containing only the roots."""
    return LabeledComplex(n, build_layout(n).root_bits)


def validate_closure(c: LabeledComplex) -> bool:
    """True iff every present index has all codimension-1 faces present.

    Checking one level of faces suffices: if each present subset keeps all
    of its maximal proper subsets, induction down the levels gives full
    downward closure.
    """
    layout = build_layout(c.n)
    bits = c.bits
    for i in range(layout.n, layout.size):
        if (bits >> i) & 1:
            for f in layout.faces[i]:
                if not (bits >> f) & 1:
                    return False
    return True


def prune_cofaces(c: LabeledComplex, index: int) -> LabeledComplex:
    """Remove ``index`` and every present superset of it.

    Removing an absent index is the identity.  Roots cannot be removed.
    Preserves closure: only supersets of the removed subset lose their
    faces, and all of those are removed too.
    """
    layout = build_layout(c.n)
    if not 0 <= index < layout.size:
        raise ValueError(f"index {index} outside the layout")
    if index < layout.n:
        raise ValueError("cannot remove a root")
    if not (c.bits >> index) & 1:
        return c
    return LabeledComplex(c.n, c.bits & ~layout.clear_mask(index))


def unconstrained_sets(c: LabeledComplex) -> NodeSets:
    """The removable and addable indices of a closed state.

    removable: present, not a root, and no present coface (so deletion
    breaks no face relation).  addable: absent with every codimension-1
    face present (so insertion creates no dangling subset).
    """
    layout = build_layout(c.n)
    bits = c.bits
    removable: list[int] = []
    addable: list[int] = []
    for i in range(layout.n, layout.size):
        if (bits >> i) & 1:
            for cf in layout.cofaces[i]:
                if (bits >> cf) & 1:
                    break
            else:
                removable.append(i)
        else:
            for f in layout.faces[i]:
                if not (bits >> f) & 1:
                    break
            else:
                addable.append(i)
    return NodeSets(tuple(removable), tuple(addable))


def level_census(c: LabeledComplex) -> tuple[int, ...]:
    """Present-index count per level, for levels ``1..n``."""
    layout = build_layout(c.n)
    return tuple((c.bits & lb).bit_count() for lb in layout.level_bits)


def mask_string(c: LabeledComplex) -> str:
    """The mask characters in layout order."""
    size = build_layout(c.n).size
    return "".join("1" if (c.bits >> i) & 1 else "0" for i in range(size))


def format_state(c: LabeledComplex) -> str:
    """Two-line text form: ``n`` then the mask characters in layout order."""
    return f"{c.n}\n{mask_string(c)}\n"


def parse_state(text: str) -> LabeledComplex:
    """Parse the two-line text form; rejects malformed or non-closed masks."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise ValueError("expected exactly two lines: n and the mask")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise ValueError(f"first line must be an integer n, got {lines[0]!r}") from exc
    layout = build_layout(n)
    mask = lines[1]
    if len(mask) != layout.size:
        raise ValueError(f"mask length {len(mask)} != {layout.size} for n={n}")
    bits = 0
    for i, ch in enumerate(mask):
        if ch == "1":
            bits |= 1 << i
        elif ch != "0":
            raise ValueError(f"mask may contain only '0'/'1', got {ch!r}")
    state = LabeledComplex(n, bits)
    if not validate_closure(state):
        raise ValueError("mask is not downward closed")
    return state


def read_state(path) -> LabeledComplex:
    with open(path, "r", encoding="ascii") as fh:
        return parse_state(fh.read())


def write_state(path, c: LabeledComplex) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_state(c))
