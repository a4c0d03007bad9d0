"""Markings, label pairs ``(l, E)`` and small bitset helpers.

Markings are the integers ``0 .. n-1``.  The heavy markings come first, so for
a split with ``p`` heavy and ``q`` light markings the heavy set is the bitmask
``(1 << p) - 1``.  Subsets are plain ``int`` bitmasks throughout.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from itertools import combinations


def popcount(mask: int) -> int:
    return mask.bit_count()


def bits(mask: int) -> list[int]:
    """Sorted indices of the set bits."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        if i < 0:
            raise ValueError(f"negative marking index {i}")
        m |= 1 << i
    return m


def subsets_of(mask: int, size: int | None = None) -> Iterator[int]:
    """All submasks of ``mask``; with ``size`` only those of that cardinality."""
    idx = bits(mask)
    sizes = range(len(idx) + 1) if size is None else [size]
    for k in sizes:
        if 0 <= k <= len(idx):
            for combo in combinations(idx, k):
                yield mask_of(combo)


def lex_key(mask: int) -> tuple[int, ...]:
    """Lexicographic key on the sorted index list (the tiebreak order)."""
    return tuple(bits(mask))


@dataclass(frozen=True, slots=True)
class MarkingSplit:
    """``p`` heavy markings followed by ``q`` light ones."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if self.p < 0 or self.q < 0:
            raise ValueError("marking counts must be nonnegative")

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def heavy(self) -> int:
        return (1 << self.p) - 1

    @property
    def light(self) -> int:
        return self.full ^ self.heavy

    def ep(self, mask: int) -> int:
        return popcount(mask & self.heavy)

    def eq(self, mask: int) -> int:
        return popcount(mask & self.light)

    def name(self, i: int) -> str:
        return f"h{i + 1}" if i < self.p else f"z{i - self.p + 1}"


@dataclass(frozen=True, slots=True, order=True)
class PairLE:
    """A label ``(l, E)`` indexing ``F_{l,E}`` or a torsion sheaf ``T_{l,E}``."""

    l: int
    E: int

    def __post_init__(self) -> None:
        if self.E < 0:
            raise ValueError("E must be a nonnegative bitmask")
        if (self.l + popcount(self.E)) % 2:
            raise ValueError(f"parity violation: l={self.l}, |E|={popcount(self.E)}")

    @property
    def e(self) -> int:
        return popcount(self.E)

    def indices(self) -> list[int]:
        return bits(self.E)

    def permuted(self, perm: tuple[int, ...]) -> PairLE:
        return PairLE(self.l, permute_mask(self.E, perm))

    def __repr__(self) -> str:
        return f"PairLE({self.l}, {{{','.join(str(i) for i in bits(self.E))}}})"


def permute_mask(mask: int, perm: tuple[int, ...]) -> int:
    """Image of ``mask`` under the marking permutation ``i -> perm[i]``."""
    out = 0
    for i in bits(mask):
        out |= 1 << perm[i]
    return out


def exponents(mask: int, n: int) -> tuple[int, ...]:
    """Exponent vector of ``O(E)`` on ``(P^1)^n``."""
    return tuple((mask >> i) & 1 for i in range(n))
