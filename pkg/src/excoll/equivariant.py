"""The ``S_p × S_q`` action on a collection and its permutation character.

The group permutes heavy markings among themselves and light markings among
themselves; every collection produced by :mod:`excoll.enumeration` is stable
under it, so the objects form a permutation representation whose dimension
is the length of the collection.  This module computes the orbits,
stabilizer orders and the decomposition of that representation into
irreducibles ``S^λ ⊠ S^ν`` using characters from the Murnaghan-Nakayama rule.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .enumeration import Collection, CollectionObject, generators

Partition = tuple[int, ...]


def partitions(n: int, largest: int | None = None) -> Iterator[Partition]:
    """Partitions of ``n`` in reverse lexicographic order."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


def _beta(lam: Partition) -> tuple[int, ...]:
    k = len(lam)
    return tuple(part + k - 1 - i for i, part in enumerate(lam))


def _from_beta(beta: list[int]) -> Partition:
    beta = sorted(beta, reverse=True)
    k = len(beta)
    return tuple(x for x in (b - (k - 1 - i) for i, b in enumerate(beta)) if x > 0)


@lru_cache(maxsize=None)
def character(lam: Partition, mu: Partition) -> int:
    """``χ^λ`` on the class of cycle type ``μ`` (Murnaghan-Nakayama)."""
    if sum(lam) != sum(mu):
        raise ValueError("λ and μ must partition the same integer")
    if not mu:
        return 1
    h, rest = mu[0], mu[1:]
    beta = list(_beta(lam))
    present = set(beta)
    total = 0
    for b in beta:
        c = b - h
        if c < 0 or c in present:
            continue
        height = sum(1 for x in beta if c < x < b)
        new = [c if x == b else x for x in beta]
        total += (-1) ** height * character(_from_beta(new), rest)
    return total


def dimension(lam: Partition) -> int:
    return character(lam, (1,) * sum(lam)) if lam else 1


def centralizer_order(mu: Partition) -> int:
    out = 1
    for part in set(mu):
        k = mu.count(part)
        out *= part**k * factorial(k)
    return out


def cycle_type(perm: tuple[int, ...], lo: int, hi: int) -> Partition:
    """Cycle type of ``perm`` restricted to the block ``[lo, hi)``."""
    seen = set()
    out = []
    for i in range(lo, hi):
        if i in seen:
            continue
        length = 0
        j = i
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        out.append(length)
    return tuple(sorted(out, reverse=True))


def representative(mu: Partition, offset: int = 0) -> list[int]:
    """A permutation of ``range(offset, offset + |μ|)`` of cycle type ``μ``."""
    out = []
    start = offset
    for part in mu:
        out.extend(start + (k + 1) % part for k in range(part))
        start += part
    return out


# ---------------------------------------------------------------------------
# orbits


@dataclass(frozen=True)
class Orbit:
    representative: CollectionObject
    members: tuple[int, ...]
    stabilizer_order: int

    def to_json(self, collection: Collection) -> dict:
        return {
            "representative": self.representative.describe(collection.space.split),
            "size": len(self.members),
            "stabilizer_order": self.stabilizer_order,
            "members": list(self.members),
        }


def group_order(p: int, q: int) -> int:
    return factorial(p) * factorial(q)


def orbits(collection: Collection) -> list[Orbit]:
    """Orbits of ``S_p × S_q`` on the objects (by union-find over generators)."""
    space = collection.space
    full = space.split.full
    index = {obj: i for i, obj in enumerate(collection.objects)}
    parent = list(range(len(index)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in generators(space):
        for obj, i in index.items():
            image = obj.permuted(g, full)
            if image not in index:
                raise ValueError(f"{obj.describe()} leaves the collection under {g}")
            a, b = find(i), find(index[image])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(len(parent)):
        groups.setdefault(find(i), []).append(i)
    order = group_order(space.p, space.q)
    return [
        Orbit(collection.objects[m[0]], tuple(m), order // len(m))
        for m in sorted(groups.values())
    ]


# ---------------------------------------------------------------------------
# decomposition


@dataclass(frozen=True)
class Isotypic:
    heavy: Partition
    light: Partition
    multiplicity: int

    @property
    def dimension(self) -> int:
        return dimension(self.heavy) * dimension(self.light)

    def __str__(self) -> str:
        lam = ",".join(map(str, self.heavy))
        if not self.light:
            return f"{self.multiplicity}·[{lam}]"
        nu = ",".join(map(str, self.light))
        return f"{self.multiplicity}·[{lam}]⊠[{nu}]"

    def to_json(self) -> dict:
        return {
            "heavy": list(self.heavy),
            "light": list(self.light),
            "multiplicity": self.multiplicity,
            "dimension": self.dimension,
        }


def permutation_character(collection: Collection) -> dict[tuple[Partition, Partition], int]:
    """Number of fixed objects for each class ``(μ_heavy, μ_light)``."""
    space = collection.space
    full = space.split.full
    objs = set(collection.objects)
    out = {}
    for mu in partitions(space.p):
        for nu in partitions(space.q):
            g = tuple(representative(mu) + representative(nu, space.p))
            out[mu, nu] = sum(1 for o in objs if o.permuted(g, full) == o)
    return out


def decompose(collection: Collection) -> list[Isotypic]:
    """Multiplicities of ``S^λ ⊠ S^ν`` in the permutation representation."""
    space = collection.space
    chi = permutation_character(collection)
    order = group_order(space.p, space.q)
    out = []
    for lam in partitions(space.p):
        for nu in partitions(space.q):
            total = Fraction(0)
            for (mu, kappa), fixed in chi.items():
                size = Fraction(order, centralizer_order(mu) * centralizer_order(kappa))
                total += size * fixed * character(lam, mu) * character(nu, kappa)
            mult = total / order
            if mult.denominator != 1 or mult < 0:
                raise ArithmeticError(f"non-integral multiplicity {mult} for {lam}, {nu}")
            if mult:
                out.append(Isotypic(lam, nu, int(mult)))
    return out


def decomposition_string(parts: list[Isotypic]) -> str:
    return " + ".join(str(x) for x in parts) if parts else "0"
