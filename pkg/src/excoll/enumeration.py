"""The equivariant exceptional collections on ``M̄_{p,q}`` as ordered label lists.

A space is given by its numbers of heavy and light markings.  Four regimes
occur:

* ``p`` odd, no light markings: bundles ``F_{l,E}`` with
  ``l + min(e, p - e) ≤ r - 1``;
* ``p`` odd with light markings: the same condition on ``e_p``, in ``2^q``
  blocks indexed by ``E_q``;
* ``p = 2r`` even, ``q = 2s + 1`` odd: bundles of group 1A (or 1B) and
  torsion sheaves ``T_{l,E}`` of group 2;
* ``p`` even, ``q = 2s + 2`` even (``s = -1`` allowed): torsion sheaves
  ``O_δ(-a,-b)`` on the boundary divisors, then group 1A (or 1B) bundles and
  labels of group 2B (or 2A).

Ties the theorems leave open are broken by the lexicographic order of sorted
index lists; :func:`order_valid` re-checks any order against a Hom oracle.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from itertools import permutations

from .labels import MarkingSplit, PairLE, bits, lex_key, permute_mask, popcount, subsets_of
from .scores import classify_group


class Tag(str, Enum):
    BUNDLE = "Bundle"
    TORSION_Z = "TorsionZ"
    BOUNDARY_AB = "BoundaryAB"
    TILDE_TORSION = "TildeTorsion"


@dataclass(frozen=True, slots=True)
class Space:
    """``M̄_{p,q}`` with ``p`` heavy and ``q`` light markings (heavy first)."""

    p: int
    q: int = 0

    def __post_init__(self) -> None:
        if self.p < 3 or self.q < 0:
            raise ValueError("need at least three heavy markings")

    @property
    def split(self) -> MarkingSplit:
        return MarkingSplit(self.p, self.q)

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def r(self) -> int:
        return self.p // 2

    @property
    def s(self) -> int:
        return (self.q - 1) // 2 if self.q % 2 else self.q // 2 - 1

    @property
    def regime(self) -> str:
        if self.p % 2:
            return "odd" if self.q == 0 else "odd_lights"
        return "even_odd" if self.q % 2 else "even_even"

    @property
    def boundary_dim(self) -> int:
        """Dimension of each factor of a boundary divisor ``P^m × P^m``."""
        return self.r + self.s - 1

    def __str__(self) -> str:
        return f"M({self.p},{self.q})" if self.q else f"M({self.p})"


@dataclass(frozen=True, slots=True)
class Variant:
    bundles: str = "1A"
    tilde: str = "2B"

    def __post_init__(self) -> None:
        if self.bundles not in ("1A", "1B") or self.tilde not in ("2A", "2B"):
            raise ValueError(f"unknown variant {self}")

    def __str__(self) -> str:
        return f"{self.bundles}+{self.tilde}"

    @classmethod
    def parse(cls, text: str) -> Variant:
        parts = [x.strip().upper() for x in text.replace(",", "+").split("+") if x.strip()]
        kw = {}
        for x in parts:
            if x in ("1A", "1B"):
                kw["bundles"] = x
            elif x in ("2A", "2B"):
                kw["tilde"] = x
            else:
                raise ValueError(f"unknown variant component {x!r}")
        return cls(**kw)


@dataclass(frozen=True, slots=True)
class CollectionObject:
    """One object of a collection.

    ``pair`` is set for bundles and torsion labels.  Boundary sheaves carry the
    divisor as the bitmask of its canonical side ``T`` (the side holding
    marking 0) and the twist ``(a, b)`` with ``a`` on ``T``.
    """

    tag: Tag
    pair: PairLE | None = None
    divisor: int | None = None
    a: int = 0
    b: int = 0

    @classmethod
    def bundle(cls, pair: PairLE) -> CollectionObject:
        return cls(Tag.BUNDLE, pair)

    @classmethod
    def boundary(cls, T: int, a: int, b: int, full: int) -> CollectionObject:
        if not T & 1:
            T, a, b = full ^ T, b, a
        return cls(Tag.BOUNDARY_AB, None, T, a, b)

    def permuted(self, perm: tuple[int, ...], full: int) -> CollectionObject:
        if self.tag is Tag.BOUNDARY_AB:
            assert self.divisor is not None
            return CollectionObject.boundary(permute_mask(self.divisor, perm), self.a, self.b, full)
        assert self.pair is not None
        return CollectionObject(self.tag, self.pair.permuted(perm))

    def describe(self, split: MarkingSplit | None = None) -> str:
        name = (lambda i: split.name(i)) if split else str
        if self.tag is Tag.BOUNDARY_AB:
            side = ",".join(name(i) for i in bits(self.divisor or 0))
            return f"O_delta[{side}](-{self.a},-{self.b})"
        assert self.pair is not None
        sym = {Tag.BUNDLE: "F", Tag.TORSION_Z: "T", Tag.TILDE_TORSION: "T~"}[self.tag]
        return f"{sym}_{{{self.pair.l},{{{','.join(name(i) for i in self.pair.indices())}}}}}"

    def to_json(self, order_index: int) -> dict:
        out: dict = {"tag": self.tag.value, "order_index": order_index}
        if self.pair is not None:
            out["l"] = self.pair.l
            out["E"] = self.pair.indices()
        else:
            out["divisor"] = bits(self.divisor or 0)
            out["a"] = self.a
            out["b"] = self.b
        return out

    @classmethod
    def from_json(cls, data: dict) -> CollectionObject:
        tag = Tag(data["tag"])
        if tag is Tag.BOUNDARY_AB:
            return cls(tag, None, sum(1 << i for i in data["divisor"]), data["a"], data["b"])
        return cls(tag, PairLE(data["l"], sum(1 << i for i in data["E"])))


@dataclass(frozen=True)
class Collection:
    space: Space
    variant: Variant
    objects: tuple[CollectionObject, ...]

    def __len__(self) -> int:
        return len(self.objects)

    def __iter__(self):
        return iter(self.objects)

    def __getitem__(self, i: int) -> CollectionObject:
        return self.objects[i]

    def count_by_tag(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for obj in self.objects:
            out[obj.tag.value] = out.get(obj.tag.value, 0) + 1
        return out

    def pairs(self, tag: Tag = Tag.BUNDLE) -> list[PairLE]:
        return [o.pair for o in self.objects if o.tag is tag and o.pair is not None]

    def to_json(self) -> dict:
        return {
            "space": {"p": self.space.p, "q": self.space.q},
            "variant": str(self.variant),
            "objects": [o.to_json(i) for i, o in enumerate(self.objects)],
        }

    @classmethod
    def from_json(cls, data: dict) -> Collection:
        return cls(
            Space(data["space"]["p"], data["space"]["q"]),
            Variant.parse(data["variant"]),
            tuple(CollectionObject.from_json(o) for o in data["objects"]),
        )


# ---------------------------------------------------------------------------
# order keys


def order_key(obj: CollectionObject, space: Space) -> tuple:
    """Sort key realizing the chosen total order (see module docstring)."""
    split = space.split
    if obj.tag is Tag.BOUNDARY_AB:
        return (0, lex_key(obj.divisor or 0), -(obj.a + obj.b), -obj.a)
    pair = obj.pair
    assert pair is not None
    E = pair.E
    Ep, Eq = E & split.heavy, E & split.light
    ep, eq = popcount(Ep), popcount(Eq)
    if space.regime == "odd":
        return (1, pair.e, lex_key(E), pair.l)
    block = (1, eq, lex_key(Eq))
    if space.regime == "odd_lights":
        return block + (ep, lex_key(Ep), pair.l)
    if obj.tag is Tag.BUNDLE:
        return block + (1, ep, lex_key(Ep), pair.l)
    return block + (0, lex_key(Ep), -pair.l)


def _sorted(objs: Iterable[CollectionObject], space: Space) -> tuple[CollectionObject, ...]:
    out = sorted(objs, key=lambda o: order_key(o, space))
    keys = [order_key(o, space) for o in out]
    if len(set(keys)) != len(keys):
        raise AssertionError("order key is not injective")
    return tuple(out)


# ---------------------------------------------------------------------------
# enumerators


def _labels(n: int, lmax: int) -> Iterable[PairLE]:
    for E in range(1 << n):
        e = popcount(E)
        for l in range(e % 2, lmax + 1, 2):
            yield PairLE(l, E)


def enumerate_odd_p(p: int) -> Collection:
    if p < 3 or p % 2 == 0:
        raise ValueError("p must be odd and at least 3")
    r = (p - 1) // 2
    space = Space(p, 0)
    objs = [
        CollectionObject.bundle(x)
        for x in _labels(p, r - 1)
        if x.l + min(x.e, p - x.e) <= r - 1
    ]
    return Collection(space, Variant(), _sorted(objs, space))


def enumerate_odd_p_with_lights(p: int, q: int) -> Collection:
    if q == 0:
        return enumerate_odd_p(p)
    if p < 3 or p % 2 == 0 or q < 0:
        raise ValueError("p must be odd and at least 3")
    r = (p - 1) // 2
    space = Space(p, q)
    split = space.split
    objs = []
    for x in _labels(space.n, r - 1):
        ep = split.ep(x.E)
        if x.l + min(ep, p - ep) <= r - 1:
            objs.append(CollectionObject.bundle(x))
    return Collection(space, Variant(), _sorted(objs, space))


def _bundle_group(x: PairLE, split: MarkingSplit, group: str) -> bool:
    return group in classify_group(x, split)


def enumerate_peven_qodd(p: int, q: int, variant: Variant | str = "1A") -> Collection:
    variant = Variant.parse(variant) if isinstance(variant, str) else variant
    if p < 4 or p % 2 or q % 2 == 0:
        raise ValueError("need p = 2r >= 4 and q odd")
    space = Space(p, q)
    split = space.split
    r = space.r
    objs = []
    for x in _labels(space.n, r + space.s):
        groups = classify_group(x, split)
        if variant.bundles in groups:
            objs.append(CollectionObject.bundle(x))
        if "2" in groups:
            objs.append(CollectionObject(Tag.TORSION_Z, x))
    return Collection(space, variant, _sorted(objs, space))


def boundary_divisors(space: Space) -> list[int]:
    """Canonical sides ``T`` (containing marking 0) of the boundary divisors."""
    split = space.split
    r, s = space.r, space.s
    out = []
    for Tp in subsets_of(split.heavy, r):
        if not Tp & 1:
            continue
        for Tq in subsets_of(split.light, s + 1):
            out.append(Tp | Tq)
    return out


def boundary_twists(m: int) -> list[tuple[int, int]]:
    """The ``(a, b)`` attached to each divisor ``P^m × P^m``."""
    out = [(a, b) for a in range(1, m + 1) for b in range(1, m + 1)]
    half = m // 2  # b <= m/2 with integer b
    out += [(0, b) for b in range(1, half + 1)]
    out += [(a, 0) for a in range(1, half + 1)]
    return out


def enumerate_peven_qeven(p: int, q_plus_1: int, variant: Variant | str = "1A+2B") -> Collection:
    variant = Variant.parse(variant) if isinstance(variant, str) else variant
    if p < 4 or p % 2 or q_plus_1 % 2:
        raise ValueError("need p = 2r >= 4 and an even number of light markings")
    space = Space(p, q_plus_1)
    split = space.split
    objs = [
        CollectionObject.boundary(T, a, b, split.full)
        for T in boundary_divisors(space)
        for a, b in boundary_twists(space.boundary_dim)
    ]
    for x in _labels(space.n, space.r + space.s + 1):
        groups = classify_group(x, split)
        if variant.bundles in groups:
            objs.append(CollectionObject.bundle(x))
        if variant.tilde in groups:
            objs.append(CollectionObject(Tag.TILDE_TORSION, x))
    return Collection(space, variant, _sorted(objs, space))


def enumerate_collection(space: Space, variant: Variant | str | None = None) -> Collection:
    """Dispatch on the regime of ``space``."""
    if isinstance(variant, str):
        variant = Variant.parse(variant)
    variant = variant or Variant()
    regime = space.regime
    if regime == "odd":
        return enumerate_odd_p(space.p)
    if regime == "odd_lights":
        return enumerate_odd_p_with_lights(space.p, space.q)
    if regime == "even_odd":
        return enumerate_peven_qodd(space.p, space.q, variant)
    return enumerate_peven_qeven(space.p, space.q, variant)


# ---------------------------------------------------------------------------
# symmetry and order


def generators(space: Space) -> list[tuple[int, ...]]:
    """Adjacent transpositions within the heavy and within the light markings."""
    n = space.n
    gens = []
    for lo, hi in ((0, space.p), (space.p, n)):
        for i in range(lo, hi - 1):
            perm = list(range(n))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            gens.append(tuple(perm))
    return gens


def check_equivariance(
    collection: Collection | Sequence[CollectionObject],
    space: Space | None = None,
    gens: Iterable[tuple[int, ...]] | None = None,
) -> tuple[bool, tuple[int, ...] | None]:
    """Whether each generator maps the object set onto itself.

    Returns ``(True, None)`` or ``(False, g)`` with a violating generator.
    """
    if isinstance(collection, Collection):
        space = space or collection.space
        objects = collection.objects
    else:
        objects = tuple(collection)
    if space is None:
        raise ValueError("space is required for a bare object list")
    full = space.split.full
    current = set(objects)
    for g in gens if gens is not None else generators(space):
        if {o.permuted(g, full) for o in objects} != current:
            return False, g
    return True, None


HomTester = Callable[[int, int], dict[int, int]]


@dataclass
class OrderReport:
    valid: bool
    violations: list[tuple[int, int, dict[int, int]]] = field(default_factory=list)
    resorted: list[int] | None = None
    cyclic: bool = False


def order_valid(n_objects: int, homtester: HomTester, resort: bool = False) -> OrderReport:
    """Check ``RHom(E_i, E_j) = 0`` for all ``i > j``.

    ``homtester(i, j)`` returns the graded dimension of ``RHom(E_i, E_j)``.
    With ``resort=True`` a failing order is replaced, when possible, by a
    topological order of the digraph of nonvanishing Homs.
    """
    report = OrderReport(True)
    edges: dict[int, set[int]] = {i: set() for i in range(n_objects)}
    for i in range(n_objects):
        for j in range(n_objects):
            if i == j:
                continue
            dims = homtester(i, j)
            if any(dims.values()):
                edges[i].add(j)  # i must come before j
                if i > j:
                    report.valid = False
                    report.violations.append((i, j, dims))
    if report.valid or not resort:
        return report
    indeg = {i: 0 for i in edges}
    for i, outs in edges.items():
        for j in outs:
            indeg[j] += 1
    ready = sorted(i for i, d in indeg.items() if d == 0)
    order = []
    while ready:
        i = ready.pop(0)
        order.append(i)
        for j in sorted(edges[i]):
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
        ready.sort()
    if len(order) == n_objects:
        report.resorted = order
    else:
        report.cyclic = True
    return report


def all_permutations(space: Space) -> Iterable[tuple[int, ...]]:
    """Every element of ``S_p × S_q`` (small spaces only)."""
    for hp in permutations(range(space.p)):
        for lp in permutations(range(space.p, space.n)):
            yield tuple(hp) + tuple(lp)
