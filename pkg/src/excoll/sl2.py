"""Exact arithmetic with finite-dimensional SL2 representations.

An irreducible representation is identified by its highest weight ``m`` (the
module ``V_m`` has dimension ``m + 1``).  A finite direct sum of irreducibles is
an :class:`IrrepSum`; a cohomologically graded collection of those is a
:class:`VirtualGradedRep`.  Both are immutable and hashable.

Weights are measured for the standard torus, so ``V_m`` has the weight
multiset ``{m, m - 2, ..., -m}``.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import lru_cache


def _clean(mults: Mapping[int, int]) -> tuple[tuple[int, int], ...]:
    items = []
    for m, k in mults.items():
        if m < 0:
            raise ValueError(f"highest weight must be nonnegative, got {m}")
        if k < 0:
            raise ValueError(f"multiplicity must be nonnegative, got {k} for V_{m}")
        if k:
            items.append((int(m), int(k)))
    return tuple(sorted(items))


@dataclass(frozen=True, slots=True)
class IrrepSum:
    """A direct sum ``⊕ V_m^{k_m}`` stored as sorted ``(m, k_m)`` pairs."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", _clean(dict(self.terms)))

    @classmethod
    def from_mults(cls, mults: Mapping[int, int]) -> IrrepSum:
        return cls(_clean(mults))

    @classmethod
    def irrep(cls, m: int, mult: int = 1) -> IrrepSum:
        """The module ``V_m`` repeated ``mult`` times."""
        return cls(((m, mult),))

    @classmethod
    def trivial(cls, mult: int = 1) -> IrrepSum:
        return cls.irrep(0, mult)

    @classmethod
    def from_weights(cls, weights: Mapping[int, int]) -> IrrepSum:
        """Re-extract irreducibles from a weight multiset.

        Repeatedly strips off ``V_top`` where ``top`` is the largest weight still
        present.  Raises ``ValueError`` if the multiset is not a character.
        """
        remaining = Counter({w: k for w, k in weights.items() if k})
        mults: dict[int, int] = {}
        while remaining:
            top = max(remaining)
            k = remaining[top]
            if top < 0 or k < 0:
                raise ValueError("weight multiset is not an SL2 character")
            mults[top] = mults.get(top, 0) + k
            for w in range(-top, top + 1, 2):
                remaining[w] -= k
                if remaining[w] == 0:
                    del remaining[w]
                elif remaining[w] < 0:
                    raise ValueError("weight multiset is not an SL2 character")
        return cls.from_mults(mults)

    @property
    def mults(self) -> dict[int, int]:
        return dict(self.terms)

    def __getitem__(self, m: int) -> int:
        return self.mults.get(m, 0)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def dimension(self) -> int:
        return sum(k * (m + 1) for m, k in self.terms)

    def weights(self) -> Counter[int]:
        """The weight multiset of the whole module."""
        out: Counter[int] = Counter()
        for m, k in self.terms:
            for w in range(-m, m + 1, 2):
                out[w] += k
        return out

    def __add__(self, other: IrrepSum) -> IrrepSum:
        acc = Counter(self.mults)
        acc.update(other.mults)
        return IrrepSum.from_mults(acc)

    def scale(self, k: int) -> IrrepSum:
        return IrrepSum.from_mults({m: k * c for m, c in self.terms})

    def __mul__(self, other: IrrepSum) -> IrrepSum:
        return tensor(self, other)

    def __repr__(self) -> str:
        if not self.terms:
            return "IrrepSum(0)"
        body = " + ".join(f"{k}*V{m}" if k > 1 else f"V{m}" for m, k in self.terms)
        return f"IrrepSum({body})"


@lru_cache(maxsize=65536)
def _cg(l: int, l2: int) -> tuple[int, ...]:
    return tuple(range(abs(l - l2), l + l2 + 1, 2))


def clebsch_gordan(l: int, l2: int) -> IrrepSum:
    """``V_l ⊗ V_l2 = V_{l+l2} ⊕ V_{l+l2-2} ⊕ ... ⊕ V_{|l-l2|}``."""
    if l < 0 or l2 < 0:
        raise ValueError("highest weights must be nonnegative")
    return IrrepSum.from_mults({m: 1 for m in _cg(l, l2)})


def tensor(a: IrrepSum, b: IrrepSum) -> IrrepSum:
    """Bilinear extension of :func:`clebsch_gordan`."""
    acc: Counter[int] = Counter()
    for m, k in a.terms:
        for m2, k2 in b.terms:
            c = k * k2
            for j in _cg(m, m2):
                acc[j] += c
    return IrrepSum.from_mults(acc)


def tensor_all(factors: Iterable[IrrepSum]) -> IrrepSum:
    out = IrrepSum.trivial()
    for f in factors:
        out = tensor(out, f)
        if not out:
            break
    return out


def invariant_multiplicity(a: IrrepSum) -> int:
    """Multiplicity of the trivial representation (dimension of invariants)."""
    return a[0]


@lru_cache(maxsize=262144)
def invariants_of_product(highest: tuple[int, ...]) -> int:
    """Invariant dimension of ``V_{m_1} ⊗ ... ⊗ V_{m_k}`` for a sorted tuple.

    The invariants of ``A ⊗ V_m`` equal the multiplicity of ``V_m`` in ``A``
    because every ``V_m`` is self-dual, which saves one tensor step.
    """
    if not highest:
        return 1
    if (sum(highest) % 2) or 2 * max(highest) > sum(highest):
        return 0
    *rest, last = highest
    return tensor_all(IrrepSum.irrep(m) for m in rest)[last]


@dataclass(frozen=True, slots=True)
class VirtualGradedRep:
    """Cohomological degree ``->`` :class:`IrrepSum`, zero degrees omitted."""

    parts: tuple[tuple[int, IrrepSum], ...] = ()

    def __post_init__(self) -> None:
        merged: dict[int, IrrepSum] = {}
        for d, rep in self.parts:
            merged[d] = merged[d] + rep if d in merged else rep
        object.__setattr__(
            self, "parts", tuple(sorted((d, r) for d, r in merged.items() if r))
        )

    @classmethod
    def concentrated(cls, rep: IrrepSum, degree: int = 0) -> VirtualGradedRep:
        return cls(((degree, rep),))

    @classmethod
    def zero(cls) -> VirtualGradedRep:
        return cls()

    @property
    def by_degree(self) -> dict[int, IrrepSum]:
        return dict(self.parts)

    def __bool__(self) -> bool:
        return bool(self.parts)

    def degrees(self) -> list[int]:
        return [d for d, _ in self.parts]

    def shift(self, k: int) -> VirtualGradedRep:
        """The shift ``[k]``: what sat in degree ``d`` now sits in ``d - k``."""
        return VirtualGradedRep(tuple((d - k, r) for d, r in self.parts))

    def __add__(self, other: VirtualGradedRep) -> VirtualGradedRep:
        return VirtualGradedRep(self.parts + other.parts)

    def invariants(self) -> dict[int, int]:
        """Graded dimension of the invariant part."""
        return {d: r[0] for d, r in self.parts if r[0]}

    def dims(self) -> dict[int, int]:
        return {d: r.dimension for d, r in self.parts}

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * r.dimension for d, r in self.parts)

    def __repr__(self) -> str:
        inner = ", ".join(f"{d}: {r!r}" for d, r in self.parts)
        return f"VirtualGradedRep({{{inner}}})"


def graded_tensor(x: VirtualGradedRep, y: VirtualGradedRep) -> VirtualGradedRep:
    """Degree-wise convolution; degrees add."""
    return VirtualGradedRep(
        tuple((d1 + d2, tensor(r1, r2)) for d1, r1 in x.parts for d2, r2 in y.parts)
    )


def character(m: int) -> dict[int, int]:
    """Torus character of the virtual module ``V_m`` for any integer ``m``.

    Uses ``V_{-1} = 0`` and ``V_m = -V_{-m-2}`` for ``m <= -2``, which is the
    Euler characteristic of ``O(m)`` on the projective line.
    """
    if m >= 0:
        return {w: 1 for w in range(-m, m + 1, 2)}
    if m == -1:
        return {}
    return {w: -1 for w in range(m + 2, -m - 1, 2)}
