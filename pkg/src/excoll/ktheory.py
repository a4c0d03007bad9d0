"""Rank of ``K_0`` of Hassett spaces and class checks for Koszul expansions.

Rank oracle
-----------
For weights ``a`` (each in ``(0, 1]``, sum ``> 2``) the rank of ``K_0`` of the
Hassett space ``M̄_a`` is found by walking the straight line from ``a`` to a
reference vector ``a'`` whose space is ``P^{n-3}`` (one weight 1, all others
equal to ``c = 2/(2n-3)``), where the rank is ``n - 2``.

A wall is a time ``t`` at which ``Σ_J a_j(t) = 1`` for some ``|J| ≥ 2``.  At
``t`` both neighbouring spaces are blow-ups of the space at the wall along the
transversal loci where the points of a crossing set collide: the sets ``G``
that are heavy on the ``a`` side for the earlier neighbour and the sets ``H``
heavy on the ``a'`` side for the later one.  For a blow-up along transversal
loci the rank grows by

    Σ over nonempty families F of pairwise disjoint sets  Π_{J∈F} (|J| - 2) · rank(Y_F),

where ``Y_F`` is the locus of ``F``: every ``J`` collapsed to one point of
weight 1 and the remaining weights nudged down so that no wall is touched.
So ``rank(before) = rank(after) - contrib(H) + contrib(G)``.

Koszul class check
------------------
A Koszul expansion pushes the complex resolving ``O_U``,
``U = Δ_{I ∪ {x}} ⊂ (P^1)^n × P^1_x``, twisted by ``O(-E_0) ⊠ O(m)``, down to
``(P^1)^n``.  Its terms are the bundles ``O(-(E_0 ∪ J)) ⊗ V_{m-|J|}``
(normalized by the shift rule).  At every torus-fixed point ``z_K`` the
alternating sum of their characters must equal the character of
``O_{Δ_I}`` twisted by the pushed-forward line bundle, which is zero off
``Δ_I`` and ``t^{±m} t^{c_K(-E_0)} (1 - t^{∓2})^{|I|-1}`` on it.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .git import GitProblem
from .labels import bits, popcount
from .sl2 import character


class NonGeneric(ValueError):
    """A subset of at least two markings has weight exactly 1."""


@dataclass(frozen=True)
class HassettWeights:
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        w = tuple(Fraction(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) < 3:
            raise ValueError("need at least three markings")
        if any(not (0 < x <= 1) for x in w):
            raise ValueError("weights must lie in (0, 1]")
        if sum(w) <= 2:
            raise ValueError("weights must sum to more than 2")
        bad = _exact_one(w)
        if bad is not None:
            raise NonGeneric(f"markings {bits(bad)} have total weight exactly 1")

    @property
    def n(self) -> int:
        return len(self.weights)

    @classmethod
    def m0n(cls, n: int) -> HassettWeights:
        return cls((Fraction(1),) * n)


@dataclass(frozen=True)
class WallEvent:
    t: Fraction
    heavier_before: tuple[int, ...]
    heavier_after: tuple[int, ...]


def _subset_sums(w: Sequence[Fraction]) -> list[Fraction]:
    sums = [Fraction(0)] * (1 << len(w))
    for K in range(1, 1 << len(w)):
        low = K & -K
        sums[K] = sums[K ^ low] + w[low.bit_length() - 1]
    return sums


def _exact_one(w: Sequence[Fraction]) -> int | None:
    for K, s in enumerate(_subset_sums(w)):
        if s == 1 and popcount(K) >= 2:
            return K
    return None


def reference_weights(n: int, top: int) -> tuple[Fraction, ...]:
    c = Fraction(2, 2 * n - 3)
    return tuple(Fraction(1) if i == top else c for i in range(n))


def wall_events(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[WallEvent]:
    """Walls met on the segment from ``a`` (t = 0) to ``b`` (t = 1), in order."""
    n = len(a)
    sa, sb = _subset_sums(a), _subset_sums(b)
    by_t: dict[Fraction, tuple[list[int], list[int]]] = {}
    for J in range(1 << n):
        if popcount(J) < 2 or sa[J] == sb[J]:
            continue
        t = (1 - sa[J]) / (sb[J] - sa[J])
        if 0 < t < 1:
            before, after = by_t.setdefault(t, ([], []))
            (before if sa[J] > 1 else after).append(J)
    return [WallEvent(t, tuple(g), tuple(h)) for t, (g, h) in sorted(by_t.items())]


def _at(a: Sequence[Fraction], b: Sequence[Fraction], t: Fraction) -> tuple[Fraction, ...]:
    return tuple((1 - t) * x + t * y for x, y in zip(a, b))


def _locus_weights(w: Sequence[Fraction], family: Sequence[int]) -> tuple[Fraction, ...]:
    """Collapse each set of ``family`` to one marking of weight 1; nudge the rest down."""
    n = len(w)
    used = 0
    for J in family:
        used |= J
    rest = [w[i] for i in range(n) if not (used >> i) & 1]
    sums = _subset_sums(w)
    gaps = [abs(s - 1) for K, s in enumerate(sums) if popcount(K) >= 1 and s != 1]
    gaps += [x for x in rest] + [sum(w) - 2]
    delta = min(gaps) / (4 * n)
    return tuple([Fraction(1)] * len(family) + [x - delta for x in rest])


def _disjoint_families(sets: Sequence[int]) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def grow(start: int, used: int, chosen: tuple[int, ...]) -> None:
        for k in range(start, len(sets)):
            J = sets[k]
            if J & used:
                continue
            fam = chosen + (J,)
            out.append(fam)
            grow(k + 1, used | J, fam)

    grow(0, 0, ())
    return out


def _contribution(w: Sequence[Fraction], sets: Sequence[int]) -> int:
    total = 0
    # |J| = 2 gives a factor 0, so only larger sets matter
    big = [J for J in sets if popcount(J) > 2]
    for fam in _disjoint_families(big):
        factor = 1
        for J in fam:
            factor *= popcount(J) - 2
        total += factor * _rank(_canon(_locus_weights(w, fam)))
    return total


def _canon(w: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sorted(w, reverse=True))


@lru_cache(maxsize=None)
def _rank(w: tuple[Fraction, ...]) -> int:
    n = len(w)
    if n == 3:
        return 1
    top = max(range(n), key=lambda i: w[i])
    ref = reference_weights(n, top)
    rank = n - 2
    for ev in reversed(wall_events(w, ref)):
        at = _at(w, ref, ev.t)
        rank += _contribution(at, ev.heavier_before) - _contribution(at, ev.heavier_after)
    return rank


def rank_hassett(w: HassettWeights | Sequence[Fraction | int]) -> int:
    """Rank of ``K_0(M̄_a)``."""
    if not isinstance(w, HassettWeights):
        w = HassettWeights(tuple(Fraction(x) for x in w))
    return _rank(_canon(w.weights))


def rank_with_reference(w: HassettWeights, top: int, c: Fraction) -> int:
    """The same rank, walking to the reference ``(c, ..., 1 at top, ..., c)``.

    Any ``c`` with ``(n-2) c < 1 < (n-1) c`` gives ``P^{n-3}``; used to test
    that the answer does not depend on the path.
    """
    n = w.n
    if not ((n - 2) * c < 1 < (n - 1) * c):
        raise ValueError("reference weights do not give a projective space")
    ref = tuple(Fraction(1) if i == top else c for i in range(n))
    if _exact_one(ref) is not None:
        raise NonGeneric("reference weights are not generic")
    rank = n - 2
    for ev in reversed(wall_events(w.weights, ref)):
        at = _at(w.weights, ref, ev.t)
        rank += _contribution(at, ev.heavier_before) - _contribution(at, ev.heavier_after)
    return rank


def mpq_weights(p: int, q: int) -> HassettWeights:
    """Heavy/light weights, raised uniformly by a small amount so the sum exceeds 2."""
    if p < 3:
        raise ValueError("need at least three heavy markings")
    if q == 0:
        base = [Fraction(2, p)] * p
    else:
        eps = GitProblem.epsilon(p, q)
        base = [Fraction(2, p) - eps] * p + [p * eps / q] * q
    sums = _subset_sums(base)
    gaps = [abs(s - 1) for K, s in enumerate(sums) if popcount(K) >= 1 and s != 1]
    lift = min(gaps) / (4 * (p + q))
    return HassettWeights(tuple(x + lift for x in base))


def rank_mpq(p: int, q: int = 0) -> int:
    return rank_hassett(mpq_weights(p, q))


# ---------------------------------------------------------------------------
# Koszul class check


Laurent = dict[int, int]


def _add(acc: Laurent, poly: Laurent, coeff: int = 1, shift: int = 0) -> None:
    for e, k in poly.items():
        acc[e + shift] = acc.get(e + shift, 0) + coeff * k


def _clean(p: Laurent) -> Laurent:
    return {e: k for e, k in p.items() if k}


def window_weight(exps_mask_neg: int, K: int, n: int) -> int:
    """Window-sign weight of ``O(-E)`` at ``z_K``: ``Σ_{K} 1 - Σ_{K^c} 1`` over ``E``."""
    inside = popcount(exps_mask_neg & K)
    return inside - (popcount(exps_mask_neg) - inside)


@dataclass
class KoszulExpansion:
    """The pushed-forward terms of one Koszul move, in dual-label form.

    ``terms`` lists ``(l, E, shift)`` for the bundles ``F^∨_{l,E}[shift]``;
    ``torsion`` is the torsion term as ``(l, E, shift)`` when present.
    ``root`` is the generated term, which is also listed in ``terms``.
    """

    n: int
    I: int
    E0: int
    m: int
    terms: list[tuple[int, int, int]] = field(default_factory=list)
    torsion: tuple[int, int, int] | None = None
    r: int = 0


def _lhs(exp: KoszulExpansion, K: int) -> Laurent:
    acc: Laurent = {}
    for l, E, shift in exp.terms:
        if E & exp.E0 != exp.E0 or (E & ~exp.E0) & ~exp.I:
            raise ValueError("term label is not E0 ∪ J with J ⊆ I")
        j = popcount(E & ~exp.E0)
        sign = (-1) ** (j + (shift % 2))
        _add(acc, character(l), sign, window_weight(E, K, exp.n))
    return _clean(acc)


def _diagonal_class(n: int, I: int, E0: int, m: int, K: int) -> Laurent:
    """Character of ``O_{Δ_I}(-E_0) ⊗ O(m)_I`` at ``z_K``."""
    i = popcount(I)
    if I & K and I & ~K:
        return {}
    at_inf = bool(I & K)
    base = window_weight(E0, K, n) + (-m if at_inf else m)
    w = 2 if at_inf else -2  # weight of the conormal direction
    poly: Laurent = {0: 1}
    for _ in range(i - 1):
        nxt: Laurent = {}
        _add(nxt, poly)
        _add(nxt, poly, -1, w)
        poly = _clean(nxt)
    return {e + base: k for e, k in poly.items()}


def torsion_dual_class(n: int, l: int, E: int, R: int, heavy: int, K: int) -> Laurent:
    """Character at ``z_K`` of ``T^∨_{l,E}[r-1]`` as a stack class.

    The dual of ``T_{l,E}`` is the pushforward from ``Δ_R`` of
    ``((2 - e_q - r + l)/2) ψ_u - Σ_{j ∈ E_q} δ_{ju}`` shifted by ``1 - r``.
    On the stack ``ψ_u`` is ``O(-2)`` on the collided coordinate and ``δ_{ju}``
    is ``O(1)`` on ``j`` and on ``u``; the shift ``[r-1]`` cancels.
    """
    Eq = E & ~heavy
    eq = popcount(Eq)
    r = popcount(R)
    psi = 2 - eq - r + l  # twice the ψ coefficient
    u_exp = -psi - eq
    return _diagonal_class(n, R, Eq, u_exp, K)


def koszul_class_check(exp: KoszulExpansion | None, heavy: int = 0) -> tuple[bool, int | None]:
    """Check the alternating character identity at every torus-fixed point.

    Returns ``(True, None)`` or ``(False, K)`` with a failing fixed point.
    With a torsion term the identity reads ``Σ terms = class(torsion)``.
    """
    if exp is None or not exp.terms:
        return True, None
    for K in range(1 << exp.n):
        lhs = _lhs(exp, K)
        if exp.torsion is None:
            rhs = _diagonal_class(exp.n, exp.I, exp.E0, exp.m, K)
        else:
            l, E, _ = exp.torsion
            rhs = torsion_dual_class(exp.n, l, E, exp.I, heavy, K)
        if lhs != rhs:
            return False, K
    return True, None


def koszul_rank_sum(exp: KoszulExpansion) -> int:
    """Alternating rank sum of the bundle terms (0 whenever ``|I| >= 2``)."""
    total = 0
    for l, E, shift in exp.terms:
        j = popcount(E & ~exp.E0)
        total += (-1) ** (j + shift % 2) * (l + 1)
    return total


def binomial_rank_identity(i: int, m: int) -> int:
    """``Σ_j (-1)^j C(i,j) (m - j + 1)`` with virtual ranks."""
    return sum((-1) ** j * comb(i, j) * (m - j + 1) for j in range(i + 1))
