"""Equivariant cohomology of line bundles on products of P^1 and on the stack.

On ``(P^1)^n`` every line bundle ``O(a_1, ..., a_n)`` has SL2-equivariant
cohomology given by Künneth from the single-factor answer, and the bundles
``F_{l,E}`` on the stack of ``n`` points are ``O(E) ⊗ V_l`` as SL2-bundles.
Homs on the stack are the SL2-invariant parts.

The boundary-sheaf helpers compute cohomology on products of two projective
spaces, which is what pairings of the torsion sheaves ``O_δ(-a, -b)`` reduce to
once the normal bundle ``O(-1, -1)`` is accounted for.
"""

from __future__ import annotations

from collections.abc import Sequence
from functools import lru_cache
from math import comb

from .labels import PairLE, exponents, popcount
from .sl2 import IrrepSum, VirtualGradedRep, graded_tensor, invariants_of_product

GradedDims = dict[int, int]


def p1_cohomology(a: int) -> VirtualGradedRep:
    """``RΓ(P^1, O(a))`` as a graded SL2-module."""
    if a >= 0:
        return VirtualGradedRep.concentrated(IrrepSum.irrep(a), 0)
    if a == -1:
        return VirtualGradedRep.zero()
    return VirtualGradedRep.concentrated(IrrepSum.irrep(-a - 2), 1)


def _factor_data(exps: Sequence[int]) -> tuple[int, list[int]] | None:
    """Degree and highest weights of ``RΓ(O(exps))``, or ``None`` if it vanishes."""
    degree = 0
    highest = []
    for a in exps:
        if a == -1:
            return None
        if a >= 0:
            highest.append(a)
        else:
            degree += 1
            highest.append(-a - 2)
    return degree, highest


def product_cohomology(exps: Sequence[int]) -> VirtualGradedRep:
    """Künneth: the graded tensor product of the factor cohomologies."""
    out = VirtualGradedRep.concentrated(IrrepSum.trivial(), 0)
    for a in exps:
        out = graded_tensor(out, p1_cohomology(a))
        if not out:
            break
    return out


def invariant_cohomology(exps: Sequence[int], extra: Sequence[int] = ()) -> GradedDims:
    """Graded dimension of ``(RΓ(O(exps)) ⊗ V_{extra_1} ⊗ ...)^{SL2}``.

    Every factor contributes one irreducible in one degree, so the result is
    concentrated in a single degree and the invariant count is a pure
    tensor-product multiplicity.
    """
    data = _factor_data(exps)
    if data is None:
        return {}
    degree, highest = data
    if any(m < 0 for m in extra):
        raise ValueError("extra highest weights must be nonnegative")
    k = invariants_of_product(tuple(sorted(highest + list(extra))))
    return {degree: k} if k else {}


def normalize(pair: PairLE) -> tuple[PairLE, int] | None:
    """Apply ``F_{-1,E} = 0`` and ``F_{l,E} = F_{-l-2,E}[-1]`` for ``l <= -2``.

    Returns the label with nonnegative ``l`` and the shift ``k`` such that the
    original object is ``F[k]``, or ``None`` for the zero object.
    """
    if pair.l >= 0:
        return pair, 0
    if pair.l == -1:
        return None
    return PairLE(-pair.l - 2, pair.E), -1


def stack_rhom(src: PairLE, dst: PairLE, n: int) -> VirtualGradedRep:
    """``RHom(F_src, F_dst)`` on the stack of ``n`` points, graded invariants.

    Computed as the invariants of ``RΓ(O(E_dst - E_src)) ⊗ V_l ⊗ V_l'``;
    the result holds trivial summands only.
    """
    ns, nd = normalize(src), normalize(dst)
    if ns is None or nd is None:
        return VirtualGradedRep.zero()
    (a, sa), (b, sb) = ns, nd
    if max(a.E, b.E) >> n:
        raise ValueError("label uses a marking outside the n points")
    diff = [y - x for x, y in zip(exponents(a.E, n), exponents(b.E, n))]
    dims = invariant_cohomology(diff, (a.l, b.l))
    # RHom(F[sa], G[sb]) = RHom(F, G)[sb - sa]
    rep = VirtualGradedRep(tuple((d, IrrepSum.trivial(k)) for d, k in dims.items()))
    return rep.shift(sb - sa)


def dual_identity_check(pair: PairLE, n: int) -> bool:
    """Label-level check of ``F_{l,E} = F_{l,E^c}^∨ ⊗ F_{0,Σ}`` for even ``n``."""
    if n % 2:
        raise ValueError("the dual identity is stated for an even number of points")
    full = (1 << n) - 1
    if pair.E & ~full:
        raise ValueError("label uses a marking outside the n points")
    comp = PairLE(pair.l, full ^ pair.E)
    lhs = exponents(pair.E, n)
    rhs = tuple(-c + 1 for c in exponents(comp.E, n))
    rank_ok = pair.l + 1 == comp.l + 1
    parity_ok = (comp.l + popcount(comp.E)) % 2 == 0
    return lhs == rhs and rank_ok and parity_ok


@lru_cache(maxsize=4096)
def _pspace(m: int, d: int) -> tuple[tuple[int, int], ...]:
    if m == 0:
        return ((0, 1),)
    if d >= 0:
        return ((0, comb(d + m, m)),)
    if d <= -m - 1:
        return ((m, comb(-d - 1, m)),)
    return ()


def projective_space_cohomology(m: int, d: int) -> GradedDims:
    """Graded dimension of ``H^*(P^m, O(d))``."""
    if m < 0:
        raise ValueError("dimension must be nonnegative")
    return dict(_pspace(m, d))


def kunneth_dims(*factors: GradedDims) -> GradedDims:
    out: GradedDims = {0: 1}
    for f in factors:
        nxt: GradedDims = {}
        for d1, k1 in out.items():
            for d2, k2 in f.items():
                nxt[d1 + d2] = nxt.get(d1 + d2, 0) + k1 * k2
        out = {d: k for d, k in nxt.items() if k}
    return out


def add_dims(x: GradedDims, y: GradedDims, shift: int = 0) -> GradedDims:
    """``x ⊕ y[shift]`` on graded dimensions."""
    out = dict(x)
    for d, k in y.items():
        out[d - shift] = out.get(d - shift, 0) + k
    return {d: k for d, k in out.items() if k}


def boundary_sheaf_rhom(dim: int, a: int, b: int, a2: int, b2: int) -> GradedDims:
    """``RHom(O_δ(-a,-b), O_δ(-a2,-b2))`` for ``δ = P^dim × P^dim``.

    The divisor has normal bundle ``O(-1,-1)``, giving
    ``RΓ(O(a-a2, b-b2)) ⊕ RΓ(O(a-a2-1, b-b2-1))[-1]``.
    """
    first = kunneth_dims(
        projective_space_cohomology(dim, a - a2), projective_space_cohomology(dim, b - b2)
    )
    second = kunneth_dims(
        projective_space_cohomology(dim, a - a2 - 1),
        projective_space_cohomology(dim, b - b2 - 1),
    )
    return add_dims(first, second, shift=-1)
