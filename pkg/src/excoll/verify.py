"""Pairwise verification that an enumerated collection is exceptional.

Every ordered pair ``(i, j)`` of objects receives a :class:`PairVerdict`.
Pairs with ``i > j`` must have vanishing ``RHom``; diagonal pairs must give
``C`` in degree 0; pairs with ``i < j`` are computed when a method applies and
reported for information (they feed the strongness and order summaries).

Methods, by pair kind:

``window+stack`` / ``teleman+stack``
    Two bundles on a space with generic weights.  The Hom on the quotient
    equals the Hom on the stack when both bundles fit one window, or, more
    generally, when every weight of ``F^∨ ⊗ G`` lies above ``-η`` on every
    stratum.  The stack Hom is an invariant computation.
``lift+window+stack``
    Two bundles on ``M̄_p`` with ``p`` even.  The pullback along the universal
    curve ``M̄_{p,1} ≅ M̄_{p+1} → M̄_p`` is fully faithful, so the Hom is
    computed on ``p + 1`` symmetric points.
``universal-curve+window+stack``
    Two bundles on ``M̄_{p,q+1}`` with ``p`` and ``q + 1`` even.  One light
    marking ``z`` is given negligible weight (the universal curve over
    ``M̄_{p,q}``); ``z`` is chosen per pair.
``torsion-case(1)`` ... ``torsion-case(4)``
    A torsion sheaf supported on the locus ``Z_R`` where the heavy markings of
    ``R`` collide.  The Hom reduces to invariant cohomology of a line bundle
    on the auxiliary problem ``Z_R`` (markings ``u ⊔ R' ⊔ Q``) or ``Y``
    (markings ``u, v ⊔ Q``), twisted by a high power ``N`` of a bundle trivial
    on the quotient; the weight condition is checked symbolically in ``N``
    and at three concrete values.
``disjoint-support``
    Objects supported on disjoint loci.
``boundary-Koszul``
    Two twists of ``O_δ`` on the same exceptional divisor ``δ ≅ P^m × P^m``.
``boundary-perpendicularity``
    A bundle against ``O_δ(-a,-b)``, decided by the subset-score criterion for
    the restriction of ``F_{l,E}`` to ``δ``.

A pair for which no method applies gets the third state
``method-inapplicable``; it is never reported as vanishing.
"""

from __future__ import annotations

import csv
import io
import os
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from math import comb

import numpy as np

from .cohomology import GradedDims, add_dims, boundary_sheaf_rhom, invariant_cohomology, stack_rhom
from .enumeration import Collection, CollectionObject, Space, Tag, Variant, enumerate_collection
from .git import GitProblem, Stratum, devil_twist, teleman_ok
from .labels import PairLE, bits, popcount
from .scores import f_value

JOBS_ENV = "EXCOLL_JOBS"


class MethodInapplicable(Exception):
    """The method's hypothesis fails; nothing is claimed about the Hom."""

    def __init__(self, message: str, witness: list[int] | None = None):
        super().__init__(message)
        self.witness = witness


class Status(str, Enum):
    OK = "ok"
    FAIL = "fail"
    INAPPLICABLE = "method-inapplicable"
    SKIPPED = "skipped"


@dataclass
class PairVerdict:
    source: int
    target: int
    method: str
    result: GradedDims = field(default_factory=dict)
    status: Status = Status.OK
    required: bool = True
    raw_shift: int = 0
    witness: list[int] | None = None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.status is Status.OK

    @property
    def computed(self) -> bool:
        return self.status in (Status.OK, Status.FAIL)

    def to_json(self) -> dict:
        out = {
            "source": self.source,
            "target": self.target,
            "method": self.method,
            "result": {str(d): k for d, k in sorted(self.result.items())},
            "status": self.status.value,
            "ok": self.ok,
            "required": self.required,
        }
        if self.raw_shift:
            out["raw_shift"] = self.raw_shift
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


def judge(i: int, j: int, dims: GradedDims) -> bool:
    """``i > j``: nothing in any degree; ``i = j``: exactly ``C`` in degree 0."""
    dims = {d: k for d, k in dims.items() if k}
    if i > j:
        return not dims
    if i == j:
        return dims == {0: 1}
    return True


def _finish(i: int, j: int, method: str, dims: GradedDims, **kw) -> PairVerdict:
    dims = {d: k for d, k in dims.items() if k}
    status = Status.OK if judge(i, j, dims) else Status.FAIL
    return PairVerdict(i, j, method, dims, status, required=i >= j, **kw)


# ---------------------------------------------------------------------------
# bundles on generic problems


@dataclass(frozen=True)
class _Tables:
    """Window-convention weight ends of bundles at every stratum (numpy rows)."""

    eta: np.ndarray
    masks: np.ndarray


@lru_cache(maxsize=64)
def _tables(problem: GitProblem) -> _Tables:
    return _Tables(
        np.array([st.eta for st in problem.strata], dtype=np.int64),
        np.array([st.K for st in problem.strata], dtype=np.int64),
    )


def _popcount_vec(a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    x = a.copy()
    while np.any(x):
        out += x & 1
        x >>= 1
    return out


def _ends(pair: PairLE, problem: GitProblem) -> tuple[np.ndarray, np.ndarray]:
    t = _tables(problem)
    e_inf = _popcount_vec(t.masks & pair.E)
    c = pair.e - 2 * e_inf
    return c - pair.l, c + pair.l


def pair_window_witness(src: PairLE, dst: PairLE, problem: GitProblem) -> tuple[bool, Stratum | None]:
    """Whether ``{src, dst}`` fits one window; else a failing stratum."""
    t = _tables(problem)
    lo1, hi1 = _ends(src, problem)
    lo2, hi2 = _ends(dst, problem)
    bad = (np.maximum(hi1, hi2) - t.eta + 1) > np.minimum(lo1, lo2)
    if bad.any():
        return False, problem.strata[int(np.argmax(bad))]
    return True, None


def hom_weight_witness(src: PairLE, dst: PairLE, problem: GitProblem) -> Stratum | None:
    """First stratum where ``src^∨ ⊗ dst`` has a weight ``<= -η`` (Teleman sign).

    In the window sign the weights of ``src^∨ ⊗ dst`` at ``z_K`` run up to
    ``hi(dst) - lo(src)``; the Teleman weights are their negatives.
    """
    t = _tables(problem)
    lo1, _ = _ends(src, problem)
    _, hi2 = _ends(dst, problem)
    bad = (hi2 - lo1) >= t.eta
    return problem.strata[int(np.argmax(bad))] if bad.any() else None


def verify_bundle_pair(
    src: PairLE, dst: PairLE, problem: GitProblem, i: int = 1, j: int = 0, method: str = ""
) -> PairVerdict:
    """Verdict for ``RHom(F_src, F_dst)`` on the quotient of ``problem``.

    Raises :class:`MethodInapplicable` when neither the window nor the
    one-sided weight condition holds; that says nothing about the Hom.
    """
    fits, _ = pair_window_witness(src, dst, problem)
    tag = "window+stack"
    if not fits:
        bad = hom_weight_witness(src, dst, problem)
        if bad is not None:
            raise MethodInapplicable(
                f"weights of the Hom bundle reach -eta on stratum {bits(bad.K)}", bits(bad.K)
            )
        tag = "teleman+stack"
    dims = stack_rhom(src, dst, problem.n).invariants()
    return _finish(i, j, method or tag, dims)


# ---------------------------------------------------------------------------
# torsion sheaves on the loci Z_R (p even, q odd)


def _n0(space: Space, lmax: int) -> int:
    return 4 * (space.r + space.s + space.q + lmax)


def _zr_vector(space: Space, R: int, u: int, rprime: Sequence[int] | int, light: Sequence[int]) -> list[int]:
    """Exponents on ``u ⊔ R' ⊔ Q`` (``R'`` entries in increasing marking order)."""
    if isinstance(rprime, int):
        rprime = [(rprime >> i) & 1 for i in bits(space.split.heavy ^ R)]
    return [u, *rprime, *light]


def _light_diff(space: Space, src: PairLE, dst: PairLE) -> list[int]:
    p = space.p
    return [((dst.E >> i) & 1) - ((src.E >> i) & 1) for i in range(p, space.n)]


@dataclass(frozen=True)
class TorsionTerm:
    exps: tuple[int, ...]
    extra: tuple[int, ...]
    multiplicity: int = 1
    degree: int = 0


def _evaluate_terms(
    terms: Sequence[TorsionTerm], devil: Sequence[int], problem: GitProblem, Ns: Sequence[int]
) -> tuple[GradedDims | None, list[int] | None]:
    """Teleman check, then invariant cohomology of ``Σ terms ⊗ D^N`` for each ``N``.

    Returns the graded dimension at the first ``N`` (all values of ``N`` must
    agree) or a failing stratum.
    """
    for t in terms:
        ws = devil_twist(t.exps, devil, problem, l=sum(t.extra))
        res = teleman_ok(ws, problem, Ns)
        if not res:
            assert res.witness is not None
            return None, bits(res.witness.K)
    results = []
    for N in Ns:
        total: GradedDims = {}
        for t in terms:
            exps = [a + N * d for a, d in zip(t.exps, devil)]
            dims = invariant_cohomology(exps, t.extra)
            dims = {d: k * t.multiplicity for d, k in dims.items()}
            total = add_dims(total, dims, shift=-t.degree)
        results.append(total)
    if any(r != results[0] for r in results):
        raise AssertionError(f"answer depends on the devil exponent: {results}")
    return results[0], None


@dataclass(frozen=True)
class TorsionContext:
    space: Space
    Ns: tuple[int, int, int]

    @classmethod
    def make(cls, space: Space, lmax: int) -> TorsionContext:
        N0 = _n0(space, lmax)
        return cls(space, (N0, N0 + 1, 2 * N0))

    @property
    def zr(self) -> GitProblem:
        return GitProblem.torsion_locus(self.space.p, self.space.q)

    @property
    def y(self) -> GitProblem:
        return GitProblem.torsion_intersection(self.space.p, self.space.q)

    def zr_devil(self) -> list[int]:
        r = self.space.r
        return [r] + [1] * r + [0] * self.space.q

    def y_devil(self) -> list[int]:
        return [1, 1] + [0] * self.space.q


def torsion_case_1(ctx: TorsionContext, bundle: PairLE, torsion: PairLE, i: int, j: int) -> PairVerdict:
    """``RHom(F_{l,E}, T_{l',E'})`` with ``R = E'_p``."""
    sp = ctx.space
    H = sp.split.heavy
    R = torsion.E & H
    Ep = bundle.E & H
    u = sp.r + torsion.l - popcount(Ep & R)
    rprime = [-((Ep >> k) & 1) for k in bits(H ^ R)]
    exps = _zr_vector(sp, R, u, rprime, _light_diff(sp, bundle, torsion))
    term = TorsionTerm(tuple(exps), (bundle.l,))
    return _torsion_verdict(ctx, [term], ctx.zr, ctx.zr_devil(), i, j, "torsion-case(1)", 0)


def torsion_case_2(ctx: TorsionContext, torsion: PairLE, bundle: PairLE, i: int, j: int) -> PairVerdict:
    """``RHom(T_{l,E}, F_{l',E'})`` with ``R = E_p``, via ``i^! = i^* ⊗ det N [-codim]``."""
    sp = ctx.space
    H = sp.split.heavy
    R = torsion.E & H
    Ep2 = bundle.E & H
    # det of the normal bundle of Z_R restricts to O(2r - 2) on the u factor
    u = sp.r - torsion.l + popcount(Ep2 & R) - 2
    rprime = [(Ep2 >> k) & 1 for k in bits(H ^ R)]
    exps = _zr_vector(sp, R, u, rprime, _light_diff(sp, torsion, bundle))
    term = TorsionTerm(tuple(exps), (bundle.l,))
    return _torsion_verdict(ctx, [term], ctx.zr, ctx.zr_devil(), i, j, "torsion-case(2)", -(sp.r - 1))


def torsion_case_3(ctx: TorsionContext, src: PairLE, dst: PairLE, i: int, j: int) -> PairVerdict:
    """``RHom(T_{l,E}, T_{l',E'})`` with ``E_p = E'_p = R`` through the Koszul complex.

    The term for ``J ⊆ R \\ {first}`` is the line bundle
    ``O(2|J| - l + l', 0, E'_q - E_q)`` placed in degree ``|J|``.  The sum
    over ``J`` is the first page of the spectral sequence; when at most one
    term survives it is the answer.
    """
    sp = ctx.space
    R = src.E & sp.split.heavy
    light = _light_diff(sp, src, dst)
    terms = [
        TorsionTerm(
            tuple(_zr_vector(sp, R, 2 * k - src.l + dst.l, [0] * sp.r, light)),
            (),
            comb(sp.r - 1, k),
            k,
        )
        for k in range(sp.r)
    ]
    return _torsion_verdict(ctx, terms, ctx.zr, ctx.zr_devil(), i, j, "torsion-case(3)", 0)


def torsion_case_4(ctx: TorsionContext, src: PairLE, dst: PairLE, i: int, j: int) -> PairVerdict:
    """``RHom(T_{l,E}, T_{l',E'})`` with ``E'_p`` the complement of ``E_p``, on ``Y``."""
    sp = ctx.space
    exps = [-src.l - dst.l - 2, 0, *_light_diff(sp, src, dst)]
    term = TorsionTerm(tuple(exps), ())
    return _torsion_verdict(ctx, [term], ctx.y, ctx.y_devil(), i, j, "torsion-case(4)", -(sp.r - 1))


def _torsion_verdict(
    ctx: TorsionContext,
    terms: Sequence[TorsionTerm],
    problem: GitProblem,
    devil: Sequence[int],
    i: int,
    j: int,
    method: str,
    raw_shift: int,
) -> PairVerdict:
    dims, witness = _evaluate_terms(terms, devil, problem, ctx.Ns)
    if dims is None:
        return PairVerdict(
            i, j, method, {}, Status.INAPPLICABLE, required=i >= j, witness=witness,
            note=f"weight condition fails on stratum {witness} of {problem.name}",
        )
    return _finish(i, j, method, dims, raw_shift=raw_shift)


def verify_torsion_pair(
    ctx: TorsionContext, x: CollectionObject, y: CollectionObject, i: int, j: int
) -> PairVerdict:
    """Dispatch a pair involving at least one ``T_{l,E}``."""
    H = ctx.space.split.heavy
    assert x.pair is not None and y.pair is not None
    if x.tag is Tag.BUNDLE:
        return torsion_case_1(ctx, x.pair, y.pair, i, j)
    if y.tag is Tag.BUNDLE:
        return torsion_case_2(ctx, x.pair, y.pair, i, j)
    R1, R2 = x.pair.E & H, y.pair.E & H
    if R1 == R2:
        return torsion_case_3(ctx, x.pair, y.pair, i, j)
    if R1 ^ R2 == H:
        return torsion_case_4(ctx, x.pair, y.pair, i, j)
    return _finish(i, j, "disjoint-support", {})


# ---------------------------------------------------------------------------
# even / even spaces


def _complement(pair: PairLE, full: int) -> PairLE:
    return PairLE(pair.l, full ^ pair.E)


def _move_last(n: int, z: int) -> tuple[int, ...]:
    """Permutation sending marking ``z`` to position ``n - 1``, others in order."""
    order = [k for k in range(n) if k != z] + [z]
    perm = [0] * n
    for new, old in enumerate(order):
        perm[old] = new
    return tuple(perm)


def _z_candidates(space: Space, src: PairLE, dst: PairLE) -> list[int]:
    light = space.split.light
    first = dst.E & ~src.E & light
    second = light & ~(src.E | dst.E)
    rest = light & ~first & ~second
    return bits(first) + bits(second) + bits(rest)


def even_bundle_pair(space: Space, variant: Variant, src: PairLE, dst: PairLE, i: int, j: int) -> PairVerdict:
    """Bundle pair on ``M̄_{p,q+1}`` with ``p`` and ``q + 1`` even."""
    full = space.split.full
    if variant.bundles == "1B":
        # F_{l,E} = F_{l,E^c}^∨ ⊗ F_{0,Σ}: swap and complement to land in group 1A
        src, dst = _complement(dst, full), _complement(src, full)
    if space.q == 0:
        problem = GitProblem.symmetric(space.p + 1)
        try:
            return verify_bundle_pair(src, dst, problem, i, j, "lift+window+stack")
        except MethodInapplicable as exc:
            return PairVerdict(i, j, "lift+window+stack", {}, Status.INAPPLICABLE, i >= j,
                               witness=exc.witness, note=str(exc))
    problem = GitProblem.universal_curve(space.p, space.q - 1)
    last: MethodInapplicable | None = None
    for z in _z_candidates(space, src, dst):
        perm = _move_last(space.n, z)
        try:
            v = verify_bundle_pair(src.permuted(perm), dst.permuted(perm), problem, i, j,
                                   "universal-curve+window+stack")
        except MethodInapplicable as exc:
            last = exc
            continue
        v.note = f"negligible marking {space.split.name(z)}"
        return v
    return PairVerdict(i, j, "universal-curve+window+stack", {}, Status.INAPPLICABLE, i >= j,
                       witness=last.witness if last else None, note=str(last) if last else "")


def boundary_pair(space: Space, x: CollectionObject, y: CollectionObject, i: int, j: int) -> PairVerdict:
    if x.divisor != y.divisor:
        return _finish(i, j, "disjoint-support", {})
    dims = boundary_sheaf_rhom(space.boundary_dim, x.a, x.b, y.a, y.b)
    return _finish(i, j, "boundary-Koszul", dims)


def perpendicular(space: Space, pair: PairLE, T: int, a: int, b: int) -> bool | None:
    """Whether ``RHom(F_{l,E}, O_δ(-a,-b)) = 0`` follows from the score criterion.

    ``None`` when ``max(|f_T|, |f_{T^c}|) > (r+s)/2``.
    """
    full = space.split.full
    mu = max(abs(f_value(T, pair)), abs(f_value(full ^ T, pair)))
    rs = space.r + space.s
    if 2 * mu > rs:
        return None
    if 1 <= a <= rs - 1 and 1 <= b <= rs - 1:
        return True
    if a == 0 and 0 < b < rs - mu:
        return True
    if b == 0 and 0 < a < rs - mu:
        return True
    return False


def cross_pair(space: Space, x: CollectionObject, y: CollectionObject, i: int, j: int) -> PairVerdict:
    """A bundle against a boundary sheaf (either direction)."""
    method = "boundary-perpendicularity"
    if x.tag is Tag.BOUNDARY_AB:
        # Hom from a boundary sheaf into a later bundle: no vanishing required
        return PairVerdict(i, j, method, {}, Status.INAPPLICABLE, i >= j,
                           note="forward pair; criterion covers bundle-to-boundary only")
    assert x.pair is not None and y.divisor is not None
    verdict = perpendicular(space, x.pair, y.divisor, y.a, y.b)
    if verdict is None:
        return PairVerdict(i, j, method, {}, Status.INAPPLICABLE, i >= j,
                           note="subset scores exceed (r+s)/2")
    if verdict:
        return _finish(i, j, method, {})
    return PairVerdict(i, j, method, {}, Status.INAPPLICABLE, i >= j,
                       note="twist outside the vanishing range")


# ---------------------------------------------------------------------------
# dispatcher


@dataclass
class CollectionReport:
    space: Space
    variant: Variant
    objects: tuple[CollectionObject, ...]
    verdicts: list[PairVerdict]

    def required(self) -> list[PairVerdict]:
        return [v for v in self.verdicts if v.required]

    @property
    def failures(self) -> list[PairVerdict]:
        return [v for v in self.verdicts if v.required and v.status is Status.FAIL]

    @property
    def inapplicable(self) -> list[PairVerdict]:
        return [v for v in self.verdicts if v.required and v.status is Status.INAPPLICABLE]

    @property
    def skipped(self) -> list[PairVerdict]:
        return [v for v in self.verdicts if v.required and v.status is Status.SKIPPED]

    @property
    def unexpected_skips(self) -> list[PairVerdict]:
        """Required pairs left open that do not involve a group-2A/2B label."""
        out = []
        for v in self.inapplicable + self.skipped:
            a, b = self.objects[v.source], self.objects[v.target]
            if Tag.TILDE_TORSION not in (a.tag, b.tag):
                out.append(v)
        return out

    @property
    def exceptional(self) -> bool:
        return not self.failures and not self.inapplicable and not self.skipped

    @property
    def verified_part_exceptional(self) -> bool:
        return not self.failures and not self.unexpected_skips

    @property
    def strong_bundle_part(self) -> bool:
        """Every computed Hom between bundles sits in degree 0."""
        for v in self.verdicts:
            a, b = self.objects[v.source], self.objects[v.target]
            if a.tag is Tag.BUNDLE and b.tag is Tag.BUNDLE:
                if v.computed and any(d != 0 for d in v.result):
                    return False
        return True

    @property
    def bundle_part_fully_computed(self) -> bool:
        return all(
            v.computed
            for v in self.verdicts
            if self.objects[v.source].tag is Tag.BUNDLE and self.objects[v.target].tag is Tag.BUNDLE
        )

    @property
    def order_valid(self) -> bool:
        return not any(v.source > v.target and v.computed and v.result for v in self.verdicts)

    def summary(self) -> dict:
        by_method: dict[str, int] = {}
        for v in self.verdicts:
            by_method[v.method] = by_method.get(v.method, 0) + 1
        return {
            "objects": len(self.objects),
            "pairs": len(self.verdicts),
            "required_pairs": len(self.required()),
            "failures": len(self.failures),
            "method_inapplicable": len(self.inapplicable),
            "skipped": len(self.skipped),
            "unexpected_skips": len(self.unexpected_skips),
            "exceptional": self.exceptional,
            "verified_part_exceptional": self.verified_part_exceptional,
            "strong_bundle_part": self.strong_bundle_part,
            "bundle_part_fully_computed": self.bundle_part_fully_computed,
            "order_valid": self.order_valid,
            "methods": dict(sorted(by_method.items())),
        }

    def to_json(self) -> dict:
        return {
            "space": {"p": self.space.p, "q": self.space.q},
            "variant": str(self.variant),
            "objects": [o.to_json(k) for k, o in enumerate(self.objects)],
            "summary": self.summary(),
            "verdicts": [v.to_json() for v in self.verdicts],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["source", "target", "method", "status", "required", "result"])
        for v in self.verdicts:
            res = ";".join(f"{d}:{k}" for d, k in sorted(v.result.items()))
            w.writerow([v.source, v.target, v.method, v.status.value, int(v.required), res])
        return buf.getvalue()


def _pair_verdict(
    space: Space, variant: Variant, objects: Sequence[CollectionObject], ctx: TorsionContext | None,
    problem: GitProblem | None, i: int, j: int,
) -> PairVerdict:
    x, y = objects[i], objects[j]
    tags = {x.tag, y.tag}
    if Tag.TILDE_TORSION in tags:
        return PairVerdict(i, j, "skipped-tilde-torsion", {}, Status.SKIPPED, i >= j,
                           note="pairings of group-2A/2B labels are out of scope")
    if Tag.BOUNDARY_AB in tags:
        if tags == {Tag.BOUNDARY_AB}:
            return boundary_pair(space, x, y, i, j)
        return cross_pair(space, x, y, i, j)
    if Tag.TORSION_Z in tags:
        assert ctx is not None
        return verify_torsion_pair(ctx, x, y, i, j)
    assert x.pair is not None and y.pair is not None
    if space.regime == "even_even":
        return even_bundle_pair(space, variant, x.pair, y.pair, i, j)
    assert problem is not None
    try:
        return verify_bundle_pair(x.pair, y.pair, problem, i, j)
    except MethodInapplicable as exc:
        return PairVerdict(i, j, "window+stack", {}, Status.INAPPLICABLE, i >= j,
                           witness=exc.witness, note=str(exc))


def _rows(args) -> list[PairVerdict]:
    space, variant, objects, rows = args
    ctx, problem = _context(space, objects)
    n = len(objects)
    return [_pair_verdict(space, variant, objects, ctx, problem, i, j) for i in rows for j in range(n)]


def _context(space: Space, objects: Sequence[CollectionObject]):
    lmax = max((o.pair.l for o in objects if o.pair is not None), default=0)
    ctx = TorsionContext.make(space, lmax) if space.regime == "even_odd" else None
    problem = None if space.regime == "even_even" else GitProblem.for_space(space.p, space.q)
    return ctx, problem


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def verify_objects(
    space: Space, variant: Variant, objects: Sequence[CollectionObject], jobs: int | None = None
) -> CollectionReport:
    """Verdicts for every ordered pair of ``objects`` in the given order."""
    objects = tuple(objects)
    n = len(objects)
    jobs = default_jobs() if jobs is None else max(1, jobs)
    if jobs == 1 or n < 32:
        verdicts = _rows((space, variant, objects, range(n)))
    else:
        chunks = [list(range(k, n, jobs)) for k in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_rows, [(space, variant, objects, c) for c in chunks]))
        verdicts = [v for part in parts for v in part]
        verdicts.sort(key=lambda v: (v.source, v.target))
    return CollectionReport(space, variant, objects, verdicts)


def verify_collection(
    space: Space | Collection, variant: Variant | str | None = None, jobs: int | None = None
) -> CollectionReport:
    """Enumerate (unless given a collection) and verify every ordered pair."""
    if isinstance(space, Collection):
        coll = space
    else:
        coll = enumerate_collection(space, variant)
    return verify_objects(coll.space, coll.variant, coll.objects, jobs)


def verify_torsion_cases(p: int, q: int, variant: Variant | str = "1A") -> list[PairVerdict]:
    """Verdicts for every pair that involves a ``T_{l,E}`` on ``M̄_{p,q}``."""
    space = Space(p, q)
    if space.regime != "even_odd":
        raise ValueError("torsion sheaves T_{l,E} occur for p even and q odd")
    report = verify_collection(space, variant)
    return [
        v for v in report.verdicts
        if Tag.TORSION_Z in (report.objects[v.source].tag, report.objects[v.target].tag)
    ]


def verify_boundary_part(p: int, q_plus_1: int) -> list[PairVerdict]:
    """Verdicts for the boundary sheaves among themselves, in the chosen order."""
    space = Space(p, q_plus_1)
    if space.regime != "even_even":
        raise ValueError("boundary sheaves occur for p and q + 1 even")
    coll = enumerate_collection(space)
    objs = [o for o in coll.objects if o.tag is Tag.BOUNDARY_AB]
    return [boundary_pair(space, objs[i], objs[j], i, j) for i in range(len(objs)) for j in range(len(objs))]
