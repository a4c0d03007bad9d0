"""Kempf–Ness strata of weighted ``(P^1)^n``, windows and Teleman checks.

The unstable locus of ``(P^1)^n`` for a weight vector ``a`` (normalized so
that ``Σ a_i = 2``) is stratified by the subsets ``K`` with ``Σ_K a_i > 1``:
the stratum of ``K`` is the locus where the points of ``K`` collide, its
fixed point ``z_K`` puts ``K`` at ``∞`` and the rest at ``0``, and the weight
of the conormal determinant there is ``η_K = 2(|K| - 1)``.

Two opposite sign conventions are in use for fixed-point weights:

* ``Convention.WINDOW``: ``O(1)`` on a factor sitting at ``0`` has weight
  ``+1`` and at ``∞`` weight ``-1``.  A bundle lies in the window at ``K``
  when all its weights lie in ``[w_K, w_K + η_K)``.
* ``Convention.TELEMAN``: the weight of ``O(a_1, ..., a_n)`` at ``z_K`` is
  ``Σ_{K} a_i - Σ_{K^c} a_i``; cohomology is unchanged by passing to the
  semistable locus when every weight is ``> -η_K``.

Every :class:`WeightSet` carries its convention and the two never mix
silently.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property

from .labels import PairLE, bits, popcount


class NonGenericWeights(ValueError):
    """Some subset of markings has weight exactly 1."""


class Convention(Enum):
    WINDOW = "window"
    TELEMAN = "teleman"


class ConventionError(ValueError):
    """Weights from the two sign conventions were combined."""


@dataclass(frozen=True, slots=True, order=True)
class LinearForm:
    """``c0 + c1 * N`` with integer coefficients (``N`` the devil exponent)."""

    c0: int
    c1: int = 0

    def __add__(self, other: LinearForm | int) -> LinearForm:
        if isinstance(other, int):
            return LinearForm(self.c0 + other, self.c1)
        return LinearForm(self.c0 + other.c0, self.c1 + other.c1)

    __radd__ = __add__

    def __neg__(self) -> LinearForm:
        return LinearForm(-self.c0, -self.c1)

    def __sub__(self, other: LinearForm | int) -> LinearForm:
        return self + (-other)

    def at(self, N: int) -> int:
        return self.c0 + self.c1 * N

    def eventually_greater(self, bound: int) -> bool:
        """Whether ``c0 + c1 N > bound`` for all sufficiently large ``N``."""
        return self.c1 > 0 or (self.c1 == 0 and self.c0 > bound)

    def __repr__(self) -> str:
        return f"{self.c0}{self.c1:+d}N" if self.c1 else f"{self.c0}"


@dataclass(frozen=True, slots=True)
class WeightSet:
    """All weights ``lo, lo+2, ..., hi`` of a bundle at one fixed point."""

    lo: LinearForm
    hi: LinearForm
    convention: Convention

    def flipped(self) -> WeightSet:
        other = Convention.TELEMAN if self.convention is Convention.WINDOW else Convention.WINDOW
        return WeightSet(-self.hi, -self.lo, other)

    def require(self, convention: Convention) -> WeightSet:
        if self.convention is not convention:
            raise ConventionError(
                f"expected {convention.value} weights, got {self.convention.value}"
            )
        return self


@dataclass(frozen=True, slots=True)
class Stratum:
    K: int
    eta: int
    kind: str = "diagonal"


# role names for auxiliary problems
U, V, RPRIME, LIGHT, HEAVY = "u", "v", "R'", "Q", "P"


@dataclass(frozen=True)
class GitProblem:
    """Weighted ``(P^1)^n`` with exact rational weights summing to 2.

    ``roles`` names what each marking stands for; ordinary problems use
    ``"P"``/``"Q"``, the auxiliary problems around a torsion locus use
    ``"u"``, ``"v"``, ``"R'"`` and ``"Q"``.
    """

    weights: tuple[Fraction, ...]
    roles: tuple[str, ...]
    name: str = ""
    rule: tuple[int, int] | None = None  # (p, q) when the (k_p, k_q) shortcut applies

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.roles):
            raise ValueError("one role per weight")
        total = sum(self.weights, Fraction(0))
        if total <= 0:
            raise ValueError("weights must have positive sum")
        w = tuple(Fraction(x) * 2 / total for x in self.weights)
        if any(not (0 < x <= 1) for x in w):
            raise ValueError("normalized weights must lie in (0, 1]")
        object.__setattr__(self, "weights", w)
        witness = self._exact_one_subset()
        if witness is not None:
            raise NonGenericWeights(
                f"{self.name or 'problem'}: markings {bits(witness)} have weight exactly 1"
            )

    # ---- constructors -------------------------------------------------
    @classmethod
    def symmetric(cls, n: int) -> GitProblem:
        if n % 2 == 0:
            raise NonGenericWeights(f"symmetric weights on {n} points are not generic")
        return cls((Fraction(1),) * n, (HEAVY,) * n, f"symmetric({n})", rule=(n, 0))

    @staticmethod
    def epsilon(p: int, q: int) -> Fraction:
        """An explicit ε below the bounds for the heavy/light recipe."""
        r = p // 2
        bound = Fraction(1, (2 * r + 1) * (r + 1)) if p % 2 else Fraction(1, r * (r + 1))
        eps = Fraction(1, 16 * p * max(q, 1) * (r + 1) ** 2)
        assert eps < bound
        return eps

    @classmethod
    def for_space(cls, p: int, q: int) -> GitProblem:
        """The heavy/light problem whose quotient is ``M̄_{p,q}``.

        ``p`` heavy markings of weight ``2/p - ε`` and ``q`` light markings of
        weight ``pε/q``; generic exactly when ``p`` or ``q`` is odd.
        """
        if q == 0:
            return cls.symmetric(p)
        eps = cls.epsilon(p, q)
        a = Fraction(2, p) - eps
        b = p * eps / q
        return cls((a,) * p + (b,) * q, (HEAVY,) * p + (LIGHT,) * q, f"X({p},{q})", rule=(p, q))

    @classmethod
    def torsion_locus(cls, p: int, q: int) -> GitProblem:
        """Markings ``u ⊔ R' ⊔ Q``: the locus where the points of ``R`` collide."""
        r = p // 2
        eps = cls.epsilon(p, q)
        a = Fraction(2, p) - eps
        b = p * eps / q
        w = (r * a,) + (a,) * r + (b,) * q
        roles = (U,) + (RPRIME,) * r + (LIGHT,) * q
        return cls(w, roles, f"Z_R({p},{q})")

    @classmethod
    def torsion_intersection(cls, p: int, q: int) -> GitProblem:
        """Markings ``u, v ⊔ Q``: both halves of the heavy set collided."""
        r = p // 2
        eps = cls.epsilon(p, q)
        a = Fraction(2, p) - eps
        b = p * eps / q
        w = (r * a, r * a) + (b,) * q
        return cls(w, (U, V) + (LIGHT,) * q, f"Y({p},{q})")

    @classmethod
    def universal_curve(cls, p: int, q: int) -> GitProblem:
        """``M̄_{p,q}`` plus one extra marking of negligible weight (placed last)."""
        base = cls.for_space(p, q)
        gaps = [abs(w - 1) for w in base.subset_weights]
        c = min(g for g in gaps if g) / 4
        return cls(base.weights + (c,), base.roles + (LIGHT,), f"U({p},{q})")

    # ---- basic data ---------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def role_mask(self, role: str) -> int:
        return sum(1 << i for i, x in enumerate(self.roles) if x == role)

    def weight(self, K: int) -> Fraction:
        return self.subset_weights[K]

    @cached_property
    def subset_weights(self) -> tuple[Fraction, ...]:
        """``Σ_K a_i`` for every bitmask ``K`` (index = mask)."""
        if self.n > 20:
            raise ValueError("too many markings for exhaustive subset tables")
        sums = [Fraction(0)] * (1 << self.n)
        for K in range(1, 1 << self.n):
            low = K & -K
            sums[K] = sums[K ^ low] + self.weights[low.bit_length() - 1]
        return tuple(sums)

    def _exact_one_subset(self) -> int | None:
        for K, w in enumerate(self.subset_weights):
            if w == 1 and popcount(K) >= 2:
                return K
        return None

    def unstable(self, K: int) -> bool:
        """Exact rational predicate ``Σ_K a_i > 1``."""
        return self.weight(K) > 1

    def unstable_fast(self, K: int) -> bool:
        """Counting shortcut for the heavy/light recipes.

        ``K`` is unstable iff ``2 k_p > p``, or ``2 k_p = p`` and ``2 k_q > q``.
        """
        if self.rule is None:
            return self.unstable(K)
        p, q = self.rule
        kp = popcount(K & ((1 << p) - 1))
        kq = popcount(K >> p)
        return 2 * kp > p or (2 * kp == p and 2 * kq > q)

    def _kind(self, K: int) -> str:
        u, v, rp = self.role_mask(U), self.role_mask(V), self.role_mask(RPRIME)
        if not u:
            return "diagonal"
        if v:
            inu, inv = bool(K & u), bool(K & v)
            return {(True, False): "K'_I", (False, True): "K''_I", (True, True): "K'''_I"}[
                (inu, inv)
            ]
        if K & u:
            return "K_JI" if K & rp else "K_I"
        return "L_I"

    @cached_property
    def strata(self) -> tuple[Stratum, ...]:
        return tuple(
            Stratum(K, 2 * (popcount(K) - 1), self._kind(K))
            for K in range(1, 1 << self.n)
            if self.unstable(K)
        )


def enumerate_strata(problem: GitProblem) -> list[Stratum]:
    return list(problem.strata)


def kind_eta(problem: GitProblem, stratum: Stratum) -> int:
    """η from the kind-specific formulas (a cross-check of ``2(|K|-1)``)."""
    K = stratum.K
    light = popcount(K & problem.role_mask(LIGHT))
    J = popcount(K & problem.role_mask(RPRIME))
    r = popcount(problem.role_mask(RPRIME))
    return {
        "diagonal": 2 * (popcount(K) - 1),
        "K_I": 2 * light,
        "K_JI": 2 * light + 2 * J,
        "L_I": 2 * light + 2 * r - 2,
        "K'_I": 2 * light,
        "K''_I": 2 * light,
        "K'''_I": 2 * light + 2,
    }[stratum.kind]


# ---------------------------------------------------------------------------
# fixed point weights and windows


def fixed_point_weights(pair: PairLE, K: int) -> tuple[int, int]:
    """Window-convention weights of ``F_{l,E}`` at ``z_K`` as ``(lo, hi)``.

    With ``e_∞ = |E ∩ K|`` and ``e_0 = |E \\ K|`` the weights are
    ``l + (e_0 - e_∞), l - 2 + (e_0 - e_∞), ..., -l + (e_0 - e_∞)``.
    """
    e_inf = popcount(pair.E & K)
    e_0 = pair.e - e_inf
    c = e_0 - e_inf
    return c - pair.l, c + pair.l


def bundle_weight_set(pair: PairLE, K: int) -> WeightSet:
    lo, hi = fixed_point_weights(pair, K)
    return WeightSet(LinearForm(lo), LinearForm(hi), Convention.WINDOW)


@dataclass
class WindowReport:
    feasible: bool
    intervals: dict[int, tuple[int, int]] = field(default_factory=dict)
    witness: Stratum | None = None

    def __bool__(self) -> bool:
        return self.feasible


def window_feasible(collection: Sequence[PairLE], problem: GitProblem) -> WindowReport:
    """Whether one choice of ``w_K`` per stratum holds every member.

    At each stratum the admissible ``w_K`` form the integer interval
    ``[max(top) - η + 1, min(bottom)]``; the collection fits a window iff all
    these intervals are nonempty.
    """
    report = WindowReport(True)
    if not collection:
        return report
    for st in problem.strata:
        tops, bottoms = [], []
        for pair in collection:
            lo, hi = fixed_point_weights(pair, st.K)
            tops.append(hi)
            bottoms.append(lo)
        interval = (max(tops) - st.eta + 1, min(bottoms))
        report.intervals[st.K] = interval
        if interval[0] > interval[1] and report.feasible:
            report.feasible = False
            report.witness = st
    return report


def pairwise_window_form(collection: Sequence[PairLE], n: int) -> tuple[bool, tuple | None]:
    """The pairwise inequality for symmetric weights on an odd number of points.

    For every ``k ≥ r + 1`` and members ``x, y``:
    ``min{l+e, l+2k-e} + min{l'+e', l'+2(n-k)-e'} < 2(k-1)``.  The first term
    is minus the least weight of ``x`` over ``|K| = k``, the second the
    largest weight of ``y``.  This is equivalent to :func:`window_feasible`
    for collections stable under permutations and sufficient in general.
    """
    r = (n - 1) // 2
    for k in range(r + 1, n + 1):
        low = max(min(x.l + x.e, x.l + 2 * k - x.e) for x in collection)
        high = max(min(y.l + y.e, y.l + 2 * (n - k) - y.e) for y in collection)
        if not low + high < 2 * (k - 1):
            return False, (k, low, high)
    return True, None


# ---------------------------------------------------------------------------
# Teleman convention and the devil twist


def teleman_line_weight(exps: Sequence[int], K: int) -> int:
    """``Σ_{i∈K} a_i - Σ_{i∉K} a_i`` for ``O(a_1, ..., a_n)`` at ``z_K``."""
    return sum(a if (K >> i) & 1 else -a for i, a in enumerate(exps))


def devil_twist(
    exps: Sequence[int], devil: Sequence[int], problem: GitProblem, l: int = 0
) -> dict[int, WeightSet]:
    """Teleman weights of ``O(exps) ⊗ V_l ⊗ D^N`` on every stratum.

    The result maps ``K`` to a weight set whose ends are linear forms in
    ``N``; the slope is the Teleman weight of the devil bundle ``D``.
    """
    if len(exps) != problem.n or len(devil) != problem.n:
        raise ValueError("exponent vectors must match the problem size")
    out = {}
    for st in problem.strata:
        c0 = teleman_line_weight(exps, st.K)
        c1 = teleman_line_weight(devil, st.K)
        out[st.K] = WeightSet(LinearForm(c0 - l, c1), LinearForm(c0 + l, c1), Convention.TELEMAN)
    return out


@dataclass
class TelemanResult:
    ok: bool
    witness: Stratum | None = None
    N_checked: tuple[int, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def teleman_ok(
    weight_sets: Mapping[int, WeightSet],
    problem: GitProblem,
    N_values: Iterable[int] = (),
) -> TelemanResult:
    """All weights strictly above ``-η`` on every stratum.

    Linear forms are judged for ``N ≫ 0`` and, in addition, at each value in
    ``N_values``.  Weight sets must be in the Teleman convention.
    """
    Ns = tuple(N_values)
    for st in problem.strata:
        ws = weight_sets.get(st.K)
        if ws is None:
            raise ValueError(f"no weights supplied for stratum {bits(st.K)}")
        ws.require(Convention.TELEMAN)
        if not ws.lo.eventually_greater(-st.eta):
            return TelemanResult(False, st, Ns)
        if any(ws.lo.at(N) <= -st.eta for N in Ns):
            return TelemanResult(False, st, Ns)
    return TelemanResult(True, None, Ns)

