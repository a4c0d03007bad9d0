"""Subset functions ``f``, ``α``, ``m``, the scores, and group membership.

For a label ``(l, E)`` and a subset ``T`` of markings,
``f_T = |E ∩ T| - (e - l)/2``; parity of ``l + e`` makes this an integer.
Half-integral thresholds such as ``(r + s)/2`` are compared in doubled
integers so everything stays in ``int``.

The exhaustive lemma checks live in :func:`verify_score_lemmas`; the heavy
sweeps use numpy popcount tables over all ``(E, T)`` pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .labels import MarkingSplit, PairLE, bits, popcount, subsets_of


class ParityError(ValueError):
    """Raised when ``l + |E|`` is odd where an integral value is required."""


def f_value(T: int, pair: PairLE) -> int:
    """``|E ∩ T| - (e - l)/2``."""
    if (pair.e - pair.l) % 2:
        raise ParityError("f is only integral when l + e is even")
    return popcount(pair.E & T) - (pair.e - pair.l) // 2


def alpha_value(T: int, pair: PairLE) -> int:
    return max(0, -f_value(T, pair))


def m_value(T: int, pair: PairLE) -> int:
    return max(0, f_value(T, pair))


def score_S(pair: PairLE, split: MarkingSplit) -> int:
    """``l + min(e_p, p - e_p) + min(e_q, q - e_q)`` over the given split."""
    ep, eq = split.ep(pair.E), split.eq(pair.E)
    return pair.l + min(ep, split.p - ep) + min(eq, split.q - eq)


def score_Sprime(pair: PairLE, split_tilde: MarkingSplit) -> int:
    """The primed score, taken over the split whose light part is ``Q ∪ {z}``.

    With ``|Q̃| = q + 1`` this is ``l + min(e_p, p-e_p) + min(e_q, q+1-e_q)``,
    i.e. :func:`score_S` evaluated on the enlarged split.
    """
    return score_S(pair, split_tilde)


def _rs(split: MarkingSplit) -> tuple[int, int]:
    if split.p % 2:
        raise ValueError("groups are defined for an even number of heavy markings")
    r = split.p // 2
    s = (split.q - 1) // 2 if split.q % 2 else split.q // 2 - 1
    return r, s


def in_1A(pair: PairLE, split: MarkingSplit) -> bool:
    r = split.p // 2
    ep = split.ep(pair.E)
    return pair.l + min(ep, split.p + 1 - ep) <= r - 1


def in_1B(pair: PairLE, split: MarkingSplit) -> bool:
    r = split.p // 2
    ep = split.ep(pair.E)
    return pair.l + min(ep + 1, split.p - ep) <= r - 1


def classify_group(pair: PairLE, split: MarkingSplit) -> frozenset[str]:
    """Membership flags among ``1A, 1B, 2, 2A, 2B``.

    With an odd number ``q = 2s+1`` of light markings the torsion group is
    ``2``; with an even number ``q + 1 = 2s + 2`` (the enlarged light set) the
    torsion groups are ``2A`` and ``2B``.  Each inequality is evaluated
    literally; overlaps are reported as they occur.
    """
    if pair.l < 0:
        raise ValueError("groups are defined for l >= 0")
    r, s = _rs(split)
    ep, eq = split.ep(pair.E), split.eq(pair.E)
    flags = set()
    if in_1A(pair, split):
        flags.add("1A")
    if in_1B(pair, split):
        flags.add("1B")
    if split.q % 2:
        q = split.q
        if ep == r and pair.l + min(eq, q - eq) <= s - 1:
            flags.add("2")
    else:
        q = split.q - 1  # the printed formulas use q with |Q̃| = q + 1
        if ep == r and pair.l + min(eq + 1, q + 1 - eq) <= s:
            flags.add("2A")
        if ep == r and pair.l + min(eq, q + 2 - eq) <= s:
            flags.add("2B")
    return frozenset(flags)


def constrained_subsets(split: MarkingSplit, tp: int, tq: int, light: int | None = None):
    """All ``T`` with ``|T_p| = tp`` and ``|T ∩ light| = tq``."""
    light = split.light if light is None else light
    for Tp in subsets_of(split.heavy, tp):
        for Tq in subsets_of(light, tq):
            yield Tp | Tq


def _contains(big: int, small: int) -> bool:
    return small & ~big == 0


def _crit_rows_54(pair: PairLE, T: int, split: MarkingSplit) -> bool:
    """The four rows of the criticality table on the enlarged split."""
    r, s = _rs(split)
    q = split.q - 1
    H, L = split.heavy, split.light
    l, E = pair.l, pair.E
    Ep, Eq, Tp, Tq = E & H, E & L, T & H, T & L
    ep, eq = popcount(Ep), popcount(Eq)
    rows = (
        l + ep == r - 1 and eq == s + 1 and _contains(Tp, Ep) and Eq == Tq,
        ep == r and l + q + 1 - eq == s and Ep == Tp and _contains(Eq, Tq),
        l + split.p - ep == r - 1 and eq == s + 1 and _contains(Ep, Tp) and Eq == Tq,
        ep == r and l + eq == s and Ep == Tp and _contains(Tq, Eq),
    )
    return any(rows)


def _crit_rows_56(pair: PairLE, T: int, split: MarkingSplit, y: int) -> bool:
    r, s = _rs(split)
    H, L = split.heavy, split.light
    l, E = pair.l, pair.E
    if E >> y & 1:
        return False
    Ep, Eq, Tp, Tq = E & H, E & L, T & H, T & L
    ep, eq = popcount(Ep), popcount(Eq)
    rows = (
        l + ep == r - 1 and eq == s and _contains(Tp, Ep) and Eq == Tq,
        l + split.p - ep == r - 1 and eq == s and _contains(Ep, Tp) and Eq == Tq,
        ep == r and l + eq == s - 1 and Ep == Tp and _contains(Tq, Eq),
    )
    return any(rows)


def critical_subsets(
    pair: PairLE, split: MarkingSplit, mode: str = "5.4", y: int | None = None
) -> list[int]:
    """All constrained ``T`` at which ``f`` reaches its extremal bound.

    ``mode="5.4"``: the split carries the enlarged light set of size
    ``2s + 2``; ``T`` ranges over ``|T_p| = r``, ``|T_q| = s + 1``, and the
    bound is ``(r + s)/2``.

    ``mode="5.6"``: the split has ``2s + 1`` light markings, a light marking
    ``y`` is set aside (default: the last one), ``T`` ranges over subsets of the
    remaining markings with ``|T_p| = r``, ``|T_q| = s``, and the bound is
    ``(r + s - 1)/2``.
    """
    r, s = _rs(split)
    groups = classify_group(pair, split)
    if mode == "5.4":
        if not groups & {"1A", "1B", "2A", "2B"} or split.q % 2:
            raise ValueError("pair outside groups 1A/1B/2A/2B on an even light set")
        target = r + s
        family = constrained_subsets(split, r, s + 1)
    elif mode == "5.6":
        if not groups & {"1A", "1B", "2"} or not split.q % 2:
            raise ValueError("pair outside groups 1A/1B/2 on an odd light set")
        y = split.n - 1 if y is None else y
        target = r + s - 1
        family = constrained_subsets(split, r, s, split.light & ~(1 << y))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return [T for T in family if 2 * f_value(T, pair) == target]


# --------------------------------------------------------------------------
# exhaustive verification


@dataclass
class ScoreReport:
    checks: int = 0
    counterexamples: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def fail(self, lemma: str, **data) -> None:
        if len(self.counterexamples) < 50:
            self.counterexamples.append({"lemma": lemma, **data})


def _popcount_array(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64)
    out = np.zeros(a.shape, dtype=np.int64)
    while np.any(a):
        out += (a & np.uint64(1)).astype(np.int64)
        a = a >> np.uint64(1)
    return out


def _subset_array(split: MarkingSplit, tp: int, tq: int, light: int | None = None):
    return np.array(list(constrained_subsets(split, tp, tq, light)), dtype=np.int64)


def _check_bounds_53(report: ScoreReport, split: MarkingSplit, lmax: int) -> None:
    """Maxima of ``f`` and ``-f`` over the constrained family, with equality cases."""
    r, s = _rs(split)
    H, L = split.heavy, split.light
    Ts = _subset_array(split, r, s + 1)
    Es = np.arange(1 << split.n, dtype=np.int64)
    inter = _popcount_array(Es[:, None] & Ts[None, :])
    e = _popcount_array(Es)
    ep = _popcount_array(Es & H)
    eq = e - ep
    Ep, Eq = Es & H, Es & L
    Tp, Tq = Ts & H, Ts & L
    sub = lambda a, b: (a & ~b) == 0  # noqa: E731  a ⊆ b
    TpinEp = sub(Tp[None, :], Ep[:, None])
    EpinTp = sub(Ep[:, None], Tp[None, :])
    TqinEq = sub(Tq[None, :], Eq[:, None])
    EqinTq = sub(Eq[:, None], Tq[None, :])
    Tcp, Tcq = (~Ts) & H, (~Ts) & L
    cond_T = (TpinEp | EpinTp) & (TqinEq | EqinTq)
    cond_Tc = (sub(Tcp[None, :], Ep[:, None]) | sub(Ep[:, None], Tcp[None, :])) & (
        sub(Tcq[None, :], Eq[:, None]) | sub(Eq[:, None], Tcq[None, :])
    )
    for l in range(lmax + 1):
        ok_parity = (e + l) % 2 == 0
        twof = 2 * inter - (e - l)[:, None]
        sp = l + np.minimum(ep, split.p - ep) + np.minimum(eq, split.q - eq)
        rows = np.nonzero(ok_parity)[0]
        mx = twof[rows].max(axis=1)
        mn = twof[rows].min(axis=1)
        report.checks += 2 * len(rows) * len(Ts)
        bad = rows[mx != sp[rows]]
        for i in bad[:3]:
            report.fail("max f = S'/2", l=l, E=bits(int(i)), got=int(mx[i == rows][0]), want=int(sp[i]))
        bad = rows[-mn != sp[rows] - 2 * l]
        for i in bad[:3]:
            report.fail("max -f = S'/2 - l", l=l, E=bits(int(i)))
        eq_max = twof[rows] == sp[rows][:, None]
        if np.any(eq_max != cond_T[rows]):
            i, j = np.argwhere(eq_max != cond_T[rows])[0]
            report.fail("equality in max f", l=l, E=bits(int(rows[i])), T=bits(int(Ts[j])))
        eq_min = -twof[rows] == (sp[rows] - 2 * l)[:, None]
        if np.any(eq_min != cond_Tc[rows]):
            i, j = np.argwhere(eq_min != cond_Tc[rows])[0]
            report.fail("equality in max -f", l=l, E=bits(int(rows[i])), T=bits(int(Ts[j])))


def _check_critical_54(report: ScoreReport, split: MarkingSplit, lmax: int) -> None:
    r, s = _rs(split)
    Ts = list(constrained_subsets(split, r, s + 1))
    full = split.full
    for l in range(lmax + 1):
        for E in range(1 << split.n):
            if (l + popcount(E)) % 2:
                continue
            pair = PairLE(l, E)
            if not classify_group(pair, split) & {"1A", "1B", "2A", "2B"}:
                continue
            for T in Ts:
                twof = 2 * f_value(T, pair)
                report.checks += 1
                if twof > r + s:
                    report.fail("f <= (r+s)/2", l=l, E=bits(E), T=bits(T))
                crit = (r + s) % 2 == 0 and _crit_rows_54(pair, T, split)
                if (twof == r + s) != crit:
                    report.fail("criticality table", l=l, E=bits(E), T=bits(T))
                twofc = 2 * f_value(full ^ T, pair)
                if twofc < -(r + s):
                    report.fail("f_Tc >= -(r+s)/2", l=l, E=bits(E), T=bits(T))
                strict_exempt = (r + s) % 2 == 0 and l == 0 and crit
                if twofc == -(r + s) and not strict_exempt:
                    report.fail("strictness of f_Tc bound", l=l, E=bits(E), T=bits(T))


def _check_cor_55(report: ScoreReport, split: MarkingSplit, lmax: int) -> None:
    r, s = _rs(split)
    L = split.light
    Is = list(subsets_of(L, s + 1))
    for l in range(lmax + 1):
        for E in range(1 << split.n):
            if (l + popcount(E)) % 2:
                continue
            pair = PairLE(l, E)
            groups = classify_group(pair, split)
            if not groups & {"2A", "2B"}:
                continue
            Eq = E & L
            eq = popcount(Eq)
            for I in Is:
                twof = 2 * popcount(Eq & I) - eq + l
                report.checks += 1
                if twof > s:
                    report.fail("f_I <= s/2", l=l, E=bits(E), I=bits(I))
                want = (eq == l + s + 2 and _contains(Eq, I)) or (
                    l + eq == s and _contains(I, Eq)
                )
                if (twof == s) != want:
                    report.fail("equality in f_I <= s/2", l=l, E=bits(E), I=bits(I))
                Ic = L ^ I
                if 2 * popcount(Eq & Ic) - eq + l < -s:
                    report.fail("f_Ic >= -s/2", l=l, E=bits(E), I=bits(I))


def _check_lemma_56(report: ScoreReport, split: MarkingSplit, lmax: int) -> None:
    r, s = _rs(split)
    for y in bits(split.light):
        Ts = list(constrained_subsets(split, r, s, split.light & ~(1 << y)))
        rest = split.full & ~(1 << y)
        for l in range(lmax + 1):
            for E in range(1 << split.n):
                if (l + popcount(E)) % 2:
                    continue
                pair = PairLE(l, E)
                if not classify_group(pair, split) & {"1A", "1B", "2"}:
                    continue
                ey = (E >> y) & 1
                for T in Ts:
                    twof = 2 * f_value(T, pair)
                    report.checks += 1
                    if twof > r + s - 1:
                        report.fail("f <= (r+s-1)/2", l=l, E=bits(E), T=bits(T), y=y)
                    crit = (r + s) % 2 == 1 and _crit_rows_56(pair, T, split, y)
                    if (twof == r + s - 1) != crit:
                        report.fail("criticality (odd light set)", l=l, E=bits(E), T=bits(T), y=y)
                    # m_T <= (r+s)/2 - |E ∩ {y}|, over T and its complement in P ∪ Q \ y
                    for U in (T, rest ^ T):
                        if 2 * max(0, f_value(U, pair)) > r + s - 2 * ey:
                            report.fail("m_T bound", l=l, E=bits(E), T=bits(U), y=y)


def _check_cor_58(report: ScoreReport, split: MarkingSplit, lmax: int) -> None:
    r = split.p // 2
    Rs = list(subsets_of(split.heavy, r))
    for l in range(lmax + 1):
        for E in range(1 << split.n):
            if (l + popcount(E)) % 2:
                continue
            pair = PairLE(l, E)
            if not (in_1A(pair, split) or in_1B(pair, split)):
                continue
            Ep = E & split.heavy
            ep = popcount(Ep)
            for R in Rs:
                report.checks += 1
                if 2 * popcount(Ep & R) - ep + l > r - 1:
                    report.fail("f_R <= (r-1)/2", l=l, E=bits(E), R=bits(R))


def _check_59_510(report: ScoreReport, s: int, lmax: int) -> None:
    """Inequalities on a purely light marking set of size ``2s+1`` or ``2s+2``."""
    q = 2 * s + 1
    full = (1 << q) - 1
    for l in range(lmax + 1):
        for E in range(full + 1):
            e = popcount(E)
            if l + min(e, q - e) > s - 1:
                continue
            for I in range(full + 1):
                Ic = full ^ I
                val = l + popcount(E & Ic) - popcount(E & I)
                bound = s - 1 if e <= s else 2 * popcount(Ic) - s - 2
                report.checks += 1
                if val > bound:
                    report.fail("odd light set", s=s, l=l, E=bits(E), I=bits(I))
    q2 = 2 * s + 2
    full = (1 << q2) - 1
    qq = q2 - 1  # printed formulas use q with |Q̃| = q + 1
    for l in range(lmax + 1):
        for E in range(full + 1):
            e = popcount(E)
            first = l + min(e + 1, qq + 1 - e) <= s
            second = l + min(e, qq + 2 - e) <= s
            if not (first or second):
                continue
            for I in range(full + 1):
                Ic = full ^ I
                val = l + popcount(E & Ic) - popcount(E & I)
                report.checks += 1
                if first:
                    bound = s - 1 if e <= s else 2 * popcount(Ic) - s - 2
                    if val > bound:
                        report.fail("even light set, first range", s=s, l=l, E=bits(E), I=bits(I))
                if second:
                    bound = s if e <= s + 1 else 2 * popcount(Ic) - s - 3
                    if val > bound:
                        report.fail("even light set, second range", s=s, l=l, E=bits(E), I=bits(I))


def verify_score_lemmas(
    ps: tuple[int, ...] = (4, 6), qs: tuple[int, ...] = (1, 3, 5), lmax: int | None = None
) -> ScoreReport:
    """Exhaustively check the score inequalities and their equality cases.

    For each ``p`` (even) and odd ``q = 2s+1`` the enlarged split ``(p, q+1)``
    carries the bounds for the primed score and the ``(r+s)/2`` bound, while
    the split ``(p, q)`` carries the ``(r+s-1)/2`` bound.  ``l`` runs up to
    ``2(r+s)`` unless ``lmax`` is given.
    """
    report = ScoreReport()
    for p in ps:
        for q in qs:
            if p % 2 or q % 2 == 0 or p + q + 1 > 14:
                raise ValueError("need even p, odd q and a small marking set")
            r, s = p // 2, (q - 1) // 2
            top = 2 * (r + s) if lmax is None else lmax
            tilde = MarkingSplit(p, q + 1)
            plain = MarkingSplit(p, q)
            _check_bounds_53(report, tilde, top)
            _check_critical_54(report, tilde, top)
            _check_cor_55(report, tilde, top)
            _check_lemma_56(report, plain, top)
            _check_cor_58(report, tilde, top)
            _check_cor_58(report, plain, top)
            _check_59_510(report, s, top)
    return report


__all__ = [
    "ParityError",
    "ScoreReport",
    "alpha_value",
    "classify_group",
    "constrained_subsets",
    "critical_subsets",
    "f_value",
    "m_value",
    "score_S",
    "score_Sprime",
    "verify_score_lemmas",
]
