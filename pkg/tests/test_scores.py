import pytest
from hypothesis import given
from hypothesis import strategies as st

from excoll.labels import MarkingSplit, PairLE, popcount, subsets_of
from excoll.scores import (
    ParityError,
    alpha_value,
    classify_group,
    constrained_subsets,
    critical_subsets,
    f_value,
    m_value,
    score_S,
    score_Sprime,
    verify_score_lemmas,
)


@st.composite
def pair_and_subset(draw, n_max=8):
    n = draw(st.integers(2, n_max))
    E = draw(st.integers(0, (1 << n) - 1))
    l = draw(st.integers(0, 6)) * 2 + popcount(E) % 2
    T = draw(st.integers(0, (1 << n) - 1))
    return n, PairLE(l, E), T


def test_f_examples():
    assert f_value(0b1011, PairLE(0, 0)) == 0
    split = MarkingSplit(4, 3)
    assert split.heavy == 0b1111
    assert f_value(0b0011, PairLE(0, 0b0011)) == 1


@given(pair_and_subset())
def test_f_complement_sum(data):
    n, pair, T = data
    full = (1 << n) - 1
    assert f_value(T, pair) + f_value(full ^ T, pair) == pair.l
    assert f_value(T, pair) >= 0 or f_value(full ^ T, pair) >= 0


@given(pair_and_subset())
def test_alpha_m_identity(data):
    _, pair, T = data
    f = f_value(T, pair)
    assert alpha_value(T, pair) - m_value(T, pair) == -f
    assert min(alpha_value(T, pair), m_value(T, pair)) == 0


def test_alpha_m_examples():
    # f = |E ∩ T| - (e - l)/2 = 0 - 2 = -2 and f = 3 - 0 = 3
    assert (alpha_value(0, PairLE(0, 0b1111)), m_value(0, PairLE(0, 0b1111))) == (2, 0)
    assert (alpha_value(0b111, PairLE(3, 0b111)), m_value(0b111, PairLE(3, 0b111))) == (0, 3)


def test_f_rejects_parity():
    class Fake:
        l, E, e = 0, 1, 1

    with pytest.raises(ParityError):
        f_value(0, Fake())


def test_score_examples():
    split = MarkingSplit(4, 3)
    assert score_S(PairLE(0, 0), split) == 0
    assert score_S(PairLE(0, 0b0011), split) == 2


def test_score_prime_complement_symmetry():
    for p, q in [(4, 1), (4, 3), (6, 1)]:
        tilde = MarkingSplit(p, q + 1)
        for E in range(1 << tilde.n):
            for l in range(popcount(E) % 2, 5, 2):
                comp = PairLE(l + 0, tilde.full ^ E)
                if (comp.l + comp.e) % 2:
                    continue
                assert score_Sprime(PairLE(l, E), tilde) == score_Sprime(comp, tilde)


def mask(split, heavy=(), light=()):
    return sum(1 << i for i in heavy) | sum(1 << (split.p + j) for j in light)


def test_classify_examples():
    split = MarkingSplit(4, 3)
    assert "1A" in classify_group(PairLE(0, mask(split, [0], [0])), split)
    assert "2" in classify_group(PairLE(0, mask(split, [0, 1])), split)
    assert not classify_group(PairLE(1, mask(split, [0, 1], [0])), split)


def test_group_2_labels_for_4_3():
    split = MarkingSplit(4, 3)
    found = [
        PairLE(l, E)
        for E in range(1 << 7)
        for l in range(popcount(E) % 2, 8, 2)
        if "2" in classify_group(PairLE(l, E), split)
    ]
    assert len(found) == 6
    assert all(x.l == 0 and split.ep(x.E) == 2 and split.eq(x.E) == 0 for x in found)


def test_1A_1B_complement_symmetry():
    for p, q in [(4, 2), (6, 2), (4, 4)]:
        split = MarkingSplit(p, q)
        for E in range(1 << split.n):
            for l in range(popcount(E) % 2, 7, 2):
                comp = PairLE(l, split.full ^ E)
                if (comp.l + comp.e) % 2:
                    continue
                a = "1A" in classify_group(PairLE(l, E), split)
                b = "1B" in classify_group(comp, split)
                assert a == b


def test_critical_empty_when_r_plus_s_odd():
    tilde = MarkingSplit(4, 4)  # r = 2, s = 1
    for E in range(1 << tilde.n):
        for l in range(popcount(E) % 2, 5, 2):
            pair = PairLE(l, E)
            if classify_group(pair, tilde) & {"1A", "1B", "2A", "2B"}:
                assert critical_subsets(pair, tilde, "5.4") == []


def test_critical_table_row():
    tilde = MarkingSplit(4, 2)  # r = 2, s = 0
    pair = PairLE(0, mask(tilde, [0], [0]))
    assert "1A" in classify_group(pair, tilde)
    crit = critical_subsets(pair, tilde, "5.4")
    expect = [T for T in constrained_subsets(tilde, 2, 1) if T & 1 and (T >> 4) == 0b01]
    assert sorted(crit) == sorted(expect) and crit


def test_critical_brute_force_4_3():
    plain = MarkingSplit(4, 3)
    tilde = MarkingSplit(4, 4)
    r, s = 2, 1
    for split, mode, tq, bound in [(tilde, "5.4", s + 1, r + s), (plain, "5.6", s, r + s - 1)]:
        for E in range(1 << split.n):
            for l in range(popcount(E) % 2, 7, 2):
                pair = PairLE(l, E)
                groups = classify_group(pair, split)
                wanted = {"1A", "1B", "2A", "2B"} if mode == "5.4" else {"1A", "1B", "2"}
                if not groups & wanted:
                    with pytest.raises(ValueError):
                        critical_subsets(pair, split, mode)
                    continue
                light = split.light if mode == "5.4" else split.light & ~(1 << (split.n - 1))
                family = [
                    Tp | Tq
                    for Tp in subsets_of(split.heavy, r)
                    for Tq in subsets_of(light, tq)
                ]
                values = [2 * f_value(T, pair) for T in family]
                assert max(values) <= bound
                crit = critical_subsets(pair, split, mode)
                assert sorted(crit) == sorted(T for T, v in zip(family, values) if v == bound)


def test_lemma_54_bound_exhaustive_small():
    for p, q1 in [(4, 2), (4, 4), (6, 2), (4, 0)]:
        split = MarkingSplit(p, q1)
        r, s = p // 2, q1 // 2 - 1
        if s < 0:
            continue
        family = constrained_subsets(split, r, s + 1)
        for E in range(1 << split.n):
            for l in range(popcount(E) % 2, 2 * (r + s) + 1, 2):
                pair = PairLE(l, E)
                if classify_group(pair, split) & {"1A", "1B", "2A", "2B"}:
                    assert all(2 * f_value(T, pair) <= r + s for T in family)


def test_verify_score_lemmas_small():
    report = verify_score_lemmas((4,), (1, 3), lmax=4)
    assert report.ok, report.counterexamples[:3]
    assert report.checks > 0


def test_verify_score_lemmas_rejects_bad_split():
    with pytest.raises(ValueError):
        verify_score_lemmas((5,), (1,))
