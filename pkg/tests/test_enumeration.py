import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from excoll.cli import enumerate_payload
from excoll.cohomology import stack_rhom
from excoll.enumeration import (
    Collection,
    CollectionObject,
    Space,
    Tag,
    Variant,
    boundary_divisors,
    boundary_twists,
    check_equivariance,
    enumerate_collection,
    enumerate_odd_p,
    enumerate_odd_p_with_lights,
    enumerate_peven_qeven,
    enumerate_peven_qodd,
    order_key,
    order_valid,
)
from excoll.labels import PairLE, popcount
from excoll.scores import classify_group

IMPLEMENTED = [
    (3, 0), (5, 0), (7, 0), (3, 1), (3, 2), (5, 1), (5, 2), (3, 4),
    (4, 1), (4, 3), (6, 1), (4, 0), (6, 0), (4, 2), (4, 4), (6, 2),
]


def test_counts_odd():
    assert len(enumerate_odd_p(3)) == 1
    five = enumerate_odd_p(5)
    assert len(five) == 7
    assert [(x.l, x.e) for x in five.pairs()] == [(0, 0)] + [(0, 4)] * 5 + [(1, 5)]
    seven = enumerate_odd_p(7)
    assert Counter((x.l, x.e) for x in seven.pairs()) == Counter(
        {(0, 0): 1, (2, 0): 1, (1, 1): 7, (0, 2): 21, (0, 6): 7, (1, 7): 1}
    )
    assert len(seven) == 38


def test_counts_with_lights():
    assert enumerate_odd_p_with_lights(5, 0) == enumerate_odd_p(5)
    assert len(enumerate_odd_p_with_lights(3, 1)) == 2
    assert len(enumerate_odd_p_with_lights(5, 2)) == 28


def test_counts_even_odd():
    assert len(enumerate_peven_qodd(4, 1)) == 7
    c = enumerate_peven_qodd(4, 3)
    assert c.count_by_tag() == {"Bundle": 28, "TorsionZ": 6}
    tors = c.pairs(Tag.TORSION_Z)
    assert all(x.l == 0 and c.space.split.ep(x.E) == 2 and c.space.split.eq(x.E) == 0 for x in tors)
    assert len({x.E for x in tors}) == 6


def test_counts_even_even():
    m4 = enumerate_peven_qeven(4, 0)
    assert [o.pair for o in m4] == [PairLE(0, 0), PairLE(0, 0b1111)]
    m6 = enumerate_peven_qeven(6, 0)
    assert m6.count_by_tag() == {"BoundaryAB": 10, "Bundle": 24}
    assert {(o.a, o.b) for o in m6 if o.tag is Tag.BOUNDARY_AB} == {(1, 1)}
    assert len(boundary_divisors(Space(4, 2))) == 6
    assert boundary_twists(1) == [(1, 1)]


def test_boundary_twist_ranges():
    for m in range(1, 6):
        twists = boundary_twists(m)
        assert len(set(twists)) == len(twists)
        for a, b in twists:
            ok = (1 <= a <= m and 1 <= b <= m) or (a == 0 and 1 <= 2 * b <= m) or (b == 0 and 1 <= 2 * a <= m)
            assert ok
        assert set(twists) == {(b, a) for a, b in twists}


def test_variant_counts_agree():
    for p, q in [(4, 1), (4, 3), (6, 1), (4, 2), (6, 0)]:
        a = enumerate_collection(Space(p, q), "1A")
        b = enumerate_collection(Space(p, q), "1B")
        assert len(a) == len(b)


def test_labels_satisfy_their_groups():
    for p, q in IMPLEMENTED:
        space = Space(p, q)
        coll = enumerate_collection(space)
        for o in coll:
            if o.pair is None:
                continue
            if space.p % 2:
                ep = space.split.ep(o.pair.E)
                assert o.pair.l + min(ep, p - ep) <= space.r - 1
                continue
            groups = classify_group(o.pair, space.split)
            if o.tag is Tag.TORSION_Z:
                assert "2" in groups
            elif o.tag is Tag.TILDE_TORSION:
                assert coll.variant.tilde in groups
            elif space.regime in ("even_odd", "even_even"):
                assert coll.variant.bundles in groups


def test_order_key_injective_everywhere():
    for p, q in IMPLEMENTED:
        for v in ("1A+2B", "1B+2A"):
            coll = enumerate_collection(Space(p, q), v)
            keys = [order_key(o, coll.space) for o in coll]
            assert keys == sorted(keys)
            assert len(set(keys)) == len(keys)


@given(st.sampled_from(IMPLEMENTED), st.data())
def test_order_key_total_order(pq, data):
    coll = enumerate_collection(Space(*pq))
    objs = list(coll.objects)
    a, b, c = (data.draw(st.sampled_from(objs)) for _ in range(3))
    ka, kb, kc = (order_key(x, coll.space) for x in (a, b, c))
    assert (ka == kb) == (a == b)
    if ka < kb and kb < kc:
        assert ka < kc


def test_equivariance():
    for p, q in IMPLEMENTED:
        ok, g = check_equivariance(enumerate_collection(Space(p, q)))
        assert ok and g is None


def test_equivariance_broken_by_removal():
    coll = enumerate_odd_p(5)
    for k, obj in enumerate(coll.objects):
        if obj.pair.e == 4:
            broken = coll.objects[:k] + coll.objects[k + 1:]
            ok, g = check_equivariance(broken, coll.space)
            assert not ok
            moved = [i for i, x in enumerate(g) if x != i]
            assert len(moved) == 2


def test_boundary_canonical_side_swaps_twists():
    space = Space(4, 2)
    full = space.split.full
    T = 0b011010  # does not contain marking 0
    obj = CollectionObject.boundary(T, 2, 0, full)
    assert obj.divisor == full ^ T and (obj.a, obj.b) == (0, 2)


def rhom_tester(coll: Collection):
    n = coll.space.n
    pairs = coll.pairs()

    def tester(i, j):
        return stack_rhom(pairs[i], pairs[j], n).invariants()

    return tester


def test_order_valid_p5_and_reversed():
    coll = enumerate_odd_p(5)
    assert order_valid(len(coll), rhom_tester(coll)).valid
    rev = Collection(coll.space, coll.variant, coll.objects[::-1])
    report = order_valid(len(rev), rhom_tester(rev), resort=True)
    assert not report.valid and report.violations
    i, j, dims = report.violations[0]
    assert i > j and any(dims.values())
    assert report.resorted is not None and not report.cyclic


def test_same_e_blocks_any_order():
    coll = enumerate_odd_p(7)
    rng = random.Random(7)
    for _ in range(5):
        blocks: dict[int, list] = {}
        for o in coll:
            blocks.setdefault(o.pair.e, []).append(o)
        objs = []
        for e in sorted(blocks):
            chunk = blocks[e][:]
            rng.shuffle(chunk)
            objs += chunk
        shuffled = Collection(coll.space, coll.variant, tuple(objs))
        assert order_valid(len(shuffled), rhom_tester(shuffled)).valid


def test_json_round_trip(validate):
    for p, q in IMPLEMENTED:
        coll, data = enumerate_payload(Space(p, q), Variant())
        validate("collection", data)
        assert Collection.from_json(data) == coll


def test_invalid_spaces():
    with pytest.raises(ValueError):
        Space(2, 1)
    with pytest.raises(ValueError):
        enumerate_odd_p(4)
    with pytest.raises(ValueError):
        enumerate_peven_qodd(4, 2)
    with pytest.raises(ValueError):
        Variant.parse("3C")
