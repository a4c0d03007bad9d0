import csv
import io

import pytest

from excoll.cli import verify_payload
from excoll.enumeration import Collection, CollectionObject, Space, Tag, Variant, enumerate_collection, generators
from excoll.git import GitProblem
from excoll.labels import PairLE, popcount
from excoll.verify import (
    MethodInapplicable,
    Status,
    TorsionContext,
    judge,
    torsion_case_3,
    torsion_case_4,
    verify_boundary_part,
    verify_bundle_pair,
    verify_collection,
    verify_objects,
    verify_torsion_cases,
    verify_torsion_pair,
)


def test_judge():
    assert judge(1, 0, {})
    assert not judge(1, 0, {2: 1})
    assert judge(0, 0, {0: 1})
    assert not judge(0, 0, {0: 2})
    assert not judge(0, 0, {1: 1})
    assert judge(0, 1, {0: 5})


def test_p5_full_sweep():
    report = verify_collection(Space(5))
    back = [v for v in report.verdicts if v.source > v.target]
    diag = [v for v in report.verdicts if v.source == v.target]
    assert len(back) == 21 and all(v.ok and v.result == {} for v in back)
    assert len(diag) == 7 and all(v.result == {0: 1} for v in diag)
    assert report.exceptional and report.strong_bundle_part and report.order_valid


def test_equal_E_different_l_orthogonal():
    prob = GitProblem.for_space(7, 0)
    for E in (0, 0b1, 0b11):
        ls = [l for l in range(popcount(E) % 2, 4, 2)]
        for a in ls:
            for b in ls:
                if a != b:
                    v = verify_bundle_pair(PairLE(a, E), PairLE(b, E), prob, 1, 0)
                    assert v.status is Status.OK and v.result == {}


def test_inapplicable_is_a_third_state():
    prob = GitProblem.for_space(5, 0)
    with pytest.raises(MethodInapplicable):
        verify_bundle_pair(PairLE(2, 0), PairLE(2, 0), prob, 0, 0)
    coll = enumerate_collection(Space(5))
    objs = coll.objects + (CollectionObject.bundle(PairLE(2, 0)),)
    report = verify_objects(coll.space, coll.variant, objs)
    inap = report.inapplicable
    assert inap and all(not v.ok for v in inap)
    assert all(v.status is Status.INAPPLICABLE for v in inap)
    assert not report.exceptional


def test_torsion_examples_4_3():
    space = Space(4, 3)
    ctx = TorsionContext.make(space, 4)
    R, R2 = 0b0011, 0b1100
    assert torsion_case_3(ctx, PairLE(0, R), PairLE(2, R), 1, 0).result == {}
    diag = torsion_case_3(ctx, PairLE(0, R), PairLE(0, R), 0, 0)
    assert diag.ok and diag.result == {0: 1}
    v = torsion_case_4(ctx, PairLE(0, R), PairLE(0, R2), 1, 0)
    assert v.ok and v.result == {}


def test_torsion_cases_all_four_occur():
    verdicts = verify_torsion_cases(4, 3)
    methods = {v.method for v in verdicts}
    assert {"torsion-case(1)", "torsion-case(2)", "torsion-case(3)", "torsion-case(4)"} <= methods
    required = [v for v in verdicts if v.required]
    assert required and all(v.ok for v in required)


def test_devil_exponent_independence():
    space = Space(4, 3)
    coll = enumerate_collection(space)
    idx = [k for k, o in enumerate(coll.objects) if o.tag is Tag.TORSION_Z]
    base = TorsionContext.make(space, 4)
    other = TorsionContext(space, (base.Ns[2] + 3, 3 * base.Ns[0], 5 * base.Ns[0] + 1))
    for i in idx:
        for j in range(len(coll)):
            a = verify_torsion_pair(base, coll[i], coll[j], i, j)
            b = verify_torsion_pair(other, coll[i], coll[j], i, j)
            assert a.result == b.result and a.status == b.status


def test_verdicts_constant_on_orbits():
    for space in (Space(5), Space(4, 3)):
        report = verify_collection(space)
        objs = report.objects
        index = {o: k for k, o in enumerate(objs)}
        full = space.split.full
        table = {(v.source, v.target): v for v in report.verdicts}
        for g in generators(space):
            img = [index[o.permuted(g, full)] for o in objs]
            for (i, j), v in table.items():
                w = table[img[i], img[j]]
                if v.computed and w.computed:
                    assert v.result == w.result


def test_even_even_parts():
    report = verify_collection(Space(6, 0))
    assert report.exceptional and not report.unexpected_skips
    for v in verify_boundary_part(6, 0):
        if v.source == v.target:
            assert v.result == {0: 1}
        elif v.source > v.target:
            assert v.result == {} and v.method == "disjoint-support"
    part = verify_boundary_part(4, 2)
    assert all(v.ok for v in part if v.required)
    assert len({v.source for v in part}) == 6


def test_tilde_pairs_skipped_explicitly():
    report = verify_collection(Space(4, 2))
    assert report.skipped and not report.unexpected_skips
    for v in report.skipped:
        tags = {report.objects[v.source].tag, report.objects[v.target].tag}
        assert Tag.TILDE_TORSION in tags
    assert report.verified_part_exceptional and not report.exceptional


def test_reversed_order_fails():
    coll = enumerate_collection(Space(5))
    rev = verify_objects(coll.space, coll.variant, coll.objects[::-1])
    assert rev.failures and not rev.order_valid


def test_parallel_matches_serial():
    space = Space(7)
    a = verify_collection(space, jobs=1)
    b = verify_collection(space, jobs=2)
    assert [v.to_json() for v in a.verdicts] == [v.to_json() for v in b.verdicts]


def test_report_export(validate):
    ok, data = verify_payload(Space(4, 3), Variant())
    assert ok
    validate("verify", data)
    report = verify_collection(Space(5))
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert rows[0][:2] == ["source", "target"] and len(rows) == 1 + 49


def test_1b_variants_verify():
    for space, variant in [(Space(4, 1), "1B"), (Space(4, 3), "1B+2B"), (Space(6, 1), "1B"), (Space(6, 0), "1B+2B")]:
        report = verify_collection(space, variant)
        assert report.exceptional and report.order_valid, (space, variant)
