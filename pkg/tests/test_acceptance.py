"""Acceptance criteria, one printed PASS/FAIL line each.

Run under pytest (``pytest tests/test_acceptance.py -s``) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import sys
import time
from collections.abc import Callable
from math import comb

import pytest

from excoll.enumeration import Space, Tag, check_equivariance, enumerate_collection, enumerate_odd_p
from excoll.equivariant import decompose, decomposition_string, orbits
from excoll.fullness import GenerationCertificate, certify_all, check_certificate
from excoll.git import GitProblem, window_feasible
from excoll.ktheory import HassettWeights, rank_hassett, rank_mpq
from excoll.labels import PairLE, popcount
from excoll.scores import verify_score_lemmas
from excoll.verify import verify_collection

Outcome = tuple[bool, str]


def _spaces_up_to(total: int) -> list[Space]:
    out = []
    for n in range(3, total + 1):
        for p in range(3, n + 1):
            try:
                enumerate_collection(Space(p, n - p))
            except ValueError:
                continue
            out.append(Space(p, n - p))
    return out


def criterion_1() -> Outcome:
    expected = {Space(3): 1, Space(4): 2, Space(5): 7, Space(7): 38, Space(6): 34}
    got = {s: len(enumerate_collection(s)) for s in expected}
    m6 = enumerate_collection(Space(6))
    boundary = sum(1 for o in m6.objects if o.tag is Tag.BOUNDARY_AB)
    ok = got == expected and boundary == 10 and len(m6) - boundary == 24
    return ok, f"counts {sorted((s.p, n) for s, n in got.items())}, M6 split {boundary}+{len(m6) - boundary}"


def criterion_2() -> Outcome:
    spaces = _spaces_up_to(8)
    bad = [(s.p, s.q) for s in spaces if rank_mpq(s.p, s.q) != len(enumerate_collection(s))]
    tower = [rank_hassett(HassettWeights.m0n(n)) for n in range(3, 8)]
    blow_up = 38 + comb(7, 3) * 3 + comb(7, 3) * comb(4, 3) // 2
    ok = not bad and tower == [1, 2, 7, 34, 213] and blow_up == 213
    return ok, f"{len(spaces)} spaces, mismatches {bad}, tower {tower}, blow-up count {blow_up}"


def criterion_3() -> Outcome:
    details = []
    ok = True
    for space in (Space(5), Space(7), Space(9)):
        r = verify_collection(space)
        good = r.exceptional and r.strong_bundle_part and r.order_valid
        ok &= good
        details.append(f"M{space.p}:{len(r.objects)}{'' if good else '!'}")
    for space in (Space(4, 1), Space(4, 3), Space(6, 1)):
        r = verify_collection(space)
        methods = {v.method for v in r.verdicts}
        cases = {f"torsion-case({k})" for k in range(1, 5)}
        has_torsion = any(o.tag is Tag.TORSION_Z for o in r.objects)
        good = r.exceptional and r.order_valid and (not has_torsion or cases <= methods)
        ok &= good
        details.append(f"M({space.p},{space.q}):{len(r.objects)}{'' if good else '!'}")
    for space in (Space(4), Space(6)):
        r = verify_collection(space)
        good = r.exceptional and not r.unexpected_skips and r.order_valid
        ok &= good
        details.append(f"M{space.p}:{len(r.objects)}{'' if good else '!'}")
    return ok, " ".join(details)


def criterion_4() -> Outcome:
    report = verify_score_lemmas((4, 6), (1, 3, 5))
    return report.ok, f"{report.checks} checks, {len(report.counterexamples)} counterexamples"


def criterion_5() -> Outcome:
    total = valid = moves = 0
    for space, lmax in ((Space(5), 6), (Space(7), 6), (Space(4, 3), 4)):
        cache: dict = {}
        for cert in certify_all(space, lmax):
            replay = GenerationCertificate.from_json(json.loads(json.dumps(cert.to_json())))
            total += 1
            moves += len(cert.moves)
            valid += bool(check_certificate(replay, cache))
    return total > 0 and valid == total, f"{valid}/{total} certificates valid, {moves} moves"


def criterion_6() -> Outcome:
    ok = True
    checked = 0
    for space in _spaces_up_to(9):
        coll = enumerate_collection(space)
        parts = decompose(coll)
        ok &= all(x.multiplicity > 0 for x in parts)
        ok &= sum(x.multiplicity * x.dimension for x in parts) == len(coll)
        checked += 1
    m5 = decomposition_string(decompose(enumerate_collection(Space(5))))
    ok &= m5 == "3·[5] + 1·[4,1]"
    return ok, f"{checked} spaces, M5 = {m5}"


def criterion_7() -> Outcome:
    coll = enumerate_odd_p(5)
    pairs = [o.pair for o in coll.objects] + [PairLE(2, 0)]
    window = window_feasible(pairs, GitProblem.for_space(5, 0))
    window_ok = not window.feasible and window.witness is not None and popcount(window.witness.K) == 3
    removal_ok = True
    # an object fixed by the whole group can be dropped without breaking invariance
    movable = [k for orb in orbits(coll) if len(orb.members) > 1 for k in orb.members]
    for k in movable:
        broken = coll.objects[:k] + coll.objects[k + 1:]
        held, g = check_equivariance(broken, coll.space)
        moved = [] if g is None else [i for i, x in enumerate(g) if x != i]
        removal_ok &= not held and len(moved) == 2
    tamper_ok = True
    edges = 0
    cache: dict = {}
    for cert in certify_all(Space(5), 4):
        data = cert.to_json()
        for node_index, node in enumerate(data["nodes"]):
            for c in range(len(node.get("move", {}).get("children", []))):
                bad = json.loads(json.dumps(data))
                bad["nodes"][node_index]["move"]["children"][c]["l"] += 2
                tamper_ok &= not check_certificate(GenerationCertificate.from_json(bad), cache)
                edges += 1
    ok = window_ok and removal_ok and tamper_ok and edges > 0
    return ok, (
        f"window witness k={popcount(window.witness.K)}, {len(movable)} removals caught, "
        f"{edges} tampered edges caught" if ok else f"window {window_ok} removal {removal_ok} tamper {tamper_ok}"
    )


def criterion_8() -> Outcome:
    tower = [rank_hassett(HassettWeights.m0n(n)) for n in range(3, 8)]
    reproduced = {s.p for s in _spaces_up_to(9) if s.q == 0}
    return tower == [1, 2, 7, 34, 213], (
        f"collections built for M0n with n in {sorted(reproduced)}; beyond that only the rank tower {tower} is checked"
    )


CRITERIA: dict[int, tuple[Callable[[], Outcome], float]] = {
    1: (criterion_1, 1.0),
    2: (criterion_2, 10.0),
    3: (criterion_3, 300.0),
    4: (criterion_4, 60.0),
    5: (criterion_5, 120.0),
    6: (criterion_6, 30.0),
    7: (criterion_7, 60.0),
    8: (criterion_8, 10.0),
}


def run_criterion(number: int) -> tuple[bool, str]:
    func, budget = CRITERIA[number]
    start = time.perf_counter()
    ok, detail = func()
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < budget
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s of {budget:g}s) {detail}"
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_acceptance(number, capsys):
    ok, line = run_criterion(number)
    with capsys.disabled():
        print(f"\n{line}")
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
