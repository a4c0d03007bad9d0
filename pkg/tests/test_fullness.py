import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from excoll.enumeration import Space, all_permutations
from excoll.fullness import (
    CertificateStore,
    Game,
    GenerationCertificate,
    NotCertifiable,
    certify,
    certify_all,
    check_certificate,
    dual_labels,
    expand,
    koszul_terms,
    permute_certificate,
)
from excoll.git import GitProblem
from excoll.labels import PairLE, bits, popcount


def test_expand_game_1_example():
    move = expand(PairLE(2, 0), Space(5))
    assert move.game is Game.ODD1 and popcount(move.I) == 3
    kids = sorted((c.l, popcount(c.E), c.shift) for c in move.children)
    assert kids == [(0, 2, 0)] * 3 + [(1, 1, 0)] * 3


def test_expand_case_4_with_l_zero():
    space = Space(4, 3)
    E = 0b0110011  # E_p = {0, 1}, e_q = 2
    move = expand(PairLE(0, E), space)
    assert move.game is Game.G2 and move.case == "case 4"
    assert move.I == E and move.E0 == 0 and move.m == 2
    kids = sorted((c.l, popcount(c.E), c.shift) for c in move.children)
    assert kids == [(0, 2, 0)] * 6 + [(1, 1, 0)] * 4 + [(2, 0, 0)]
    cert = certify(PairLE(0, E), space)
    assert check_certificate(cert)


def test_expand_rejects_members_and_bad_input():
    with pytest.raises(ValueError):
        expand(PairLE(0, 0), Space(5))
    with pytest.raises(ValueError):
        expand(PairLE(-2, 0), Space(5))


def test_koszul_terms_skip_and_tail():
    I = 0b111
    terms = sorted(koszul_terms(I, 0, 1))
    # j = 0, 1 give V_1, V_0; j = 2 is the skipped slot; j = 3 gives V_0[-1]
    assert terms == sorted([(1, 0, 0)] + [(0, 1 << k, 0) for k in range(3)] + [(0, I, -1)])


def test_member_root_is_single_node():
    cert = certify(PairLE(0, 0), Space(5))
    assert list(cert.nodes) == [PairLE(0, 0)] and cert.nodes[PairLE(0, 0)].kind == "member"
    assert check_certificate(cert)


def test_certify_m5():
    certs = certify_all(Space(5), 6)
    assert len(certs) == len(dual_labels(Space(5), 6))
    cache: dict = {}
    assert all(check_certificate(c, cache) for c in certs)


def test_certify_small_even_odd():
    for space, var in [(Space(4, 1), "1A"), (Space(4, 1), "1B"), (Space(4, 3), "1B")]:
        cache: dict = {}
        assert all(check_certificate(c, cache) for c in certify_all(space, 2, var))


def test_games_use_the_window_predicate():
    space = Space(4, 3)
    prob = GitProblem.for_space(4, 3)
    store = CertificateStore.for_space(space)
    for x in dual_labels(space, 3):
        certify(x, space, store=store)
    for node in store.nodes.values():
        mv = node.move
        if mv is not None and mv.game in (Game.G1, Game.G2):
            assert prob.unstable(mv.I) and prob.unstable_fast(mv.I)
    assert any(n.move and n.move.game is Game.G3 for n in store.nodes.values())


def tamper_first_child(cert: GenerationCertificate) -> GenerationCertificate:
    data = cert.to_json()
    for node in data["nodes"]:
        if "move" in node:
            node["move"]["children"][0]["l"] += 2
            break
    return GenerationCertificate.from_json(data)


def test_tampering_caught():
    cert = certify(PairLE(4, 0), Space(5))
    bad = check_certificate(tamper_first_child(cert))
    assert not bad and "children" in bad.witness
    data = cert.to_json()
    for node in data["nodes"]:
        if node["kind"] == "member":
            node["kind"] = "move"
            break
    assert not check_certificate(GenerationCertificate.from_json(data))
    data = cert.to_json()
    data["nodes"] = [n for n in data["nodes"] if n["kind"] != "member"]
    res = check_certificate(GenerationCertificate.from_json(data))
    assert not res and "edge" in res.witness


def test_every_edge_tamper_caught():
    cert = certify(PairLE(2, 0b0000011), Space(4, 3))
    data = cert.to_json()
    for k, node in enumerate(data["nodes"]):
        for c in range(len(node.get("move", {}).get("children", []))):
            copy = json.loads(json.dumps(data))
            copy["nodes"][k]["move"]["children"][c]["l"] += 2
            assert not check_certificate(GenerationCertificate.from_json(copy))


@given(st.integers(0, 119), st.sampled_from(dual_labels(Space(5), 4)))
def test_permutation_replay(k, root):
    space = Space(5)
    perm = list(all_permutations(space))[k]
    cert = certify(root, space)
    moved = permute_certificate(cert, perm)
    assert moved.root == root.permuted(perm)
    assert check_certificate(moved)


def test_permutation_replay_4_3():
    space = Space(4, 3)
    rng = random.Random(3)
    perms = list(all_permutations(space))
    for root in dual_labels(space, 2)[::7]:
        cert = certify(root, space)
        assert check_certificate(permute_certificate(cert, rng.choice(perms)))


def test_refusals():
    with pytest.raises(NotCertifiable):
        certify(PairLE(0, 0), Space(4, 3), "1A+2A")
    with pytest.raises(NotCertifiable):
        certify(PairLE(0, 0), Space(6, 0))
    with pytest.raises(NotCertifiable):
        certify(PairLE(0, 0), Space(5, 2))


def test_json_round_trip(validate):
    cert = certify(PairLE(1, 0b0100011), Space(4, 3))
    data = cert.to_json()
    validate("certificate", data)
    back = GenerationCertificate.from_json(json.loads(json.dumps(data)))
    assert back.to_json() == data and check_certificate(back)
