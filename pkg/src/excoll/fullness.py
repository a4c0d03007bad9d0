"""Generation certificates from Koszul moves on dual labels.

Everything here is phrased for duals: the label ``(l, E)`` stands for
``F^∨_{l,E} = O(-E) ⊗ V_l``.  A move picks a subset ``I`` of markings, a base
set ``E_0`` disjoint from ``I`` and an exponent ``m``; pushing forward the
Koszul complex of ``Δ_{I ∪ {x}}`` twisted by ``O(-E_0) ⊠ O(m)`` gives the terms

    F^∨_{m-j, E_0 ∪ J}              for J ⊆ I, j = |J| <= m,
    (nothing)                      for j = m + 1,
    F^∨_{j-m-2, E_0 ∪ J}[-1]        for j >= m + 2,

and, when ``I`` is unstable, the alternating complex is exact on the
semistable locus, so any one term is generated by the others.

Games:

* ``G1``: ``E_0 = E``, ``m = l``; the generated term is ``j = 0``.
* ``G2``: ``E_0 = E \\ I`` with ``I ⊆ E``, ``m = |I| - 2 - l``; the generated
  term is ``j = |I|`` (with shift ``[-1]``).
* ``G3``: ``I = E_p`` of size ``r``, ``E_0 = E_q``, ``m = r - 2 - l``; the
  complex resolves a torsion sheaf ``T^∨_{l,E}[r-1]`` supported on the
  semistable locus, which becomes an extra leaf.

For ``p`` odd (no light markings) the moves are ``OddP-case1`` (``e <= r``,
a ``G1`` move with ``I`` of size ``r+1`` disjoint from ``E``) and
``OddP-case2`` (``e >= r+1``, a ``G2`` move with ``I ⊆ E`` of size ``r+1``).

The induction measure is the pair ``(score, l)``: every child that is not a
member of the dual collection must be strictly smaller lexicographically.
Ties between candidate sets ``I`` go to the lexicographically least one.
"""

from __future__ import annotations

import sys
from collections.abc import Iterator
from dataclasses import dataclass, field
from enum import Enum

from .enumeration import Space, Variant
from .git import GitProblem
from .ktheory import KoszulExpansion, koszul_class_check
from .labels import PairLE, bits, mask_of, permute_mask, popcount, subsets_of
from .scores import classify_group, score_S


class Game(str, Enum):
    G1 = "G1"
    G2 = "G2"
    G3 = "G3"
    ODD1 = "OddP-case1"
    ODD2 = "OddP-case2"


class DescentViolation(AssertionError):
    """A non-member child failed to decrease the measure."""


class NotCertifiable(ValueError):
    """The space or variant lies outside what the replayer covers."""


@dataclass(frozen=True, slots=True)
class Child:
    kind: str  # "F" or "T"
    l: int
    E: int
    shift: int

    @property
    def pair(self) -> PairLE:
        return PairLE(self.l, self.E)

    def to_json(self) -> dict:
        return {"kind": self.kind, "l": self.l, "E": bits(self.E), "shift": self.shift}


@dataclass(frozen=True)
class GameMove:
    root: PairLE
    game: Game
    I: int
    E0: int
    m: int
    children: tuple[Child, ...]
    case: str = ""

    def to_json(self) -> dict:
        return {
            "game": self.game.value,
            "case": self.case,
            "I": bits(self.I),
            "E0": bits(self.E0),
            "m": self.m,
            "children": [c.to_json() for c in self.children],
        }


def koszul_terms(I: int, E0: int, m: int) -> Iterator[tuple[int, int, int]]:
    """``(l, E, shift)`` for every nonzero pushed-forward term."""
    for J in subsets_of(I):
        t = m - popcount(J)
        if t >= 0:
            yield t, E0 | J, 0
        elif t <= -2:
            yield -t - 2, E0 | J, -1


# ---------------------------------------------------------------------------
# the replayer


@dataclass
class Rules:
    """Membership, score and stability for one space and variant."""

    space: Space
    variant: Variant
    problem: GitProblem = field(init=False)

    def __post_init__(self) -> None:
        if self.space.regime not in ("odd", "even_odd"):
            raise NotCertifiable(
                "certificates cover p odd without light markings and p even with q odd"
            )
        if self.variant.tilde == "2A" and self.space.regime != "odd":
            raise NotCertifiable("fullness is not claimed for the 2A variant")
        self.problem = GitProblem.for_space(self.space.p, self.space.q)

    @property
    def split(self):
        return self.space.split

    def score(self, pair: PairLE) -> int:
        return score_S(pair, self.split)

    def member(self, pair: PairLE) -> bool:
        if pair.l < 0:
            return False
        if self.space.regime == "odd":
            return self.score(pair) <= self.space.r - 1
        return self.variant.bundles in classify_group(pair, self.split)

    def group2(self, pair: PairLE) -> bool:
        return self.space.regime == "even_odd" and "2" in classify_group(pair, self.split)

    def measure(self, pair: PairLE) -> tuple[int, int]:
        return self.score(pair), pair.l


def _first(it: Iterator[int]) -> int:
    for x in it:
        return x
    raise AssertionError("no subset of the requested size")


def expand(pair: PairLE, space: Space, variant: Variant | str = "1A") -> GameMove:
    """One Koszul move generating ``F^∨_{l,E}`` from other terms."""
    variant = Variant.parse(variant) if isinstance(variant, str) else variant
    rules = Rules(space, variant)
    return _expand(pair, rules)


def _expand(pair: PairLE, rules: Rules) -> GameMove:
    sp = rules.space
    if pair.l < 0:
        raise ValueError("labels with l < 0 are not expanded")
    if rules.member(pair):
        raise ValueError(f"{pair} is already in the collection")
    split = sp.split
    r = sp.r
    E, l = pair.E, pair.l
    if sp.regime == "odd":
        if pair.e <= r:
            I = _first(subsets_of(split.full & ~E, r + 1))
            return _move(pair, Game.ODD1, I, E, l, "e <= r")
        I = _first(subsets_of(E, r + 1))
        return _move(pair, Game.ODD2, I, E & ~I, r + 1 - 2 - l, "e >= r+1")
    s, q = sp.s, sp.q
    H, L = split.heavy, split.light
    ep, eq = split.ep(E), split.eq(E)
    if rules.group2(pair):
        return _move(pair, Game.G3, E & H, E & L, r - 2 - l, "group 2")
    if ep < r:
        I = _first(subsets_of(H & ~E, r + 1))
        return _move(pair, Game.G1, I, E, l, "case 1")
    if ep == r and eq <= s:
        I = (H & ~E) | _first(subsets_of(L & ~E, s + 1))
        return _move(pair, Game.G1, I, E, l, "case 2")
    if ep >= r + 1:
        I = _first(subsets_of(E & H, r + 1))
        return _move(pair, Game.G2, I, E & ~I, r + 1 - 2 - l, "case 3")
    assert ep == r and eq >= s + 1 and q == 2 * s + 1
    return _move(pair, Game.G2, E, 0, pair.e - 2 - l, "case 4")


def _root_term(pair: PairLE, game: Game) -> tuple[int, int, int]:
    if game in (Game.G1, Game.ODD1):
        return pair.l, pair.E, 0
    return pair.l, pair.E, -1


def _move(pair: PairLE, game: Game, I: int, E0: int, m: int, case: str) -> GameMove:
    root = _root_term(pair, game)
    children = []
    seen_root = False
    for l2, E2, sh in koszul_terms(I, E0, m):
        if (l2, E2, sh) == root and not seen_root:
            seen_root = True
            continue
        children.append(Child("F", l2, E2, sh))
    if not seen_root:
        raise AssertionError(f"{pair} does not occur in its own Koszul expansion")
    if game is Game.G3:
        children.insert(0, Child("T", pair.l, pair.E, popcount(I) - 1))
    return GameMove(pair, game, I, E0, m, tuple(children), case)


@dataclass
class Node:
    label: PairLE
    kind: str  # "member", "move"
    measure: tuple[int, int]
    move: GameMove | None = None


@dataclass
class CertificateStore:
    """Memoized moves shared between roots (first writer wins)."""

    rules: Rules
    nodes: dict[PairLE, Node] = field(default_factory=dict)

    @classmethod
    def for_space(cls, space: Space, variant: Variant | str = "1A") -> CertificateStore:
        variant = Variant.parse(variant) if isinstance(variant, str) else variant
        return cls(Rules(space, variant))

    def node(self, pair: PairLE) -> Node:
        hit = self.nodes.get(pair)
        if hit is not None:
            return hit
        rules = self.rules
        if rules.member(pair):
            node = Node(pair, "member", rules.measure(pair))
            self.nodes[pair] = node
            return node
        move = _expand(pair, rules)
        node = Node(pair, "move", rules.measure(pair), move)
        self.nodes[pair] = node
        parent = node.measure
        for ch in move.children:
            if ch.kind == "T":
                continue
            child = ch.pair
            if rules.member(child):
                self.node(child)
                continue
            if not rules.measure(child) < parent:
                raise DescentViolation(
                    f"{move.game.value} on {pair}: child {child} has measure "
                    f"{rules.measure(child)} >= {parent}"
                )
            self.node(child)
        return node


@dataclass
class GenerationCertificate:
    space: Space
    variant: Variant
    root: PairLE
    nodes: dict[PairLE, Node]

    @property
    def moves(self) -> list[GameMove]:
        return [n.move for n in self.nodes.values() if n.move is not None]

    @property
    def leaves(self) -> set[tuple[str, PairLE]]:
        out = {("F", n.label) for n in self.nodes.values() if n.kind == "member"}
        for mv in self.moves:
            out |= {("T", c.pair) for c in mv.children if c.kind == "T"}
        return out

    def to_json(self) -> dict:
        nodes = []
        for label, node in sorted(self.nodes.items(), key=lambda kv: (kv[0].l, bits(kv[0].E))):
            item = {
                "l": label.l,
                "E": bits(label.E),
                "kind": node.kind,
                "measure": list(node.measure),
            }
            if node.move is not None:
                item["move"] = node.move.to_json()
            nodes.append(item)
        return {
            "space": {"p": self.space.p, "q": self.space.q},
            "variant": str(self.variant),
            "root": {"l": self.root.l, "E": bits(self.root.E)},
            "nodes": nodes,
        }

    @classmethod
    def from_json(cls, data: dict) -> GenerationCertificate:
        space = Space(data["space"]["p"], data["space"]["q"])
        nodes: dict[PairLE, Node] = {}
        for item in data["nodes"]:
            label = PairLE(item["l"], mask_of(item["E"]))
            move = None
            if "move" in item:
                mv = item["move"]
                move = GameMove(
                    label,
                    Game(mv["game"]),
                    mask_of(mv["I"]),
                    mask_of(mv["E0"]),
                    mv["m"],
                    tuple(Child(c["kind"], c["l"], mask_of(c["E"]), c["shift"]) for c in mv["children"]),
                    mv.get("case", ""),
                )
            nodes[label] = Node(label, item["kind"], tuple(item["measure"]), move)
        root = PairLE(data["root"]["l"], mask_of(data["root"]["E"]))
        return cls(space, Variant.parse(data["variant"]), root, nodes)


def certify(
    pair: PairLE, space: Space, variant: Variant | str = "1A", store: CertificateStore | None = None
) -> GenerationCertificate:
    """Expand until every leaf is a collection member or a torsion leaf."""
    store = store or CertificateStore.for_space(space, variant)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10000))
    try:
        store.node(pair)
    finally:
        sys.setrecursionlimit(limit)
    reach: dict[PairLE, Node] = {}
    stack = [pair]
    while stack:
        x = stack.pop()
        if x in reach:
            continue
        node = store.nodes[x]
        reach[x] = node
        if node.move is not None:
            stack.extend(c.pair for c in node.move.children if c.kind == "F")
    return GenerationCertificate(space, store.rules.variant, pair, reach)


def dual_labels(space: Space, lmax: int) -> list[PairLE]:
    return [
        PairLE(l, E)
        for E in range(1 << space.n)
        for l in range(popcount(E) % 2, lmax + 1, 2)
    ]


def certify_all(space: Space, lmax: int, variant: Variant | str = "1A") -> list[GenerationCertificate]:
    store = CertificateStore.for_space(space, variant)
    return [certify(x, space, variant, store) for x in dual_labels(space, lmax)]


# ---------------------------------------------------------------------------
# independent re-validation


@dataclass
class CheckResult:
    ok: bool
    witness: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _schema(I: int, E0: int, m: int) -> list[tuple[int, int, int]]:
    """Expected terms, rebuilt directly from the shift rule for ``V_{m-j}``."""
    out = []
    idx = bits(I)
    for code in range(1 << len(idx)):
        J = 0
        for k, i in enumerate(idx):
            if (code >> k) & 1:
                J |= 1 << i
        deg = m - bin(J).count("1")
        if deg == -1:
            continue
        out.append((deg, E0 | J, 0) if deg >= 0 else (-deg - 2, E0 | J, -1))
    return out


def _member(space: Space, variant: Variant, pair: PairLE) -> bool:
    if pair.l < 0 or (pair.l + pair.e) % 2:
        return False
    split = space.split
    if space.regime == "odd":
        return pair.l + min(pair.e, space.p - pair.e) <= space.r - 1
    ep = split.ep(pair.E)
    if variant.bundles == "1A":
        return pair.l + min(ep, space.p + 1 - ep) <= space.r - 1
    return pair.l + min(ep + 1, space.p - ep) <= space.r - 1


def _measure(space: Space, pair: PairLE) -> tuple[int, int]:
    split = space.split
    ep, eq = split.ep(pair.E), split.eq(pair.E)
    return pair.l + min(ep, space.p - ep) + min(eq, space.q - eq), pair.l


def check_certificate(cert: GenerationCertificate, cache: dict | None = None) -> CheckResult:
    """Re-validate every move without re-running the choice of ``I``.

    ``cache`` may be shared between certificates of one space; it remembers
    moves whose class identity has already been checked.
    """
    space, variant = cert.space, cert.variant
    cache = {} if cache is None else cache
    problem = GitProblem.for_space(space.p, space.q)
    split = space.split
    r, s = space.r, space.s
    if cert.root not in cert.nodes:
        return CheckResult(False, f"root {cert.root} has no node")
    for label, node in cert.nodes.items():
        if node.label != label:
            return CheckResult(False, f"node key {label} does not match its label")
        if tuple(node.measure) != _measure(space, label):
            return CheckResult(False, f"{label}: recorded measure {node.measure} is wrong")
        if node.kind == "member":
            if not _member(space, variant, label):
                return CheckResult(False, f"{label} is not a collection member")
            continue
        mv = node.move
        if mv is None or mv.root != label:
            return CheckResult(False, f"{label}: move missing")
        if _member(space, variant, label):
            return CheckResult(False, f"{label}: member expanded as a move")
        E = label.E
        i = popcount(mv.I)
        if mv.E0 & mv.I:
            return CheckResult(False, f"{label}: E0 meets I")
        if mv.game in (Game.G1, Game.ODD1):
            if not problem.unstable(mv.I):
                return CheckResult(False, f"{label}: I={bits(mv.I)} is not unstable")
            if mv.E0 != E or mv.m != label.l:
                return CheckResult(False, f"{label}: G1 parameters do not match the root")
            root = (label.l, E, 0)
        elif mv.game in (Game.G2, Game.ODD2):
            if not problem.unstable(mv.I):
                return CheckResult(False, f"{label}: I={bits(mv.I)} is not unstable")
            if mv.E0 | mv.I != E or mv.m != i - 2 - label.l:
                return CheckResult(False, f"{label}: G2 parameters do not match the root")
            root = (label.l, E, -1)
        elif mv.game is Game.G3:
            ep = split.ep(E)
            eq = split.eq(E)
            if mv.I != E & split.heavy or i != r or ep != r:
                return CheckResult(False, f"{label}: G3 needs I = E_p of size r")
            if not label.l + min(eq, space.q - eq) <= s - 1:
                return CheckResult(False, f"{label}: G3 root has no torsion partner")
            if mv.E0 != E & split.light or mv.m != r - 2 - label.l:
                return CheckResult(False, f"{label}: G3 parameters do not match the root")
            root = (label.l, E, -1)
        else:
            return CheckResult(False, f"{label}: unknown game")
        expected = sorted(_schema(mv.I, mv.E0, mv.m))
        if root not in expected:
            return CheckResult(False, f"{label}: root missing from its schema")
        expected.remove(root)
        bundles = sorted((c.l, c.E, c.shift) for c in mv.children if c.kind == "F")
        if bundles != expected:
            diff = set(bundles) ^ set(expected)
            return CheckResult(False, f"{label}: children differ from the schema at {sorted(diff)[:3]}")
        torsion = [c for c in mv.children if c.kind == "T"]
        if mv.game is Game.G3:
            if [(c.l, c.E, c.shift) for c in torsion] != [(label.l, E, r - 1)]:
                return CheckResult(False, f"{label}: torsion leaf is wrong")
        elif torsion:
            return CheckResult(False, f"{label}: unexpected torsion leaf")
        parent = _measure(space, label)
        for c in mv.children:
            if c.kind != "F":
                continue
            child = PairLE(c.l, c.E)
            if child not in cert.nodes:
                return CheckResult(False, f"edge {label} -> {child}: child has no node")
            if not _member(space, variant, child) and not _measure(space, child) < parent:
                return CheckResult(False, f"edge {label} -> {child}: measure does not decrease")
        key = (label, mv)
        if key in cache:
            continue
        exp = KoszulExpansion(
            space.n,
            mv.I,
            mv.E0,
            mv.m,
            [(c.l, c.E, c.shift) for c in mv.children if c.kind == "F"] + [root],
            (label.l, E, r - 1) if mv.game is Game.G3 else None,
            r,
        )
        ok, K = koszul_class_check(exp, split.heavy)
        if not ok:
            return CheckResult(False, f"{label}: class identity fails at fixed point {bits(K or 0)}")
        cache[key] = True
    return CheckResult(True)


def permute_certificate(cert: GenerationCertificate, perm: tuple[int, ...]) -> GenerationCertificate:
    """Relabel every set in a certificate by a marking permutation."""
    def pm(x: int) -> int:
        return permute_mask(x, perm)

    nodes = {}
    for label, node in cert.nodes.items():
        new = label.permuted(perm)
        move = None
        if node.move is not None:
            mv = node.move
            move = GameMove(
                new, mv.game, pm(mv.I), pm(mv.E0), mv.m,
                tuple(Child(c.kind, c.l, pm(c.E), c.shift) for c in mv.children), mv.case,
            )
        nodes[new] = Node(new, node.kind, node.measure, move)
    return GenerationCertificate(cert.space, cert.variant, cert.root.permuted(perm), nodes)
