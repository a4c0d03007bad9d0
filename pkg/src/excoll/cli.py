"""Command-line interface: ``excoll <command> [options]``.

Exit codes: 0 success, 1 a mathematical failure was found, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .enumeration import Collection, CollectionObject, Space, Tag, Variant, check_equivariance, enumerate_collection
from .equivariant import decompose, decomposition_string, orbits
from .fullness import NotCertifiable, certify_all, check_certificate
from .git import GitProblem, window_feasible
from .ktheory import HassettWeights, NonGeneric, rank_hassett, rank_mpq
from .labels import PairLE, bits
from .verify import JOBS_ENV, default_jobs, verify_objects

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    space: Space | None
    weights: HassettWeights | None
    variant: Variant
    fmt: str
    jobs: int
    out: str | None


def _config(args: argparse.Namespace, allow_weights: bool = False) -> RunConfig:
    selectors = [args.p is not None]
    weights = None
    if allow_weights:
        selectors += [args.n is not None, args.weights is not None]
    if sum(selectors) != 1:
        raise UsageError("give exactly one space selector")
    space = None
    try:
        if args.p is not None:
            space = Space(args.p, args.q)
        elif args.n is not None:
            weights = HassettWeights.m0n(args.n)
        else:
            weights = HassettWeights(tuple(Fraction(x) for x in args.weights.split(",")))
        variant = Variant.parse(args.variant)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc
    if args.q is not None and args.p is None:
        raise UsageError("--q needs --p")
    return RunConfig(space, weights, variant, args.format, args.jobs or default_jobs(), args.out)


def _emit(cfg: RunConfig, payload: dict, text: str, rows: list[list] | None) -> None:
    if cfg.fmt == "json":
        body = json.dumps(payload, indent=2) + "\n"
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows or [])
        body = buf.getvalue()
    else:
        body = text.rstrip("\n") + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload, indent=2) + "\n" if cfg.fmt == "text" else body)
    sys.stdout.write(body)


def load_schema(name: str) -> dict:
    """A checked-in JSON schema, e.g. ``load_schema("verify")``."""
    text = resources.files("excoll").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


SCHEMA_NAMES = ("collection", "verify", "rank", "orbits", "certificate", "certify")


# ---------------------------------------------------------------------------
# payload builders (also used by the tests)


def enumerate_payload(space: Space, variant: Variant) -> tuple[Collection, dict]:
    coll = enumerate_collection(space, variant)
    data = coll.to_json()
    data["count"] = len(coll)
    data["count_by_tag"] = coll.count_by_tag()
    return coll, data


def parse_inject(spec: str, space: Space) -> CollectionObject:
    """``KIND:l:E`` with KIND in F, T, T~ and ``E`` a comma list or ``empty``."""
    try:
        kind, l_text, e_text = spec.split(":")
        E = 0 if e_text.strip().lower() in ("", "empty") else sum(1 << int(i) for i in e_text.split(","))
        pair = PairLE(int(l_text), E)
    except ValueError as exc:
        raise UsageError(f"bad injection {spec!r}: {exc}") from exc
    if E >> space.n:
        raise UsageError(f"bad injection {spec!r}: marking out of range")
    tag = {"F": Tag.BUNDLE, "T": Tag.TORSION_Z, "T~": Tag.TILDE_TORSION}.get(kind.strip().upper())
    if tag is None:
        raise UsageError(f"bad injection {spec!r}: unknown kind")
    return CollectionObject(tag, pair)


def verify_payload(space: Space, variant: Variant, inject: Sequence[str] = (), jobs: int = 1) -> tuple[bool, dict]:
    coll = enumerate_collection(space, variant)
    objects = coll.objects + tuple(parse_inject(s, space) for s in inject)
    report = verify_objects(space, variant, objects, jobs)
    data = report.to_json()
    ok = report.verified_part_exceptional and report.order_valid
    window = None
    if space.regime in ("odd", "odd_lights"):
        bundles = [o.pair for o in objects if o.tag is Tag.BUNDLE and o.pair is not None]
        wr = window_feasible(bundles, GitProblem.for_space(space.p, space.q))
        window = {"feasible": wr.feasible, "witness": None}
        if wr.witness is not None:
            window["witness"] = {"K": bits(wr.witness.K), "k": len(bits(wr.witness.K)), "eta": wr.witness.eta}
        ok = ok and wr.feasible
    data["window"] = window
    data["ok"] = ok
    return ok, data


def rank_payload(cfg: RunConfig) -> dict:
    if cfg.space is not None:
        return {"selector": {"p": cfg.space.p, "q": cfg.space.q}, "rank": rank_mpq(cfg.space.p, cfg.space.q)}
    assert cfg.weights is not None
    return {
        "selector": {"weights": [str(w) for w in cfg.weights.weights]},
        "rank": rank_hassett(cfg.weights),
    }


def partition_key(heavy: Sequence[int], light: Sequence[int]) -> str:
    key = "+".join(map(str, heavy))
    return f"{key}|{'+'.join(map(str, light))}" if light else key


def orbits_payload(space: Space, variant: Variant) -> tuple[bool, dict]:
    coll = enumerate_collection(space, variant)
    ok, g = check_equivariance(coll)
    if not ok:
        return False, {"equivariant": False, "witness": list(g or ())}
    orbs = orbits(coll)
    parts = decompose(coll)
    return True, {
        "space": {"p": space.p, "q": space.q},
        "variant": str(variant),
        "count": len(coll),
        "equivariant": True,
        "orbits": [o.to_json(coll) for o in orbs],
        "decomposition": {partition_key(x.heavy, x.light): x.multiplicity for x in parts},
        "decomposition_text": decomposition_string(parts),
        "dimension_check": sum(x.multiplicity * x.dimension for x in parts) == len(coll),
    }


def certify_payload(space: Space, variant: Variant, lmax: int, full: bool = False) -> tuple[bool, dict]:
    certs = certify_all(space, lmax, variant)
    cache: dict = {}
    rows = []
    ok = True
    for c in certs:
        res = check_certificate(c, cache)
        ok = ok and res.ok
        row = {
            "root": {"l": c.root.l, "E": bits(c.root.E)},
            "nodes": len(c.nodes),
            "moves": len(c.moves),
            "valid": res.ok,
            "witness": res.witness,
        }
        if full:
            row["certificate"] = c.to_json()
        rows.append(row)
    return ok, {
        "space": {"p": space.p, "q": space.q},
        "variant": str(variant),
        "lmax": lmax,
        "roots": len(certs),
        "all_valid": ok,
        "certificates": rows,
    }


# ---------------------------------------------------------------------------
# commands


def cmd_enumerate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    assert cfg.space is not None
    coll, data = enumerate_payload(cfg.space, cfg.variant)
    lines = [f"{coll.space}: {len(coll)} objects"]
    lines += [f"{k:4d}  {o.describe(coll.space.split)}" for k, o in enumerate(coll.objects)]
    rows = [["order_index", "tag", "l", "E", "divisor", "a", "b"]]
    for k, o in enumerate(coll.objects):
        if o.pair is not None:
            rows.append([k, o.tag.value, o.pair.l, " ".join(map(str, o.pair.indices())), "", "", ""])
        else:
            rows.append([k, o.tag.value, "", "", " ".join(map(str, bits(o.divisor or 0))), o.a, o.b])
    _emit(cfg, data, "\n".join(lines), rows)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = _config(args)
    assert cfg.space is not None
    ok, data = verify_payload(cfg.space, cfg.variant, args.inject or (), cfg.jobs)
    s = data["summary"]
    lines = [
        f"{cfg.space} [{cfg.variant}]: {s['objects']} objects, {s['required_pairs']} required pairs",
        f"failures={s['failures']} inapplicable={s['method_inapplicable']} skipped={s['skipped']} "
        f"unexpected_skips={s['unexpected_skips']} order_valid={s['order_valid']} "
        f"strong_bundle_part={s['strong_bundle_part']}",
    ]
    bad = [v for v in data["verdicts"] if v["required"] and v["status"] != "ok"]
    for v in bad[:10]:
        lines.append(f"witness pair ({v['source']}, {v['target']}): {v['status']} {v['method']} {v['result']}")
    if data["window"] and not data["window"]["feasible"]:
        w = data["window"]["witness"]
        lines.append(f"window infeasible at stratum K={w['K']} (k={w['k']})")
    lines.append("OK" if ok else "FAILED")
    rows = [["source", "target", "method", "status", "required", "result"]]
    for v in data["verdicts"]:
        res = ";".join(f"{d}:{k}" for d, k in sorted(v["result"].items(), key=lambda kv: int(kv[0])))
        rows.append([v["source"], v["target"], v["method"], v["status"], int(v["required"]), res])
    _emit(cfg, data, "\n".join(lines), rows)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_rank(args: argparse.Namespace) -> int:
    cfg = _config(args, allow_weights=True)
    try:
        data = rank_payload(cfg)
    except NonGeneric as exc:
        raise UsageError(str(exc)) from exc
    _emit(cfg, data, str(data["rank"]), [["rank"], [data["rank"]]])
    return EXIT_OK


def cmd_orbits(args: argparse.Namespace) -> int:
    cfg = _config(args)
    assert cfg.space is not None
    ok, data = orbits_payload(cfg.space, cfg.variant)
    if not ok:
        _emit(cfg, data, f"collection is not invariant (generator {data['witness']})", None)
        return EXIT_FAIL
    lines = [f"{cfg.space}: {data['count']} objects in {len(data['orbits'])} orbits"]
    lines += [
        f"  size {o['size']:3d}  stabilizer {o['stabilizer_order']:5d}  {o['representative']}"
        for o in data["orbits"]
    ]
    lines.append(f"decomposition: {data['decomposition_text']}")
    rows = [["partition", "multiplicity"]] + [[k, m] for k, m in data["decomposition"].items()]
    _emit(cfg, data, "\n".join(lines), rows)
    return EXIT_OK if data["dimension_check"] else EXIT_FAIL


def cmd_certify(args: argparse.Namespace) -> int:
    cfg = _config(args)
    assert cfg.space is not None
    if args.lmax < 0:
        raise UsageError("--lmax must be nonnegative")
    try:
        ok, data = certify_payload(cfg.space, cfg.variant, args.lmax, full=bool(cfg.out))
    except NotCertifiable as exc:
        raise UsageError(str(exc)) from exc
    bad = [c for c in data["certificates"] if not c["valid"]]
    lines = [f"{cfg.space} [{cfg.variant}]: {data['roots']} roots with l <= {args.lmax}, "
             f"{data['roots'] - len(bad)} valid"]
    lines += [f"invalid root {c['root']}: {c['witness']}" for c in bad[:10]]
    lines.append("OK" if ok else "FAILED")
    rows = [["l", "E", "nodes", "moves", "valid", "witness"]] + [
        [c["root"]["l"], " ".join(map(str, c["root"]["E"])), c["nodes"], c["moves"], int(c["valid"]), c["witness"]]
        for c in data["certificates"]
    ]
    _emit(cfg, data, "\n".join(lines), rows)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="excoll",
        description="Enumerate and check exceptional collections on moduli of pointed rational curves.",
        epilog="Exit codes: 0 success, 1 a mathematical failure was found, 2 usage error.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="number of heavy markings")
    common.add_argument("--q", type=int, default=None, help="number of light markings (default 0)")
    common.add_argument("--variant", default="1A+2B", help="1A or 1B, optionally +2A or +2B")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--jobs", type=int, default=None, help=f"worker processes (default ${JOBS_ENV} or 1)")
    common.add_argument("--out", help="also write the JSON artifact to this path")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="list the ordered collection")
    p.set_defaults(func=cmd_enumerate)
    p = sub.add_parser("verify", parents=[common], help="check exceptionality pair by pair")
    p.add_argument("--inject", action="append", metavar="KIND:l:E",
                   help="append an extra object, e.g. F:2:empty or F:1:0,3 (debugging)")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("rank", parents=[common], help="K-theory rank of a Hassett space")
    p.add_argument("--n", type=int, help="M_{0,n} with all weights 1")
    p.add_argument("--weights", help="comma-separated rational weights, e.g. 1/2,1/2,1,1")
    p.set_defaults(func=cmd_rank)
    p = sub.add_parser("orbits", parents=[common], help="orbits and character decomposition")
    p.set_defaults(func=cmd_orbits)
    p = sub.add_parser("certify", parents=[common], help="fullness certificates for dual labels")
    p.add_argument("--lmax", type=int, default=4)
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "q", None) is None and getattr(args, "p", None) is not None:
        args.q = 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"excoll: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
