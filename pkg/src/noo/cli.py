"""Command-line interface.

Exit status: 0 for an affirmative verdict or success, 1 for a negative
verdict (inconsistent, not subsumed, not entailed), 2 for usage or input
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import category, io, morphisms, oracle, saturation
from .model import Alignment, Network, NetworkError, axiom_sort_key, correspondence_sort_key, is_normalised, normalise
from .saturation import Clash, Disj, Fact, Sub

OK, NEGATIVE, USAGE = 0, 1, 2


class InputError(Exception):
    pass


def _load(path: str) -> Network:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    net, diags = io.parse_network_diagnostics(text)
    for d in diags:
        if d.severity == "warning":
            print(f"{path}: {d}", file=sys.stderr)
    if net is None:
        raise InputError("\n".join(f"{path}: {d}" for d in diags if d.severity == "error"))
    return net


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)


def _fact(f: Fact, unicode: bool) -> str:
    if isinstance(f, Sub):
        return f"{f.x} {'⊑' if unicode else '<'} {f.y}"
    if isinstance(f, Disj):
        return f"{f.x} {'⊥' if unicode else 'disjoint'} {f.y}"
    return f"{f.i} {'∈' if unicode else 'in'} {f.x}"


def _fact_doc(f: Fact) -> dict:
    if isinstance(f, Sub):
        return {"kind": "subClassOf", "sub": str(f.x), "sup": str(f.y)}
    if isinstance(f, Disj):
        return {"kind": "disjoint", "a": str(f.x), "b": str(f.y)}
    return {"kind": "memberOf", "individual": str(f.i), "class": str(f.x)}


def _query(text: str, net: Network):
    try:
        c = io.parse_correspondence(text, net)
    except io.LiteralError as exc:
        raise InputError(str(exc)) from None
    return io.as_axiom(c) or c


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    net = _load(args.file)
    n_ax = sum(len(o.axioms) for o in net.ontologies.values())
    n_corr = sum(len(a.correspondences) for a in net.alignments.values())
    if args.json:
        print(_dump({"valid": True, "ontologies": len(net.ontologies), "alignments": len(net.alignments),
                     "axioms": n_ax, "correspondences": n_corr, "normalised": is_normalised(net)}))
    else:
        print(
            f"valid: {len(net.ontologies)} ontologies, {len(net.alignments)} alignments, "
            f"{n_ax} axioms, {n_corr} correspondences"
            + (" (normalised)" if is_normalised(net) else "")
        )
    return OK


def cmd_normalize(args) -> int:
    _emit(io.serialize_network(normalise(_load(args.file)), indent=2), args.output)
    return OK


def _clash_chain(graph, clash: Clash, unicode: bool) -> list[str]:
    lines = []
    for f, d in graph.explain(clash):
        lines.append(f"  {_fact(f, unicode)}    [{d.describe()}]")
    lines.append(
        f"  clash (R5): {clash.individual} is in both {clash.x} and {clash.y}, "
        f"which are disjoint"
    )
    return lines


def cmd_consistent(args) -> int:
    net = _load(args.file)
    graph = saturation.saturate(net)
    if args.json:
        doc = {"consistent": not graph.clash}
        if graph.clash:
            clash = graph.clashes[0]
            doc["clash"] = {"individual": str(clash.individual), "classes": [str(clash.x), str(clash.y)]}
            if args.explain:
                doc["derivation"] = [
                    {"fact": _fact_doc(f), "rule": d.rule, "origin": d.origin,
                     "premises": [_fact_doc(p) for p in d.premises]}
                    for f, d in graph.explain(clash)
                ]
        print(_dump(doc))
        return NEGATIVE if graph.clash else OK
    if not graph.clash:
        print("consistent")
        return OK
    print("inconsistent")
    clash = graph.clashes[0]
    if args.explain:
        print("derivation:")
        for line in _clash_chain(graph, clash, args.unicode):
            print(line)
    else:
        print(
            f"clash (R5): {clash.individual} is in both {clash.x} and {clash.y}, which are disjoint"
        )
    return NEGATIVE


def cmd_close(args) -> int:
    net = _load(args.file)
    try:
        closed = saturation.close_network(net)
    except saturation.InconsistentNetworkError as exc:
        print(f"not closed: {exc}", file=sys.stderr)
        return NEGATIVE
    _emit(io.serialize_network(closed, indent=2), args.output)
    return OK


def cmd_omega(args) -> int:
    net = _load(args.file)
    try:
        closed = saturation.omega_closure(net, args.ontology)
    except NetworkError as exc:
        raise InputError(str(exc)) from None
    if isinstance(closed, saturation.AllConsequences):
        print("all consequences: the network is inconsistent")
        return NEGATIVE
    axioms = sorted(closed, key=axiom_sort_key)
    if args.json:
        onto = net.ontologies[args.ontology].with_axioms(axioms)
        doc = io.network_to_document(Network({onto.id: onto}, {}))["ontologies"][0]
        print(_dump(doc))
    else:
        for ax in axioms:
            print(ax.render(args.unicode))
    return OK


def cmd_alpha(args) -> int:
    net = _load(args.file)
    a, b = args.pair
    try:
        closed = saturation.alpha_closure(net, a, b)
    except NetworkError as exc:
        raise InputError(str(exc)) from None
    if isinstance(closed, saturation.AllConsequences):
        print("all consequences: the network is inconsistent")
        return NEGATIVE
    corrs = sorted(closed, key=correspondence_sort_key)
    if args.json:
        al = Alignment(f"{a}~{b}", a, b, frozenset(corrs))
        sub = Network({o: net.ontologies[o] for o in (a, b)}, {al.id: al})
        print(_dump(io.network_to_document(sub)["alignments"][0]))
    else:
        for c in corrs:
            print(c.render(args.unicode))
    return OK


def cmd_entails(args) -> int:
    net = _load(args.file)
    query = _query(args.query, net)
    verdict = saturation.entails(net, query)
    if args.json:
        print(_dump({"query": args.query, "entailed": verdict}))
    else:
        print("entailed" if verdict else "not entailed")
    return OK if verdict else NEGATIVE


def cmd_subsumes(args) -> int:
    src, dst = _load(args.src), _load(args.dst)
    if args.semantic:
        found = morphisms.find_semantic_morphism(src, dst)
    elif args.weighted:
        found = morphisms.find_weight_aware_morphism(src, dst)
    else:
        found = morphisms.find_syntactic_morphism(src, dst)
    vacuous = args.semantic and saturation.saturate(dst).clash
    if found is None:
        if args.json:
            print(_dump({"subsumed": False}))
        else:
            print("not subsumed")
        return NEGATIVE
    witness = found.to_document()
    if args.witness:
        Path(args.witness).write_text(_dump(witness) + "\n", encoding="utf-8")
    if args.json:
        doc = {"subsumed": True, "witness": witness}
        if args.semantic:
            doc["sound_only"] = True
            doc["vacuous"] = bool(vacuous)
        print(_dump(doc))
    else:
        print("subsumed")
        if args.semantic:
            print("(semantic check is sound under the saturation rules; completeness is not claimed)")
            if vacuous:
                print("(vacuous: the target network is inconsistent)")
        if not args.witness:
            print(_dump(witness))
    return OK


def _family(path: str) -> category.IsoFamily:
    doc = _load_json(path)
    base = Path(path).parent
    try:
        generator = _load(str(base / doc["generator"]))
        members = [_load(str(base / m)) for m in doc["members"]]
        pairs = [morphisms.NetworkMorphism.from_document(p) for p in doc["pairs"]]
        return category.IsoFamily(generator, members, pairs)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{path}: malformed family document ({exc})") from None
    except (category.FamilyError, io.NetworkParseError) as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_meet(args) -> int:
    meet = category.fibred_meet(_family(args.family))
    _emit(io.serialize_network(meet, indent=2), args.output)
    return OK


def cmd_verify_pullback(args) -> int:
    family = _family(args.family)
    doc = _load_json(args.candidates)
    base = Path(args.candidates).parent
    try:
        candidates = [
            (
                _load(str(base / c["network"])),
                [morphisms.NetworkMorphism.from_document(m) for m in c["morphisms"]],
            )
            for c in doc["candidates"]
        ]
        report = category.verify_pullback(family, candidates)
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.candidates}: malformed candidates document ({exc})") from None
    except (category.FamilyError, io.NetworkParseError, morphisms.MorphismError) as exc:
        raise InputError(str(exc)) from None
    if args.json:
        print(_dump({
            "pullback": report.ok,
            "projections_valid": report.projections_valid,
            "commutes": report.commutes,
            "mediators": [
                {"count": m.count, "mediator": m.mediator.to_document() if m.mediator else None}
                for m in report.mediators
            ],
        }))
    else:
        for line in report.lines():
            print(line)
        print("pullback verified" if report.ok else "pullback NOT verified")
    return OK if report.ok else NEGATIVE


def cmd_threshold(args) -> int:
    net = _load(args.file)
    try:
        out = category.apply_threshold(net, io.Fraction(args.w))
    except (NetworkError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad threshold {args.w!r}: {exc}") from None
    _emit(io.serialize_network(out, indent=2, strip_weights=args.strip_weights), args.output)
    return OK


def cmd_oracle(args) -> int:
    net = _load(args.file)
    try:
        if args.mode == "consistent":
            verdict = oracle.find_model(net, args.domain_size)
        else:
            if not args.query:
                raise InputError("oracle entails needs --query")
            verdict = oracle.oracle_entails(net, _query(args.query, net), args.domain_size)
    except oracle.OracleDeclined as exc:
        raise InputError(f"oracle declined: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if isinstance(verdict, (oracle.Model, oracle.Countermodel)):
        name = type(verdict).__name__
        if args.json:
            print(_dump({"verdict": name, "domain_size": verdict.model.domain_size,
                         "model": verdict.model.describe()}))
        else:
            print(f"{name}(domain size {verdict.model.domain_size})")
            for line in verdict.model.describe():
                print(f"  {line}")
        return OK if isinstance(verdict, oracle.Model) else NEGATIVE
    name = type(verdict).__name__
    if args.json:
        print(_dump({"verdict": name, "bound": verdict.bound}))
    else:
        print(f"{name}({verdict.bound})")
    return NEGATIVE if isinstance(verdict, oracle.NoModelUpTo) else OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--unicode", action="store_true", help="use logical glyphs in output")

    parser = argparse.ArgumentParser(
        prog="noo", description="Reason about networks of aligned ontologies."
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check a network document")
    p.add_argument("file")

    p = add("normalize", cmd_normalize, "standard normalisation")
    p.add_argument("file")
    p.add_argument("-o", "--output")

    p = add("consistent", cmd_consistent, "decide consistency by saturation")
    p.add_argument("file")
    p.add_argument("--explain", action="store_true", help="print the clash derivation")

    p = add("close", cmd_close, "closure of the whole network")
    p.add_argument("file")
    p.add_argument("-o", "--output")

    p = add("omega", cmd_omega, "axioms of one ontology entailed by the network")
    p.add_argument("file")
    p.add_argument("--ontology", required=True)

    p = add("alpha", cmd_alpha, "correspondences between two ontologies entailed by the network")
    p.add_argument("file")
    p.add_argument("--pair", nargs=2, required=True, metavar=("A", "B"))

    p = add("entails", cmd_entails, "is an axiom or correspondence derivable?")
    p.add_argument("file")
    p.add_argument("--query", required=True, help="e.g. 'o1:b1 <= o3:b3'")

    p = add("subsumes", cmd_subsumes, "search a morphism SRC -> DST")
    p.add_argument("src")
    p.add_argument("dst")
    p.add_argument("--witness", help="write the morphism witness here")
    p.add_argument("--weighted", action="store_true", help="require confidences to grow")
    p.add_argument("--semantic", action="store_true", help="images need only entail the source")

    p = add("meet", cmd_meet, "fibred meet of an isomorphic family")
    p.add_argument("family")
    p.add_argument("-o", "--output")

    p = add("verify-pullback", cmd_verify_pullback, "check the universal property of a meet")
    p.add_argument("family")
    p.add_argument("candidates")

    p = add("threshold", cmd_threshold, "drop correspondences below a confidence")
    p.add_argument("file")
    p.add_argument("-w", required=True, help="threshold in [0, 1]")
    p.add_argument("--strip-weights", action="store_true")
    p.add_argument("-o", "--output")

    p = add("oracle", cmd_oracle, "bounded finite-model search")
    p.add_argument("mode", choices=["consistent", "entails"])
    p.add_argument("file")
    p.add_argument("--query")
    p.add_argument("--domain-size", type=int, required=True)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
