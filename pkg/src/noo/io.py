"""JSON network documents, correspondence literals and morphism witnesses."""

from __future__ import annotations

import json
import re
from importlib import resources
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import jsonschema

from .model import (
    CLASS,
    INDIVIDUAL,
    TOP,
    Alignment,
    Axiom,
    Correspondence,
    Disjoint,
    EntityRef,
    MemberOf,
    Network,
    NetworkError,
    Ontology,
    Relation,
    SubClassOf,
    axiom_sort_key,
    confidence,
    correspondence_sort_key,
    make_network,
)

_NAME = {"type": "string", "minLength": 1}

NETWORK_SCHEMA = {
    "type": "object",
    "required": ["ontologies", "alignments"],
    "additionalProperties": False,
    "properties": {
        "ontologies": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id"],
                "additionalProperties": False,
                "properties": {
                    "id": _NAME,
                    "classes": {"type": "array", "items": _NAME},
                    "individuals": {"type": "array", "items": _NAME},
                    "axioms": {
                        "type": "array",
                        "items": {
                            "oneOf": [
                                {
                                    "type": "object",
                                    "required": ["kind", "sub", "sup"],
                                    "additionalProperties": False,
                                    "properties": {
                                        "kind": {"const": "subClassOf"},
                                        "sub": _NAME,
                                        "sup": _NAME,
                                    },
                                },
                                {
                                    "type": "object",
                                    "required": ["kind", "a", "b"],
                                    "additionalProperties": False,
                                    "properties": {
                                        "kind": {"const": "disjoint"},
                                        "a": _NAME,
                                        "b": _NAME,
                                    },
                                },
                                {
                                    "type": "object",
                                    "required": ["kind", "individual", "class"],
                                    "additionalProperties": False,
                                    "properties": {
                                        "kind": {"const": "memberOf"},
                                        "individual": _NAME,
                                        "class": _NAME,
                                    },
                                },
                            ]
                        },
                    },
                },
            },
        },
        "alignments": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "source", "target"],
                "additionalProperties": False,
                "properties": {
                    "id": _NAME,
                    "source": _NAME,
                    "target": _NAME,
                    "correspondences": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["from", "to", "relation"],
                            "additionalProperties": False,
                            "properties": {
                                "from": _NAME,
                                "to": _NAME,
                                "relation": {"enum": [r.value for r in Relation]},
                                "confidence": {"type": "number", "minimum": 0, "maximum": 1},
                            },
                        },
                    },
                },
            },
        },
    },
}

WITNESS_SCHEMA = {
    "type": "object",
    "required": ["h", "k"],
    "additionalProperties": False,
    "properties": {
        "h": {"type": "object", "additionalProperties": {"type": "string"}},
        "k": {"type": "object", "additionalProperties": {"type": "string"}},
    },
}


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    location: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.location}: {self.message}"


class NetworkParseError(ValueError):
    """Raised when a document is rejected; carries every diagnostic found."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        self.diagnostics = diagnostics
        errors = [d for d in diagnostics if d.severity == "error"]
        super().__init__("; ".join(str(d) for d in errors) or "invalid document")


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def parse_network(text: str | bytes) -> Network:
    """Parse a network document, raising :class:`NetworkParseError` on rejection."""
    net, diagnostics = parse_network_diagnostics(text)
    if net is None:
        raise NetworkParseError(diagnostics)
    return net


def parse_network_diagnostics(text: str | bytes) -> tuple[Network | None, list[ParseDiagnostic]]:
    """Parse a document; returns ``(network or None, diagnostics)``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        where = f"line {exc.lineno}, column {exc.colno}"
        return None, [ParseDiagnostic("error", where, f"syntax error: {exc.msg}")]
    return network_from_document(doc)


def network_from_document(doc) -> tuple[Network | None, list[ParseDiagnostic]]:
    validator = jsonschema.Draft202012Validator(NETWORK_SCHEMA)
    schema_errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if schema_errors:
        return None, [
            ParseDiagnostic("error", _path(e.absolute_path), f"schema violation: {e.message}")
            for e in schema_errors
        ]
    diags: list[ParseDiagnostic] = []

    def error(parts, message):
        diags.append(ParseDiagnostic("error", _path(parts), message))

    def warning(parts, message):
        diags.append(ParseDiagnostic("warning", _path(parts), message))

    ontologies: dict[str, Ontology] = {}
    for n, od in enumerate(doc["ontologies"]):
        where = ("ontologies", n)
        oid = od["id"]
        if oid in ontologies:
            error(where + ("id",), f"duplicate ontology id {oid!r}")
            continue
        classes = od.get("classes", [])
        individuals = od.get("individuals", [])
        for field_name, names in (("classes", classes), ("individuals", individuals)):
            if len(set(names)) != len(names):
                warning(where + (field_name,), "duplicate names ignored")
        clash = set(classes) & set(individuals)
        if clash:
            error(where, f"declared as both class and individual: {sorted(clash)}")
            continue
        kinds = {c: CLASS for c in classes} | {i: INDIVIDUAL for i in individuals}
        axioms: set[Axiom] = set()
        ok = True
        for m, ad in enumerate(od.get("axioms", [])):
            ax_where = where + ("axioms", m)
            if ad["kind"] == "subClassOf":
                fields = (("sub", CLASS), ("sup", CLASS))
            elif ad["kind"] == "disjoint":
                fields = (("a", CLASS), ("b", CLASS))
            else:
                fields = (("individual", INDIVIDUAL), ("class", CLASS))
            refs = []
            for key, kind in fields:
                name = ad[key]
                if name not in kinds:
                    error(ax_where + (key,), f"undeclared entity {oid}:{name}")
                    ok = False
                elif kinds[name] != kind:
                    error(ax_where + (key,), f"kind mismatch: {oid}:{name} is not a {kind}")
                    ok = False
                refs.append(EntityRef(oid, name, kind))
            if not ok:
                continue
            if ad["kind"] == "subClassOf":
                ax = SubClassOf(*refs)
            elif ad["kind"] == "disjoint":
                ax = Disjoint(*refs)
            else:
                ax = MemberOf(*refs)
            if ax in axioms:
                warning(ax_where, f"duplicate axiom {ax.render()!r}")
            axioms.add(ax)
        if ok:
            ontologies[oid] = Ontology(oid, frozenset(classes), frozenset(individuals), frozenset(axioms))

    alignments: list[Alignment] = []
    seen_ids: set[str] = set()
    for n, ad in enumerate(doc["alignments"]):
        where = ("alignments", n)
        aid = ad["id"]
        if aid in seen_ids:
            error(where + ("id",), f"duplicate alignment id {aid!r}")
            continue
        seen_ids.add(aid)
        src, tgt = ad["source"], ad["target"]
        dangling = False
        for key, end in (("source", src), ("target", tgt)):
            if end not in ontologies and end not in {o["id"] for o in doc["ontologies"]}:
                error(where + (key,), f"dangling endpoint: unknown ontology {end!r}")
                dangling = True
        if dangling:
            continue
        if src == tgt:
            error(where, f"alignment {aid!r} relates {src!r} to itself")
            continue
        if src not in ontologies or tgt not in ontologies:
            continue  # the ontology itself was rejected above
        corrs: dict[tuple, Correspondence] = {}
        for m, cd in enumerate(ad.get("correspondences", [])):
            c_where = where + ("correspondences", m)
            relation = Relation(cd["relation"])
            left_kind, right_kind = relation.kinds
            refs = []
            for key, onto, kind in (("from", src, left_kind), ("to", tgt, right_kind)):
                o = ontologies[onto]
                name = cd[key]
                if name in o.classes:
                    actual = CLASS
                elif name in o.individuals:
                    actual = INDIVIDUAL
                else:
                    error(c_where + (key,), f"undeclared entity {onto}:{name}")
                    continue
                if actual != kind:
                    error(
                        c_where + (key,),
                        f"kind mismatch: relation {relation.value!r} needs a {kind}, "
                        f"{onto}:{name} is a {actual}",
                    )
                    continue
                refs.append(EntityRef(onto, name, kind))
            if len(refs) != 2:
                continue
            degree = confidence(cd["confidence"]) if "confidence" in cd else TOP
            c = Correspondence(refs[0], refs[1], relation, degree)
            if c.key in corrs:
                if corrs[c.key].confidence != degree:
                    error(c_where, f"{c.render()} repeated with a different confidence")
                else:
                    warning(c_where, f"duplicate correspondence {c.render()}")
                continue
            corrs[c.key] = c
        alignments.append(Alignment(aid, src, tgt, frozenset(corrs.values())))

    if any(d.severity == "error" for d in diags):
        return None, diags
    try:
        return make_network(ontologies.values(), alignments), diags
    except NetworkError as exc:  # pragma: no cover - checks above should catch everything
        return None, diags + [ParseDiagnostic("error", "$", str(exc))]


def _number(degree: Fraction):
    return int(degree) if degree.denominator == 1 else float(degree)


def network_to_document(net: Network, strip_weights: bool = False) -> dict:
    ontologies = []
    for o in net.ontologies.values():
        axioms = []
        for ax in sorted(o.axioms, key=axiom_sort_key):
            if isinstance(ax, SubClassOf):
                axioms.append({"kind": "subClassOf", "sub": ax.sub.local, "sup": ax.sup.local})
            elif isinstance(ax, Disjoint):
                axioms.append({"kind": "disjoint", "a": ax.a.local, "b": ax.b.local})
            else:
                axioms.append(
                    {"kind": "memberOf", "individual": ax.ind.local, "class": ax.cls.local}
                )
        ontologies.append(
            {
                "id": o.id,
                "classes": sorted(o.classes),
                "individuals": sorted(o.individuals),
                "axioms": axioms,
            }
        )
    alignments = []
    for al in net.alignments.values():
        corrs = []
        for c in sorted(al.correspondences, key=correspondence_sort_key):
            entry = {"from": c.source.local, "to": c.target.local, "relation": c.relation.value}
            if c.confidence != TOP and not strip_weights:
                entry["confidence"] = _number(c.confidence)
            corrs.append(entry)
        alignments.append(
            {"id": al.id, "source": al.source, "target": al.target, "correspondences": corrs}
        )
    return {"ontologies": ontologies, "alignments": alignments}


def serialize_network(net: Network, *, indent: int | None = None, strip_weights: bool = False) -> str:
    """Canonical JSON text; equal networks give byte-identical output."""
    doc = network_to_document(net, strip_weights=strip_weights)
    if indent is None:
        return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)
    return json.dumps(doc, indent=indent, ensure_ascii=False)


# -------------------------------------------------------------- literals

_LITERAL = re.compile(
    r"""^\s*(?P<lo>[^\s:]+):(?P<le>\S+)\s+
        (?P<rel>=|<=|>=|disjoint|in|ni|≤|≥|⊥|∈|∋)\s+
        (?P<ro>[^\s:]+):(?P<re>[^\s\[]+)
        \s*(?:\[\s*(?P<conf>[0-9.]+)\s*\])?\s*$""",
    re.VERBOSE,
)
_UNICODE_RELATIONS = {"≤": "<=", "≥": ">=", "⊥": "disjoint", "∈": "in", "∋": "ni"}


class LiteralError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


def parse_correspondence(text: str, net: Network) -> Correspondence:
    """Resolve a literal such as ``o1:e1 >= o3:f3 [0.8]`` against ``net``.

    Both sides may live in the same ontology; such a literal reads as an
    axiom-shaped query.
    """
    m = _LITERAL.match(text)
    if not m:
        raise LiteralError("malformed-literal", f"cannot read {text!r}")
    relation = Relation(_UNICODE_RELATIONS.get(m["rel"], m["rel"]))
    refs = []
    for onto, name, kind in (
        (m["lo"], m["le"], relation.kinds[0]),
        (m["ro"], m["re"], relation.kinds[1]),
    ):
        try:
            ref = net.entity(onto, name)
        except NetworkError as exc:
            raise LiteralError("unknown-entity", exc.message) from None
        if ref.kind != kind:
            raise LiteralError(
                "kind-mismatch",
                f"relation {relation.value!r} needs a {kind} but {ref} is a {ref.kind}",
            )
        refs.append(ref)
    degree = TOP
    if m["conf"] is not None:
        try:
            degree = confidence(Fraction(m["conf"]))
        except (NetworkError, ValueError) as exc:
            raise LiteralError("malformed-literal", str(exc)) from None
    return Correspondence(refs[0], refs[1], relation, degree)


def as_axiom(c: Correspondence) -> Axiom | None:
    """The ontology axiom a same-ontology literal denotes, if there is one."""
    if c.source.ontology != c.target.ontology:
        return None
    if c.relation is Relation.LEQ:
        return SubClassOf(c.source, c.target)
    if c.relation is Relation.GEQ:
        return SubClassOf(c.target, c.source)
    if c.relation is Relation.DISJOINT:
        return Disjoint(c.source, c.target)
    if c.relation is Relation.IN:
        return MemberOf(c.source, c.target)
    if c.relation is Relation.NI:
        return MemberOf(c.target, c.source)
    return None


# ------------------------------------------------------------- witnesses

Witness = dict


def parse_witness(doc) -> tuple[dict[str, str], dict[str, str]]:
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    errors = list(jsonschema.Draft202012Validator(WITNESS_SCHEMA).iter_errors(doc))
    if errors:
        raise NetworkParseError(
            [ParseDiagnostic("error", _path(e.absolute_path), e.message) for e in errors]
        )
    return dict(doc["h"]), dict(doc["k"])


def witness_document(h, k) -> dict:
    return {"h": {a: h[a] for a in sorted(h)}, "k": {a: k[a] for a in sorted(k)}}


Query = Union[Axiom, Correspondence]


# -------------------------------------------------------------- fixtures

FIXTURES = ("fig1", "fig1-prime", "fig2", "empty")


def fixture_text(name: str) -> str:
    """Raw JSON of a bundled fixture (``fig1``, ``fig1-prime``, ``fig2``, ``empty``)."""
    if name not in FIXTURES:
        raise KeyError(f"no fixture named {name!r}")
    return resources.files("noo").joinpath("fixtures", f"{name}.json").read_text(encoding="utf-8")


def load_fixture(name: str) -> Network:
    return parse_network(fixture_text(name))
