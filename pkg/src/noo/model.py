"""Syntactic universe: ontologies, alignments and networks of ontologies.

Everything here is immutable. A :class:`Network` validates itself on
construction, so any ``Network`` value in hand satisfies the structural
invariants (declared entities, kind compatibility, no dangling endpoints).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Union

CLASS = "class"
INDIVIDUAL = "individual"

TOP = Fraction(1)
BOTTOM = Fraction(0)


class NetworkError(ValueError):
    """A structural invariant of a network was violated.

    ``code`` is a short stable identifier such as ``"dangling-endpoint"``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


def confidence(value) -> Fraction:
    """Coerce ``value`` to a confidence degree (a rational in [0, 1])."""
    if isinstance(value, bool):
        raise NetworkError("bad-confidence", f"not a number: {value!r}")
    if isinstance(value, float):
        value = Fraction(repr(value))
    degree = Fraction(value)
    if not BOTTOM <= degree <= TOP:
        raise NetworkError("bad-confidence", f"{value} is outside [0, 1]")
    return degree


def confidence_leq(a: Fraction, b: Fraction) -> bool:
    # the single point where the order on degrees is consulted
    return a <= b


@dataclass(frozen=True, order=True)
class EntityRef:
    ontology: str
    local: str
    kind: str = CLASS

    def __str__(self) -> str:
        return f"{self.ontology}:{self.local}"

    def moved_to(self, ontology: str) -> EntityRef:
        return EntityRef(ontology, self.local, self.kind)


class Relation(enum.Enum):
    EQUIV = "="
    LEQ = "<="
    GEQ = ">="
    DISJOINT = "disjoint"
    IN = "in"
    NI = "ni"

    @property
    def dual(self) -> Relation:
        """The relation obtained by swapping the two sides."""
        return _DUALS.get(self, self)

    @property
    def kinds(self) -> tuple[str, str]:
        if self is Relation.IN:
            return (INDIVIDUAL, CLASS)
        if self is Relation.NI:
            return (CLASS, INDIVIDUAL)
        return (CLASS, CLASS)

    def glyph(self, unicode: bool = False) -> str:
        return _GLYPHS[self] if unicode else self.value


_DUALS = {
    Relation.LEQ: Relation.GEQ,
    Relation.GEQ: Relation.LEQ,
    Relation.IN: Relation.NI,
    Relation.NI: Relation.IN,
}
_GLYPHS = {
    Relation.EQUIV: "=",
    Relation.LEQ: "≤",
    Relation.GEQ: "≥",
    Relation.DISJOINT: "⊥",
    Relation.IN: "∈",
    Relation.NI: "∋",
}
_RELATION_ORDER = {r: n for n, r in enumerate(Relation)}


# ---------------------------------------------------------------- axioms


@dataclass(frozen=True)
class SubClassOf:
    sub: EntityRef
    sup: EntityRef

    kind = "subClassOf"

    @property
    def entities(self) -> tuple[EntityRef, ...]:
        return (self.sub, self.sup)

    def local_key(self) -> tuple[str, ...]:
        return (self.kind, self.sub.local, self.sup.local)

    def render(self, unicode: bool = False) -> str:
        return f"{self.sub.local} {'⊑' if unicode else '<'} {self.sup.local}"


@dataclass(frozen=True)
class Disjoint:
    """Unordered disjointness; the pair is stored in canonical order."""

    a: EntityRef
    b: EntityRef

    kind = "disjoint"

    def __post_init__(self):
        if (self.b.local, self.b.ontology) < (self.a.local, self.a.ontology):
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @property
    def entities(self) -> tuple[EntityRef, ...]:
        return (self.a, self.b)

    def local_key(self) -> tuple[str, ...]:
        return (self.kind, self.a.local, self.b.local)

    def render(self, unicode: bool = False) -> str:
        return f"{self.a.local} {'⊥' if unicode else 'disjoint'} {self.b.local}"


@dataclass(frozen=True)
class MemberOf:
    ind: EntityRef
    cls: EntityRef

    kind = "memberOf"

    @property
    def entities(self) -> tuple[EntityRef, ...]:
        return (self.ind, self.cls)

    def local_key(self) -> tuple[str, ...]:
        return (self.kind, self.ind.local, self.cls.local)

    def render(self, unicode: bool = False) -> str:
        return f"{self.ind.local} {'∈' if unicode else 'in'} {self.cls.local}"


Axiom = Union[SubClassOf, Disjoint, MemberOf]


def axiom_from_key(ontology: str, key: tuple[str, ...]) -> Axiom:
    """Rebuild an axiom of ``ontology`` from its local key."""
    kind, x, y = key
    if kind == SubClassOf.kind:
        return SubClassOf(EntityRef(ontology, x), EntityRef(ontology, y))
    if kind == Disjoint.kind:
        return Disjoint(EntityRef(ontology, x), EntityRef(ontology, y))
    if kind == MemberOf.kind:
        return MemberOf(EntityRef(ontology, x, INDIVIDUAL), EntityRef(ontology, y))
    raise ValueError(f"unknown axiom kind {kind!r}")


def axiom_sort_key(ax: Axiom) -> tuple[str, ...]:
    return ax.local_key()


# ------------------------------------------------------- correspondences


@dataclass(frozen=True)
class Correspondence:
    """A triple ``<source, target, relation>`` with a confidence degree."""

    source: EntityRef
    target: EntityRef
    relation: Relation
    confidence: Fraction = TOP

    @property
    def key(self) -> tuple[EntityRef, EntityRef, Relation]:
        return (self.source, self.target, self.relation)

    def local_key(self) -> tuple[str, str, Relation]:
        return (self.source.local, self.target.local, self.relation)

    def reversed(self) -> Correspondence:
        return Correspondence(self.target, self.source, self.relation.dual, self.confidence)

    def oriented(self, source_ontology: str) -> Correspondence:
        """This correspondence read from the side of ``source_ontology``."""
        if self.source.ontology == source_ontology:
            return self
        if self.target.ontology == source_ontology:
            return self.reversed()
        raise ValueError(f"{self} does not touch ontology {source_ontology!r}")

    def with_confidence(self, degree) -> Correspondence:
        return replace(self, confidence=confidence(degree))

    def kind_problem(self) -> str | None:
        expected = self.relation.kinds
        if (self.source.kind, self.target.kind) != expected:
            return (
                f"relation {self.relation.value!r} needs {expected[0]} -> {expected[1]}, "
                f"got {self.source.kind} -> {self.target.kind}"
            )
        return None

    def render(self, unicode: bool = False, qualified: bool = False) -> str:
        left = str(self.source) if qualified else self.source.local
        right = str(self.target) if qualified else self.target.local
        text = f"{left} {self.relation.glyph(unicode)} {right}"
        if self.confidence != TOP:
            text += f" [{float(self.confidence):g}]"
        return text

    def __str__(self) -> str:
        return self.render(qualified=True)


def correspondence_sort_key(c: Correspondence):
    return (c.source.local, c.target.local, _RELATION_ORDER[c.relation], c.source.ontology)


# ------------------------------------------------------------ containers


@dataclass(frozen=True)
class Ontology:
    id: str
    classes: frozenset[str] = frozenset()
    individuals: frozenset[str] = frozenset()
    axioms: frozenset[Axiom] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "classes", frozenset(self.classes))
        object.__setattr__(self, "individuals", frozenset(self.individuals))
        object.__setattr__(self, "axioms", frozenset(self.axioms))
        clash = self.classes & self.individuals
        if clash:
            raise NetworkError(
                "name-clash",
                f"ontology {self.id!r} declares {sorted(clash)} as both class and individual",
            )
        for ax in self.axioms:
            expected = (INDIVIDUAL, CLASS) if isinstance(ax, MemberOf) else (CLASS, CLASS)
            if tuple(ref.kind for ref in ax.entities) != expected:
                raise NetworkError(
                    "kind-mismatch", f"axiom {ax.render()!r} needs {expected[0]}, {expected[1]}"
                )
            for ref in ax.entities:
                if ref.ontology != self.id:
                    raise NetworkError(
                        "foreign-entity",
                        f"axiom {ax.render()!r} of {self.id!r} mentions {ref}",
                    )
                self._require(ref)

    def _require(self, ref: EntityRef) -> None:
        declared = self.classes if ref.kind == CLASS else self.individuals
        if ref.local in declared:
            return
        other = self.individuals if ref.kind == CLASS else self.classes
        if ref.local in other:
            raise NetworkError("kind-mismatch", f"{ref} is not a {ref.kind}")
        raise NetworkError("undeclared-entity", f"{ref} is not declared in {self.id!r}")

    def entity(self, name: str) -> EntityRef:
        if name in self.classes:
            return EntityRef(self.id, name, CLASS)
        if name in self.individuals:
            return EntityRef(self.id, name, INDIVIDUAL)
        raise NetworkError("undeclared-entity", f"{self.id}:{name} is not declared")

    def entities(self) -> Iterator[EntityRef]:
        for name in sorted(self.classes):
            yield EntityRef(self.id, name, CLASS)
        for name in sorted(self.individuals):
            yield EntityRef(self.id, name, INDIVIDUAL)

    def axiom_keys(self) -> frozenset[tuple[str, ...]]:
        return frozenset(ax.local_key() for ax in self.axioms)

    def with_axioms(self, axioms: Iterable[Axiom]) -> Ontology:
        return replace(self, axioms=frozenset(axioms))


@dataclass(frozen=True)
class Alignment:
    id: str
    source: str
    target: str
    correspondences: frozenset[Correspondence] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "correspondences", frozenset(self.correspondences))
        if self.source == self.target:
            raise NetworkError(
                "self-alignment", f"alignment {self.id!r} relates {self.source!r} to itself"
            )
        seen: dict[tuple, Fraction] = {}
        for c in self.correspondences:
            if c.source.ontology != self.source or c.target.ontology != self.target:
                raise NetworkError(
                    "wrong-orientation",
                    f"{c} does not go from {self.source!r} to {self.target!r} in {self.id!r}",
                )
            problem = c.kind_problem()
            if problem:
                raise NetworkError("kind-mismatch", f"{c} in {self.id!r}: {problem}")
            if c.key in seen:
                raise NetworkError(
                    "duplicate-correspondence",
                    f"{c.render()} appears twice in {self.id!r} with different confidences",
                )
            seen[c.key] = c.confidence

    @property
    def endpoints(self) -> frozenset[str]:
        return frozenset((self.source, self.target))

    def connects(self, a: str, b: str) -> bool:
        return a != b and self.endpoints == {a, b}

    def oriented(self, source_ontology: str) -> list[Correspondence]:
        return [c.oriented(source_ontology) for c in self.correspondences]

    def local_keys(self, source_ontology: str | None = None) -> frozenset[tuple]:
        side = self.source if source_ontology is None else source_ontology
        return frozenset(c.local_key() for c in self.oriented(side))

    def weights(self, source_ontology: str | None = None) -> dict[tuple, Fraction]:
        side = self.source if source_ontology is None else source_ontology
        return {c.local_key(): c.confidence for c in self.oriented(side)}

    def with_correspondences(self, correspondences: Iterable[Correspondence]) -> Alignment:
        return replace(self, correspondences=frozenset(correspondences))


@dataclass(frozen=True)
class Network:
    """A finite set of ontologies plus alignments between them, keyed by id."""

    ontologies: Mapping[str, Ontology] = field(default_factory=dict)
    alignments: Mapping[str, Alignment] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "ontologies", {k: self.ontologies[k] for k in sorted(self.ontologies)}
        )
        object.__setattr__(
            self, "alignments", {k: self.alignments[k] for k in sorted(self.alignments)}
        )
        for key, onto in self.ontologies.items():
            if key != onto.id:
                raise NetworkError("bad-key", f"ontology {onto.id!r} stored under {key!r}")
        for key, al in self.alignments.items():
            if key != al.id:
                raise NetworkError("bad-key", f"alignment {al.id!r} stored under {key!r}")
            for end in (al.source, al.target):
                if end not in self.ontologies:
                    raise NetworkError(
                        "dangling-endpoint", f"alignment {al.id!r} refers to unknown {end!r}"
                    )
            for c in al.correspondences:
                self.ontologies[c.source.ontology]._require(c.source)
                self.ontologies[c.target.ontology]._require(c.target)

    __hash__ = None  # type: ignore[assignment]

    def between(self, a: str, b: str) -> list[Alignment]:
        """Alignments whose endpoint set is ``{a, b}``, sorted by id."""
        return [al for al in self.alignments.values() if al.connects(a, b)]

    def incident(self, onto: str) -> list[Alignment]:
        return [al for al in self.alignments.values() if onto in al.endpoints]

    def pairs(self) -> Iterator[tuple[str, str]]:
        """Unordered pairs of distinct ontology ids, each once, sorted."""
        return combinations(self.ontologies, 2)

    def classes(self) -> list[EntityRef]:
        return [e for o in self.ontologies.values() for e in o.entities() if e.kind == CLASS]

    def individuals(self) -> list[EntityRef]:
        return [
            e for o in self.ontologies.values() for e in o.entities() if e.kind == INDIVIDUAL
        ]

    def entity(self, ontology: str, name: str) -> EntityRef:
        if ontology not in self.ontologies:
            raise NetworkError("unknown-ontology", f"no ontology {ontology!r}")
        return self.ontologies[ontology].entity(name)

    def require(self, ref: EntityRef) -> None:
        if ref.ontology not in self.ontologies:
            raise NetworkError("unknown-ontology", f"no ontology {ref.ontology!r}")
        self.ontologies[ref.ontology]._require(ref)


def make_network(
    ontologies: Iterable[Ontology] = (), alignments: Iterable[Alignment] = ()
) -> Network:
    """Build and validate a network; duplicate ids are rejected."""
    onto_map: dict[str, Ontology] = {}
    for o in ontologies:
        if o.id in onto_map:
            raise NetworkError("duplicate-id", f"ontology id {o.id!r} used twice")
        onto_map[o.id] = o
    align_map: dict[str, Alignment] = {}
    for a in alignments:
        if a.id in align_map:
            raise NetworkError("duplicate-id", f"alignment id {a.id!r} used twice")
        align_map[a.id] = a
    return Network(onto_map, align_map)


# --------------------------------------------------------- normalisation


def is_normalised(net: Network) -> bool:
    return all(len(net.between(a, b)) == 1 for a, b in net.pairs())


def fresh_id(base: str, taken) -> str:
    candidate, n = base, 1
    while candidate in taken:
        n += 1
        candidate = f"{base}#{n}"
    return candidate


def merge_alignments(alignments: list[Alignment], new_id: str) -> Alignment:
    """Union of alignments over one pair, oriented like the first one.

    When the same triple occurs twice with different confidences the
    larger degree is kept.
    """
    head = alignments[0]
    merged: dict[tuple, Correspondence] = {}
    for al in alignments:
        for c in al.oriented(head.source):
            prev = merged.get(c.key)
            if prev is None or prev.confidence < c.confidence:
                merged[c.key] = c
    return Alignment(new_id, head.source, head.target, frozenset(merged.values()))


def normalise(net: Network) -> Network:
    """Standard normalisation: exactly one alignment per unordered pair."""
    taken = set(net.alignments)
    result: list[Alignment] = []
    for a, b in net.pairs():
        group = net.between(a, b)
        if not group:
            new_id = fresh_id(f"{a}~{b}", taken)
            taken.add(new_id)
            result.append(Alignment(new_id, a, b))
        elif len(group) == 1:
            result.append(group[0])
        else:
            taken.difference_update(al.id for al in group)
            new_id = fresh_id("+".join(al.id for al in group), taken)
            taken.add(new_id)
            result.append(merge_alignments(group, new_id))
    return Network(dict(net.ontologies), {al.id: al for al in result})


# ---------------------------------------------------------- substitution


def substitute_ontology(net: Network, old: str, new: Ontology) -> Network:
    """``net[old/new]``: swap an ontology and drop every alignment touching ``old``."""
    if old not in net.ontologies:
        raise NetworkError("unknown-ontology", f"no ontology {old!r}")
    ontologies = [o for o in net.ontologies.values() if o.id != old] + [new]
    alignments = [al for al in net.alignments.values() if old not in al.endpoints]
    return make_network(ontologies, alignments)


def substitute_alignment(net: Network, old: str, new: Alignment) -> Network:
    """``net[old/new]``: replace one alignment by another over the same pair."""
    if old not in net.alignments:
        raise NetworkError("unknown-alignment", f"no alignment {old!r}")
    if net.alignments[old].endpoints != new.endpoints:
        raise NetworkError(
            "endpoint-mismatch",
            f"{new.id!r} connects {sorted(new.endpoints)}, "
            f"expected {sorted(net.alignments[old].endpoints)}",
        )
    alignments = [al for al in net.alignments.values() if al.id != old] + [new]
    return make_network(net.ontologies.values(), alignments)
