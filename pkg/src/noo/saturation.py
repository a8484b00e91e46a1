"""Forward-chaining closure over a single fact graph spanning the whole network.

Axioms and correspondences are flattened into three fact shapes, all read
set-theoretically over one shared domain:

    Sub(x, y)    m(x) is a subset of m(y)
    Disj(x, y)   m(x) and m(y) do not intersect (stored unordered)
    Inst(i, x)   m(i) is an element of m(x)

and closed under

    R1  Sub(x,y), Sub(y,z)            => Sub(x,z)
    R2  Disj is symmetric             (canonical storage)
    R3  Sub(x,y), Disj(y,z)           => Disj(x,z)
    R4  Inst(i,x), Sub(x,y)           => Inst(i,y)
    R5  Inst(i,x), Inst(i,y), Disj(x,y) => clash   (x = y allowed)

Reflexive ``Sub(x, x)`` is never stored. A class forced empty shows up as
``Disj(x, x)`` and is not expanded into ``Sub(x, y)`` for every ``y``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Union

from .model import (
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
    correspondence_sort_key,
    fresh_id,
    make_network,
)


@dataclass(frozen=True, order=True)
class Sub:
    x: EntityRef
    y: EntityRef

    def __str__(self) -> str:
        return f"{self.x} < {self.y}"


@dataclass(frozen=True, order=True)
class Disj:
    x: EntityRef
    y: EntityRef

    def __post_init__(self):
        if self.y < self.x:
            x, y = self.y, self.x
            object.__setattr__(self, "x", x)
            object.__setattr__(self, "y", y)

    def __str__(self) -> str:
        return f"{self.x} disjoint {self.y}"


@dataclass(frozen=True, order=True)
class Inst:
    i: EntityRef
    x: EntityRef

    def __str__(self) -> str:
        return f"{self.i} in {self.x}"


Fact = Union[Sub, Disj, Inst]


def fact_sort_key(f: Fact):
    return (type(f).__name__, f)


@dataclass(frozen=True)
class Derivation:
    rule: str  # "given", "R1", "R3", "R4" or "R5"
    premises: tuple[Fact, ...] = ()
    origin: str | None = None  # ontology or alignment id for given facts

    def describe(self) -> str:
        if self.rule == "given":
            return f"given by {self.origin}"
        return f"{self.rule} from " + ", ".join(str(p) for p in self.premises)


@dataclass(frozen=True)
class Clash:
    individual: EntityRef
    x: EntityRef
    y: EntityRef

    @property
    def premises(self) -> tuple[Fact, ...]:
        return (Inst(self.individual, self.x), Inst(self.individual, self.y), Disj(self.x, self.y))

    def __str__(self) -> str:
        return (
            f"clash (R5): {self.individual} in {self.x} and {self.individual} in {self.y}, "
            f"but {Disj(self.x, self.y)}"
        )


class AllConsequences:
    """Returned instead of a consequence set when the network has no model."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "AllConsequences"

    def __bool__(self) -> bool:
        return True


ALL_CONSEQUENCES = AllConsequences()


class InconsistentNetworkError(ValueError):
    def __init__(self, clash: Clash | None = None):
        super().__init__(f"network is inconsistent ({clash})" if clash else "network is inconsistent")
        self.clash = clash


# --------------------------------------------------------------- encoding


def axiom_facts(ax: Axiom) -> list[Fact]:
    if isinstance(ax, SubClassOf):
        return [Sub(ax.sub, ax.sup)]
    if isinstance(ax, Disjoint):
        return [Disj(ax.a, ax.b)]
    return [Inst(ax.ind, ax.cls)]


def correspondence_facts(c: Correspondence) -> list[Fact]:
    x, y, r = c.source, c.target, c.relation
    if r is Relation.LEQ:
        return [Sub(x, y)]
    if r is Relation.GEQ:
        return [Sub(y, x)]
    if r is Relation.EQUIV:
        return [Sub(x, y), Sub(y, x)]
    if r is Relation.DISJOINT:
        return [Disj(x, y)]
    if r is Relation.IN:
        return [Inst(x, y)]
    return [Inst(y, x)]


def query_facts(query: Axiom | Correspondence) -> list[Fact]:
    if isinstance(query, Correspondence):
        return correspondence_facts(query)
    return axiom_facts(query)


def _given(net: Network) -> dict[Fact, Derivation]:
    given: dict[Fact, Derivation] = {}
    for onto in net.ontologies.values():
        for ax in sorted(onto.axioms, key=axiom_sort_key):
            for f in axiom_facts(ax):
                given.setdefault(f, Derivation("given", origin=onto.id))
    for al in net.alignments.values():
        for c in sorted(al.correspondences, key=correspondence_sort_key):
            for f in correspondence_facts(c):
                given.setdefault(f, Derivation("given", origin=al.id))
    return {f: d for f, d in given.items() if not (isinstance(f, Sub) and f.x == f.y)}


def encode(net: Network) -> set[Fact]:
    """The facts stated directly by the network's axioms and correspondences."""
    return set(_given(net))


# ------------------------------------------------------------- saturation


@dataclass(frozen=True)
class SaturationGraph:
    facts: frozenset[Fact]
    provenance: Mapping[Fact, Derivation]
    clashes: tuple[Clash, ...] = ()
    given: frozenset[Fact] = field(default_factory=frozenset)

    @property
    def clash(self) -> bool:
        return bool(self.clashes)

    def __contains__(self, f: Fact) -> bool:
        if isinstance(f, Sub) and f.x == f.y:
            return True
        return f in self.facts

    def explain(self, target: Fact | Clash) -> list[tuple[Fact, Derivation]]:
        """Derivation steps for ``target``, premises before conclusions."""
        roots = target.premises if isinstance(target, Clash) else (target,)
        order: list[tuple[Fact, Derivation]] = []
        seen: set[Fact] = set()

        def visit(f: Fact):
            if f in seen:
                return
            seen.add(f)
            d = self.provenance[f]
            for p in d.premises:
                visit(p)
            order.append((f, d))

        for r in roots:
            visit(r)
        return order


def saturate(net: Network) -> SaturationGraph:
    """Least fixpoint of R1-R5 over the network's encoded facts."""
    provenance = _given(net)
    given = frozenset(provenance)
    # insertion-ordered dicts stand in for sets so runs are reproducible
    sups: dict[EntityRef, dict[EntityRef, None]] = {}
    subs: dict[EntityRef, dict[EntityRef, None]] = {}
    disj: dict[EntityRef, dict[EntityRef, None]] = {}
    types: dict[EntityRef, dict[EntityRef, None]] = {}
    members: dict[EntityRef, dict[EntityRef, None]] = {}
    facts: set[Fact] = set()
    clashes: dict[tuple, Clash] = {}
    queue: deque[Fact] = deque(sorted(given, key=fact_sort_key))

    def derive(f: Fact, rule: str, *premises: Fact):
        if isinstance(f, Sub) and f.x == f.y:
            return
        if f in provenance:
            return
        provenance[f] = Derivation(rule, premises)
        queue.append(f)

    def clash(i: EntityRef, x: EntityRef, y: EntityRef):
        c = Clash(i, *sorted((x, y)))
        clashes.setdefault((c.individual, c.x, c.y), c)

    while queue:
        f = queue.popleft()
        if f in facts:
            continue
        facts.add(f)
        if isinstance(f, Sub):
            x, y = f.x, f.y
            sups.setdefault(x, {})[y] = None
            subs.setdefault(y, {})[x] = None
            for w in list(subs.get(x, ())):
                derive(Sub(w, y), "R1", Sub(w, x), f)
            for z in list(sups.get(y, ())):
                derive(Sub(x, z), "R1", f, Sub(y, z))
            for z in list(disj.get(y, ())):
                derive(Disj(x, z), "R3", f, Disj(y, z))
            for i in list(members.get(x, ())):
                derive(Inst(i, y), "R4", Inst(i, x), f)
        elif isinstance(f, Disj):
            a, b = f.x, f.y
            disj.setdefault(a, {})[b] = None
            disj.setdefault(b, {})[a] = None
            for u, v in ((a, b), (b, a)):
                for w in list(subs.get(u, ())):
                    derive(Disj(w, v), "R3", Sub(w, u), f)
            for i in members.get(a, ()):
                if i in members.get(b, ()):
                    clash(i, a, b)
        else:
            i, x = f.i, f.x
            types.setdefault(i, {})[x] = None
            members.setdefault(x, {})[i] = None
            for y in list(sups.get(x, ())):
                derive(Inst(i, y), "R4", f, Sub(x, y))
            for y in types[i]:
                if y in disj.get(x, ()):
                    clash(i, x, y)

    return SaturationGraph(frozenset(facts), provenance, tuple(clashes.values()), given)


def is_consistent(net: Network, graph: SaturationGraph | None = None) -> bool:
    graph = graph or saturate(net)
    return not graph.clash


# ---------------------------------------------------------------- closures


def omega_closure(
    net: Network, onto: str, graph: SaturationGraph | None = None
) -> frozenset[Axiom] | AllConsequences:
    """Axioms of ``onto`` holding in every model of the network."""
    if onto not in net.ontologies:
        raise NetworkError("unknown-ontology", f"no ontology {onto!r}")
    graph = graph or saturate(net)
    if graph.clash:
        return ALL_CONSEQUENCES
    out: set[Axiom] = set()
    for f in graph.facts:
        if isinstance(f, Sub) and f.x.ontology == onto == f.y.ontology:
            out.add(SubClassOf(f.x, f.y))
        elif isinstance(f, Disj) and f.x.ontology == onto == f.y.ontology:
            out.add(Disjoint(f.x, f.y))
        elif isinstance(f, Inst) and f.i.ontology == onto == f.x.ontology:
            out.add(MemberOf(f.i, f.x))
    return frozenset(out)


def alpha_closure(
    net: Network, a: str, b: str, graph: SaturationGraph | None = None
) -> frozenset[Correspondence] | AllConsequences:
    """Correspondences from ``a`` to ``b`` holding in every model of the network.

    Derived correspondences carry confidence ⊤.
    """
    for onto in (a, b):
        if onto not in net.ontologies:
            raise NetworkError("unknown-ontology", f"no ontology {onto!r}")
    if a == b:
        raise NetworkError("self-alignment", "alpha closure needs two distinct ontologies")
    graph = graph or saturate(net)
    if graph.clash:
        return ALL_CONSEQUENCES
    out: set[Correspondence] = set()
    for f in graph.facts:
        if isinstance(f, Sub):
            if f.x.ontology == a and f.y.ontology == b:
                out.add(Correspondence(f.x, f.y, Relation.LEQ))
                if Sub(f.y, f.x) in graph.facts:
                    out.add(Correspondence(f.x, f.y, Relation.EQUIV))
            elif f.x.ontology == b and f.y.ontology == a:
                out.add(Correspondence(f.y, f.x, Relation.GEQ))
        elif isinstance(f, Disj):
            if f.x.ontology == a and f.y.ontology == b:
                out.add(Correspondence(f.x, f.y, Relation.DISJOINT))
            elif f.x.ontology == b and f.y.ontology == a:
                out.add(Correspondence(f.y, f.x, Relation.DISJOINT))
        else:
            if f.i.ontology == a and f.x.ontology == b:
                out.add(Correspondence(f.i, f.x, Relation.IN))
            elif f.i.ontology == b and f.x.ontology == a:
                out.add(Correspondence(f.x, f.i, Relation.NI))
    return frozenset(out)


def close_network(net: Network, graph: SaturationGraph | None = None) -> Network:
    """The closed network: every ontology and every pair replaced by its closure.

    The result is normalised. A pair that already had alignments keeps the id
    and orientation of its first one (by id); other pairs get fresh ids.
    """
    graph = graph or saturate(net)
    if graph.clash:
        raise InconsistentNetworkError(graph.clashes[0])
    ontologies = [
        o.with_axioms(omega_closure(net, o.id, graph)) for o in net.ontologies.values()
    ]
    taken = set(net.alignments)
    alignments: list[Alignment] = []
    for a, b in net.pairs():
        existing = net.between(a, b)
        if existing:
            head = existing[0]
            src, tgt, aid = head.source, head.target, head.id
        else:
            src, tgt = a, b
            aid = fresh_id(f"{a}~{b}", taken)
            taken.add(aid)
        alignments.append(Alignment(aid, src, tgt, alpha_closure(net, src, tgt, graph)))
    return make_network(ontologies, alignments)


def entails(
    net: Network, query: Axiom | Correspondence, graph: SaturationGraph | None = None
) -> bool:
    """Whether ``query`` is derivable (always true for an inconsistent network)."""
    facts = query_facts(query)
    for f in facts:
        for ref in (f.x, f.y) if not isinstance(f, Inst) else (f.i, f.x):
            net.require(ref)
    graph = graph or saturate(net)
    if graph.clash:
        return True
    return all(f in graph for f in facts)


def fact_as_query(f: Fact) -> Correspondence:
    """A fact rendered as a (possibly same-ontology) correspondence."""
    if isinstance(f, Sub):
        return Correspondence(f.x, f.y, Relation.LEQ, TOP)
    if isinstance(f, Disj):
        return Correspondence(f.x, f.y, Relation.DISJOINT, TOP)
    return Correspondence(f.i, f.x, Relation.IN, TOP)


def local_closure(onto: Ontology) -> frozenset[Axiom] | AllConsequences:
    """Consequences of one ontology on its own."""
    return omega_closure(make_network([onto]), onto.id)
