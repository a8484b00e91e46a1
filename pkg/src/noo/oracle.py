"""Finite-model oracle: brute-force search for models over small domains.

Classes are interpreted as subsets of ``{0, ..., n-1}`` and individuals as
elements; every ontology of the network shares that single domain, which
is what the set-theoretic reading of correspondences requires. The search
is plain backtracking with arc-consistency pruning, independent of the
saturation rules, so the two can be checked against each other.

All negative answers are bounded: ``NoModelUpTo(n)`` says nothing about
domains larger than ``n``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Sequence, Union

from .model import (
    CLASS,
    INDIVIDUAL,
    Axiom,
    Correspondence,
    Disjoint,
    EntityRef,
    MemberOf,
    Network,
    NetworkError,
    Relation,
    SubClassOf,
)

MAX_CLASSES = 12
MAX_INDIVIDUALS = 4
GUARD_FREE_DOMAIN = 3
ENV_GUARD = "NOO_ORACLE_MAX_ENTITIES"


class OracleDeclined(RuntimeError):
    """The input is too large for exhaustive search at the requested size."""


class UnmappedEntityError(KeyError):
    pass


# ------------------------------------------------------------ interpretations


@dataclass(frozen=True)
class Interpretation:
    ontology: str
    domain_size: int
    classes: Mapping[str, frozenset[int]]
    individuals: Mapping[str, int]

    def __getitem__(self, ref: EntityRef):
        table = self.classes if ref.kind == CLASS else self.individuals
        try:
            return table[ref.local]
        except KeyError:
            raise UnmappedEntityError(f"{ref} is not interpreted") from None


@dataclass(frozen=True)
class NetworkModel:
    domain_size: int
    interpretations: Mapping[str, Interpretation]

    def __getitem__(self, ref: EntityRef):
        try:
            return self.interpretations[ref.ontology][ref]
        except KeyError:
            raise UnmappedEntityError(f"{ref} is not interpreted") from None

    def describe(self) -> list[str]:
        lines = [f"domain {{0..{self.domain_size - 1}}}"]
        for oid, m in self.interpretations.items():
            for name in sorted(m.individuals):
                lines.append(f"{oid}:{name} -> {m.individuals[name]}")
            for name in sorted(m.classes):
                members = ",".join(str(d) for d in sorted(m.classes[name]))
                lines.append(f"{oid}:{name} -> {{{members}}}")
        return lines


@dataclass(frozen=True)
class Model:
    model: NetworkModel


@dataclass(frozen=True)
class NoModelUpTo:
    bound: int


@dataclass(frozen=True)
class Countermodel:
    model: NetworkModel


@dataclass(frozen=True)
class EntailedUpTo:
    bound: int


OracleVerdict = Union[Model, NoModelUpTo, Countermodel, EntailedUpTo]


def satisfies_axiom(m: Interpretation, ax: Axiom) -> bool:
    if isinstance(ax, SubClassOf):
        return m[ax.sub] <= m[ax.sup]
    if isinstance(ax, Disjoint):
        return not (m[ax.a] & m[ax.b])
    return m[ax.ind] in m[ax.cls]


def satisfies_correspondence(m: Interpretation, m2: Interpretation, mu: Correspondence) -> bool:
    """The set-theoretic satisfaction table; ``m`` reads the source side."""
    left, right = m[mu.source], m2[mu.target]
    r = mu.relation
    if r is Relation.EQUIV:
        return left == right
    if r is Relation.LEQ:
        return left <= right
    if r is Relation.GEQ:
        return left >= right
    if r is Relation.DISJOINT:
        return not (left & right)
    if r is Relation.IN:
        return left in right
    return right in left


def is_model(net: Network, model: NetworkModel) -> bool:
    """Full re-check of every axiom and correspondence."""
    ms = model.interpretations
    for o in net.ontologies.values():
        if not all(satisfies_axiom(ms[o.id], ax) for ax in o.axioms):
            return False
    for al in net.alignments.values():
        if not all(
            satisfies_correspondence(ms[al.source], ms[al.target], c) for c in al.correspondences
        ):
            return False
    return True


def holds_in(model: NetworkModel, query: Axiom | Correspondence) -> bool:
    if isinstance(query, Correspondence):
        ms = model.interpretations
        return satisfies_correspondence(
            ms[query.source.ontology], ms[query.target.ontology], query
        )
    return satisfies_axiom(model.interpretations[query.entities[0].ontology], query)


# ----------------------------------------------------------- constraints

# Values: a class takes a bitmask over the domain, an individual an element.
_TESTS = {
    "sub": lambda a, b: a & ~b == 0,
    "disj": lambda a, b: a & b == 0,
    "eq": lambda a, b: a == b,
    "in": lambda a, b: (b >> a) & 1 == 1,
}


@dataclass(frozen=True)
class _Constraint:
    test: str
    left: EntityRef
    right: EntityRef
    negated: bool = False


def _axiom_constraint(ax: Axiom) -> _Constraint:
    if isinstance(ax, SubClassOf):
        return _Constraint("sub", ax.sub, ax.sup)
    if isinstance(ax, Disjoint):
        return _Constraint("disj", ax.a, ax.b)
    return _Constraint("in", ax.ind, ax.cls)


def _correspondence_constraints(c: Correspondence) -> list[_Constraint]:
    x, y, r = c.source, c.target, c.relation
    return {
        Relation.EQUIV: [_Constraint("eq", x, y)],
        Relation.LEQ: [_Constraint("sub", x, y)],
        Relation.GEQ: [_Constraint("sub", y, x)],
        Relation.DISJOINT: [_Constraint("disj", x, y)],
        Relation.IN: [_Constraint("in", x, y)],
        Relation.NI: [_Constraint("in", y, x)],
    }[r]


def _query_constraint(query: Axiom | Correspondence) -> _Constraint:
    if isinstance(query, Correspondence):
        (inner,) = _correspondence_constraints(query)
    else:
        inner = _axiom_constraint(query)
    return _Constraint(inner.test, inner.left, inner.right, negated=True)


def _network_constraints(net: Network) -> list[_Constraint]:
    out = []
    for o in net.ontologies.values():
        out.extend(_axiom_constraint(ax) for ax in o.axioms)
    for al in net.alignments.values():
        for c in al.correspondences:
            out.extend(_correspondence_constraints(c))
    return out


@lru_cache(maxsize=None)
def _support_table(test: str, negated: bool, left_size: int, right_size: int):
    """For each left value, the bitset of right values compatible with it."""
    fn = _TESTS[test]
    forward = []
    for a in range(left_size):
        row = 0
        for b in range(right_size):
            if fn(a, b) != negated:
                row |= 1 << b
        forward.append(row)
    backward = []
    for b in range(right_size):
        col = 0
        for a in range(left_size):
            if (forward[a] >> b) & 1:
                col |= 1 << a
        backward.append(col)
    return tuple(forward), tuple(backward)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Problem:
    """A binary CSP over the entities touched by a list of constraints."""

    def __init__(self, variables: Sequence[EntityRef], constraints: Sequence[_Constraint], n: int):
        self.n = n
        self.variables = list(variables)
        self.index = {v: k for k, v in enumerate(self.variables)}
        self.sizes = [(1 << n) if v.kind == CLASS else n for v in self.variables]
        self.initial = [(1 << s) - 1 for s in self.sizes]
        self.arcs: list[list[tuple[int, tuple[int, ...]]]] = [[] for _ in self.variables]
        self.infeasible = False
        for c in constraints:
            u, v = self.index[c.left], self.index[c.right]
            fwd, bwd = _support_table(c.test, c.negated, self.sizes[u], self.sizes[v])
            if u == v:
                keep = 0
                for a in range(self.sizes[u]):
                    if (fwd[a] >> a) & 1:
                        keep |= 1 << a
                self.initial[u] &= keep
                continue
            self.arcs[u].append((v, fwd))
            self.arcs[v].append((u, bwd))
        self.degree = [len(a) for a in self.arcs]
        if any(d == 0 for d in self.initial):
            self.infeasible = True

    def _propagate(self, doms: list[int], pending: list[int]) -> bool:
        pending = list(pending)
        queued = set(pending)
        while pending:
            y = pending.pop()
            queued.discard(y)
            for x, _ in self.arcs[y]:
                # revise x against every constraint it shares with y
                dom_x = doms[x]
                new = dom_x
                for z, table in self.arcs[x]:
                    if z != y:
                        continue
                    dz = doms[z]
                    for a in _bits(new):
                        if not table[a] & dz:
                            new &= ~(1 << a)
                if new != dom_x:
                    if not new:
                        return False
                    doms[x] = new
                    if x not in queued:
                        queued.add(x)
                        pending.append(x)
        return True

    def solutions(self) -> Iterator[list[int]]:
        if self.infeasible:
            return
        doms = list(self.initial)
        if not self._propagate(doms, list(range(len(doms)))):
            return
        yield from self._search(doms)

    def _search(self, doms: list[int]) -> Iterator[list[int]]:
        best, best_key = -1, None
        for x, d in enumerate(doms):
            if d & (d - 1):
                key = (
                    bin(d).count("1"),
                    0 if self.variables[x].kind == INDIVIDUAL else 1,
                    -self.degree[x],
                    x,
                )
                if best_key is None or key < best_key:
                    best, best_key = x, key
        if best < 0:
            yield [d.bit_length() - 1 for d in doms]
            return
        for a in _bits(doms[best]):
            trial = list(doms)
            trial[best] = 1 << a
            if self._propagate(trial, [best]):
                yield from self._search(trial)


def _components(entities: Sequence[EntityRef], constraints: Sequence[_Constraint]):
    parent = {e: e for e in entities}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    for c in constraints:
        a, b = find(c.left), find(c.right)
        if a != b:
            parent[a] = b
    groups: dict[EntityRef, tuple[list, list]] = {}
    for e in entities:
        groups.setdefault(find(e), ([], []))[0].append(e)
    for c in constraints:
        groups[find(c.left)][1].append(c)
    return [g for g in groups.values() if g[1]]


def _all_entities(net: Network) -> list[EntityRef]:
    return [e for o in net.ontologies.values() for e in o.entities()]


def _build_model(net: Network, n: int, values: Mapping[EntityRef, int]) -> NetworkModel:
    interps = {}
    for o in net.ontologies.values():
        classes = {}
        individuals = {}
        for e in o.entities():
            v = values.get(e, 0)
            if e.kind == CLASS:
                classes[e.local] = frozenset(_bits(v))
            else:
                individuals[e.local] = v
        interps[o.id] = Interpretation(o.id, n, classes, individuals)
    return NetworkModel(n, interps)


def _guard(net: Network, n: int) -> None:
    if n < 1:
        raise ValueError("domain size must be at least 1")
    if n <= GUARD_FREE_DOMAIN:
        return
    n_classes = len(net.classes())
    n_individuals = len(net.individuals())
    override = os.environ.get(ENV_GUARD)
    if override:
        if n_classes + n_individuals > int(override):
            raise OracleDeclined(
                f"{n_classes + n_individuals} entities exceed {ENV_GUARD}={override} at n={n}"
            )
        return
    if n_classes > MAX_CLASSES or n_individuals > MAX_INDIVIDUALS:
        raise OracleDeclined(
            f"{n_classes} classes / {n_individuals} individuals is too large at n={n} "
            f"(limit {MAX_CLASSES} / {MAX_INDIVIDUALS}; set {ENV_GUARD} to override)"
        )


def _solve(net: Network, n: int, constraints: list[_Constraint]) -> dict[EntityRef, int] | None:
    values: dict[EntityRef, int] = {}
    for variables, group in _components(_all_entities(net), constraints):
        problem = _Problem(variables, group, n)
        solution = next(problem.solutions(), None)
        if solution is None:
            return None
        values.update(zip(problem.variables, solution))
    return values


def find_model(net: Network, n: int) -> Model | NoModelUpTo:
    """Search domains of size 1..n for a model of ``net``."""
    _guard(net, n)
    constraints = _network_constraints(net)
    for size in range(1, n + 1):
        values = _solve(net, size, constraints)
        if values is not None:
            model = _build_model(net, size, values)
            if not is_model(net, model):
                raise AssertionError("search produced an assignment that is not a model")
            return Model(model)
    return NoModelUpTo(n)


def _check_query(net: Network, query: Axiom | Correspondence) -> None:
    refs = query.entities if not isinstance(query, Correspondence) else (query.source, query.target)
    for ref in refs:
        net.require(ref)


def oracle_entails(net: Network, query: Axiom | Correspondence, n: int) -> Countermodel | EntailedUpTo:
    """Look for a model of ``net`` (domain size 1..n) in which ``query`` fails."""
    _check_query(net, query)
    _guard(net, n)
    constraints = _network_constraints(net) + [_query_constraint(query)]
    for size in range(1, n + 1):
        values = _solve(net, size, constraints)
        if values is not None:
            model = _build_model(net, size, values)
            if not is_model(net, model) or holds_in(model, query):
                raise AssertionError("search produced an invalid countermodel")
            return Countermodel(model)
    return EntailedUpTo(n)


def enumerate_models(net: Network, n: int) -> Iterator[NetworkModel]:
    """Every model over a domain of exactly ``n`` elements (exponential)."""
    _guard(net, n)
    problem = _Problem(_all_entities(net), _network_constraints(net), n)
    for solution in problem.solutions():
        yield _build_model(net, n, dict(zip(problem.variables, solution)))


def model_signature(model: NetworkModel) -> tuple:
    """Hashable form of a model, for comparing model sets."""
    return tuple(
        (
            oid,
            tuple(sorted(m.classes.items(), key=lambda kv: kv[0])),
            tuple(sorted(m.individuals.items())),
        )
        for oid, m in sorted(model.interpretations.items())
    )


def transport_constraints(net_a: Network, h: Mapping[str, str], net_b: Network):
    """``net_a``'s axioms and correspondences moved into ``net_b`` along ``h``."""
    missing = [o for o in net_a.ontologies if o not in h]
    if missing:
        raise NetworkError("non-total-map", f"h is undefined on {missing}")
    for o, image in h.items():
        if image not in net_b.ontologies:
            raise NetworkError("unknown-ontology", f"h({o}) = {image!r} is not in the target")
    for o in net_a.ontologies.values():
        target = net_b.ontologies[h[o.id]]
        for e in o.entities():
            moved = e.moved_to(target.id)
            try:
                target._require(moved)
            except NetworkError:
                raise NetworkError(
                    "signature-mismatch", f"{e} has no counterpart {moved} under h"
                ) from None
    out: list[Axiom | Correspondence] = []
    for o in net_a.ontologies.values():
        image = h[o.id]
        for ax in o.axioms:
            if isinstance(ax, SubClassOf):
                out.append(SubClassOf(ax.sub.moved_to(image), ax.sup.moved_to(image)))
            elif isinstance(ax, Disjoint):
                out.append(Disjoint(ax.a.moved_to(image), ax.b.moved_to(image)))
            else:
                out.append(MemberOf(ax.ind.moved_to(image), ax.cls.moved_to(image)))
    for al in net_a.alignments.values():
        for c in al.correspondences:
            out.append(
                Correspondence(
                    c.source.moved_to(h[al.source]),
                    c.target.moved_to(h[al.target]),
                    c.relation,
                    c.confidence,
                )
            )
    return out


def check_model_inclusion(net_a: Network, net_b: Network, h: Mapping[str, str], n: int) -> bool:
    """Does every model of ``net_b`` (domain ≤ n) restrict along ``h`` to a model of ``net_a``?

    A model of ``net_b`` fails to restrict exactly when it violates one of
    ``net_a``'s constraints transported along ``h``, so each such
    constraint is refuted by countermodel search instead of listing every
    model of ``net_b``.
    """
    for constraint in transport_constraints(net_a, h, net_b):
        if isinstance(oracle_entails(net_b, constraint, n), Countermodel):
            return False
    return True
