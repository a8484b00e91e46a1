"""Network morphisms: checking and searching for syntactic, weight-aware and
semantic morphisms, plus the subsumption relations they induce.

Ontologies are compared by local names: an axiom ``b1 < a1`` of ``o`` is in
``h(o)`` when ``h(o)`` has an axiom of the same kind over the same local
names. Correspondences are compared the same way after orienting them along
the image alignment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .model import Alignment, Network, NetworkError, Ontology, confidence_leq, is_normalised
from .saturation import (
    AllConsequences,
    SaturationGraph,
    alpha_closure,
    omega_closure,
    saturate,
)


class MorphismError(ValueError):
    pass


@dataclass(frozen=True)
class NetworkMorphism:
    """A pair of maps: ``h`` on ontology ids and ``k`` on alignment ids."""

    h: Mapping[str, str] = field(default_factory=dict)
    k: Mapping[str, str] = field(default_factory=dict)

    __hash__ = None  # type: ignore[assignment]

    def to_document(self) -> dict:
        return {
            "h": {a: self.h[a] for a in sorted(self.h)},
            "k": {a: self.k[a] for a in sorted(self.k)},
        }

    @classmethod
    def from_document(cls, doc) -> NetworkMorphism:
        from .io import parse_witness

        h, k = parse_witness(doc)
        return cls(h, k)


def _check_total(src: Network, dst: Network, m: NetworkMorphism) -> None:
    missing_h = [o for o in src.ontologies if o not in m.h]
    missing_k = [a for a in src.alignments if a not in m.k]
    if missing_h or missing_k:
        raise MorphismError(f"morphism is not total: h misses {missing_h}, k misses {missing_k}")
    for o in src.ontologies:
        if m.h[o] not in dst.ontologies:
            raise MorphismError(f"h({o}) = {m.h[o]!r} is not an ontology of the target")
    for a in src.alignments:
        if m.k[a] not in dst.alignments:
            raise MorphismError(f"k({a}) = {m.k[a]!r} is not an alignment of the target")


def _image_side(al: Alignment, h: Mapping[str, str], image: Alignment) -> str | None:
    """Which end of ``image`` plays ``al.source``; None if structure is broken."""
    s, t = h[al.source], h[al.target]
    if s == t or image.endpoints != {s, t}:
        return None
    return s


# --------------------------------------------------------------- predicates


def ontology_included(o: Ontology, image: Ontology) -> bool:
    return o.axiom_keys() <= image.axiom_keys()


def alignment_included(al: Alignment, h: Mapping[str, str], image: Alignment, weighted: bool = False) -> bool:
    side = _image_side(al, h, image)
    if side is None:
        return False
    if not weighted:
        return al.local_keys() <= image.local_keys(side)
    theirs = image.weights(side)
    return all(
        key in theirs and confidence_leq(degree, theirs[key])
        for key, degree in al.weights().items()
    )


def check_syntactic_morphism(src: Network, dst: Network, m: NetworkMorphism) -> bool:
    _check_total(src, dst, m)
    for o in src.ontologies.values():
        if not ontology_included(o, dst.ontologies[m.h[o.id]]):
            return False
    for al in src.alignments.values():
        if not alignment_included(al, m.h, dst.alignments[m.k[al.id]]):
            return False
    return True


def check_weight_aware_morphism(src: Network, dst: Network, m: NetworkMorphism) -> bool:
    """Syntactic morphism whose image correspondences are at least as confident."""
    _check_total(src, dst, m)
    if not all(ontology_included(o, dst.ontologies[m.h[o.id]]) for o in src.ontologies.values()):
        return False
    return all(
        alignment_included(al, m.h, dst.alignments[m.k[al.id]], weighted=True)
        for al in src.alignments.values()
    )


@dataclass(frozen=True)
class SemanticVerdict:
    """Outcome of a semantic morphism check.

    ``vacuous`` is set when the target has no model, so every condition
    holds trivially. Verdicts rest on the saturation rules and are sound;
    a ``False`` may hide a consequence the rules do not derive.
    """

    holds: bool
    vacuous: bool = False
    complete: bool = False

    def __bool__(self) -> bool:
        return self.holds


class _SemanticTarget:
    """Closures of the target network, computed once per target."""

    def __init__(self, dst: Network):
        self.dst = dst
        self.graph: SaturationGraph = saturate(dst)
        self.inconsistent = self.graph.clash
        self._omega: dict[str, frozenset] = {}
        self._alpha: dict[tuple[str, str], frozenset] = {}

    def omega_keys(self, onto: str) -> frozenset:
        if onto not in self._omega:
            closed = omega_closure(self.dst, onto, self.graph)
            assert not isinstance(closed, AllConsequences)
            self._omega[onto] = frozenset(ax.local_key() for ax in closed)
        return self._omega[onto]

    def alpha_keys(self, a: str, b: str) -> frozenset:
        if (a, b) not in self._alpha:
            closed = alpha_closure(self.dst, a, b, self.graph)
            assert not isinstance(closed, AllConsequences)
            self._alpha[(a, b)] = frozenset(c.local_key() for c in closed)
        return self._alpha[(a, b)]

    def ontology_ok(self, o: Ontology, image: Ontology) -> bool:
        return self.inconsistent or o.axiom_keys() <= self.omega_keys(image.id)

    def alignment_ok(self, al: Alignment, h: Mapping[str, str], image: Alignment) -> bool:
        side = _image_side(al, h, image)
        if side is None:
            return False
        if self.inconsistent:
            return True
        other = h[al.target]
        return al.local_keys() <= self.alpha_keys(side, other)


def check_semantic_morphism(src: Network, dst: Network, m: NetworkMorphism) -> SemanticVerdict:
    """Every axiom/correspondence of ``src`` is a consequence of ``dst`` at its image."""
    _check_total(src, dst, m)
    target = _SemanticTarget(dst)
    holds = all(
        target.ontology_ok(o, dst.ontologies[m.h[o.id]]) for o in src.ontologies.values()
    ) and all(
        target.alignment_ok(al, m.h, dst.alignments[m.k[al.id]]) for al in src.alignments.values()
    )
    return SemanticVerdict(holds, vacuous=target.inconsistent)


# ------------------------------------------------------------------ search

OntologyTest = Callable[[Ontology, Ontology], bool]
AlignmentTest = Callable[[Alignment, Mapping[str, str], Alignment], bool]


def _search(
    src: Network, dst: Network, onto_ok: OntologyTest, align_ok: AlignmentTest
) -> NetworkMorphism | None:
    candidates = {
        o.id: [t.id for t in dst.ontologies.values() if onto_ok(o, t)] for o in src.ontologies.values()
    }
    # fail first: big ontologies have the fewest candidates
    order = sorted(src.ontologies, key=lambda o: (-len(src.ontologies[o].axioms), len(candidates[o]), o))
    position = {o: n for n, o in enumerate(order)}
    # an alignment is checked as soon as both of its ends are placed
    due: dict[str, list[Alignment]] = {o: [] for o in order}
    for al in src.alignments.values():
        last = max((al.source, al.target), key=position.__getitem__)
        due[last].append(al)

    h: dict[str, str] = {}
    k: dict[str, str] = {}

    def place(n: int) -> bool:
        if n == len(order):
            return True
        o = order[n]
        for image in candidates[o]:
            h[o] = image
            chosen = {}
            for al in due[o]:
                pick = next(
                    (
                        b.id
                        for b in dst.between(h[al.source], h[al.target])
                        if align_ok(al, h, b)
                    ),
                    None,
                )
                if pick is None:
                    break
                chosen[al.id] = pick
            else:
                k.update(chosen)
                if place(n + 1):
                    return True
                for a in chosen:
                    del k[a]
            del h[o]
        return False

    if place(0):
        return NetworkMorphism(dict(h), dict(k))
    return None


def find_syntactic_morphism(src: Network, dst: Network) -> NetworkMorphism | None:
    """A witness of ``src ⊑ dst``, or None if none exists."""
    return _search(src, dst, ontology_included, alignment_included)


def find_weight_aware_morphism(src: Network, dst: Network) -> NetworkMorphism | None:
    return _search(
        src,
        dst,
        ontology_included,
        lambda al, h, b: alignment_included(al, h, b, weighted=True),
    )


def find_semantic_morphism(src: Network, dst: Network) -> NetworkMorphism | None:
    target = _SemanticTarget(dst)
    return _search(src, dst, target.ontology_ok, target.alignment_ok)


def find_normalised_morphism(src: Network, dst: Network) -> NetworkMorphism | None:
    """Search over ``h`` alone, taking ``k`` to be the unique image alignment.

    Both networks must be normalised.
    """
    for net in (src, dst):
        if not is_normalised(net):
            raise NetworkError("not-normalised", "both networks must be normalised")
    order = sorted(src.ontologies)
    h: dict[str, str] = {}

    def lam(net: Network, a: str, b: str) -> Alignment:
        (al,) = net.between(a, b)
        return al

    def place(n: int) -> bool:
        if n == len(order):
            return True
        o = order[n]
        for image in dst.ontologies.values():
            if not ontology_included(src.ontologies[o], image):
                continue
            h[o] = image.id
            ok = True
            for prev in order[:n]:
                if h[prev] == image.id:
                    ok = False
                    break
                if not alignment_included(lam(src, prev, o), h, lam(dst, h[prev], image.id)):
                    ok = False
                    break
            if ok and place(n + 1):
                return True
            del h[o]
        return False

    if not place(0):
        return None
    k = {al.id: lam(dst, h[al.source], h[al.target]).id for al in src.alignments.values()}
    return NetworkMorphism(dict(h), k)


def is_subsumed(a: Network, b: Network) -> bool:
    return find_syntactic_morphism(a, b) is not None


def equivalent(a: Network, b: Network) -> bool:
    return is_subsumed(a, b) and is_subsumed(b, a)


def strictly_subsumed(a: Network, b: Network) -> bool:
    return is_subsumed(a, b) and not is_subsumed(b, a)
