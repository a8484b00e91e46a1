"""Category-level constructions on networks: composition, fibred meets, and
the confidence threshold functor."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .model import (
    CLASS,
    INDIVIDUAL,
    TOP,
    Alignment,
    Correspondence,
    EntityRef,
    Network,
    Ontology,
    axiom_from_key,
    confidence,
    make_network,
)
from .morphisms import (
    MorphismError,
    NetworkMorphism,
    check_syntactic_morphism,
)

MAX_PULLBACK_ONTOLOGIES = 4


def identity(net: Network) -> NetworkMorphism:
    return NetworkMorphism({o: o for o in net.ontologies}, {a: a for a in net.alignments})


def compose(m1: NetworkMorphism, m2: NetworkMorphism) -> NetworkMorphism:
    """``m2 ∘ m1``: first ``m1``, then ``m2``."""
    stray_h = sorted(set(m1.h.values()) - set(m2.h))
    stray_k = sorted(set(m1.k.values()) - set(m2.k))
    if stray_h or stray_k:
        raise MorphismError(
            f"cannot compose: second morphism undefined on {stray_h + stray_k}"
        )
    return NetworkMorphism(
        {o: m2.h[img] for o, img in m1.h.items()},
        {a: m2.k[img] for a, img in m1.k.items()},
    )


def same_morphism(m1: NetworkMorphism, m2: NetworkMorphism) -> bool:
    return dict(m1.h) == dict(m2.h) and dict(m1.k) == dict(m2.k)


# ------------------------------------------------------------ fibred meet


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class IsoFamily:
    """Networks mapped isomorphically into a common generator."""

    generator: Network
    members: tuple[Network, ...]
    pairs: tuple[NetworkMorphism, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if len(self.members) != len(self.pairs):
            raise FamilyError("one generating morphism per member is required")
        if not self.members:
            raise FamilyError("a family needs at least one member")
        for j, (member, pair) in enumerate(zip(self.members, self.pairs)):
            try:
                valid = check_syntactic_morphism(member, self.generator, pair)
            except MorphismError as exc:
                raise FamilyError(f"pair {j}: {exc}") from None
            if not valid:
                raise FamilyError(f"pair {j} is not a morphism into the generator")
            if sorted(pair.h.values()) != sorted(self.generator.ontologies) or sorted(
                pair.k.values()
            ) != sorted(self.generator.alignments):
                raise FamilyError(f"pair {j} is not an isomorphism onto the generator")

    __hash__ = None  # type: ignore[assignment]


def _inverse(mapping) -> dict[str, str]:
    return {v: k for k, v in mapping.items()}


def projections(family: IsoFamily) -> list[NetworkMorphism]:
    """One projection per member: the meet uses the generator's ids, sent back through each pair."""
    return [NetworkMorphism(_inverse(p.h), _inverse(p.k)) for p in family.pairs]


def fibred_meet(family: IsoFamily) -> Network:
    """Intersect the members' preimages of every generator ontology and alignment."""
    gen = family.generator
    inverses = projections(family)
    ontologies = []
    for oid in gen.ontologies:
        pre = [m.ontologies[inv.h[oid]] for m, inv in zip(family.members, inverses)]
        keys = frozenset.intersection(*(o.axiom_keys() for o in pre))
        axioms = [axiom_from_key(oid, key) for key in keys]
        classes = frozenset.intersection(*(o.classes for o in pre))
        individuals = frozenset.intersection(*(o.individuals for o in pre))
        used = {(e.local, e.kind) for ax in axioms for e in ax.entities}
        ontologies.append(_declare(oid, classes, individuals, used, axioms))
    alignments = []
    extra: dict[str, set] = {oid: set() for oid in gen.ontologies}
    for aid, al in gen.alignments.items():
        weights = []
        for member, inv in zip(family.members, inverses):
            pre = member.alignments[inv.k[aid]]
            weights.append(pre.weights(inv.h[al.source]))
        common = set(weights[0]).intersection(*weights[1:])
        corrs = []
        for left, right, rel in common:
            lk, rk = rel.kinds
            degree = min(w[(left, right, rel)] for w in weights)
            corrs.append(
                Correspondence(EntityRef(al.source, left, lk), EntityRef(al.target, right, rk), rel, degree)
            )
            extra[al.source].add((left, lk))
            extra[al.target].add((right, rk))
        alignments.append(Alignment(aid, al.source, al.target, frozenset(corrs)))
    widened = [_declare(o.id, o.classes, o.individuals, extra[o.id], o.axioms) for o in ontologies]
    return make_network(widened, alignments)


def _declare(oid, classes, individuals, used, axioms) -> Ontology:
    classes = set(classes) | {n for n, k in used if k == CLASS}
    individuals = set(individuals) | {n for n, k in used if k == INDIVIDUAL}
    return Ontology(oid, frozenset(classes), frozenset(individuals - classes), frozenset(axioms))


@dataclass
class MediatorResult:
    mediator: NetworkMorphism | None
    count: int

    @property
    def unique(self) -> bool:
        return self.count == 1


@dataclass
class PullbackReport:
    projections_valid: bool
    commutes: bool
    mediators: list[MediatorResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.projections_valid and self.commutes and all(m.unique for m in self.mediators)

    def lines(self) -> list[str]:
        out = [
            f"projections valid: {'yes' if self.projections_valid else 'NO'}",
            f"square commutes: {'yes' if self.commutes else 'NO'}",
        ]
        for n, m in enumerate(self.mediators):
            state = "unique" if m.unique else ("none" if m.count == 0 else f"{m.count} mediators")
            out.append(f"candidate {n}: mediating morphism {state}")
        return out


def all_morphisms(src: Network, dst: Network) -> list[NetworkMorphism]:
    """Every syntactic morphism ``src -> dst`` (exhaustive; desk scale only)."""
    if len(src.ontologies) > MAX_PULLBACK_ONTOLOGIES or len(dst.ontologies) > MAX_PULLBACK_ONTOLOGIES:
        raise FamilyError(
            f"exhaustive enumeration is limited to {MAX_PULLBACK_ONTOLOGIES} ontologies per network"
        )
    src_ids = list(src.ontologies)
    found = []
    for images in itertools.product(dst.ontologies, repeat=len(src_ids)):
        h = dict(zip(src_ids, images))
        options = []
        for al in src.alignments.values():
            options.append([b.id for b in dst.between(h[al.source], h[al.target])])
        for chosen in itertools.product(*options):
            m = NetworkMorphism(h, dict(zip(src.alignments, chosen)))
            if check_syntactic_morphism(src, dst, m):
                found.append(m)
    return found


def verify_pullback(
    family: IsoFamily, candidates: Sequence[tuple[Network, Sequence[NetworkMorphism]]]
) -> PullbackReport:
    """Check that the fibred meet with its projections is a pullback cone
    and that each candidate cone factors through it exactly once."""
    meet = fibred_meet(family)
    pis = projections(family)
    projections_valid = all(
        check_syntactic_morphism(meet, member, pi) for member, pi in zip(family.members, pis)
    )
    legs = [compose(pi, pair) for pi, pair in zip(pis, family.pairs)]
    commutes = all(same_morphism(legs[0], leg) for leg in legs[1:])
    report = PullbackReport(projections_valid, commutes)
    for n, (net, thetas) in enumerate(candidates):
        if len(thetas) != len(family.members):
            raise FamilyError(f"candidate {n}: needs one morphism per member")
        for j, (member, theta) in enumerate(zip(family.members, thetas)):
            try:
                ok = check_syntactic_morphism(net, member, theta)
            except MorphismError as exc:
                raise FamilyError(f"candidate {n}, member {j}: {exc}") from None
            if not ok:
                raise FamilyError(f"candidate {n}: theta_{j} is not a morphism")
        cone = [compose(theta, pair) for theta, pair in zip(thetas, family.pairs)]
        if not all(same_morphism(cone[0], c) for c in cone[1:]):
            raise FamilyError(f"candidate {n}: its morphisms do not commute over the generator")
        matches = [
            u
            for u in all_morphisms(net, meet)
            if all(same_morphism(theta, compose(u, pi)) for theta, pi in zip(thetas, pis))
        ]
        report.mediators.append(MediatorResult(matches[0] if matches else None, len(matches)))
    return report


# ----------------------------------------------------------- thresholding


def apply_threshold(net: Network, w) -> Network:
    """Keep the correspondences whose confidence is at least ``w``."""
    w = confidence(w)
    alignments = [
        al.with_correspondences(c for c in al.correspondences if c.confidence >= w)
        for al in net.alignments.values()
    ]
    return Network(dict(net.ontologies), {al.id: al for al in alignments})


def strip_weights(net: Network) -> Network:
    alignments = [
        al.with_correspondences(c.with_confidence(TOP) for c in al.correspondences)
        for al in net.alignments.values()
    ]
    return Network(dict(net.ontologies), {al.id: al for al in alignments})


def map_morphism_threshold(m: NetworkMorphism, w) -> NetworkMorphism:
    """Thresholding leaves the ids in place, so the maps carry over unchanged."""
    confidence(w)
    return NetworkMorphism(dict(m.h), dict(m.k))
