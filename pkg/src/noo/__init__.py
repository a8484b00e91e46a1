"""Networks of aligned ontologies: closure, consistency, morphisms and fibred meets."""

from .category import (
    IsoFamily,
    apply_threshold,
    compose,
    fibred_meet,
    identity,
    projections,
    strip_weights,
    verify_pullback,
)
from .io import load_fixture, parse_correspondence, parse_network, serialize_network
from .model import (
    Alignment,
    Correspondence,
    Disjoint,
    EntityRef,
    MemberOf,
    Network,
    NetworkError,
    Ontology,
    Relation,
    SubClassOf,
    make_network,
    normalise,
)
from .morphisms import (
    NetworkMorphism,
    check_semantic_morphism,
    check_syntactic_morphism,
    check_weight_aware_morphism,
    find_semantic_morphism,
    find_syntactic_morphism,
    find_weight_aware_morphism,
)
from .oracle import check_model_inclusion, find_model, oracle_entails
from .saturation import (
    alpha_closure,
    close_network,
    entails,
    is_consistent,
    omega_closure,
    saturate,
)

__all__ = [
    "Alignment",
    "Correspondence",
    "Disjoint",
    "EntityRef",
    "IsoFamily",
    "MemberOf",
    "Network",
    "NetworkError",
    "NetworkMorphism",
    "Ontology",
    "Relation",
    "SubClassOf",
    "alpha_closure",
    "apply_threshold",
    "check_model_inclusion",
    "check_semantic_morphism",
    "check_syntactic_morphism",
    "check_weight_aware_morphism",
    "close_network",
    "compose",
    "entails",
    "fibred_meet",
    "find_model",
    "find_semantic_morphism",
    "find_syntactic_morphism",
    "find_weight_aware_morphism",
    "identity",
    "is_consistent",
    "load_fixture",
    "make_network",
    "normalise",
    "omega_closure",
    "oracle_entails",
    "parse_correspondence",
    "parse_network",
    "projections",
    "saturate",
    "serialize_network",
    "strip_weights",
    "verify_pullback",
]
