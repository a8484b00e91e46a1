import random

import pytest

from gen import deletion, identity_on, naive_models, random_network
from noo.io import parse_correspondence
from noo.model import (
    CLASS,
    INDIVIDUAL,
    Correspondence,
    Disjoint,
    EntityRef,
    MemberOf,
    NetworkError,
    Ontology,
    Relation,
    SubClassOf,
    make_network,
)
from noo.oracle import (
    ENV_GUARD,
    Countermodel,
    EntailedUpTo,
    Interpretation,
    Model,
    NoModelUpTo,
    OracleDeclined,
    UnmappedEntityError,
    check_model_inclusion,
    enumerate_models,
    find_model,
    holds_in,
    is_model,
    model_signature,
    oracle_entails,
    satisfies_axiom,
    satisfies_correspondence,
)
from noo.saturation import entails, fact_as_query, is_consistent, saturate


def c(o, name):
    return EntityRef(o, name, CLASS)


def i(o, name):
    return EntityRef(o, name, INDIVIDUAL)


def interp(o, classes=None, individuals=None, n=2):
    return Interpretation(o, n, {k: frozenset(v) for k, v in (classes or {}).items()}, individuals or {})


# ------------------------------------------------------------- satisfaction


def test_satisfies_axiom_table():
    m = interp("o1", {"a1": {0, 1}, "b1": {0}})
    assert satisfies_axiom(m, SubClassOf(c("o1", "b1"), c("o1", "a1")))
    m3 = interp("o3", {"b3": {0}, "c3": {0}, "e3": set()}, {"i": 0})
    assert not satisfies_axiom(m3, Disjoint(c("o3", "b3"), c("o3", "c3")))
    assert not satisfies_axiom(m3, MemberOf(i("o3", "i"), c("o3", "e3")))


def test_satisfies_correspondence_table():
    m1 = interp("o1", {"e1": {0, 1}})
    m3 = interp("o3", {"f3": {0}})
    assert satisfies_correspondence(m1, m3, Correspondence(c("o1", "e1"), c("o3", "f3"), Relation.GEQ))
    mo, mp = interp("o", {"c": {0}}), interp("o'", {"c'": {1}})
    assert satisfies_correspondence(mo, mp, Correspondence(c("o", "c"), c("o'", "c'"), Relation.DISJOINT))
    mi = interp("o''", {}, {"i''": 0})
    assert not satisfies_correspondence(mi, mp, Correspondence(i("o''", "i''"), c("o'", "c'"), Relation.IN))
    assert satisfies_correspondence(mp, mi, Correspondence(c("o'", "c'"), i("o''", "i''"), Relation.NI)) is False
    mq = interp("q", {"c'": {0}})
    assert satisfies_correspondence(mo, mq, Correspondence(c("o", "c"), c("q", "c'"), Relation.EQUIV))
    assert satisfies_correspondence(mo, mp, Correspondence(c("o", "c"), c("o'", "c'"), Relation.LEQ)) is False


def test_unmapped_entity():
    with pytest.raises(UnmappedEntityError):
        satisfies_axiom(interp("o", {"a": {0}}), SubClassOf(c("o", "a"), c("o", "b")))


# --------------------------------------------------------------- fixtures


def test_fig1_has_no_small_model(fig1):
    assert find_model(fig1, 2) == NoModelUpTo(2)
    assert find_model(fig1, 1) == NoModelUpTo(1)


def test_fig1_prime_has_model_at_one(fig1_prime):
    verdict = find_model(fig1_prime, 1)
    assert isinstance(verdict, Model)
    m = verdict.model
    assert m.domain_size == 1
    assert is_model(fig1_prime, m)


def test_all_empty_assignment_is_a_model(fig1_prime):
    interps = {
        o.id: Interpretation(o.id, 1, {k: frozenset() for k in o.classes}, {k: 0 for k in o.individuals})
        for o in fig1_prime.ontologies.values()
    }
    from noo.oracle import NetworkModel

    assert is_model(fig1_prime, NetworkModel(1, interps))


def test_fig2_has_no_model(fig2):
    assert find_model(fig2, 3) == NoModelUpTo(3)


def test_entailment_verdicts(fig1_prime):
    assert oracle_entails(fig1_prime, parse_correspondence("o1:b1 <= o3:b3", fig1_prime), 3) == EntailedUpTo(3)
    v = oracle_entails(fig1_prime, parse_correspondence("o1:a1 >= o3:g3", fig1_prime), 2)
    assert isinstance(v, Countermodel)
    m = v.model
    assert is_model(fig1_prime, m)
    assert not m[c("o3", "g3")] <= m[c("o1", "a1")]


def test_single_ontology_entails_its_axiom():
    ax = SubClassOf(c("o", "a"), c("o", "b"))
    net = make_network([Ontology("o", frozenset({"a", "b"}), axioms=frozenset({ax}))])
    assert oracle_entails(net, ax, 1) == EntailedUpTo(1)


def test_query_must_be_declared(fig1_prime):
    with pytest.raises(NetworkError):
        oracle_entails(fig1_prime, SubClassOf(c("o3", "zz"), c("o3", "b3")), 1)


def test_monotone_bounds(fig1, fig2):
    for net in (fig1, fig2):
        for n in (1, 2, 3):
            assert find_model(net, n) == NoModelUpTo(n)


def test_all_derived_facts_are_sound(fig1_prime):
    for f in saturate(fig1_prime).facts:
        assert isinstance(oracle_entails(fig1_prime, fact_as_query(f), 3), EntailedUpTo), f


# -------------------------------------------------------------------- guard


def test_guard_declines_large_domains():
    classes = frozenset(f"c{n}" for n in range(13))
    net = make_network([Ontology("o", classes)])
    with pytest.raises(OracleDeclined):
        find_model(net, 4)
    assert isinstance(find_model(net, 3), Model)


def test_guard_env_override(monkeypatch):
    net = make_network([Ontology("o", frozenset({"a", "b", "c"}))])
    monkeypatch.setenv(ENV_GUARD, "2")
    assert isinstance(find_model(net, 3), Model)
    with pytest.raises(OracleDeclined):
        find_model(net, 4)
    monkeypatch.setenv(ENV_GUARD, "3")
    assert isinstance(find_model(net, 5), Model)


# --------------------------------------------------------- naive cross-check


def tiny(seed):
    rng = random.Random(seed)
    return random_network(rng, n_ontologies=2, n_classes=2, n_individuals=1, n_axioms=2, n_corr=3)


@pytest.mark.parametrize("seed", range(30))
def test_enumeration_matches_brute_force(seed):
    net = tiny(seed)
    for n in (1, 2):
        fast = {model_signature(m) for m in enumerate_models(net, n)}
        slow = {model_signature(m) for m in naive_models(net, n)}
        assert fast == slow


@pytest.mark.parametrize("seed", range(30))
def test_find_model_matches_brute_force(seed):
    net = tiny(seed)
    found = isinstance(find_model(net, 2), Model)
    assert found == any(True for n in (1, 2) for _ in naive_models(net, n))


@pytest.mark.parametrize("seed", range(30))
def test_entailment_matches_brute_force(seed):
    net = tiny(seed)
    rng = random.Random(seed)
    classes = net.classes()
    for _ in range(4):
        x, y = rng.choice(classes), rng.choice(classes)
        rel = rng.choice([Relation.LEQ, Relation.GEQ, Relation.DISJOINT, Relation.EQUIV])
        if x.ontology == y.ontology:
            q = SubClassOf(x, y) if rel is Relation.LEQ else Disjoint(x, y)
        else:
            q = Correspondence(x, y, rel)
        refuted = any(not holds_in(m, q) for n in (1, 2) for m in naive_models(net, n))
        assert isinstance(oracle_entails(net, q, 2), Countermodel) == refuted


@pytest.mark.parametrize("seed", range(30))
def test_saturation_agrees_with_oracle(seed):
    rng = random.Random(500 + seed)
    net = random_network(rng, n_ontologies=3, n_classes=3, n_individuals=1, n_axioms=3, n_corr=3)
    g = saturate(net)
    if g.clash:
        assert isinstance(find_model(net, 3), NoModelUpTo)
        return
    # one element per individual is always enough for a consistent network
    assert isinstance(find_model(net, max(1, len(net.individuals()))), Model)
    for f in g.facts:
        assert isinstance(oracle_entails(net, fact_as_query(f), 2), EntailedUpTo)


# --------------------------------------------------------------- inclusion


def test_inclusion_identity(fig1_prime):
    assert check_model_inclusion(fig1_prime, fig1_prime, {o: o for o in fig1_prime.ontologies}, 2)


def test_inclusion_single_ontology(fig1_prime):
    a = make_network([fig1_prime.ontologies["o1"]])
    assert check_model_inclusion(a, fig1_prime, {"o1": "o1"}, 2)


def test_inclusion_fails_with_extra_axiom(fig1_prime):
    o1 = fig1_prime.ontologies["o1"]
    extra = o1.with_axioms(o1.axioms | {SubClassOf(c("o1", "a1"), c("o1", "b1"))})
    assert not check_model_inclusion(make_network([extra]), fig1_prime, {"o1": "o1"}, 2)


def test_inclusion_errors(fig1_prime):
    with pytest.raises(NetworkError) as exc:
        check_model_inclusion(fig1_prime, fig1_prime, {"o1": "o1"}, 1)
    assert exc.value.code == "non-total-map"
    with pytest.raises(NetworkError) as exc:
        check_model_inclusion(make_network([fig1_prime.ontologies["o1"]]), fig1_prime, {"o1": "o2"}, 1)
    assert exc.value.code == "signature-mismatch"


@pytest.mark.parametrize("seed", range(10))
def test_inclusion_matches_restriction(seed):
    rng = random.Random(seed)
    big = random_network(rng, n_ontologies=2, n_classes=2, n_individuals=1, n_axioms=2, n_corr=3)
    small = deletion(rng, big, 0.5)
    h = identity_on(small).h
    assert check_model_inclusion(small, big, h, 2)
    for n in (1, 2):
        for m in naive_models(big, n):
            assert is_model(small, m)


@pytest.mark.parametrize("seed", range(20))
def test_downward_consistency_with_models(seed):
    rng = random.Random(700 + seed)
    big = random_network(rng, n_ontologies=3)
    small = deletion(rng, big)
    verdict = find_model(big, 2)
    if isinstance(verdict, Model):
        assert is_model(small, verdict.model)
        assert isinstance(find_model(small, 2), Model)
    assert is_consistent(big) <= is_consistent(small)
    assert entails(big, SubClassOf(c("o0", "c0"), c("o0", "c0")))
