import random

import pytest

import expected as E
from gen import deletion, random_network
from noo.io import parse_correspondence
from noo.model import (
    CLASS,
    Correspondence,
    EntityRef,
    Network,
    NetworkError,
    Ontology,
    Relation,
    SubClassOf,
    make_network,
    normalise,
)
from noo.morphisms import find_syntactic_morphism
from noo.oracle import EntailedUpTo, Model, find_model, holds_in, oracle_entails
from noo.saturation import (
    ALL_CONSEQUENCES,
    Clash,
    Disj,
    InconsistentNetworkError,
    Inst,
    Sub,
    alpha_closure,
    close_network,
    correspondence_facts,
    encode,
    entails,
    fact_as_query,
    is_consistent,
    local_closure,
    omega_closure,
    saturate,
)


def c(o, name):
    return EntityRef(o, name, CLASS)


def sub_only(net, a, b):
    return make_network(
        [net.ontologies[a], net.ontologies[b]],
        [al for al in net.alignments.values() if al.endpoints == {a, b}],
    )


# ------------------------------------------------------------------ encoding


def test_encode_alignment(fig1):
    facts = set()
    for corr in fig1.alignments["A13"].correspondences:
        facts |= set(correspondence_facts(corr))
    assert facts == {Sub(c("o3", "f3"), c("o1", "e1")), Sub(c("o3", "e3"), c("o1", "b1"))}


def test_encode_empty(empty):
    assert encode(empty) == set()
    assert saturate(empty).facts == frozenset()


def test_equivalence_is_two_subs():
    corr = Correspondence(c("o", "x"), c("p", "y"), Relation.EQUIV)
    assert set(correspondence_facts(corr)) == {Sub(c("o", "x"), c("p", "y")), Sub(c("p", "y"), c("o", "x"))}


def test_disj_is_canonical():
    assert Disj(c("o", "b"), c("o", "a")) == Disj(c("o", "a"), c("o", "b"))


# --------------------------------------------------------------- consistency


def test_fig1_clash(fig1):
    g = saturate(fig1)
    assert g.clash and not is_consistent(fig1)
    clash = g.clashes[0]
    assert clash.individual == EntityRef("o3", "i", "individual")
    assert Inst(clash.individual, c("o1", "b1")) in g.facts
    steps = g.explain(clash)
    assert steps[0][1].rule == "given"
    produced = [f for f, _ in steps]
    for premise in clash.premises:
        assert premise in produced
    # premises always come before their conclusions
    for n, (_, d) in enumerate(steps):
        assert all(p in produced[:n] for p in d.premises)


def test_fig1_prime_consistent(fig1_prime):
    assert is_consistent(fig1_prime)


def test_fig2_inconsistent_but_locally_fine(fig2):
    assert not is_consistent(fig2)
    for al in fig2.alignments.values():
        assert is_consistent(sub_only(fig2, al.source, al.target))
    for o in fig2.ontologies.values():
        assert is_consistent(make_network([o]))


def test_pairs_of_fig1_are_consistent(fig1):
    for a, b in fig1.pairs():
        assert is_consistent(sub_only(fig1, a, b))
    # dropping any one alignment restores consistency
    for aid in fig1.alignments:
        rest = make_network(fig1.ontologies.values(), [al for al in fig1.alignments.values() if al.id != aid])
        assert is_consistent(rest)


def test_single_ontology_consistent():
    o = Ontology("o", frozenset({"a", "b"}), axioms=frozenset({SubClassOf(c("o", "a"), c("o", "b"))}))
    assert is_consistent(make_network([o]))


# ------------------------------------------------------------------ closures


def test_omega_o1_o2_exact(fig1_prime):
    assert omega_closure(fig1_prime, "o1") == E.axioms(fig1_prime, "o1", E.OMEGA_O1)
    assert omega_closure(fig1_prime, "o2") == E.axioms(fig1_prime, "o2", E.OMEGA_O2)


def test_omega_o3_contains_listed(fig1_prime):
    got = omega_closure(fig1_prime, "o3")
    want = E.axioms(fig1_prime, "o3", E.OMEGA_O3_PRIME)
    assert len(want) == 20 and want <= got
    assert SubClassOf(c("o3", "e3"), c("o3", "b3")) in got
    # the extras all come from e3 being forced empty
    assert {ax.render() for ax in got - want} == {"e3 disjoint e3", "c3 disjoint e3", "d3 disjoint e3"}


def test_omega_o3_without_network(fig1_prime):
    local = local_closure(fig1_prime.ontologies["o3"])
    assert SubClassOf(c("o3", "e3"), c("o3", "b3")) not in local
    assert len(local) == 19


def test_omega_trivial():
    o = Ontology("o", frozenset({"a", "b"}), axioms=frozenset({SubClassOf(c("o", "a"), c("o", "b"))}))
    assert omega_closure(make_network([o]), "o") == o.axioms


def test_alpha_sets(fig1_prime):
    for a, b, text, size in (
        ("o1", "o3", E.ALPHA_O1_O3, 10),
        ("o2", "o3", E.ALPHA_O2_O3, 18),
        ("o1", "o2", E.ALPHA_O1_O2, 3),
    ):
        want = E.correspondences(fig1_prime, a, b, text)
        assert len(want) == size
        assert want <= alpha_closure(fig1_prime, a, b)


def test_alpha_two_ontology_reduction_exact(fig1_prime):
    reduced = sub_only(fig1_prime, "o1", "o3")
    got = alpha_closure(reduced, "o1", "o3")
    assert got == E.correspondences(reduced, "o1", "o3", E.ALPHA_O1_O3_ALONE)


def test_alpha_reduction_has_no_further_consequences(fig1_prime):
    reduced = sub_only(fig1_prime, "o1", "o3")
    got = {x.key for x in alpha_closure(reduced, "o1", "o3")}
    o1, o3 = reduced.ontologies["o1"], reduced.ontologies["o3"]
    for x in sorted(o1.classes):
        for y in sorted(o3.classes):
            for rel in (Relation.LEQ, Relation.GEQ, Relation.DISJOINT):
                q = Correspondence(c("o1", x), c("o3", y), rel)
                if q.key not in got:
                    assert not isinstance(oracle_entails(reduced, q, 2), EntailedUpTo), q


def test_alpha_is_reversible(fig1_prime):
    fwd = alpha_closure(fig1_prime, "o1", "o3")
    back = alpha_closure(fig1_prime, "o3", "o1")
    assert {x.reversed() for x in fwd} == set(back)


def test_closures_on_inconsistent(fig1):
    assert omega_closure(fig1, "o1") is ALL_CONSEQUENCES
    assert alpha_closure(fig1, "o1", "o2") is ALL_CONSEQUENCES
    with pytest.raises(InconsistentNetworkError) as exc:
        close_network(fig1)
    assert isinstance(exc.value.clash, Clash)


def test_closure_errors(fig1_prime):
    with pytest.raises(NetworkError):
        omega_closure(fig1_prime, "nope")
    with pytest.raises(NetworkError):
        alpha_closure(fig1_prime, "o1", "o1")


def test_close_reproduces_listed_sets(fig1_prime):
    closed = close_network(fig1_prime)
    assert closed.ontologies["o1"].axioms == E.axioms(fig1_prime, "o1", E.OMEGA_O1)
    assert E.axioms(fig1_prime, "o3", E.OMEGA_O3_PRIME) <= closed.ontologies["o3"].axioms
    assert E.correspondences(fig1_prime, "o1", "o3", E.ALPHA_O1_O3) <= set(closed.alignments["A13"].oriented("o1"))
    assert E.correspondences(fig1_prime, "o2", "o3", E.ALPHA_O2_O3) <= set(closed.alignments["A23"].oriented("o2"))
    assert E.correspondences(fig1_prime, "o1", "o2", E.ALPHA_O1_O2) <= set(closed.alignments["A12"].oriented("o1"))


def test_close_single_ontology(fig1_prime):
    o = fig1_prime.ontologies["o2"]
    closed = close_network(make_network([o]))
    assert closed.alignments == {}
    assert closed.ontologies["o2"].axioms == local_closure(o)


def test_close_adds_alignments_between_unconnected(fig1_prime):
    net = make_network(fig1_prime.ontologies.values(), [fig1_prime.alignments["A12"], fig1_prime.alignments["A23"]])
    closed = close_network(net)
    (new,) = closed.between("o1", "o3")
    assert new.id == "o1~o3"
    assert parse_correspondence("o1:b1 <= o3:b3", net) in new.correspondences


def test_close_is_idempotent(fig1_prime):
    once = close_network(fig1_prime)
    twice = close_network(once)
    assert twice.ontologies == once.ontologies and twice.alignments == once.alignments


def test_extensive(fig1_prime):
    assert find_syntactic_morphism(fig1_prime, close_network(fig1_prime)) is not None


# ------------------------------------------------------------------- entails


def test_entails_examples(fig1_prime):
    assert entails(fig1_prime, parse_correspondence("o1:b1 <= o3:b3", fig1_prime))
    assert entails(fig1_prime, SubClassOf(c("o3", "e3"), c("o3", "b3")))
    assert not entails(fig1_prime, parse_correspondence("o1:a1 >= o3:g3", fig1_prime))


def test_entails_on_inconsistent(fig1):
    assert entails(fig1, parse_correspondence("o1:a1 >= o3:g3", fig1))


def test_entails_requires_declared(fig1_prime):
    with pytest.raises(NetworkError):
        entails(fig1_prime, SubClassOf(c("o3", "zz"), c("o3", "b3")))


def test_derived_facts_hold_in_found_models(fig1_prime):
    g = saturate(fig1_prime)
    for n in (1, 2):
        model = find_model(fig1_prime, n)
        assert isinstance(model, Model)
        for f in g.facts:
            assert holds_in(model.model, fact_as_query(f))


# --------------------------------------------------------------- properties


def bound(net: Network) -> int:
    n_classes = len(net.classes())
    return 2 * n_classes * n_classes + n_classes * len(net.individuals())


@pytest.mark.parametrize("seed", range(40))
def test_termination_bound(seed):
    rng = random.Random(seed)
    net = random_network(rng, n_ontologies=rng.randint(1, 4), n_classes=4, n_individuals=2, n_axioms=5, n_corr=4)
    assert len(saturate(net).facts) <= bound(net)


@pytest.mark.parametrize("seed", range(30))
def test_consequence_relation(seed):
    rng = random.Random(1000 + seed)
    big = random_network(rng, n_ontologies=3, n_axioms=4, n_corr=3)
    small = deletion(rng, big, 0.4)
    g_small, g_big = saturate(small), saturate(big)
    # extensivity
    assert g_small.given <= g_small.facts
    # monotony
    assert g_small.facts <= g_big.facts or g_big.clash
    assert not g_small.clash or g_big.clash
    # idempotency: adding what is derived derives nothing new
    if not g_small.clash:
        closed = close_network(small)
        assert saturate(closed).facts == g_small.facts


@pytest.mark.parametrize("seed", range(30))
def test_normalisation_preserves_facts(seed):
    rng = random.Random(2000 + seed)
    net = random_network(rng, n_ontologies=3, multi=True)
    assert saturate(net).facts == saturate(normalise(net)).facts
    assert saturate(net).clash == saturate(normalise(net)).clash
