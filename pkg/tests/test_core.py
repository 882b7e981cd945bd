"""Category objects, functors between them, and their dualities."""

import pytest
from hypothesis import given, settings, strategies as st

from intcat.ambient import IndexCategory, Presheaf, PresheafMap
from intcat.core import (
    adjunction_check, compose_functors, dis_u_ind_adjunctions, discrete,
    enumerate_functors, enumerate_nats, from_finite_category,
    horizontal_compose, identity_functor, identity_nat, indiscrete,
    initial_cat, nat_is_iso, opposite, points_of_cat, product_cat,
    terminal_cat, validate_internal_category, vertical_compose,
)
from intcat.fixtures import (
    chain_cat, corpus, discrete_cat, divisor_lattice, indiscrete_cat,
    poset_cat, walking_idempotent,
)

FIN = IndexCategory.finset()


def test_corpus_categories_satisfy_all_laws():
    for name, cat in corpus():
        assert validate_internal_category(cat) == [], name


def test_divisor_lattice_sizes():
    d12 = divisor_lattice(12)
    assert len(d12.obj.at("pt")) == 6
    assert len(d12.arr.at("pt")) == 18


def test_walking_idempotent_composition():
    w = walking_idempotent()
    assert w.comp_at("pt", "e", "e") == "e"
    assert validate_internal_category(w) == []


def test_discrete_has_only_identities():
    x = Presheaf(FIN, {"pt": ("a", "b")}, {"id_pt": {"a": "a", "b": "b"}})
    d = discrete(x)
    assert len(d.arr.at("pt")) == 2
    assert all(d.s_at("pt", h) == d.t_at("pt", h) for h in d.arr.at("pt"))


def test_indiscrete_has_one_arrow_per_ordered_pair():
    x = Presheaf(FIN, {"pt": ("a", "b", "c")},
                 {"id_pt": {c: c for c in "abc"}})
    i = indiscrete(x)
    assert len(i.arr.at("pt")) == 9
    ends = {(i.s_at("pt", h), i.t_at("pt", h)) for h in i.arr.at("pt")}
    assert len(ends) == 9


def test_opposite_swaps_endpoints_and_is_involutive():
    for name, cat in corpus():
        op = opposite(cat)
        assert validate_internal_category(op) == [], name
        assert opposite(op) == cat, name
        for c in cat.base.objects:
            for h in cat.arr.at(c):
                assert op.s_at(c, h) == cat.t_at(c, h)
                assert op.t_at(c, h) == cat.s_at(c, h)


def test_product_cat_projections_exist():
    a, b = chain_cat(2), discrete_cat(("x", "y"))
    p = product_cat(a, b)
    assert validate_internal_category(p) == []
    assert len(p.obj.at("pt")) == 4
    assert len(p.arr.at("pt")) == 6      # 3 arrows in the chain, 2 in discrete


def test_functor_enumeration_counts():
    c2 = chain_cat(2)
    assert len(enumerate_functors(c2, c2)) == 3          # monotone endomaps
    d2 = discrete_cat(("x", "y"))
    assert len(enumerate_functors(d2, c2)) == 4
    c3 = chain_cat(3)
    assert len(enumerate_functors(c3, c3)) == 10


def test_functor_composition_is_associative():
    c2 = chain_cat(2)
    fns = enumerate_functors(c2, c2)
    for f in fns:
        for g in fns:
            for h in fns:
                assert compose_functors(h, compose_functors(g, f)) == \
                    compose_functors(compose_functors(h, g), f)


def test_identity_functor_is_neutral():
    d12 = divisor_lattice(12)
    i = identity_functor(d12)
    assert compose_functors(i, i) == i
    assert i.validate() == []


def test_nat_enumeration_and_vertical_composition():
    c2 = chain_cat(2)
    fns = enumerate_functors(c2, c2)
    for f in fns:
        for g in fns:
            nats = enumerate_nats(f, g)
            for nt in nats:
                assert nt.validate() == []
                assert vertical_compose(nt, identity_nat(f)) == nt
                assert vertical_compose(identity_nat(g), nt) == nt


def test_horizontal_composition_agrees_with_whiskering():
    c2 = chain_cat(2)
    fns = enumerate_functors(c2, c2)
    for f in fns:
        for g in fns:
            for nt in enumerate_nats(f, g):
                both = horizontal_compose(identity_nat(identity_functor(c2)), nt)
                assert both.source == f
                assert both.validate() == []


def test_terminal_and_initial_cats():
    t = terminal_cat(FIN)
    assert len(t.obj.at("pt")) == 1
    z = initial_cat(FIN)
    assert z.obj.at("pt") == ()
    assert len(enumerate_functors(z, divisor_lattice(6))) == 1


def test_points_of_exponential_like_behavior():
    # points of a constant finite category are its objects
    c2 = chain_cat(2)
    pts = points_of_cat(c2)
    assert len(pts.objects) == 2


def test_dis_u_ind_adjunction_bijections():
    d12 = divisor_lattice(12)
    for labels in (("a",), ("a", "b"), ("a", "b", "c")):
        x = Presheaf(FIN, {"pt": labels}, {"id_pt": {e: e for e in labels}})
        res = dis_u_ind_adjunctions(x, d12)
        assert res["left"]["bijection"], labels
        assert res["right"]["bijection"], labels
        assert res["left"]["functors"] == res["left"]["maps"]
        assert res["right"]["functors"] == res["right"]["maps"]


def test_adjunction_check_accepts_identity_adjunction():
    d6 = divisor_lattice(6)
    i = identity_functor(d6)
    unit = identity_nat(i)
    errs = adjunction_check(i, i, unit, unit)
    assert errs == []
    assert nat_is_iso(unit)


def test_adjunction_check_rejects_wrong_unit():
    c2 = chain_cat(2)
    fns = enumerate_functors(c2, c2)
    const0 = next(f for f in fns
                  if set(f.f0.components["pt"].values()) == {"0"})
    i = identity_functor(c2)
    # const0 is not adjoint to the identity on either side
    nats = enumerate_nats(i, const0)
    bad = [adjunction_check(const0, i, nt, nt2) == []
           for nt in enumerate_nats(i, compose_functors(i, const0))
           for nt2 in enumerate_nats(compose_functors(const0, i), i)]
    assert not any(bad)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=4))
def test_chain_functor_count_is_binomial(n, m):
    # monotone maps from a chain of n to a chain of m: C(n+m-1, n)
    from math import comb
    a, b = chain_cat(n), chain_cat(m)
    assert len(enumerate_functors(a, b)) == comb(n + m - 1, n)
