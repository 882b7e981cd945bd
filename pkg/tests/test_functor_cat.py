"""Functor categories as exponentials: evaluation, currying, naming."""

import pytest

from intcat.ambient import IndexCategory, points
from intcat.core import (
    compose_functors, enumerate_functors, enumerate_nats, identity_functor,
    product_cat, terminal_cat, validate_internal_category,
)
from intcat.functor_cat import (
    curry_functor, diagonal_functor, evaluation_functor, exponential_cat,
    hom_object, name_of, uncurry_functor,
)
from intcat.fixtures import chain_cat, discrete_cat, divisor_lattice

FIN = IndexCategory.finset()


def test_chain2_self_exponential_sizes():
    c2 = chain_cat(2)
    e = exponential_cat(c2, c2)
    assert validate_internal_category(e.cat) == []
    assert len(e.cat.obj.at("pt")) == 3
    assert len(e.cat.arr.at("pt")) == 6


def test_exponential_by_terminal_recovers_the_base():
    c2 = chain_cat(2)
    e = exponential_cat(terminal_cat(FIN), c2)
    assert len(e.cat.obj.at("pt")) == 2
    assert len(e.cat.arr.at("pt")) == 3


def test_exponential_objects_count_functors():
    d2, c2 = discrete_cat(("x", "y")), chain_cat(2)
    e = exponential_cat(d2, c2)
    assert len(e.cat.obj.at("pt")) == 4
    assert len(e.cat.arr.at("pt")) == 9


def test_points_of_exponential_name_functors():
    a, b = chain_cat(2), chain_cat(3)
    e = exponential_cat(a, b)
    fns = enumerate_functors(a, b)
    pts = points(e.cat.obj)
    assert len(pts) == len(fns)
    # name_of embeds each functor as a point, hitting every point once
    names = {repr(name_of(e, fn).components) for fn in fns}
    assert len(names) == len(fns)
    assert names == {repr(p.components) for p in pts}


def test_evaluation_functor_applies_names():
    a, b = chain_cat(2), chain_cat(2)
    e = exponential_cat(a, b)
    prod, ev = evaluation_functor(e)
    assert ev.validate() == []
    for fn in enumerate_functors(a, b):
        nm = name_of(e, fn).components["pt"]["*"]
        for x in a.obj.at("pt"):
            assert ev.on_obj("pt", (nm, x)) == fn.on_obj("pt", x)


def test_curry_uncurry_round_trip():
    a, b, w = chain_cat(2), chain_cat(2), discrete_cat(("m",))
    e = exponential_cat(a, b)
    prod = product_cat(w, a)
    for fn in enumerate_functors(prod, b):
        g = curry_functor(fn, w, a, expo=e)
        assert g.validate() == []
        back = uncurry_functor(g, w, e)
        assert back == fn


def test_hom_set_bijection_through_currying():
    a, b, w = chain_cat(2), chain_cat(2), chain_cat(2)
    e = exponential_cat(a, b)
    lhs = enumerate_functors(product_cat(w, a), b)
    rhs = enumerate_functors(w, e.cat)
    assert len(lhs) == len(rhs)
    curried = {repr(curry_functor(fn, w, a, expo=e).f0.components)
               for fn in lhs}
    assert len(curried) == len(lhs)


def test_diagonal_functor_lands_in_constants():
    d12 = divisor_lattice(12)
    two = discrete_cat(("0", "1"))
    dia = diagonal_functor(d12, two)
    assert dia.validate() == []
    e = dia.target_cat
    # a constant diagram evaluates to the same object at both shape points
    from intcat.labels import fam_dict
    for x in d12.obj.at("pt"):
        label = dia.on_obj("pt", x)
        t = fam_dict(label[0])
        vals = {t[k] for k in t}
        assert vals == {x}


def test_hom_object_matches_exponential_carrier():
    a, b = chain_cat(2), chain_cat(3)
    ho = hom_object(a, b)
    e = exponential_cat(a, b)
    assert set(ho.space.at("pt")) == set(e.cat.obj.at("pt"))


def test_exponential_arrows_are_natural_transformations():
    a, b = chain_cat(2), chain_cat(2)
    e = exponential_cat(a, b)
    fns = enumerate_functors(a, b)
    total = sum(len(enumerate_nats(f, g)) for f in fns for g in fns)
    assert len(e.cat.arr.at("pt")) == total
