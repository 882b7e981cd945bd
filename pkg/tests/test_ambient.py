"""Laws of the ambient layer: finite presheaves and their limits."""

import pytest
from hypothesis import given, settings, strategies as st

from intcat.ambient import (
    IndexCategory, Presheaf, PresheafMap, coproduct, curry, enumerate_maps,
    equalizer, evaluation_map, exponential, initial, inverse, is_iso, points,
    product, pullback, representable, terminal, uncurry, unique_from_initial,
    unique_to_terminal,
)

FIN = IndexCategory.finset()
CHAIN2 = IndexCategory.chain(2)


def finset(*labels):
    return Presheaf(FIN, {"pt": tuple(labels)},
                    {"id_pt": {x: x for x in labels}})


def staged(at0, at1, down):
    """A presheaf over the two-stage base with the given restriction."""
    action = {u: {} for u in CHAIN2.arrows}
    action[CHAIN2.identity["c0"]] = {x: x for x in at0}
    action[CHAIN2.identity["c1"]] = {x: x for x in at1}
    action[("c0", "c1")] = dict(down)
    return Presheaf(CHAIN2, {"c0": tuple(at0), "c1": tuple(at1)}, action)


def test_index_category_constructors():
    assert FIN.objects == ("pt",)
    assert CHAIN2.objects == ("c0", "c1")
    three = IndexCategory.chain(3)
    # composites of consecutive steps are present and associative
    u01 = next(u for u in three.arrows
               if three.src[u] == "c0" and three.tgt[u] == "c1")
    u12 = next(u for u in three.arrows
               if three.src[u] == "c1" and three.tgt[u] == "c2")
    w = three.compose[(u12, u01)]
    assert three.src[w] == "c0" and three.tgt[w] == "c2"


def test_poset_closure_is_reflexive_transitive():
    p = IndexCategory.poset(("a", "b", "c"), [("a", "b"), ("b", "c")])
    pairs = {(p.src[u], p.tgt[u]) for u in p.arrows}
    assert ("a", "c") in pairs          # transitivity
    assert ("a", "a") in pairs          # reflexivity
    assert ("c", "a") not in pairs


def test_presheaf_validate_catches_broken_action():
    x = staged(("p", "q"), ("x",), {"x": "p"})
    assert x.validate() == []
    bad = Presheaf(CHAIN2, x.carrier, {**x.action, ("c0", "c1"): {}})
    assert bad.validate() != []


def test_terminal_and_initial_points():
    x = finset("a", "b", "c")
    t = unique_to_terminal(x)
    assert t.validate() == []
    assert set(t.components["pt"].values()) == {"*"}
    z = unique_from_initial(x)
    assert z.validate() == []
    assert initial(FIN).at("pt") == ()


def test_product_projections_and_pairing():
    x, y = finset("a", "b"), finset("u", "v", "w")
    cone = product(x, y)
    assert len(cone.apex.at("pt")) == 6
    assert cone.legs[0].validate() == []
    assert cone.legs[1].validate() == []
    # mediating map from any other cone is unique and correct
    w = finset("m")
    f = PresheafMap(w, x, {"pt": {"m": "b"}})
    g = PresheafMap(w, y, {"pt": {"m": "u"}})
    med = cone.mediate([f, g])
    assert med.components["pt"]["m"] == ("b", "u")


def test_equalizer_picks_agreement_locus():
    x, y = finset("1", "2", "3"), finset("p", "q")
    f = PresheafMap(x, y, {"pt": {"1": "p", "2": "q", "3": "p"}})
    g = PresheafMap(x, y, {"pt": {"1": "p", "2": "p", "3": "q"}})
    eq = equalizer(f, g)
    assert eq.apex.at("pt") == ("1",)


def test_pullback_fiber_product():
    x, y, z = finset("a", "b"), finset("u", "v"), finset("0", "1")
    f = PresheafMap(x, z, {"pt": {"a": "0", "b": "1"}})
    g = PresheafMap(y, z, {"pt": {"u": "1", "v": "1"}})
    pb = pullback(f, g)
    assert set(pb.apex.at("pt")) == {("b", "u"), ("b", "v")}


def test_coproduct_tags_and_mediates():
    x, y = finset("a"), finset("a", "b")
    apex, inl, inr = coproduct(x, y)
    assert len(apex.at("pt")) == 3
    labels = set(apex.at("pt"))
    assert ("inl", "a") in labels and ("inr", "a") in labels
    assert inl.validate() == [] and inr.validate() == []


def test_representable_over_chain():
    y1 = representable(CHAIN2, "c1")
    # maps into c1: one from c0, the identity at c1
    assert len(y1.at("c0")) == 1
    assert len(y1.at("c1")) == 1


def test_exponential_counts_on_sets():
    x, y = finset("a", "b"), finset("0", "1", "2")
    e = exponential(x, y)
    assert len(e.at("pt")) == 9
    cone, ev = evaluation_map(x, y, e)
    assert ev.validate() == []
    # evaluating the point for a function at an argument applies it
    phi = e.at("pt")[0]
    assert ev.components["pt"][(phi, "a")] in y.at("pt")


def test_curry_uncurry_round_trip_staged():
    x = staged(("p", "q"), ("x",), {"x": "p"})
    y = staged(("u",), ("s", "t"), {"s": "u", "t": "u"})
    z = staged(("m", "n"), ("w",), {"w": "m"})
    for f in enumerate_maps(product(z, x).apex, y):
        g = curry(f, z, x)
        assert g.validate() == []
        back = uncurry(g, z, x, y)
        assert back == f


def test_hom_set_exponential_bijection_staged():
    x = staged(("p", "q"), ("x",), {"x": "p"})
    y = staged(("u",), ("s", "t"), {"s": "u", "t": "u"})
    z = staged(("m", "n"), ("w",), {"w": "m"})
    lhs = enumerate_maps(product(z, x).apex, y)
    rhs = enumerate_maps(z, exponential(x, y))
    assert len(lhs) == len(rhs)
    assert len({repr(curry(f, z, x).components) for f in lhs}) == len(lhs)


def test_points_of_exponential_are_maps():
    x, y = finset("a", "b"), finset("0", "1")
    assert len(points(exponential(x, y))) == len(enumerate_maps(x, y)) == 4


def test_inverse_only_for_isos():
    x = finset("a", "b")
    swap = PresheafMap(x, x, {"pt": {"a": "b", "b": "a"}})
    collapse = PresheafMap(x, x, {"pt": {"a": "a", "b": "a"}})
    assert is_iso(swap) and inverse(swap).components["pt"]["b"] == "a"
    assert not is_iso(collapse) and inverse(collapse) is None


carriers = st.integers(min_value=0, max_value=3)


@settings(max_examples=25, deadline=None)
@given(carriers, carriers, st.data())
def test_product_size_is_pointwise_product(n, m, data):
    xs = tuple(f"x{i}" for i in range(n))
    ys = tuple(f"y{i}" for i in range(m))
    x, y = finset(*xs), finset(*ys)
    cone = product(x, y)
    assert len(cone.apex.at("pt")) == n * m


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=3),
       st.data())
def test_staged_curry_bijection_property(n0, n1, data):
    # restriction chosen at random, bijection must hold regardless
    down = {f"b{j}": data.draw(st.sampled_from([f"a{i}" for i in range(n0)]),
                               label=f"down{j}")
            for j in range(n1)}
    x = staged(tuple(f"a{i}" for i in range(n0)),
               tuple(f"b{j}" for j in range(n1)), down)
    y = staged(("u", "v"), ("s",), {"s": "u"})
    z = staged(("m",), ("w",), {"w": "m"})
    lhs = enumerate_maps(product(z, x).apex, y)
    rhs = enumerate_maps(z, exponential(x, y))
    assert len(lhs) == len(rhs)
