"""Category objects inside the ambient category.

An internal category is a six-arrow diagram: objects-object, arrows-object,
source, target, identity, and composition on the chosen pullback of
composable pairs. A composable pair is labeled ``(g, f)`` with the later
arrow first, i.e. ``source(g) = target(f)`` and ``compose((g, f)) = g after
f``. Functors and natural transformations between internal categories are
presheaf maps subject to the usual equations, checked elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .ambient import (
    IndexCategory, IndexFunctor, Presheaf, PresheafMap, LimitCone,
    PreconditionError, elements_category, enumerate_maps, initial,
    point_label, points, product, pullback, restrict, restrict_map, terminal,
)


@dataclass(eq=True)
class InternalCategory:
    """A category object: six arrows of the ambient category."""

    obj: Presheaf
    arr: Presheaf
    source: PresheafMap
    target: PresheafMap
    identity: PresheafMap
    pairs: LimitCone            # pullback of source against target
    compose: PresheafMap        # pairs.apex -> arr

    @property
    def base(self) -> IndexCategory:
        return self.obj.base

    def s_at(self, c, h):
        return self.source.components[c][h]

    def t_at(self, c, h):
        return self.target.components[c][h]

    def id_at(self, c, a):
        return self.identity.components[c][a]

    def comp_at(self, c, g, f):
        """g after f at stage c; the pair label is ``(g, f)``."""
        return self.compose.components[c][(g, f)]

    def identity_elements(self, c) -> dict:
        """Reverse lookup: identity arrow element -> the object it sits on."""
        return {h: a for a, h in self.identity.components[c].items()}

    def composable_pairs(self, c) -> tuple:
        return self.pairs.apex.at(c)

    def validate(self) -> list[str]:
        return validate_internal_category(self)


def make_internal_category(obj: Presheaf, arr: Presheaf, source: PresheafMap,
                           target: PresheafMap, identity: PresheafMap,
                           comp_fn: Callable) -> InternalCategory:
    """Assemble a category object; ``comp_fn(c, g, f)`` names g after f."""
    pairs = pullback(source, target)
    base = obj.base
    comps = {c: {(g, f): comp_fn(c, g, f) for (g, f) in pairs.apex.at(c)}
             for c in base.objects}
    return InternalCategory(obj, arr, source, target, identity, pairs,
                            PresheafMap(pairs.apex, arr, comps))


def validate_internal_category(a: InternalCategory) -> list[str]:
    """All seven category laws as elementwise arrow equalities."""
    out = []
    for part, name in ((a.obj, "objects"), (a.arr, "arrows"), (a.pairs.apex, "pairs")):
        out += [f"{name}: {v}" for v in part.validate()]
    for m, name in ((a.source, "source"), (a.target, "target"),
                    (a.identity, "identity"), (a.compose, "compose")):
        out += [f"{name}: {v}" for v in m.validate()]
    if out:
        return out
    base = a.base
    for c in base.objects:
        for x in a.obj.at(c):
            i = a.id_at(c, x)
            if a.s_at(c, i) != x:
                out.append(f"source of identity at {c!r}:{x!r}")
            if a.t_at(c, i) != x:
                out.append(f"target of identity at {c!r}:{x!r}")
        for (g, f) in a.composable_pairs(c):
            gf = a.comp_at(c, g, f)
            if a.s_at(c, gf) != a.s_at(c, f):
                out.append(f"source of composite at {c!r}:({g!r},{f!r})")
            if a.t_at(c, gf) != a.t_at(c, g):
                out.append(f"target of composite at {c!r}:({g!r},{f!r})")
        for f in a.arr.at(c):
            if a.comp_at(c, f, a.id_at(c, a.s_at(c, f))) != f:
                out.append(f"right unit at {c!r}:{f!r}")
            if a.comp_at(c, a.id_at(c, a.t_at(c, f)), f) != f:
                out.append(f"left unit at {c!r}:{f!r}")
        for (h, g) in a.composable_pairs(c):
            for f in a.arr.at(c):
                if a.s_at(c, g) != a.t_at(c, f):
                    continue
                if a.comp_at(c, a.comp_at(c, h, g), f) != a.comp_at(c, h, a.comp_at(c, g, f)):
                    out.append(f"associativity at {c!r}:({h!r},{g!r},{f!r})")
    return out


@dataclass(eq=True)
class InternalFunctor:
    """A functor between category objects: object part and arrow part."""

    source_cat: InternalCategory
    target_cat: InternalCategory
    f0: PresheafMap
    f1: PresheafMap

    def on_obj(self, c, a):
        return self.f0.components[c][a]

    def on_arr(self, c, h):
        return self.f1.components[c][h]

    def validate(self) -> list[str]:
        return validate_internal_functor(self)


def validate_internal_functor(fn: InternalFunctor) -> list[str]:
    out = []
    a, b = fn.source_cat, fn.target_cat
    if fn.f0.source != a.obj or fn.f0.target != b.obj:
        out.append("object part has wrong endpoints")
    if fn.f1.source != a.arr or fn.f1.target != b.arr:
        out.append("arrow part has wrong endpoints")
    out += [f"object part: {v}" for v in fn.f0.validate()]
    out += [f"arrow part: {v}" for v in fn.f1.validate()]
    if out:
        return out
    for c in a.base.objects:
        for h in a.arr.at(c):
            if b.s_at(c, fn.on_arr(c, h)) != fn.on_obj(c, a.s_at(c, h)):
                out.append(f"source not preserved at {c!r}:{h!r}")
            if b.t_at(c, fn.on_arr(c, h)) != fn.on_obj(c, a.t_at(c, h)):
                out.append(f"target not preserved at {c!r}:{h!r}")
        for x in a.obj.at(c):
            if fn.on_arr(c, a.id_at(c, x)) != b.id_at(c, fn.on_obj(c, x)):
                out.append(f"identity not preserved at {c!r}:{x!r}")
        for (g, f) in a.composable_pairs(c):
            lhs = fn.on_arr(c, a.comp_at(c, g, f))
            rhs = b.comp_at(c, fn.on_arr(c, g), fn.on_arr(c, f))
            if lhs != rhs:
                out.append(f"composition not preserved at {c!r}:({g!r},{f!r})")
    return out


def identity_functor(a: InternalCategory) -> InternalFunctor:
    return InternalFunctor(a, a, PresheafMap.identity(a.obj), PresheafMap.identity(a.arr))


def compose_functors(g: InternalFunctor, f: InternalFunctor) -> InternalFunctor:
    """g after f."""
    if f.target_cat != g.source_cat:
        raise PreconditionError("functor composition endpoint mismatch")
    return InternalFunctor(f.source_cat, g.target_cat,
                           f.f0.then(g.f0), f.f1.then(g.f1))


@dataclass(eq=True)
class InternalNatTrans:
    """A natural transformation: one arrow element per object element."""

    source: InternalFunctor
    target: InternalFunctor
    component: PresheafMap      # source_cat.obj -> target_cat.arr

    def at(self, c, a):
        return self.component.components[c][a]

    def validate(self) -> list[str]:
        return validate_internal_nat(self)


def validate_internal_nat(nt: InternalNatTrans) -> list[str]:
    out = []
    f, g = nt.source, nt.target
    if f.source_cat != g.source_cat or f.target_cat != g.target_cat:
        return ["source and target functors are not parallel"]
    a, b = f.source_cat, f.target_cat
    if nt.component.source != a.obj or nt.component.target != b.arr:
        out.append("component has wrong endpoints")
    out += [f"component: {v}" for v in nt.component.validate()]
    if out:
        return out
    for c in a.base.objects:
        for x in a.obj.at(c):
            h = nt.at(c, x)
            if b.s_at(c, h) != f.on_obj(c, x):
                out.append(f"component source at {c!r}:{x!r}")
            if b.t_at(c, h) != g.on_obj(c, x):
                out.append(f"component target at {c!r}:{x!r}")
        for h in a.arr.at(c):
            x, y = a.s_at(c, h), a.t_at(c, h)
            lhs = b.comp_at(c, g.on_arr(c, h), nt.at(c, x))
            rhs = b.comp_at(c, nt.at(c, y), f.on_arr(c, h))
            if lhs != rhs:
                out.append(f"naturality square at {c!r}:{h!r}")
    return out


def identity_nat(f: InternalFunctor) -> InternalNatTrans:
    return InternalNatTrans(f, f, f.f0.then(f.target_cat.identity))


def vertical_compose(beta: InternalNatTrans, alpha: InternalNatTrans) -> InternalNatTrans:
    """beta after alpha (componentwise composition in the target)."""
    if alpha.target != beta.source:
        raise PreconditionError("vertical composition endpoint mismatch")
    b = alpha.source.target_cat
    comps = {c: {x: b.comp_at(c, beta.at(c, x), alpha.at(c, x))
                 for x in alpha.component.components[c]}
             for c in b.base.objects}
    return InternalNatTrans(alpha.source, beta.target,
                            PresheafMap(alpha.component.source, b.arr, comps))


def whisker_left(alpha: InternalNatTrans, l: InternalFunctor) -> InternalNatTrans:
    """Precompose both functors with l: components are alpha at l of each object."""
    if l.target_cat != alpha.source.source_cat:
        raise PreconditionError("whiskering endpoint mismatch")
    return InternalNatTrans(
        compose_functors(alpha.source, l), compose_functors(alpha.target, l),
        l.f0.then(alpha.component))


def whisker_right(r: InternalFunctor, alpha: InternalNatTrans) -> InternalNatTrans:
    """r applied to alpha: components r(alpha a)."""
    if alpha.source.target_cat != r.source_cat:
        raise PreconditionError("whiskering endpoint mismatch")
    return InternalNatTrans(
        compose_functors(r, alpha.source), compose_functors(r, alpha.target),
        alpha.component.then(r.f1))


def horizontal_compose(beta: InternalNatTrans, alpha: InternalNatTrans) -> InternalNatTrans:
    """Godement product: beta (between functors B -> C) alongside alpha (A -> B)."""
    return vertical_compose(whisker_left(beta, alpha.target),
                            whisker_right(beta.source, alpha))


# ---------------------------------------------------------------------------
# constructions


def discrete(x: Presheaf) -> InternalCategory:
    """Only identity arrows: objects and arrows share the carrier."""
    one = PresheafMap.identity(x)
    return make_internal_category(x, x, one, one, one, lambda c, g, f: f)


def indiscrete(x: Presheaf) -> InternalCategory:
    """Exactly one arrow between any two objects: arrows are ordered pairs."""
    cone = product(x, x)
    apex = cone.apex
    base = x.base
    source, target = cone.legs
    diag = cone.mediate([PresheafMap.identity(x), PresheafMap.identity(x)])
    return make_internal_category(
        x, apex, source, target, diag,
        lambda c, g, f: (f[0], g[1]))


def opposite(a: InternalCategory) -> InternalCategory:
    """Swap source and target; composition reads the pair backwards.

    Applying it twice rebuilds the original tables exactly.
    """
    return make_internal_category(
        a.obj, a.arr, a.target, a.source, a.identity,
        lambda c, g, f: a.comp_at(c, f, g))


def product_cat(a: InternalCategory, b: InternalCategory) -> InternalCategory:
    """The pointwise product category."""
    if a.base != b.base:
        raise PreconditionError("product categories live over different bases")
    ocone = product(a.obj, b.obj)
    acone = product(a.arr, b.arr)
    source = ocone.mediate([acone.legs[0].then(a.source), acone.legs[1].then(b.source)])
    target = ocone.mediate([acone.legs[0].then(a.target), acone.legs[1].then(b.target)])
    ident = acone.mediate([ocone.legs[0].then(a.identity), ocone.legs[1].then(b.identity)])
    return make_internal_category(
        ocone.apex, acone.apex, source, target, ident,
        lambda c, g, f: (a.comp_at(c, g[0], f[0]), b.comp_at(c, g[1], f[1])))


def terminal_cat(base: IndexCategory) -> InternalCategory:
    return discrete(terminal(base))


def initial_cat(base: IndexCategory) -> InternalCategory:
    return discrete(initial(base))


def from_finite_category(base: IndexCategory, c: IndexCategory) -> InternalCategory:
    """Internalize a finite category as constant presheaves over ``base``."""
    def const(labels):
        labels = tuple(labels)
        return Presheaf(base, {o: labels for o in base.objects},
                        {u: {l: l for l in labels} for u in base.arrows})

    obj, arr = const(c.objects), const(c.arrows)
    source = PresheafMap(arr, obj, {o: dict(c.src) for o in base.objects})
    target = PresheafMap(arr, obj, {o: dict(c.tgt) for o in base.objects})
    ident = PresheafMap(obj, arr, {o: dict(c.identity) for o in base.objects})
    return make_internal_category(obj, arr, source, target, ident,
                                  lambda o, g, f: c.comp(g, f))


def restrict_cat(p: IndexFunctor, a: InternalCategory) -> InternalCategory:
    """Reindex a category object along an index functor (labels preserved)."""
    obj, arr = restrict(p, a.obj), restrict(p, a.arr)
    return make_internal_category(
        obj, arr,
        restrict_map(p, a.source), restrict_map(p, a.target), restrict_map(p, a.identity),
        lambda d, g, f: a.comp_at(p.on_obj[d], g, f))


def restrict_functor(p: IndexFunctor, fn: InternalFunctor,
                     source_cat: Optional[InternalCategory] = None,
                     target_cat: Optional[InternalCategory] = None) -> InternalFunctor:
    source_cat = restrict_cat(p, fn.source_cat) if source_cat is None else source_cat
    target_cat = restrict_cat(p, fn.target_cat) if target_cat is None else target_cat
    return InternalFunctor(
        source_cat, target_cat,
        PresheafMap(source_cat.obj, target_cat.obj,
                    {d: fn.f0.components[p.on_obj[d]] for d in p.source.objects}),
        PresheafMap(source_cat.arr, target_cat.arr,
                    {d: fn.f1.components[p.on_obj[d]] for d in p.source.objects}))


def restrict_nat(p: IndexFunctor, nt: InternalNatTrans,
                 source_fn: InternalFunctor, target_fn: InternalFunctor) -> InternalNatTrans:
    return InternalNatTrans(
        source_fn, target_fn,
        PresheafMap(source_fn.source_cat.obj, source_fn.target_cat.arr,
                    {d: nt.component.components[p.on_obj[d]] for d in p.source.objects}))


def reindex_cat(i: Presheaf, a: InternalCategory) -> InternalCategory:
    """Pull a category object back to the slice over ``i`` (presheaves on the
    category of elements of ``i``)."""
    _, proj = elements_category(i)
    return restrict_cat(proj, a)


def dependent_sum_cat(i, a: InternalCategory) -> InternalCategory:
    """Push a category object over the elements of ``i`` down along ``i``.

    ``i`` is the indexing presheaf; ``a`` must live over its category of
    elements. The result lives over the base of ``i``; its carriers are
    tagged ``(fiber element, element)``.
    """
    base = i.base
    site, _ = elements_category(i)
    if a.base != site:
        raise PreconditionError("category does not live over the elements of the index")

    def squash(x: Presheaf) -> Presheaf:
        carrier = {c: tuple((e, q) for e in i.at(c) for q in x.at((c, e)))
                   for c in base.objects}
        action = {u: {(j, q): (i.action[u][j], x.action[(u, j)][q])
                      for (j, q) in carrier[base.tgt[u]]}
                  for u in base.arrows}
        return Presheaf(base, carrier, action)

    def squash_map(f: PresheafMap, src: Presheaf, tgt: Presheaf) -> PresheafMap:
        comps = {c: {(e, q): (e, f.components[(c, e)][q]) for (e, q) in src.at(c)}
                 for c in base.objects}
        return PresheafMap(src, tgt, comps)

    obj, arr = squash(a.obj), squash(a.arr)
    return make_internal_category(
        obj, arr,
        squash_map(a.source, arr, obj), squash_map(a.target, arr, obj),
        squash_map(a.identity, obj, arr),
        lambda c, g, f: (g[0], a.comp_at((c, g[0]), g[1], f[1])))


# ---------------------------------------------------------------------------
# externalization and enumeration


def points_of_cat(a: InternalCategory) -> IndexCategory:
    """The external category of global points: objects are points of the
    objects-object, arrows are points of the arrows-object."""
    obj_pts = points(a.obj)
    arr_pts = points(a.arr)
    obj_labels = [point_label(p) for p in obj_pts]
    arr_labels = [point_label(p) for p in arr_pts]
    arr_by_label = dict(zip(arr_labels, arr_pts))
    src = {l: point_label(p.then(a.source)) for l, p in zip(arr_labels, arr_pts)}
    tgt = {l: point_label(p.then(a.target)) for l, p in zip(arr_labels, arr_pts)}
    identity = {point_label(p): point_label(p.then(a.identity)) for p in obj_pts}
    compose = {}
    base = a.base
    for gl in arr_labels:
        for fl in arr_labels:
            if src[gl] != tgt[fl]:
                continue
            g, f = arr_by_label[gl], arr_by_label[fl]
            comp_values = {c: a.comp_at(c, g.components[c]["*"], f.components[c]["*"])
                           for c in base.objects}
            compose[(gl, fl)] = ("pt", tuple((c, comp_values[c]) for c in base.objects))
    return IndexCategory(tuple(obj_labels), tuple(arr_labels), src, tgt, identity, compose)


def enumerate_functors(a: InternalCategory, b: InternalCategory) -> list:
    """All internal functors a -> b, in a deterministic order."""
    out = []
    for f0 in enumerate_maps(a.obj, b.obj):
        def allowed(c, h, f0=f0):
            sa = f0.components[c][a.s_at(c, h)]
            ta = f0.components[c][a.t_at(c, h)]
            return tuple(k for k in b.arr.at(c)
                         if b.s_at(c, k) == sa and b.t_at(c, k) == ta)
        for f1 in enumerate_maps(a.arr, b.arr, allowed=allowed):
            fn = InternalFunctor(a, b, f0, f1)
            if functor_laws_hold(fn):
                out.append(fn)
    return out


def functor_laws_hold(fn: InternalFunctor) -> bool:
    a, b = fn.source_cat, fn.target_cat
    for c in a.base.objects:
        for x in a.obj.at(c):
            if fn.on_arr(c, a.id_at(c, x)) != b.id_at(c, fn.on_obj(c, x)):
                return False
        for (g, f) in a.composable_pairs(c):
            if fn.on_arr(c, a.comp_at(c, g, f)) != \
               b.comp_at(c, fn.on_arr(c, g), fn.on_arr(c, f)):
                return False
    return True


def enumerate_nats(f: InternalFunctor, g: InternalFunctor) -> list:
    """All natural transformations f -> g between parallel functors."""
    a, b = f.source_cat, f.target_cat

    def allowed(c, x):
        sa, ta = f.on_obj(c, x), g.on_obj(c, x)
        return tuple(h for h in b.arr.at(c)
                     if b.s_at(c, h) == sa and b.t_at(c, h) == ta)

    out = []
    for comp in enumerate_maps(a.obj, b.arr, allowed=allowed):
        nt = InternalNatTrans(f, g, comp)
        if nat_squares_hold(nt):
            out.append(nt)
    return out


def nat_squares_hold(nt: InternalNatTrans) -> bool:
    f, g = nt.source, nt.target
    a, b = f.source_cat, f.target_cat
    for c in a.base.objects:
        for h in a.arr.at(c):
            x, y = a.s_at(c, h), a.t_at(c, h)
            if b.comp_at(c, g.on_arr(c, h), nt.at(c, x)) != \
               b.comp_at(c, nt.at(c, y), f.on_arr(c, h)):
                return False
    return True


def nat_inverse(nt: InternalNatTrans) -> Optional[InternalNatTrans]:
    """The inverse transformation, when every component is an invertible
    arrow of the target category; None otherwise."""
    a = nt.source.target_cat
    comps = {}
    for c in a.base.objects:
        stage = {}
        for x, h in nt.component.components[c].items():
            s, t = a.s_at(c, h), a.t_at(c, h)
            inv = next((k for k in a.arr.at(c)
                        if a.s_at(c, k) == t and a.t_at(c, k) == s
                        and a.comp_at(c, k, h) == a.id_at(c, s)
                        and a.comp_at(c, h, k) == a.id_at(c, t)), None)
            if inv is None:
                return None
            stage[x] = inv
        comps[c] = stage
    return InternalNatTrans(nt.target, nt.source,
                            PresheafMap(nt.component.source, a.arr, comps))


def nat_is_iso(nt: InternalNatTrans) -> bool:
    """Whether a transformation is a natural isomorphism componentwise."""
    return nat_inverse(nt) is not None


# ---------------------------------------------------------------------------
# adjunction checks


def adjunction_check(l: InternalFunctor, r: InternalFunctor,
                     unit: InternalNatTrans, counit: InternalNatTrans) -> list[str]:
    """Both triangle identities, as equalities of natural transformations."""
    out = []
    a, b = l.source_cat, l.target_cat
    if r.source_cat != b or r.target_cat != a:
        return ["functors are not opposed"]
    if unit.source != identity_functor(a) or unit.target != compose_functors(r, l):
        out.append("unit endpoints are wrong")
    if counit.source != compose_functors(l, r) or counit.target != identity_functor(b):
        out.append("counit endpoints are wrong")
    if out:
        return out
    t1 = vertical_compose(whisker_left(counit, l), whisker_right(l, unit))
    if t1.component != identity_nat(l).component:
        out.append("first triangle identity fails")
    t2 = vertical_compose(whisker_right(r, counit), whisker_left(unit, r))
    if t2.component != identity_nat(r).component:
        out.append("second triangle identity fails")
    return out


def dis_u_ind_adjunctions(x: Presheaf, a: InternalCategory) -> dict:
    """Hom-set evidence that discrete is left adjoint and indiscrete right
    adjoint to the objects-object functor; returns the counted bijections."""
    dis_x = discrete(x)
    ind_x = indiscrete(x)
    functors_from_dis = enumerate_functors(dis_x, a)
    maps_from_x = enumerate_maps(x, a.obj)
    functors_to_ind = enumerate_functors(a, ind_x)
    maps_to_x = enumerate_maps(a.obj, x)
    # In both directions the object part is the whole functor: the object
    # carriers of discrete(x) and indiscrete(x) are x itself.
    left_ok = (sorted((fn.f0.components for fn in functors_from_dis), key=repr) ==
               sorted((m.components for m in maps_from_x), key=repr))
    right_ok = (sorted((fn.f0.components for fn in functors_to_ind), key=repr) ==
                sorted((m.components for m in maps_to_x), key=repr))
    return {
        "left": {"functors": len(functors_from_dis), "maps": len(maps_from_x),
                 "bijection": left_ok},
        "right": {"functors": len(functors_to_ind), "maps": len(maps_to_x),
                  "bijection": right_ok},
    }
