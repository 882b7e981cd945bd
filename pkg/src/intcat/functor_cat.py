"""Mapping spaces and functor categories between category objects.

The mapping space of two category objects is computed stage by stage: an
element at stage c is a pair ``(phi0, phi1)`` of families giving, for every
arrow ``u : c' -> c`` of the base at once, an object assignment and an
arrow assignment subject to the functor laws. Natural-transformation
elements are triples ``(F, G, alpha)``. Families are enumerated with
constraint propagation and the laws prune candidates early, so the raw
function spaces of the underlying carriers are never materialized unless
the inclusion map is explicitly requested.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .labels import fam, fam_dict
from .ambient import (
    IndexCategory, Presheaf, PresheafMap, PreconditionError,
    elements_category, exponential, family_space, product, terminal,
)
from .core import (
    InternalCategory, InternalFunctor, InternalNatTrans,
    make_internal_category, product_cat, restrict_cat,
)


def _shift(base: IndexCategory, w, dom: Presheaf, table: dict):
    """Reindex a stage family along ``w : d -> c`` by precomposition."""
    d = base.src[w]
    return fam((((u, e), table[(base.comp(w, u), e)])
                for u in base.arrows_into(d)
                for e in dom.at(base.src[u])))


def _arrows_by_ends(b: InternalCategory) -> dict:
    """Per stage, the arrow elements of ``b`` grouped by (source, target)."""
    out = {}
    for c in b.base.objects:
        groups: dict = {}
        for k in b.arr.at(c):
            groups.setdefault((b.s_at(c, k), b.t_at(c, k)), []).append(k)
        out[c] = {ends: tuple(ks) for ends, ks in groups.items()}
    return out


def _arrow_parts(a: InternalCategory, b: InternalCategory, c, phi0_table: dict,
                 by_ends: dict, ids: dict) -> list:
    """All arrow families completing the object family ``phi0`` at stage c.

    Identity arrows are forced, endpoints filter the candidates, the base
    restriction law propagates, and composition preservation is the final
    check.
    """
    base = a.base

    def allowed(u, f):
        c2 = base.src[u]
        stage_ids = ids[c2]
        if f in stage_ids:
            return (b.id_at(c2, phi0_table[(u, stage_ids[f])]),)
        ends = (phi0_table[(u, a.s_at(c2, f))], phi0_table[(u, a.t_at(c2, f))])
        return by_ends[c2].get(ends, ())

    def check(table):
        for u in base.arrows_into(c):
            c2 = base.src[u]
            for (g, f) in a.composable_pairs(c2):
                if table[(u, a.comp_at(c2, g, f))] != \
                   b.comp_at(c2, table[(u, g)], table[(u, f)]):
                    return False
        return True

    return family_space(base, c, a.arr, b.arr, allowed=allowed, check=check)


@dataclass(eq=True)
class HomObject:
    """The mapping space of two category objects, one stage at a time.

    Elements at stage c are pairs ``(phi0, phi1)``: ``phi0`` maps each
    (arrow into c, object element) to an object element of the target,
    ``phi1`` does the same for arrow elements, and together they satisfy
    the functor laws.
    """

    dom: InternalCategory
    cod: InternalCategory
    space: Presheaf
    _inclusion: Optional[PresheafMap] = field(default=None, compare=False, repr=False)

    def inclusion(self) -> PresheafMap:
        """Monomorphism into the product of the raw function spaces of the
        carriers. Materializes full exponentials, so computed on demand."""
        if self._inclusion is None:
            cone = product(exponential(self.dom.obj, self.cod.obj),
                           exponential(self.dom.arr, self.cod.arr))
            comps = {c: {e: e for e in self.space.at(c)}
                     for c in self.space.base.objects}
            self._inclusion = PresheafMap(self.space, cone.apex, comps)
        return self._inclusion

    def stage_element(self, c, fn: InternalFunctor):
        """The element of stage c induced by a whole functor."""
        base = self.dom.base
        phi0 = fam((((u, x), fn.f0.components[base.src[u]][x])
                    for u in base.arrows_into(c)
                    for x in self.dom.obj.at(base.src[u])))
        phi1 = fam((((u, h), fn.f1.components[base.src[u]][h])
                    for u in base.arrows_into(c)
                    for h in self.dom.arr.at(base.src[u])))
        return (phi0, phi1)

    def encode_functor(self, fn: InternalFunctor) -> PresheafMap:
        """The global point of the mapping space naming ``fn``."""
        if fn.source_cat != self.dom or fn.target_cat != self.cod:
            raise PreconditionError("functor endpoints do not match the mapping space")
        base = self.dom.base
        return PresheafMap(terminal(base), self.space,
                           {c: {"*": self.stage_element(c, fn)} for c in base.objects})

    def decode_point(self, p: PresheafMap) -> InternalFunctor:
        """The functor named by a global point of the mapping space."""
        base = self.dom.base
        f0, f1 = {}, {}
        for c in base.objects:
            phi0, phi1 = p.components[c]["*"]
            t0, t1 = fam_dict(phi0), fam_dict(phi1)
            i = base.identity[c]
            f0[c] = {x: t0[(i, x)] for x in self.dom.obj.at(c)}
            f1[c] = {h: t1[(i, h)] for h in self.dom.arr.at(c)}
        return InternalFunctor(self.dom, self.cod,
                               PresheafMap(self.dom.obj, self.cod.obj, f0),
                               PresheafMap(self.dom.arr, self.cod.arr, f1))


def hom_object(a: InternalCategory, b: InternalCategory) -> HomObject:
    """Enumerate the mapping space of two category objects."""
    if a.base != b.base:
        raise PreconditionError("mapping space factors live over different bases")
    base = a.base
    by_ends = _arrows_by_ends(b)
    ids = {c: a.identity_elements(c) for c in base.objects}
    carrier = {}
    for c in base.objects:
        elems = []
        for phi0 in family_space(base, c, a.obj, b.obj):
            for phi1 in _arrow_parts(a, b, c, fam_dict(phi0), by_ends, ids):
                elems.append((phi0, phi1))
        carrier[c] = tuple(elems)
    action = {w: {(phi0, phi1): (_shift(base, w, a.obj, fam_dict(phi0)),
                                 _shift(base, w, a.arr, fam_dict(phi1)))
                  for (phi0, phi1) in carrier[base.tgt[w]]}
              for w in base.arrows}
    return HomObject(a, b, Presheaf(base, carrier, action))


@dataclass(eq=True)
class ExponentialCategory:
    """The functor category of two category objects, as a category object.

    Objects are mapping-space elements ``(phi0, phi1)``; arrows are triples
    ``(F, G, alpha)`` with ``alpha`` a natural family between the two.
    """

    dom: InternalCategory
    cod: InternalCategory
    hom: HomObject
    cat: InternalCategory

    def encode_functor(self, fn: InternalFunctor) -> PresheafMap:
        return self.hom.encode_functor(fn)

    def decode_point(self, p: PresheafMap) -> InternalFunctor:
        return self.hom.decode_point(p)

    def encode_nat(self, nt: InternalNatTrans) -> PresheafMap:
        """The global point of the arrows-object naming a transformation."""
        base = self.dom.base
        comps = {}
        for c in base.objects:
            alpha = fam((((u, x), nt.component.components[base.src[u]][x])
                         for u in base.arrows_into(c)
                         for x in self.dom.obj.at(base.src[u])))
            comps[c] = {"*": (self.hom.stage_element(c, nt.source),
                              self.hom.stage_element(c, nt.target), alpha)}
        return PresheafMap(terminal(base), self.cat.arr, comps)

    def decode_arrow(self, p: PresheafMap) -> InternalNatTrans:
        """The transformation named by a global point of the arrows-object."""
        base = self.dom.base
        src_fn = self.hom.decode_point(p.then(self.cat.source))
        tgt_fn = self.hom.decode_point(p.then(self.cat.target))
        comps = {}
        for c in base.objects:
            alpha = fam_dict(p.components[c]["*"][2])
            i = base.identity[c]
            comps[c] = {x: alpha[(i, x)] for x in self.dom.obj.at(c)}
        return InternalNatTrans(src_fn, tgt_fn,
                                PresheafMap(self.dom.obj, self.cod.arr, comps))


def exponential_cat(a: InternalCategory, b: InternalCategory) -> ExponentialCategory:
    """The functor category of ``a`` into ``b`` as a category object."""
    hom = hom_object(a, b)
    base = a.base
    space = hom.space
    by_ends = _arrows_by_ends(b)

    arr_carrier = {}
    for c in base.objects:
        triples = []
        for f_el in space.at(c):
            t0f, t1f = fam_dict(f_el[0]), fam_dict(f_el[1])
            for g_el in space.at(c):
                t0g, t1g = fam_dict(g_el[0]), fam_dict(g_el[1])

                def allowed(u, x, t0f=t0f, t0g=t0g):
                    return by_ends[base.src[u]].get((t0f[(u, x)], t0g[(u, x)]), ())

                def check(table, t1f=t1f, t1g=t1g, c=c):
                    for u in base.arrows_into(c):
                        c2 = base.src[u]
                        for h in a.arr.at(c2):
                            lhs = b.comp_at(c2, t1g[(u, h)],
                                            table[(u, a.s_at(c2, h))])
                            rhs = b.comp_at(c2, table[(u, a.t_at(c2, h))],
                                            t1f[(u, h)])
                            if lhs != rhs:
                                return False
                    return True

                for alpha in family_space(base, c, a.obj, b.arr,
                                          allowed=allowed, check=check):
                    triples.append((f_el, g_el, alpha))
        arr_carrier[c] = tuple(triples)

    arr_action = {w: {(f_el, g_el, alpha):
                      (space.action[w][f_el], space.action[w][g_el],
                       _shift(base, w, a.obj, fam_dict(alpha)))
                      for (f_el, g_el, alpha) in arr_carrier[base.tgt[w]]}
                  for w in base.arrows}
    arr = Presheaf(base, arr_carrier, arr_action)

    source = PresheafMap(arr, space, {c: {t: t[0] for t in arr.at(c)}
                                      for c in base.objects})
    target = PresheafMap(arr, space, {c: {t: t[1] for t in arr.at(c)}
                                      for c in base.objects})

    def identity_alpha(c, el):
        t0 = fam_dict(el[0])
        return fam((((u, x), b.id_at(base.src[u], t0[(u, x)]))
                    for u in base.arrows_into(c)
                    for x in a.obj.at(base.src[u])))

    ident = PresheafMap(space, arr, {c: {el: (el, el, identity_alpha(c, el))
                                         for el in space.at(c)}
                                     for c in base.objects})

    def comp_fn(c, g, f):
        tg, tf = fam_dict(g[2]), fam_dict(f[2])
        gamma = fam((((u, x), b.comp_at(base.src[u], tg[(u, x)], tf[(u, x)]))
                     for u in base.arrows_into(c)
                     for x in a.obj.at(base.src[u])))
        return (f[0], g[1], gamma)

    cat = make_internal_category(space, arr, source, target, ident, comp_fn)
    return ExponentialCategory(a, b, hom, cat)


def evaluation_functor(e: ExponentialCategory):
    """Evaluation (functor category) x dom -> cod; returns (product, functor).

    On arrows it takes the diagonal of the naturality square.
    """
    a, b = e.dom, e.cod
    base = a.base
    prod = product_cat(e.cat, a)
    f0 = {c: {(el, x): fam_dict(el[0])[(base.identity[c], x)]
              for (el, x) in prod.obj.at(c)} for c in base.objects}
    f1 = {}
    for c in base.objects:
        i = base.identity[c]
        stage = {}
        for (t, h) in prod.arr.at(c):
            f_el, _, alpha = t
            stage[(t, h)] = b.comp_at(c, fam_dict(alpha)[(i, a.t_at(c, h))],
                                      fam_dict(f_el[1])[(i, h)])
        f1[c] = stage
    return prod, InternalFunctor(prod, b,
                                 PresheafMap(prod.obj, b.obj, f0),
                                 PresheafMap(prod.arr, b.arr, f1))


def curry_functor(fn: InternalFunctor, left: InternalCategory,
                  right: InternalCategory,
                  expo: Optional[ExponentialCategory] = None) -> InternalFunctor:
    """Transpose ``fn : left x right -> b`` to ``left -> (b ^ right)``."""
    if fn.source_cat != product_cat(left, right):
        raise PreconditionError("functor to transpose does not start at the product")
    e = exponential_cat(right, fn.target_cat) if expo is None else expo
    base = left.base

    def stage0(c, x):
        phi0 = fam((((u, d),
                     fn.f0.components[base.src[u]][(left.obj.action[u][x], d)])
                    for u in base.arrows_into(c)
                    for d in right.obj.at(base.src[u])))
        phi1 = fam((((u, h),
                     fn.f1.components[base.src[u]][
                         (left.id_at(base.src[u], left.obj.action[u][x]), h)])
                    for u in base.arrows_into(c)
                    for h in right.arr.at(base.src[u])))
        return (phi0, phi1)

    f0 = {c: {x: stage0(c, x) for x in left.obj.at(c)} for c in base.objects}
    f1 = {}
    for c in base.objects:
        stage = {}
        for k in left.arr.at(c):
            alpha = fam((((u, d),
                          fn.f1.components[base.src[u]][
                              (left.arr.action[u][k],
                               right.id_at(base.src[u], d))])
                         for u in base.arrows_into(c)
                         for d in right.obj.at(base.src[u])))
            stage[k] = (f0[c][left.s_at(c, k)], f0[c][left.t_at(c, k)], alpha)
        f1[c] = stage
    return InternalFunctor(left, e.cat,
                           PresheafMap(left.obj, e.cat.obj, f0),
                           PresheafMap(left.arr, e.cat.arr, f1))


def uncurry_functor(g: InternalFunctor, left: InternalCategory,
                    e: ExponentialCategory) -> InternalFunctor:
    """Transpose ``g : left -> (b ^ right)`` back to ``left x right -> b``."""
    if g.target_cat != e.cat:
        raise PreconditionError("functor to transpose does not land in the functor category")
    right, b = e.dom, e.cod
    base = left.base
    prod = product_cat(left, right)
    f0 = {c: {(x, d): fam_dict(g.f0.components[c][x][0])[(base.identity[c], d)]
              for (x, d) in prod.obj.at(c)} for c in base.objects}
    f1 = {}
    for c in base.objects:
        i = base.identity[c]
        stage = {}
        for (k, h) in prod.arr.at(c):
            f_el, _, alpha = g.f1.components[c][k]
            stage[(k, h)] = b.comp_at(c, fam_dict(alpha)[(i, right.t_at(c, h))],
                                      fam_dict(f_el[1])[(i, h)])
        f1[c] = stage
    return InternalFunctor(prod, b, PresheafMap(prod.obj, b.obj, f0),
                           PresheafMap(prod.arr, b.arr, f1))


def diagonal_functor(a: InternalCategory, shape: InternalCategory,
                     expo: Optional[ExponentialCategory] = None) -> InternalFunctor:
    """The constant-diagram functor ``a -> (a ^ shape)``."""
    prod = product_cat(a, shape)
    base = a.base
    proj = InternalFunctor(
        prod, a,
        PresheafMap(prod.obj, a.obj,
                    {c: {p: p[0] for p in prod.obj.at(c)} for c in base.objects}),
        PresheafMap(prod.arr, a.arr,
                    {c: {p: p[0] for p in prod.arr.at(c)} for c in base.objects}))
    e = exponential_cat(shape, a) if expo is None else expo
    return curry_functor(proj, a, shape, expo=e)


def name_of(e: ExponentialCategory, fn: InternalFunctor) -> PresheafMap:
    """The global point of the functor category's objects naming ``fn``."""
    return e.encode_functor(fn)


def reindex_exponential_iso(i: Presheaf, a: InternalCategory,
                            b: InternalCategory,
                            expo: Optional[ExponentialCategory] = None) -> InternalFunctor:
    """Reindexing a functor category over the elements of ``i`` agrees with
    the functor category of the reindexings.

    Returns the comparison functor from the reindexed functor category to
    the functor category of reindexed factors; both of its parts are
    stage-by-stage bijections.
    """
    e = exponential_cat(a, b) if expo is None else expo
    site, proj = elements_category(i)
    lhs = restrict_cat(proj, e.cat)
    rhs = exponential_cat(restrict_cat(proj, a), restrict_cat(proj, b))

    def rekey(j, table):
        return fam(((((u, j), x), v) for ((u, x), v) in table.items()))

    f0comps, f1comps = {}, {}
    for so in site.objects:
        _, j = so
        stage0 = {}
        for el in lhs.obj.at(so):
            stage0[el] = (rekey(j, fam_dict(el[0])), rekey(j, fam_dict(el[1])))
        f0comps[so] = stage0
        f1comps[so] = {t: (stage0[t[0]], stage0[t[1]], rekey(j, fam_dict(t[2])))
                       for t in lhs.arr.at(so)}
    return InternalFunctor(lhs, rhs.cat,
                           PresheafMap(lhs.obj, rhs.cat.obj, f0comps),
                           PresheafMap(lhs.arr, rhs.cat.arr, f1comps))
