"""Cones, comma categories, certified universal cones, and the limit functor.

A cone over a diagram is stored two ways at once: as a vertex point plus an
uncurried leg map (one arrow element per shape-object element), and as a
global point of the cone category. The cone category itself is built
directly: its stage-c objects are pairs ``(v, gamma)`` with ``gamma`` a leg
family over every arrow into c at once, which is the same data as the
comma category of the constant-diagram functor against the diagram's name
but never materializes the full functor category. The generic comma
category is also provided and the two constructions are cross-checked in
the tests.

Universality is decided internally: a candidate is terminal when the
object of arrows into it projects isomorphically onto the objects-object.
That single condition is stable under every change of stage, so certified
limits transport along reindexings; ``transport_certificate`` performs the
transport and re-certifies from scratch. Failures are returned as
``Refusal`` values naming the stage and element that obstruct.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .labels import fam, fam_dict
from .ambient import (
    IndexCategory, IndexFunctor, Presheaf, PresheafMap, PreconditionError,
    elements_category, enumerate_maps, family_space, inverse, point_label,
    pullback, terminal,
)
from .core import (
    InternalCategory, InternalFunctor, InternalNatTrans, adjunction_check,
    compose_functors, from_finite_category, identity_functor, initial_cat,
    make_internal_category, nat_is_iso, product_cat, restrict_cat,
    restrict_functor, terminal_cat,
)
from .functor_cat import (
    ExponentialCategory, _arrows_by_ends, _shift, diagonal_functor,
    exponential_cat,
)


@dataclass(eq=True)
class Refusal:
    """A first-class negative answer with the evidence that produced it."""

    kind: str
    details: dict = field(default_factory=dict)


class RefusalError(Exception):
    """Raised when a refusal occurs inside a construction that cannot
    return it as a value; carries the refusal."""

    def __init__(self, refusal: Refusal):
        super().__init__(refusal.kind)
        self.refusal = refusal


@dataclass(eq=True)
class Diagram:
    """A shape, a target, and the functor between them, named as a unit."""

    shape: InternalCategory
    target: InternalCategory
    functor: InternalFunctor

    @staticmethod
    def of(functor: InternalFunctor) -> "Diagram":
        return Diagram(functor.source_cat, functor.target_cat, functor)

    def validate(self) -> list[str]:
        errs = []
        if self.functor.source_cat != self.shape:
            errs.append("functor does not start at the shape")
        if self.functor.target_cat != self.target:
            errs.append("functor does not land in the target")
        return errs + self.functor.validate()


def diagram_functor(dg) -> InternalFunctor:
    """Accept either a Diagram or a bare internal functor."""
    if isinstance(dg, Diagram):
        errs = [e for e in (
            "functor does not start at the shape"
            if dg.functor.source_cat != dg.shape else None,
            "functor does not land in the target"
            if dg.functor.target_cat != dg.target else None) if e]
        if errs:
            raise PreconditionError("; ".join(errs))
        return dg.functor
    return dg


@dataclass(eq=True)
class Cone:
    """A vertex with one leg per shape-object element, uncurried."""

    diagram: InternalFunctor
    vertex: PresheafMap          # terminal -> target.obj
    legs: PresheafMap            # shape.obj -> target.arr

    def validate(self) -> list[str]:
        errs = self.vertex.validate() + self.legs.validate()
        if errs:
            return errs
        dg = self.diagram
        a, d = dg.target_cat, dg.source_cat
        for c in a.base.objects:
            v = self.vertex.components[c]["*"]
            for x in d.obj.at(c):
                leg = self.legs.components[c][x]
                if a.s_at(c, leg) != v:
                    errs.append(f"leg source at {c!r}:{x!r}")
                if a.t_at(c, leg) != dg.on_obj(c, x):
                    errs.append(f"leg target at {c!r}:{x!r}")
            for f in d.arr.at(c):
                lhs = a.comp_at(c, dg.on_arr(c, f),
                                self.legs.components[c][d.s_at(c, f)])
                if lhs != self.legs.components[c][d.t_at(c, f)]:
                    errs.append(f"cone condition at {c!r}:{f!r}")
        return errs


@dataclass(eq=True)
class Cocone:
    """A vertex receiving one leg per shape-object element."""

    diagram: InternalFunctor
    vertex: PresheafMap
    legs: PresheafMap

    def validate(self) -> list[str]:
        errs = self.vertex.validate() + self.legs.validate()
        if errs:
            return errs
        dg = self.diagram
        a, d = dg.target_cat, dg.source_cat
        for c in a.base.objects:
            v = self.vertex.components[c]["*"]
            for x in d.obj.at(c):
                leg = self.legs.components[c][x]
                if a.s_at(c, leg) != dg.on_obj(c, x):
                    errs.append(f"leg source at {c!r}:{x!r}")
                if a.t_at(c, leg) != v:
                    errs.append(f"leg target at {c!r}:{x!r}")
            for f in d.arr.at(c):
                lhs = a.comp_at(c, self.legs.components[c][d.t_at(c, f)],
                                dg.on_arr(c, f))
                if lhs != self.legs.components[c][d.s_at(c, f)]:
                    errs.append(f"cocone condition at {c!r}:{f!r}")
        return errs


# ---------------------------------------------------------------------------
# cone and cocone categories (direct construction)


@dataclass(eq=True)
class ConesCategory:
    """The category object of cones (or cocones) over a diagram.

    Stage-c objects are pairs ``(v, gamma)``: a vertex element and a leg
    family keyed by (arrow into c, shape-object element). Stage-c arrows
    are triples ``(o1, o2, p)`` where ``p`` is a vertex arrow making every
    leg triangle commute. ``to_base`` projects onto the diagram's target.
    """

    kind: str                   # "cones" or "cocones"
    diagram: InternalFunctor
    cat: InternalCategory
    to_base: InternalFunctor

    def decode_point(self, p: PresheafMap) -> Union[Cone, Cocone]:
        """Read a global point of the objects-object back as a cone."""
        dg = self.diagram
        a, d = dg.target_cat, dg.source_cat
        base = a.base
        vcomps, lcomps = {}, {}
        for c in base.objects:
            v, gamma = p.components[c]["*"]
            t = fam_dict(gamma)
            i = base.identity[c]
            vcomps[c] = {"*": v}
            lcomps[c] = {x: t[(i, x)] for x in d.obj.at(c)}
        cls = Cone if self.kind == "cones" else Cocone
        return cls(dg, PresheafMap(terminal(base), a.obj, vcomps),
                   PresheafMap(d.obj, a.arr, lcomps))

    def encode(self, cone: Union[Cone, Cocone]) -> PresheafMap:
        """The global point of the objects-object naming a cone."""
        expected = Cone if self.kind == "cones" else Cocone
        if not isinstance(cone, expected):
            raise PreconditionError(f"expected a {expected.__name__}")
        dg = self.diagram
        base = dg.target_cat.base
        d = dg.source_cat
        comps = {}
        for c in base.objects:
            gamma = fam((((u, x), cone.legs.components[base.src[u]][x])
                         for u in base.arrows_into(c)
                         for x in d.obj.at(base.src[u])))
            comps[c] = {"*": (cone.vertex.components[c]["*"], gamma)}
        return PresheafMap(terminal(base), self.cat.obj, comps)


def _build_cones(dg: InternalFunctor, dual: bool) -> ConesCategory:
    a, d = dg.target_cat, dg.source_cat
    base = a.base
    by_ends = _arrows_by_ends(a)

    obj_carrier = {}
    for c in base.objects:
        elems = []
        for v in a.obj.at(c):

            def allowed(u, x, v=v):
                c2 = base.src[u]
                vres = a.obj.action[u][v]
                tx = dg.on_obj(c2, x)
                ends = (tx, vres) if dual else (vres, tx)
                return by_ends[c2].get(ends, ())

            def check(table, c=c):
                for u in base.arrows_into(c):
                    c2 = base.src[u]
                    for f in d.arr.at(c2):
                        sx, tx = d.s_at(c2, f), d.t_at(c2, f)
                        df = dg.on_arr(c2, f)
                        if dual:
                            ok = table[(u, sx)] == a.comp_at(c2, table[(u, tx)], df)
                        else:
                            ok = table[(u, tx)] == a.comp_at(c2, df, table[(u, sx)])
                        if not ok:
                            return False
                return True

            for gamma in family_space(base, c, d.obj, a.arr,
                                      allowed=allowed, check=check):
                elems.append((v, gamma))
        obj_carrier[c] = tuple(elems)

    arr_carrier = {}
    for c in base.objects:
        triples = []
        for o1 in obj_carrier[c]:
            t1 = fam_dict(o1[1])
            for o2 in obj_carrier[c]:
                t2 = fam_dict(o2[1])
                for p in by_ends[c].get((o1[0], o2[0]), ()):
                    ok = True
                    for (u, x), w in t1.items():
                        c2 = base.src[u]
                        pr = a.arr.action[u][p]
                        if dual:
                            ok = t2[(u, x)] == a.comp_at(c2, pr, w)
                        else:
                            ok = w == a.comp_at(c2, t2[(u, x)], pr)
                        if not ok:
                            break
                    if ok:
                        triples.append((o1, o2, p))
        arr_carrier[c] = tuple(triples)

    def shift_obj(w, o):
        if w == base.identity[base.tgt[w]]:
            return o
        v, gamma = o
        return (a.obj.action[w][v], _shift(base, w, d.obj, fam_dict(gamma)))

    obj_action = {w: {o: shift_obj(w, o) for o in obj_carrier[base.tgt[w]]}
                  for w in base.arrows}
    obj = Presheaf(base, obj_carrier, obj_action)
    arr_action = {w: {(o1, o2, p): (shift_obj(w, o1), shift_obj(w, o2),
                                    a.arr.action[w][p])
                      for (o1, o2, p) in arr_carrier[base.tgt[w]]}
                  for w in base.arrows}
    arr = Presheaf(base, arr_carrier, arr_action)

    source = PresheafMap(arr, obj, {c: {t: t[0] for t in arr.at(c)}
                                    for c in base.objects})
    target = PresheafMap(arr, obj, {c: {t: t[1] for t in arr.at(c)}
                                    for c in base.objects})
    ident = PresheafMap(obj, arr, {c: {o: (o, o, a.id_at(c, o[0]))
                                       for o in obj.at(c)}
                                   for c in base.objects})
    cat = make_internal_category(
        obj, arr, source, target, ident,
        lambda c, g, f: (f[0], g[1], a.comp_at(c, g[2], f[2])))
    to_base = InternalFunctor(
        cat, a,
        PresheafMap(obj, a.obj, {c: {o: o[0] for o in obj.at(c)}
                                 for c in base.objects}),
        PresheafMap(arr, a.arr, {c: {t: t[2] for t in arr.at(c)}
                                 for c in base.objects}))
    return ConesCategory("cocones" if dual else "cones", dg, cat, to_base)


def cones_category(dg) -> ConesCategory:
    """The category object of cones over a diagram."""
    return _build_cones(diagram_functor(dg), dual=False)


def cocones_category(dg) -> ConesCategory:
    """The category object of cocones under a diagram."""
    return _build_cones(diagram_functor(dg), dual=True)


# ---------------------------------------------------------------------------
# generic comma categories


@dataclass(eq=True)
class CommaCategory:
    """Objects are triples (x, y, h : F x -> G y); arrows are commuting
    squares (o1, o2, p, q). Projections and the canonical transformation
    from one composite to the other are bundled."""

    left: InternalFunctor        # F : X -> Z
    right: InternalFunctor       # G : Y -> Z
    cat: InternalCategory
    proj_left: InternalFunctor
    proj_right: InternalFunctor
    square: InternalNatTrans     # F proj_left -> G proj_right

    def mediate(self, s: InternalFunctor, t: InternalFunctor,
                tau: InternalNatTrans) -> InternalFunctor:
        """The unique functor into the comma induced by a lax square."""
        if tau.source != compose_functors(self.left, s) or \
           tau.target != compose_functors(self.right, t):
            raise PreconditionError("transformation does not connect the composites")
        w = s.source_cat
        base = w.base
        f0 = {c: {x: (s.on_obj(c, x), t.on_obj(c, x), tau.at(c, x))
                  for x in w.obj.at(c)} for c in base.objects}
        f1 = {}
        for c in base.objects:
            f1[c] = {k: (f0[c][w.s_at(c, k)], f0[c][w.t_at(c, k)],
                         s.on_arr(c, k), t.on_arr(c, k))
                     for k in w.arr.at(c)}
        return InternalFunctor(w, self.cat,
                               PresheafMap(w.obj, self.cat.obj, f0),
                               PresheafMap(w.arr, self.cat.arr, f1))

    def mediate_2(self, m_one: InternalFunctor, m_two: InternalFunctor,
                  xi: InternalNatTrans, upsilon: InternalNatTrans) -> InternalNatTrans:
        """The unique 2-cell between two mediating functors induced by a
        compatible pair of transformations into the legs."""
        w = m_one.source_cat
        base = w.base
        comps = {}
        for c in base.objects:
            stage = {}
            members = set(self.cat.arr.at(c))
            for x in w.obj.at(c):
                cell = (m_one.on_obj(c, x), m_two.on_obj(c, x),
                        xi.at(c, x), upsilon.at(c, x))
                if cell not in members:
                    raise PreconditionError(
                        f"two-cell data does not commute at {c!r}:{x!r}")
                stage[x] = cell
            comps[c] = stage
        return InternalNatTrans(m_one, m_two,
                                PresheafMap(w.obj, self.cat.arr, comps))


def comma_category(f: InternalFunctor, g: InternalFunctor) -> CommaCategory:
    """The comma category of two functors sharing a target."""
    if f.target_cat != g.target_cat:
        raise PreconditionError("comma factors do not share a target")
    x, y, z = f.source_cat, g.source_cat, f.target_cat
    base = z.base

    obj_carrier = {c: tuple((xo, yo, h)
                            for xo in x.obj.at(c) for yo in y.obj.at(c)
                            for h in z.arr.at(c)
                            if z.s_at(c, h) == f.on_obj(c, xo)
                            and z.t_at(c, h) == g.on_obj(c, yo))
                   for c in base.objects}
    ends_x, ends_y = _arrows_by_ends(x), _arrows_by_ends(y)
    arr_carrier = {}
    for c in base.objects:
        quads = []
        for o1 in obj_carrier[c]:
            for o2 in obj_carrier[c]:
                for p in ends_x[c].get((o1[0], o2[0]), ()):
                    lhs = z.comp_at(c, o2[2], f.on_arr(c, p))
                    for q in ends_y[c].get((o1[1], o2[1]), ()):
                        if lhs == z.comp_at(c, g.on_arr(c, q), o1[2]):
                            quads.append((o1, o2, p, q))
        arr_carrier[c] = tuple(quads)

    def shift_obj(w, o):
        return (x.obj.action[w][o[0]], y.obj.action[w][o[1]],
                z.arr.action[w][o[2]])

    obj_action = {w: {o: shift_obj(w, o) for o in obj_carrier[base.tgt[w]]}
                  for w in base.arrows}
    obj = Presheaf(base, obj_carrier, obj_action)
    arr_action = {w: {(o1, o2, p, q): (shift_obj(w, o1), shift_obj(w, o2),
                                       x.arr.action[w][p], y.arr.action[w][q])
                      for (o1, o2, p, q) in arr_carrier[base.tgt[w]]}
                  for w in base.arrows}
    arr = Presheaf(base, arr_carrier, arr_action)

    source = PresheafMap(arr, obj, {c: {t: t[0] for t in arr.at(c)}
                                    for c in base.objects})
    target = PresheafMap(arr, obj, {c: {t: t[1] for t in arr.at(c)}
                                    for c in base.objects})
    ident = PresheafMap(obj, arr,
                        {c: {o: (o, o, x.id_at(c, o[0]), y.id_at(c, o[1]))
                             for o in obj.at(c)} for c in base.objects})
    cat = make_internal_category(
        obj, arr, source, target, ident,
        lambda c, gq, fq: (fq[0], gq[1], x.comp_at(c, gq[2], fq[2]),
                           y.comp_at(c, gq[3], fq[3])))

    proj_left = InternalFunctor(
        cat, x,
        PresheafMap(obj, x.obj, {c: {o: o[0] for o in obj.at(c)}
                                 for c in base.objects}),
        PresheafMap(arr, x.arr, {c: {t: t[2] for t in arr.at(c)}
                                 for c in base.objects}))
    proj_right = InternalFunctor(
        cat, y,
        PresheafMap(obj, y.obj, {c: {o: o[1] for o in obj.at(c)}
                                 for c in base.objects}),
        PresheafMap(arr, y.arr, {c: {t: t[3] for t in arr.at(c)}
                                 for c in base.objects}))
    square = InternalNatTrans(
        compose_functors(f, proj_left), compose_functors(g, proj_right),
        PresheafMap(obj, z.arr, {c: {o: o[2] for o in obj.at(c)}
                                 for c in base.objects}))
    return CommaCategory(f, g, cat, proj_left, proj_right, square)


# ---------------------------------------------------------------------------
# internal terminality and universal cones


@dataclass(eq=True)
class UniversalCertificate:
    """A certified universal object: the point, the unique-arrow witness,
    and (for limits of diagrams) the detected cone with its category."""

    kind: str                    # "terminal" | "initial" | "limit" | "colimit"
    subject: InternalCategory
    point: PresheafMap           # terminal -> subject.obj
    unique_arrow: PresheafMap    # subject.obj -> subject.arr
    candidate: object = None     # Cone or Cocone when inside a cone category
    diagram: Optional[InternalFunctor] = None
    cones: Optional[ConesCategory] = None

    def vertex_at(self, c):
        return self.point.components[c]["*"]


def _check_point(a: InternalCategory, v: PresheafMap):
    if v.source != terminal(a.base) or v.target != a.obj:
        raise PreconditionError("candidate is not a point of the objects-object")
    errs = v.validate()
    if errs:
        raise PreconditionError(f"candidate point is not natural: {errs}")


def is_internal_terminal(a: InternalCategory, v: PresheafMap):
    """Certify that the point ``v`` is terminal inside the category object.

    The object of arrows into ``v`` must project isomorphically onto the
    objects-object via the source map; the certificate carries the induced
    unique-arrow map. Refusal names the stage and element whose fiber of
    incoming arrows is not a singleton.
    """
    _check_point(a, v)
    cone = pullback(a.target, v)
    harr = cone.legs[0]
    src_proj = harr.then(a.source)
    inv = inverse(src_proj)
    if inv is None:
        for c in a.base.objects:
            vc = v.components[c]["*"]
            for x in a.obj.at(c):
                n = sum(1 for h in a.arr.at(c)
                        if a.s_at(c, h) == x and a.t_at(c, h) == vc)
                if n != 1:
                    return Refusal("not_terminal",
                                   {"stage": c, "element": x, "count": n})
        raise AssertionError("projection not invertible yet all fibers are singletons")
    return UniversalCertificate("terminal", a, v, inv.then(harr))


def is_internal_initial(a: InternalCategory, v: PresheafMap):
    """Dual certificate: arrows out of ``v`` project isomorphically via the
    target map; unique_arrow sends each object to the arrow from ``v``."""
    _check_point(a, v)
    cone = pullback(a.source, v)
    harr = cone.legs[0]
    tgt_proj = harr.then(a.target)
    inv = inverse(tgt_proj)
    if inv is None:
        for c in a.base.objects:
            vc = v.components[c]["*"]
            for x in a.obj.at(c):
                n = sum(1 for h in a.arr.at(c)
                        if a.s_at(c, h) == vc and a.t_at(c, h) == x)
                if n != 1:
                    return Refusal("not_initial",
                                   {"stage": c, "element": x, "count": n})
        raise AssertionError("projection not invertible yet all fibers are singletons")
    return UniversalCertificate("initial", a, v, inv.then(harr))


def _universal(dg: InternalFunctor, dual: bool,
               cns: Optional[ConesCategory] = None):
    if cns is None:
        cns = cocones_category(dg) if dual else cones_category(dg)
    cat = cns.cat
    base = cat.base

    # An internally universal point is stagewise universal, so prefilter
    # each stage down to its stage-terminal (or stage-initial) elements
    # before enumerating candidate points. Without this the candidate
    # space is a product over stages.
    empty_stages, blocked_stages = [], []
    stage_good = {}
    for c in base.objects:
        objs = cat.obj.at(c)
        if not objs:
            empty_stages.append(c)
            stage_good[c] = ()
            continue
        counts = {}
        for t in cat.arr.at(c):
            pair = (t[1], t[0]) if dual else (t[0], t[1])
            counts[pair] = counts.get(pair, 0) + 1
        good, obstructions = [], []
        for o in objs:
            bad = next(((o2, counts.get((o2, o), 0)) for o2 in objs
                        if counts.get((o2, o), 0) != 1), None)
            if bad is None:
                good.append(o)
            else:
                obstructions.append({"candidate": o, "element": bad[0],
                                     "count": bad[1]})
        stage_good[c] = tuple(good)
        if not good:
            blocked_stages.append({"stage": c, "obstructions": obstructions})

    refusal_kind = "no_universal_cocone" if dual else "no_universal_cone"
    if empty_stages or blocked_stages:
        return Refusal(refusal_kind,
                       {"candidates": 0, "failures": [],
                        "empty_stages": empty_stages,
                        "blocked_stages": blocked_stages})

    cands = enumerate_maps(terminal(base), cat.obj,
                           allowed=lambda c, e: stage_good[c])
    decide = is_internal_initial if dual else is_internal_terminal
    failures = []
    for p in cands:
        res = decide(cat, p)
        if isinstance(res, UniversalCertificate):
            return UniversalCertificate(
                "colimit" if dual else "limit", cat, p, res.unique_arrow,
                cns.decode_point(p), dg, cns)
        failures.append({"point": point_label(p), **res.details})
    return Refusal(refusal_kind,
                   {"candidates": len(cands), "failures": failures,
                    "empty_stages": [], "blocked_stages": []})


def universal_cone(dg, cns: Optional[ConesCategory] = None):
    """Search the cone category for an internally terminal cone."""
    return _universal(diagram_functor(dg), dual=False, cns=cns)


def universal_cocone(dg, cns: Optional[ConesCategory] = None):
    """Search the cocone category for an internally initial cocone."""
    return _universal(diagram_functor(dg), dual=True, cns=cns)


def connecting_iso(cert_a: UniversalCertificate,
                   cert_b: UniversalCertificate) -> PresheafMap:
    """The unique isomorphism from one certified universal point to another
    over the same subject, as a point of the arrows-object.

    Uniqueness needs no extra search: each certificate counts exactly one
    arrow from (or to) every object, so the connecting arrow below is the
    only one, and the two composites are forced to be identities.
    """
    if cert_a.subject != cert_b.subject:
        raise PreconditionError("certificates live in different categories")
    terminal_like = ("terminal", "limit")
    if (cert_a.kind in terminal_like) != (cert_b.kind in terminal_like):
        raise PreconditionError("certificates have opposite polarity")
    cat = cert_a.subject
    if cert_a.kind in terminal_like:
        fwd = cert_a.point.then(cert_b.unique_arrow)
        bwd = cert_b.point.then(cert_a.unique_arrow)
    else:
        fwd = cert_b.point.then(cert_a.unique_arrow)
        bwd = cert_a.point.then(cert_b.unique_arrow)
    for c in cat.base.objects:
        f = fwd.components[c]["*"]
        b = bwd.components[c]["*"]
        oa = cert_a.point.components[c]["*"]
        ob = cert_b.point.components[c]["*"]
        assert cat.comp_at(c, b, f) == cat.id_at(c, oa)
        assert cat.comp_at(c, f, b) == cat.id_at(c, ob)
    return fwd


def default_provider(dg: InternalFunctor) -> UniversalCertificate:
    """Limit provider backed by exhaustive universal-cone search."""
    res = universal_cone(dg)
    if isinstance(res, Refusal):
        raise RefusalError(res)
    return res


def indexed_cone_factorization(family: PresheafMap,
                               cert: UniversalCertificate) -> PresheafMap:
    """Factor a whole family of cones through a certified limit at once.

    ``family`` maps an indexing presheaf into the cone category's
    objects-object; the result maps it to the arrow elements mediating
    each member into the limit cone.
    """
    if cert.cones is None or cert.kind not in ("limit", "colimit"):
        raise PreconditionError("certificate does not carry a cone category")
    if family.target != cert.subject.obj:
        raise PreconditionError("family does not land in the cone category")
    errs = family.validate()
    if errs:
        raise PreconditionError(f"family is not a natural family of cones: {errs}")
    a = cert.cones.diagram.target_cat
    mediator = family.then(cert.unique_arrow).then(cert.cones.to_base.f1)
    ends = mediator.then(a.source if cert.kind == "limit" else a.target)
    vertices = family.then(cert.cones.to_base.f0)
    assert ends == vertices, "mediator does not start at the family's vertices"
    return mediator


# ---------------------------------------------------------------------------
# certificate transport


def reindex_diagram(q: IndexFunctor, dg) -> InternalFunctor:
    """Pull a diagram back along an index functor, shape and target alike."""
    dg = diagram_functor(dg)
    return restrict_functor(q, dg, restrict_cat(q, dg.source_cat),
                            restrict_cat(q, dg.target_cat))


def transport_cone_point(cert: UniversalCertificate, q: IndexFunctor,
                         cns2: ConesCategory) -> PresheafMap:
    """Reindex the certified cone's point along ``q`` into a rebuilt cone
    category over the new base."""
    shape2 = cns2.diagram.source_cat
    comps = {}
    for so in q.source.objects:
        v, gamma = cert.point.components[q.on_obj[so]]["*"]
        t = fam_dict(gamma)
        newfam = fam((((w, x), t[(q.on_arr[w], x)])
                      for w in q.source.arrows_into(so)
                      for x in shape2.obj.at(q.source.src[w])))
        comps[so] = {"*": (v, newfam)}
    return PresheafMap(terminal(q.source), cns2.cat.obj, comps)


def transport_certificate(cert: UniversalCertificate, q: IndexFunctor,
                          dg2: Optional[InternalFunctor] = None,
                          cns2: Optional[ConesCategory] = None):
    """Reindex a certified universal cone along an index functor and
    re-certify it from scratch over the new base.

    Returns a fresh certificate, or a Refusal if the transported cone is
    not universal over the new base (which would witness an instability).
    """
    dual = cert.kind == "colimit"
    if dg2 is None:
        dg2 = reindex_diagram(q, cert.diagram)
    if cns2 is None:
        cns2 = cocones_category(dg2) if dual else cones_category(dg2)
    p2 = transport_cone_point(cert, q, cns2)
    decide = is_internal_initial if dual else is_internal_terminal
    res = decide(cns2.cat, p2)
    if isinstance(res, Refusal):
        return res
    return UniversalCertificate(cert.kind, cns2.cat, p2, res.unique_arrow,
                                cns2.decode_point(p2), dg2, cns2)


# ---------------------------------------------------------------------------
# the limit functor


@dataclass
class LimitFunctorResult:
    """The right adjoint to the constant-diagram functor for one shape,
    with the verified adjunction data."""

    functor: InternalFunctor         # functor category -> target
    diagonal: InternalFunctor
    unit: InternalNatTrans
    counit: InternalNatTrans
    expo: ExponentialCategory
    unit_is_iso: bool
    certificate: UniversalCertificate


def _functor_space_diagram(e: ExponentialCategory):
    """The tautological diagram over the elements of the functor space:
    the stage (c, F) sees the functor F itself, evaluated at identities."""
    a, shape = e.cod, e.dom
    base = a.base
    site, proj = elements_category(e.cat.obj)
    sh = restrict_cat(proj, shape)
    am = restrict_cat(proj, a)
    f0, f1 = {}, {}
    for so in site.objects:
        c, el = so
        i = base.identity[c]
        t0, t1 = fam_dict(el[0]), fam_dict(el[1])
        f0[so] = {d: t0[(i, d)] for d in shape.obj.at(c)}
        f1[so] = {h: t1[(i, h)] for h in shape.arr.at(c)}
    eps = InternalFunctor(sh, am, PresheafMap(sh.obj, am.obj, f0),
                          PresheafMap(sh.arr, am.arr, f1))
    return site, proj, eps


def limit_functor(a: InternalCategory, shape: InternalCategory,
                  provider: Optional[Callable] = None,
                  expo: Optional[ExponentialCategory] = None) -> LimitFunctorResult:
    """Construct the right adjoint to the constant-diagram functor.

    The object part comes from one certified universal cone over the
    elements of the whole functor space; the arrow part is mediated
    against the transport of that certificate along the target-of-a-
    transformation projection. Both triangle identities are verified
    exactly before returning.
    """
    provider = default_provider if provider is None else provider
    e = exponential_cat(shape, a) if expo is None else expo
    base = a.base
    site_f, _, eps = _functor_space_diagram(e)
    try:
        cert = provider(eps)
    except RefusalError as err:
        err.refusal.details.setdefault("during", "limit functor: functor-space diagram")
        raise

    lim0 = {c: {el: cert.point.components[(c, el)]["*"][0]
                for el in e.cat.obj.at(c)} for c in base.objects}

    # Arrow part: transport the certificate along both projections from the
    # elements of the transformation space, then mediate the composite cone.
    site_n, proj_n = elements_category(e.cat.arr)
    sh_n = restrict_cat(proj_n, shape)
    am_n = restrict_cat(proj_n, a)
    to_src = IndexFunctor(site_n, site_f,
                          {so: (so[0], so[1][0]) for so in site_n.objects},
                          {w: (w[0], w[1][0]) for w in site_n.arrows})
    to_tgt = IndexFunctor(site_n, site_f,
                          {so: (so[0], so[1][1]) for so in site_n.objects},
                          {w: (w[0], w[1][1]) for w in site_n.arrows})
    eps_s = restrict_functor(to_src, eps, sh_n, am_n)
    eps_t = restrict_functor(to_tgt, eps, sh_n, am_n)
    cns_s = cones_category(eps_s)
    cns_t = cones_category(eps_t)
    cert_s = transport_certificate(cert, to_src, eps_s, cns_s)
    cert_t = transport_certificate(cert, to_tgt, eps_t, cns_t)
    for moved in (cert_s, cert_t):
        if isinstance(moved, Refusal):
            raise RefusalError(Refusal("transport_failed", {
                "during": "limit functor: arrow part", **moved.details}))

    pi2 = {}
    for so in site_n.objects:
        c, t_el = so
        talpha = fam_dict(t_el[2])
        v_s, gamma_s = cert_s.point.components[so]["*"]
        ts = fam_dict(gamma_s)
        newfam = fam((((w, d),
                       a.comp_at(site_n.src[w][0], talpha[(w[0], d)], ts[(w, d)]))
                      for w in site_n.arrows_into(so)
                      for d in shape.obj.at(site_n.src[w][0])))
        pi2[so] = {"*": (v_s, newfam)}
    pi2_point = PresheafMap(terminal(site_n), cns_t.cat.obj, pi2)
    med = pi2_point.then(cert_t.unique_arrow).then(cns_t.to_base.f1)
    lim1 = {c: {t_el: med.components[(c, t_el)]["*"]
                for t_el in e.cat.arr.at(c)} for c in base.objects}
    lim_fn = InternalFunctor(e.cat, a,
                             PresheafMap(e.cat.obj, a.obj, lim0),
                             PresheafMap(e.cat.arr, a.arr, lim1))

    delta = diagonal_functor(a, shape, expo=e)

    # Unit: mediate the identity cone on each object through the
    # certificate transported along the constant-diagram assignment.
    site_a, proj_a = elements_category(a.obj)
    sh_a = restrict_cat(proj_a, shape)
    am_a = restrict_cat(proj_a, a)
    to_diag = IndexFunctor(
        site_a, site_f,
        {so: (so[0], delta.f0.components[so[0]][so[1]]) for so in site_a.objects},
        {w: (w[0], delta.f0.components[base.tgt[w[0]]][w[1]]) for w in site_a.arrows})
    eps_d = restrict_functor(to_diag, eps, sh_a, am_a)
    cns_d = cones_category(eps_d)
    cert_d = transport_certificate(cert, to_diag, eps_d, cns_d)
    if isinstance(cert_d, Refusal):
        raise RefusalError(Refusal("transport_failed", {
            "during": "limit functor: unit", **cert_d.details}))
    idc = {}
    for so in site_a.objects:
        c, x = so
        newfam = fam((((w, d),
                       a.id_at(site_a.src[w][0], a.obj.action[w[0]][x]))
                      for w in site_a.arrows_into(so)
                      for d in shape.obj.at(site_a.src[w][0])))
        idc[so] = {"*": (x, newfam)}
    id_point = PresheafMap(terminal(site_a), cns_d.cat.obj, idc)
    eta_map = id_point.then(cert_d.unique_arrow).then(cns_d.to_base.f1)
    unit = InternalNatTrans(
        identity_functor(a), compose_functors(lim_fn, delta),
        PresheafMap(a.obj, a.arr,
                    {c: {x: eta_map.components[(c, x)]["*"] for x in a.obj.at(c)}
                     for c in base.objects}))

    # Counit: the universal cone itself, one transformation element per
    # functor element.
    cou = {}
    for c in base.objects:
        stage = {}
        for el in e.cat.obj.at(c):
            _, gamma = cert.point.components[(c, el)]["*"]
            t = fam_dict(gamma)
            alpha = fam((((u, d), t[((u, el), d)])
                         for u in base.arrows_into(c)
                         for d in shape.obj.at(base.src[u])))
            stage[el] = (delta.f0.components[c][lim0[c][el]], el, alpha)
        cou[c] = stage
    counit = InternalNatTrans(
        compose_functors(delta, lim_fn), identity_functor(e.cat),
        PresheafMap(e.cat.obj, e.cat.arr, cou))

    errs = adjunction_check(delta, lim_fn, unit, counit)
    assert not errs, errs
    return LimitFunctorResult(lim_fn, delta, unit, counit, e,
                              nat_is_iso(unit), cert)


# ---------------------------------------------------------------------------
# special shapes and special right adjoints


def shape_two(base: IndexCategory) -> InternalCategory:
    """The discrete two-object shape."""
    return from_finite_category(base, IndexCategory.discrete(("0", "1")))


def shape_parallel_pair(base: IndexCategory) -> InternalCategory:
    """Two objects joined by two parallel non-identity arrows."""
    fin = IndexCategory(
        ("0", "1"), ("id_0", "id_1", "one", "two"),
        {"id_0": "0", "id_1": "1", "one": "0", "two": "0"},
        {"id_0": "0", "id_1": "1", "one": "1", "two": "1"},
        {"0": "id_0", "1": "id_1"},
        {("id_0", "id_0"): "id_0", ("id_1", "id_1"): "id_1",
         ("one", "id_0"): "one", ("id_1", "one"): "one",
         ("two", "id_0"): "two", ("id_1", "two"): "two"})
    return from_finite_category(base, fin)


def parallel_arrows_category(a: InternalCategory):
    """The category object of parallel arrow pairs in ``a``.

    Objects are pairs (f, g) sharing endpoints; arrows are endpoint pairs
    (h0, h1) commuting with both. Returns the category and the functor
    sending each object of ``a`` to its doubled identity pair.
    """
    base = a.base
    obj_carrier = {c: tuple((f, g)
                            for f in a.arr.at(c) for g in a.arr.at(c)
                            if a.s_at(c, f) == a.s_at(c, g)
                            and a.t_at(c, f) == a.t_at(c, g))
                   for c in base.objects}
    arr_carrier = {}
    for c in base.objects:
        quads = []
        for o1 in obj_carrier[c]:
            for o2 in obj_carrier[c]:
                for h0 in a.arr.at(c):
                    if a.s_at(c, h0) != a.s_at(c, o1[0]) or \
                       a.t_at(c, h0) != a.s_at(c, o2[0]):
                        continue
                    for h1 in a.arr.at(c):
                        if a.s_at(c, h1) != a.t_at(c, o1[0]) or \
                           a.t_at(c, h1) != a.t_at(c, o2[0]):
                            continue
                        if a.comp_at(c, h1, o1[0]) == a.comp_at(c, o2[0], h0) \
                           and a.comp_at(c, h1, o1[1]) == a.comp_at(c, o2[1], h0):
                            quads.append((o1, o2, h0, h1))
        arr_carrier[c] = tuple(quads)

    def shift_obj(w, o):
        return (a.arr.action[w][o[0]], a.arr.action[w][o[1]])

    obj_action = {w: {o: shift_obj(w, o) for o in obj_carrier[base.tgt[w]]}
                  for w in base.arrows}
    obj = Presheaf(base, obj_carrier, obj_action)
    arr_action = {w: {(o1, o2, h0, h1): (shift_obj(w, o1), shift_obj(w, o2),
                                         a.arr.action[w][h0], a.arr.action[w][h1])
                      for (o1, o2, h0, h1) in arr_carrier[base.tgt[w]]}
                  for w in base.arrows}
    arr = Presheaf(base, arr_carrier, arr_action)
    source = PresheafMap(arr, obj, {c: {t: t[0] for t in arr.at(c)}
                                    for c in base.objects})
    target = PresheafMap(arr, obj, {c: {t: t[1] for t in arr.at(c)}
                                    for c in base.objects})
    ident = PresheafMap(obj, arr,
                        {c: {o: (o, o, a.id_at(c, a.s_at(c, o[0])),
                                 a.id_at(c, a.t_at(c, o[0])))
                             for o in obj.at(c)} for c in base.objects})
    par = make_internal_category(
        obj, arr, source, target, ident,
        lambda c, g, f: (f[0], g[1], a.comp_at(c, g[2], f[2]),
                         a.comp_at(c, g[3], f[3])))
    dbl0 = {c: {x: (a.id_at(c, x), a.id_at(c, x)) for x in a.obj.at(c)}
            for c in base.objects}
    dbl1 = {c: {h: (dbl0[c][a.s_at(c, h)], dbl0[c][a.t_at(c, h)], h, h)
                for h in a.arr.at(c)} for c in base.objects}
    doubled = InternalFunctor(a, par,
                              PresheafMap(a.obj, obj, dbl0),
                              PresheafMap(a.arr, arr, dbl1))
    return par, doubled


@dataclass
class SpecialAdjoint:
    """A right adjoint for one of the special limit notions, certified by
    exact triangle identities, together with the shape-reduction data."""

    kind: str
    direct_cat: InternalCategory
    to_direct: InternalFunctor
    right: InternalFunctor
    unit: InternalNatTrans
    counit: InternalNatTrans
    comparison: InternalFunctor      # direct_cat -> functor category
    via_shape: LimitFunctorResult


def _special_setup(a: InternalCategory, kind: str):
    base = a.base
    if kind == "terminal":
        shape = initial_cat(base)
        direct = terminal_cat(base)
        to_direct = InternalFunctor(
            a, direct,
            PresheafMap(a.obj, direct.obj,
                        {c: {x: "*" for x in a.obj.at(c)} for c in base.objects}),
            PresheafMap(a.arr, direct.arr,
                        {c: {h: "*" for h in a.arr.at(c)} for c in base.objects}))
    elif kind == "binary_product":
        shape = shape_two(base)
        direct = product_cat(a, a)
        to_direct = InternalFunctor(
            a, direct,
            PresheafMap(a.obj, direct.obj,
                        {c: {x: (x, x) for x in a.obj.at(c)} for c in base.objects}),
            PresheafMap(a.arr, direct.arr,
                        {c: {h: (h, h) for h in a.arr.at(c)} for c in base.objects}))
    elif kind == "equalizer":
        shape = shape_parallel_pair(base)
        direct, to_direct = parallel_arrows_category(a)
    else:
        raise PreconditionError(f"unknown special limit kind {kind!r}")
    return shape, direct, to_direct


def _special_comparison(a: InternalCategory, kind: str,
                        direct: InternalCategory,
                        e: ExponentialCategory) -> InternalFunctor:
    """The canonical identification of the direct target with the functor
    category over the corresponding shape."""
    base = a.base

    def psi0(c, o):
        ins = base.arrows_into(c)
        if kind == "terminal":
            return (fam(()), fam(()))
        if kind == "binary_product":
            x, y = o
            pick = {"0": x, "1": y}
            phi0 = fam((((u, d), a.obj.action[u][pick[d]])
                        for u in ins for d in ("0", "1")))
            phi1 = fam((((u, ("id", d)),
                         a.id_at(base.src[u], a.obj.action[u][pick[d]]))
                        for u in ins for d in ("0", "1")))
            return (phi0, phi1)
        f, g = o
        sx, tx = a.s_at(c, f), a.t_at(c, f)
        phi0 = fam((((u, d),
                     a.obj.action[u][sx if d == "0" else tx])
                    for u in ins for d in ("0", "1")))
        parts = {}
        for u in ins:
            c2 = base.src[u]
            parts[(u, "id_0")] = a.id_at(c2, a.obj.action[u][sx])
            parts[(u, "id_1")] = a.id_at(c2, a.obj.action[u][tx])
            parts[(u, "one")] = a.arr.action[u][f]
            parts[(u, "two")] = a.arr.action[u][g]
        return (phi0, fam(parts.items()))

    def psi1(c, t):
        ins = base.arrows_into(c)
        if kind == "terminal":
            src = tgt = psi0(c, "*")
            return (src, tgt, fam(()))
        if kind == "binary_product":
            p, q = t
            pick = {"0": p, "1": q}
            alpha = fam((((u, d), a.arr.action[u][pick[d]])
                         for u in ins for d in ("0", "1")))
            s_o = (a.s_at(c, p), a.s_at(c, q))
            t_o = (a.t_at(c, p), a.t_at(c, q))
            return (psi0(c, s_o), psi0(c, t_o), alpha)
        o1, o2, h0, h1 = t
        pick = {"0": h0, "1": h1}
        alpha = fam((((u, d), a.arr.action[u][pick[d]])
                     for u in ins for d in ("0", "1")))
        return (psi0(c, o1), psi0(c, o2), alpha)

    f0 = {c: {o: psi0(c, o) for o in direct.obj.at(c)} for c in base.objects}
    f1 = {c: {t: psi1(c, t) for t in direct.arr.at(c)} for c in base.objects}
    return InternalFunctor(direct, e.cat,
                           PresheafMap(direct.obj, e.cat.obj, f0),
                           PresheafMap(direct.arr, e.cat.arr, f1))


def _decode_special_stage(a: InternalCategory, kind: str, stage):
    """Name the witness object at a site stage of the functor space."""
    c, el = stage
    if kind == "terminal":
        return "*"
    i = a.base.identity[c]
    if kind == "binary_product":
        t0 = fam_dict(el[0])
        return (t0[(i, "0")], t0[(i, "1")])
    t1 = fam_dict(el[1])
    return (t1[(i, "one")], t1[(i, "two")])


def special_right_adjoint(a: InternalCategory, kind: str,
                          provider: Optional[Callable] = None):
    """A right adjoint to the terminal/product/equalizer comparison functor,
    built through the limit functor over the matching shape.

    Returns a SpecialAdjoint, or a Refusal naming a witness object that
    lacks its universal arrow.
    """
    shape, direct, to_direct = _special_setup(a, kind)
    try:
        lf = limit_functor(a, shape, provider=provider)
    except RefusalError as err:
        details = dict(err.refusal.details)
        witness = None
        stages = details.get("empty_stages") or \
            [b["stage"] for b in details.get("blocked_stages", [])] or \
            [f.get("stage") for f in details.get("failures", []) if f.get("stage")]
        if stages:
            witness = _decode_special_stage(a, kind, stages[0])
        return Refusal("no_right_adjoint",
                       {"kind": kind, "witness": witness,
                        "cause": err.refusal.kind, "cause_details": details})
    psi = _special_comparison(a, kind, direct, lf.expo)
    assert compose_functors(psi, to_direct) == lf.diagonal
    inv0, inv1 = inverse(psi.f0), inverse(psi.f1)
    assert inv0 is not None and inv1 is not None, "comparison must be invertible"
    right = compose_functors(lf.functor, psi)
    unit = InternalNatTrans(identity_functor(a),
                            compose_functors(right, to_direct),
                            lf.unit.component)
    counit = InternalNatTrans(compose_functors(to_direct, right),
                              identity_functor(direct),
                              psi.f0.then(lf.counit.component).then(inv1))
    errs = adjunction_check(to_direct, right, unit, counit)
    assert not errs, errs
    return SpecialAdjoint(kind, direct, to_direct, right, unit, counit,
                          psi, lf)
