# services/xmod_core.py
"""
Crossed modules of finite groups and the constructions the localization code is built from.

A crossed module T = (T1, T2, ∂, act) is validated exhaustively on construction:

    equivariance   ∂(act(b, x)) = b·∂(x)·b⁻¹
    Peiffer        act(∂(x), y) = x·y·x⁻¹

Morphisms are pairs (f1, f2) commuting with ∂ and with the actions. Kernels and pullbacks are
computed level by level; cokernels and quotients go through one helper, `_quotient_by`, which builds
the induced boundary and action from coset representatives and then re-checks both (a quotient is
never trusted, it is re-validated).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from services import audit_logger
from services.errors import (
    EquivarianceViolation,
    InducedActionIllDefined,
    KernelNotCentral,
    NotAMorphism,
    NotASubXMod,
    NotNormalSubXMod,
    NotSurjective,
    PeifferViolation,
    SequenceMismatch,
)
from services.group_core import (
    ActionByAutomorphisms,
    FiniteGroup,
    GroupHom,
    Subgroup,
    _frozen,
    action_closure,
    center,
    conjugation_action,
    displacement_subgroup,
    factor_through,
    group_from_table,
    hom_enumeration,
    inner_action,
    isomorphisms,
    normal_closure,
    normal_witness,
    quotient_group,
    subgroup_generated,
    validate_hom,
)


# ---- types ------------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False, repr=False)
class CrossedModule:
    g1: FiniteGroup
    g2: FiniteGroup
    boundary: GroupHom
    action: ActionByAutomorphisms
    name: Optional[str] = None

    @property
    def orders(self) -> Tuple[int, int]:
        return self.g1.order, self.g2.order

    @property
    def order_product(self) -> int:
        return self.g1.order * self.g2.order

    @property
    def is_trivial(self) -> bool:
        return self.orders == (1, 1)

    def act(self, b: int, x: int) -> int:
        return self.action.rows[b][x]

    def __repr__(self) -> str:
        return f"CrossedModule({self.name or '?'}, orders={self.orders})"


@dataclass(frozen=True)
class XModMorphism:
    source: CrossedModule
    target: CrossedModule
    f1: GroupHom
    f2: GroupHom

    @property
    def is_regular_epi(self) -> bool:
        return self.f1.is_surjective and self.f2.is_surjective

    @property
    def is_mono(self) -> bool:
        return self.f1.is_injective and self.f2.is_injective

    @property
    def is_iso(self) -> bool:
        return self.f1.is_bijective and self.f2.is_bijective

    @property
    def is_trivial(self) -> bool:
        return self.f1.is_trivial and self.f2.is_trivial

    def compose(self, first: "XModMorphism") -> "XModMorphism":
        """self ∘ first"""
        return XModMorphism(first.source, self.target, self.f1.compose(first.f1), self.f2.compose(first.f2))

    def inverse(self) -> "XModMorphism":
        return XModMorphism(self.target, self.source, self.f1.inverse(), self.f2.inverse())

    @staticmethod
    def identity(T: CrossedModule) -> "XModMorphism":
        return XModMorphism(T, T, GroupHom.identity(T.g1), GroupHom.identity(T.g2))

    @staticmethod
    def trivial(A: CrossedModule, T: CrossedModule) -> "XModMorphism":
        return XModMorphism(A, T, GroupHom.trivial(A.g1, T.g1), GroupHom.trivial(A.g2, T.g2))

    def __repr__(self) -> str:
        return f"XModMorphism({self.source!r} -> {self.target!r})"


@dataclass(frozen=True)
class NormalityDecision:
    """Outcome of the three-condition normality test; `condition` is 1, 2 or 3 on failure."""
    holds: bool
    condition: Optional[int] = None
    witness: Optional[dict] = None


@dataclass(frozen=True)
class SubXMod:
    ambient: CrossedModule
    s1: Subgroup
    s2: Subgroup

    @property
    def orders(self) -> Tuple[int, int]:
        return self.s1.order, self.s2.order

    @property
    def is_trivial(self) -> bool:
        return self.orders == (1, 1)

    @cached_property
    def as_xmod(self) -> Tuple[CrossedModule, XModMorphism]:
        """The restricted structure as a standalone crossed module, with its inclusion."""
        T = self.ambient
        if self.s1.is_whole and self.s2.is_whole:
            return T, XModMorphism.identity(T)
        H1, i1 = self.s1.as_group
        H2, i2 = self.s2.as_group
        pos1, pos2 = self.s1.index, self.s2.index
        bd = validate_hom(H1, H2, [pos2[T.boundary.image[m]] for m in self.s1.members])
        rows = T.action.rows
        table = [[pos1[rows[b][x]] for x in self.s1.members] for b in self.s2.members]
        X = validate_crossed_module(H1, H2, bd, ActionByAutomorphisms(H2, H1, _frozen(table)))
        return X, XModMorphism(X, T, i1, i2)

    def to_crossed_module(self) -> Tuple[CrossedModule, XModMorphism]:
        return self.as_xmod


@dataclass(frozen=True)
class ExactSequence:
    n: CrossedModule
    t: CrossedModule
    q: CrossedModule
    kappa: XModMorphism
    alpha: XModMorphism


# ---- validation -------------------------------------------------------------------------------

def validate_crossed_module(g1: FiniteGroup, g2: FiniteGroup, boundary: GroupHom,
                            action: ActionByAutomorphisms, name: Optional[str] = None) -> CrossedModule:
    if boundary.source is not g1 or boundary.target is not g2:
        raise NotAMorphism("boundary must map level 1 to level 2", {})
    validate_hom(g1, g2, boundary.image)
    if action.actor is not g2 or action.acted is not g1:
        raise NotAMorphism("action must be level 2 acting on level 1", {})
    action.validate()

    T, bd = action.table, boundary.array
    # ∂(act(b, x)) vs b·∂(x)·b⁻¹
    lhs = bd[T]
    rhs = g2.mul[g2.mul[:, bd], g2.inv[:, None]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        b, x = (int(v) for v in bad[0])
        raise EquivarianceViolation(f"∂(act({b},{x})) != {b}·∂({x})·{b}⁻¹",
                                    {"b": b, "x": x, "b_elem": g2.render(b), "x_elem": g1.render(x)})
    # act(∂(x), y) vs x·y·x⁻¹
    lhs = T[bd]
    rhs = g1.conjugation_table
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        x, y = (int(v) for v in bad[0])
        raise PeifferViolation(f"act(∂({x}),{y}) != {x}·{y}·{x}⁻¹",
                               {"x": x, "y": y, "x_elem": g1.render(x), "y_elem": g1.render(y)})
    return CrossedModule(g1, g2, boundary, action, name)


def validate_morphism(source: CrossedModule, target: CrossedModule,
                      f1: Union[GroupHom, Sequence[int]], f2: Union[GroupHom, Sequence[int]]) -> XModMorphism:
    f1 = validate_hom(source.g1, target.g1, f1.image if isinstance(f1, GroupHom) else f1)
    f2 = validate_hom(source.g2, target.g2, f2.image if isinstance(f2, GroupHom) else f2)
    a1, a2 = f1.array, f2.array
    bad = np.flatnonzero(a2[source.boundary.array] != target.boundary.array[a1])
    if len(bad):
        x = int(bad[0])
        raise NotAMorphism("boundary square does not commute", {"square": "boundary", "x": x})
    bad = np.argwhere(a1[source.action.table] != target.action.table[a2[:, None], a1[None, :]])
    if len(bad):
        b, x = (int(v) for v in bad[0])
        raise NotAMorphism("action square does not commute", {"square": "action", "b": b, "x": x})
    return XModMorphism(source, target, f1, f2)


def validate_subxmod(ambient: CrossedModule, s1: Subgroup, s2: Subgroup) -> SubXMod:
    if s1.ambient is not ambient.g1 or s2.ambient is not ambient.g2:
        raise NotASubXMod("subgroups must live in the ambient levels", {})
    for m in s1.members:
        if ambient.boundary.image[m] not in s2:
            raise NotASubXMod("boundary leaves s2", {"x": m})
    rows = ambient.action.rows
    for b in s2.members:
        for m in s1.members:
            if rows[b][m] not in s1:
                raise NotASubXMod("s2 does not preserve s1", {"b": b, "x": m})
    return SubXMod(ambient, s1, s2)


# ---- X, R, Tr and friends ---------------------------------------------------------------------

@lru_cache(maxsize=None)
def trivial_group() -> FiniteGroup:
    return group_from_table([[0]], name="1")


def functor_X(G: FiniteGroup) -> CrossedModule:
    one = trivial_group()
    return validate_crossed_module(one, G, GroupHom.trivial(one, G), ActionByAutomorphisms.trivial(G, one),
                                   f"X{G.name}" if G.name else None)


def functor_R(G: FiniteGroup) -> CrossedModule:
    return validate_crossed_module(G, G, GroupHom.identity(G), inner_action(G),
                                   f"R{G.name}" if G.name else None)


def functor_Tr(T: CrossedModule) -> FiniteGroup:
    return T.g2


@lru_cache(maxsize=None)
def trivial_xmod() -> CrossedModule:
    one = trivial_group()
    return validate_crossed_module(one, one, GroupHom.identity(one), ActionByAutomorphisms.trivial(one, one), "1")


def normal_inclusion_xmod(M: FiniteGroup, N: Subgroup, name: Optional[str] = None) -> CrossedModule:
    act = conjugation_action(M, N)
    H = act.acted
    return validate_crossed_module(H, M, GroupHom(H, M, N.members), act, name)


def central_extension_xmod(g: GroupHom, name: Optional[str] = None) -> CrossedModule:
    """g: A ↠ B with central kernel; B acts by conjugation through any preimage."""
    A, B = g.source, g.target
    if not g.is_surjective:
        missing = sorted(set(B.elements) - set(g.image))[0]
        raise NotSurjective("central extension needs a surjection", {"missing": missing})
    z = center(A)
    for k in g.kernel().members:
        if k not in z:
            raise KernelNotCentral("kernel element is not central", {"x": k, "x_elem": A.render(k)})
    preimage = [-1] * B.order
    for a in A.elements:
        if preimage[g.image[a]] < 0:
            preimage[g.image[a]] = a
    conj = A.conjugation_table
    table = conj[np.array(preimage, dtype=np.int64)]
    return validate_crossed_module(A, B, g, ActionByAutomorphisms(B, A, _frozen(table)), name)


# ---- normality, kernels, images ---------------------------------------------------------------

def is_normal_subcrossed(N: SubXMod) -> NormalityDecision:
    T = N.ambient
    w = normal_witness(N.s2)
    if w is not None:
        g, n, c = w
        return NormalityDecision(False, 1, {"t2": g, "n2": n, "conjugate": c,
                                            "t2_elem": T.g2.render(g), "n2_elem": T.g2.render(n)})
    rows = T.action.rows
    for t2 in T.g2.elements:
        for n1 in N.s1.members:
            y = rows[t2][n1]
            if y not in N.s1:
                return NormalityDecision(False, 2, {"t2": t2, "n1": n1, "image": y,
                                                    "t2_elem": T.g2.render(t2), "n1_elem": T.g1.render(n1)})
    w3 = displacement_witness(T, N.s2.members, N.s1)
    if w3 is not None:
        return NormalityDecision(False, 3, w3)
    return NormalityDecision(True)


def displacement_witness(T: CrossedModule, actors: Iterable[int], target: Subgroup) -> Optional[dict]:
    """Lexicographically smallest (n2, t1) with act(n2, t1)·t1⁻¹ outside `target`."""
    G1 = T.g1
    rows = T.action.rows
    for n2 in sorted(actors):
        for t1 in G1.elements:
            w = G1.rows[rows[n2][t1]][G1.inverses[t1]]
            if w not in target:
                return {"n2": n2, "t1": t1, "w": w, "n2_elem": T.g2.render(n2),
                        "t1_elem": G1.render(t1), "w_elem": G1.render(w)}
    return None


def kernel(f: XModMorphism) -> Tuple[SubXMod, XModMorphism]:
    sub = SubXMod(f.source, f.f1.kernel(), f.f2.kernel())
    return sub, sub.as_xmod[1]


def image_subxmod(f: XModMorphism, N: SubXMod) -> SubXMod:
    """f(N) inside f.target."""
    return SubXMod(f.target, f.f1.image_of(N.s1.members), f.f2.image_of(N.s2.members))


def is_regular_epi(f: XModMorphism) -> bool:
    return f.is_regular_epi


# ---- quotients --------------------------------------------------------------------------------

def _quotient_by(T: CrossedModule, M1: Subgroup, M2: Subgroup,
                 name: Optional[str] = None) -> Tuple[CrossedModule, XModMorphism]:
    if M1.is_trivial and M2.is_trivial:
        return T, XModMorphism.identity(T)
    Q1, p1 = quotient_group(T.g1, M1)
    Q2, p2 = quotient_group(T.g2, M2)
    boundary = factor_through(p1, p2.compose(T.boundary))

    p1a, p2a = p1.array, p2.array
    rep1 = _first_preimages(p1)
    rep2 = _first_preimages(p2)
    act = T.action.table
    table = p1a[act[rep2[:, None], rep1[None, :]]]
    bad = np.argwhere(p1a[act] != table[p2a[:, None], p1a[None, :]])
    if len(bad):
        b, x = (int(v) for v in bad[0])
        raise InducedActionIllDefined("induced action on the quotient is not well defined", {"b": b, "x": x})
    Q = validate_crossed_module(Q1, Q2, boundary, ActionByAutomorphisms(Q2, Q1, _frozen(table)), name)
    return Q, validate_morphism(T, Q, p1, p2)


def _first_preimages(p: GroupHom) -> np.ndarray:
    reps = [-1] * p.target.order
    for x, y in enumerate(p.image):
        if reps[y] < 0:
            reps[y] = x
    return np.array(reps, dtype=np.int64)


def cokernel_of_images(T: CrossedModule, S1: Iterable[int], S2: Iterable[int],
                       name: Optional[str] = None) -> Tuple[CrossedModule, XModMorphism]:
    """Cokernel of any family of morphisms into T whose joint images are S1 ⊆ T1, S2 ⊆ T2:

        level 2: T2 / normal closure of S2
        level 1: T1 / < (S1)_{T2} ∪ [(S2)_{T2}, T1] >
    """
    M2 = normal_closure(T.g2, S2)
    A = action_closure(T.action, S1)
    B = displacement_subgroup(T.action, M2.members, T.g1.elements)
    M1 = subgroup_generated(T.g1, A.members + B.members)
    product = {T.g1.rows[a][b] for a in A.members for b in B.members}
    if len(product) != M1.order:
        audit_logger.log("XMOD", "cokernel.generated",
                         "denominator set product was not a subgroup; generated closure used",
                         severity="WARN", target=T.name,
                         details={"product": len(product), "generated": M1.order})
    w = normal_witness(M1)
    if w is not None:
        raise InducedActionIllDefined("cokernel denominator is not normal in level 1",
                                      {"g": w[0], "n": w[1], "conjugate": w[2]})
    return _quotient_by(T, M1, M2, name)


def cokernel(f: XModMorphism, name: Optional[str] = None) -> Tuple[CrossedModule, XModMorphism]:
    return cokernel_of_images(f.target, set(f.f1.image), set(f.f2.image), name)


def quotient_xmod(T: CrossedModule, N: SubXMod, name: Optional[str] = None) -> Tuple[CrossedModule, XModMorphism]:
    if N.ambient is not T:
        raise NotNormalSubXMod("SubXMod belongs to another crossed module", {})
    validate_subxmod(T, N.s1, N.s2)
    decision = is_normal_subcrossed(N)
    if not decision.holds:
        raise NotNormalSubXMod(f"normality condition ({decision.condition}) fails",
                               {"condition": decision.condition, **(decision.witness or {})})
    return _quotient_by(T, N.s1, N.s2, name)


# ---- pullbacks --------------------------------------------------------------------------------

def _fiber_product(f: GroupHom, g: GroupHom) -> Tuple[FiniteGroup, GroupHom, GroupHom, dict]:
    A, B = f.source, g.source
    pairs = [(a, b) for a in A.elements for b in B.elements if f.image[a] == g.image[b]]
    index = {p: i for i, p in enumerate(pairs)}
    table = [[index[(A.rows[a][c], B.rows[b][d])] for (c, d) in pairs] for (a, b) in pairs]
    labels = [f"({A.render(a)}, {B.render(b)})" for a, b in pairs]
    P = group_from_table(table, labels=labels)
    return (P, GroupHom(P, A, tuple(a for a, _ in pairs)), GroupHom(P, B, tuple(b for _, b in pairs)), index)


def pullback(f: XModMorphism, g: XModMorphism,
             name: Optional[str] = None) -> Tuple[CrossedModule, XModMorphism, XModMorphism]:
    """T ×_Q Q′ level by level; returns (P, P→T, P→Q′)."""
    if f.target is not g.target:
        raise SequenceMismatch("pullback needs a common target", {})
    T, Qp = f.source, g.source
    P1, a1, b1, idx1 = _fiber_product(f.f1, g.f1)
    P2, a2, b2, idx2 = _fiber_product(f.f2, g.f2)
    boundary = GroupHom(P1, P2, tuple(idx2[(T.boundary.image[a], Qp.boundary.image[b])]
                                      for a, b in zip(a1.image, b1.image)))
    table = [[idx1[(T.act(s, a), Qp.act(t, b))] for a, b in zip(a1.image, b1.image)]
             for s, t in zip(a2.image, b2.image)]
    P = validate_crossed_module(P1, P2, boundary, ActionByAutomorphisms(P2, P1, _frozen(table)), name)
    return P, validate_morphism(P, T, a1, a2), validate_morphism(P, Qp, b1, b2)


# ---- enumeration and isomorphism --------------------------------------------------------------

def _squares_commute(A: CrossedModule, T: CrossedModule, a1: np.ndarray, a2: np.ndarray) -> bool:
    if not np.array_equal(a2[A.boundary.array], T.boundary.array[a1]):
        return False
    return bool(np.array_equal(a1[A.action.table], T.action.table[a2[:, None], a1[None, :]]))


def xmod_hom_enumeration(A: CrossedModule, T: CrossedModule) -> List[XModMorphism]:
    """All morphisms A→T: level-2 homs outermost, level-1 homs inner, both lexicographic."""
    homs1 = hom_enumeration(A.g1, T.g1)
    homs2 = hom_enumeration(A.g2, T.g2)
    out = []
    for f2 in homs2:
        for f1 in homs1:
            if _squares_commute(A, T, f1.array, f2.array):
                out.append(XModMorphism(A, T, f1, f2))
    return out


def is_isomorphic_xmod(A: CrossedModule, B: CrossedModule) -> Optional[XModMorphism]:
    if A.orders != B.orders:
        return None
    isos2 = list(isomorphisms(A.g2, B.g2))
    if not isos2:
        return None
    isos1 = list(isomorphisms(A.g1, B.g1))
    for f2 in isos2:
        for f1 in isos1:
            if _squares_commute(A, B, f1.array, f2.array):
                iso = XModMorphism(A, B, f1, f2)
                back = iso.inverse()
                validate_morphism(B, A, back.f1, back.f2)
                return iso
    return None

