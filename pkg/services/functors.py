# services/functors.py
"""
Localization functors on finite crossed modules.

Every functor here except I is a quotient: apply(tag, T) picks a normal subcrossed module
(M1, M2) of T by a closed formula, and the coaugmentation ℓ: T → T/(M1, M2) is the projection.

    ab       (T1 / [T2, T1],                        T2 / [T2, T2])
    nil2     (T1 / <[[T2,T2],T1], [T2,[T2,T1]]>,    T2 / [[T2,T2],T2])
    pxz      (T1 / [T2, T1],                        1)
    pz0      (∂(T1) ↪ T2)   realized as T / (ker ∂, 1)
    c        (1,                                    T2 / ∂(T1))
    i        (T2, T2, id)   with ℓ = (∂, id), the only one that is not level-wise surjective
    nullify  repeated cokernel of the joint evaluation of all A → T until only A → 1 remains

The displayed denominator is always handed to quotient_xmod, so a wrong formula shows up as a
NotNormalSubXMod instead of a silently invalid quotient.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, Optional, Tuple

from services import audit_logger
from services.errors import (
    InvariantBroken,
    MissingNullifier,
    NotANullification,
    NotASubXMod,
    NotNormalSubXMod,
    UnknownFunctor,
)
from services.group_core import (
    Subgroup,
    commutator_subgroup,
    displacement_subgroup,
    factor_through,
    subgroup_generated,
    trivial_subgroup,
    whole,
)
from services.xmod_core import (
    CrossedModule,
    SubXMod,
    XModMorphism,
    cokernel_of_images,
    functor_R,
    kernel,
    quotient_xmod,
    validate_morphism,
    xmod_hom_enumeration,
)

FUNCTOR_NAMES = ("ab", "nil2", "c", "i", "pxz", "pz0", "nullify")
NULLIFICATION_KINDS = frozenset({"pxz", "pz0", "c", "nullify"})


@dataclass(frozen=True)
class FunctorTag:
    kind: str
    nullifier: Optional[CrossedModule] = None

    @property
    def name(self) -> str:
        if self.kind == "nullify":
            return f"nullify[{self.nullifier.name or '?'}]"
        return self.kind

    @property
    def is_nullification(self) -> bool:
        return self.kind in NULLIFICATION_KINDS


AB = FunctorTag("ab")
NIL2 = FunctorTag("nil2")
C = FunctorTag("c")
I = FunctorTag("i")
PXZ = FunctorTag("pxz")
PZ0 = FunctorTag("pz0")

CLOSED_FORM_TAGS = (AB, NIL2, C, I, PXZ, PZ0)


def nullify_by(A: CrossedModule) -> FunctorTag:
    if not isinstance(A, CrossedModule):
        raise MissingNullifier("nullify needs a crossed module as nullifier", {})
    return FunctorTag("nullify", A)


def functor_from_name(name: str, nullifier: Optional[CrossedModule] = None) -> FunctorTag:
    key = (name or "").strip().lower()
    if key not in FUNCTOR_NAMES:
        raise UnknownFunctor(f"unknown functor {name!r}", {"functor": name, "known": list(FUNCTOR_NAMES)})
    if key == "nullify":
        if nullifier is None:
            raise MissingNullifier("functor 'nullify' needs --nullifier", {})
        return nullify_by(nullifier)
    return FunctorTag(key)


@dataclass(frozen=True)
class LocalizationRun:
    tag: FunctorTag
    input: CrossedModule
    output: CrossedModule
    coaug: XModMorphism
    steps: int = 1

    @cached_property
    def kernel(self) -> SubXMod:
        return kernel(self.coaug)[0]


# ---- closed forms -----------------------------------------------------------------------------

def _displacement_all(T: CrossedModule) -> Subgroup:
    return displacement_subgroup(T.action, T.g2.elements, T.g1.elements)


def _ab(T: CrossedModule) -> Tuple[Subgroup, Subgroup]:
    return _displacement_all(T), commutator_subgroup(T.g2)


def _pxz(T: CrossedModule) -> Tuple[Subgroup, Subgroup]:
    return _displacement_all(T), whole(T.g2)


def _pz0(T: CrossedModule) -> Tuple[Subgroup, Subgroup]:
    return T.boundary.kernel(), trivial_subgroup(T.g2)


def _c(T: CrossedModule) -> Tuple[Subgroup, Subgroup]:
    return whole(T.g1), T.boundary.image_subgroup()


def _nil2(T: CrossedModule) -> Tuple[Subgroup, Subgroup]:
    g2c = commutator_subgroup(T.g2)
    gamma3 = commutator_subgroup(T.g2, g2c.members, T.g2.elements)
    inner = _displacement_all(T)
    mixed = displacement_subgroup(T.action, g2c.members, T.g1.elements)
    nested = displacement_subgroup(T.action, T.g2.elements, inner.members)
    return subgroup_generated(T.g1, mixed.members + nested.members), gamma3


_DENOMINATORS: Dict[str, Callable[[CrossedModule], Tuple[Subgroup, Subgroup]]] = {
    "ab": _ab,
    "nil2": _nil2,
    "pxz": _pxz,
    "pz0": _pz0,
    "c": _c,
}


def _output_name(tag: FunctorTag, T: CrossedModule) -> Optional[str]:
    return f"{tag.name}({T.name})" if T.name else None


def _by_formula(tag: FunctorTag, T: CrossedModule) -> Tuple[CrossedModule, XModMorphism]:
    m1, m2 = _DENOMINATORS[tag.kind](T)
    try:
        return quotient_xmod(T, SubXMod(T, m1, m2), _output_name(tag, T))
    except (NotNormalSubXMod, NotASubXMod) as e:
        raise InvariantBroken(f"{tag.name} denominator is not a normal subcrossed module", e.witness)


def _truncate_to_R(tag: FunctorTag, T: CrossedModule) -> Tuple[CrossedModule, XModMorphism]:
    R = functor_R(T.g2)
    return R, validate_morphism(T, R, T.boundary, tuple(T.g2.elements))


def _nullify(tag: FunctorTag, T: CrossedModule) -> Tuple[CrossedModule, XModMorphism, int]:
    A = tag.nullifier
    current, coaug, rounds = T, XModMorphism.identity(T), 0
    while True:
        homs = [h for h in xmod_hom_enumeration(A, current) if not h.is_trivial]
        if not homs:
            break
        s1 = {y for h in homs for y in h.f1.image}
        s2 = {y for h in homs for y in h.f2.image}
        nxt, proj = cokernel_of_images(current, s1, s2)
        if nxt is current:
            raise InvariantBroken("nullification round did not shrink the object",
                                  {"orders": list(current.orders)})
        audit_logger.log("FUNCTOR", "nullify.round",
                         f"{tag.name}: {current.orders} -> {nxt.orders} ({len(homs)} maps)",
                         target=T.name, details={"round": rounds + 1, "maps": len(homs)})
        coaug = proj.compose(coaug)
        current = nxt
        rounds += 1
    if current is not T:
        current = CrossedModule(current.g1, current.g2, current.boundary, current.action, _output_name(tag, T))
        coaug = XModMorphism(T, current, coaug.f1, coaug.f2)
    return current, coaug, max(rounds, 1)


# ---- operations -------------------------------------------------------------------------------

def apply(tag: FunctorTag, T: CrossedModule) -> LocalizationRun:
    with audit_logger.Timer() as t:
        steps = 1
        if tag.kind == "i":
            out, coaug = _truncate_to_R(tag, T)
        elif tag.kind == "nullify":
            out, coaug, steps = _nullify(tag, T)
        elif tag.kind in _DENOMINATORS:
            out, coaug = _by_formula(tag, T)
        else:
            raise UnknownFunctor(f"unknown functor {tag.kind!r}", {"functor": tag.kind})
    audit_logger.log_run(tag.name, T.name or "?", T.orders, out.orders, steps, t.elapsed_ms)
    return LocalizationRun(tag, T, out, coaug, steps)


def apply_morphism(tag: FunctorTag, f: XModMorphism,
                   source_run: Optional[LocalizationRun] = None,
                   target_run: Optional[LocalizationRun] = None) -> XModMorphism:
    """L f: the unique map with L f ∘ ℓ^A = ℓ^B ∘ f."""
    ra = source_run or apply(tag, f.source)
    rb = target_run or apply(tag, f.target)
    if tag.kind == "i":
        return validate_morphism(ra.output, rb.output, f.f2, f.f2)
    g1 = factor_through(ra.coaug.f1, rb.coaug.f1.compose(f.f1))
    g2 = factor_through(ra.coaug.f2, rb.coaug.f2.compose(f.f2))
    return validate_morphism(ra.output, rb.output, g1, g2)


def is_local(tag: FunctorTag, T: CrossedModule) -> bool:
    local = apply(tag, T).coaug.is_iso
    if tag.kind == "nullify":
        null = len(xmod_hom_enumeration(tag.nullifier, T)) == 1
        if null != local:
            raise InvariantBroken("locality and A-nullity disagree",
                                  {"local": local, "null": null, "target": T.name})
    return local


def require_nullification(tag: FunctorTag) -> None:
    if not tag.is_nullification:
        raise NotANullification(f"{tag.name} is not a nullification functor", {"functor": tag.name})


def is_acyclic(tag: FunctorTag, T: CrossedModule) -> bool:
    require_nullification(tag)
    return apply(tag, T).output.is_trivial


def precomposition_is_bijective(f: XModMorphism, K: CrossedModule) -> bool:
    """Hom(f, K): Hom(f.target, K) → Hom(f.source, K), h ↦ h∘f, is a bijection."""
    after = xmod_hom_enumeration(f.target, K)
    before = {(h.f1.image, h.f2.image) for h in xmod_hom_enumeration(f.source, K)}
    composites = [h.compose(f) for h in after]
    images = {(h.f1.image, h.f2.image) for h in composites}
    return len(images) == len(after) and images == before
