# services/sweeps.py
"""
Property sweeps over the catalog corpus.

Each sweep walks a deterministic slice of the catalog, counts what it checked (and what it had to
skip), and collects failures as small dicts. Nothing here raises on a failed property: callers read
`SweepResult.passed`. Summaries go to the SUITE audit log.

    iff_sweep                fiberwise_localize succeeds ⇔ normality_condition holds
    idempotence_sweep        ℓ of L(T) is an isomorphism
    regular_epi_sweep        ℓ is level-wise surjective (all tags except i)
    adjunction_sweep         |Hom(XG, T)| = |Hom(G, T2)|,  |Hom(T, RG)| = |Hom(T2, G)|
    cokernel_universal_sweep every β with β∘f = 1 factors uniquely through coker f
    pz0_mono_sweep           P_{Z→0} sends level-wise injective maps to injective maps
    universal_property_sweep Hom(ℓ, K) is a bijection for every local K
    pz0_fiberwise_sweep      P_{Z→0} fiberwise-localizes every catalog sequence
    acyclic_kernel_sweep     success on ker ℓᵀ → T → LT implies ker ℓᵀ is acyclic
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

import settings
from services import audit_logger
from services.catalog import (
    GROUP_KEYS,
    XMOD_KEYS,
    corpus,
    get_group,
    get_sequence,
    get_xmod,
    sequence_keys,
)
from services.errors import NotRegularEpiLocalization
from services.fiberwise import (
    fiberwise_localize,
    normality_condition,
    restriction_conditions,
    verify_fiberwise,
)
from services.functors import (
    CLOSED_FORM_TAGS,
    I,
    PZ0,
    FunctorTag,
    LocalizationRun,
    apply,
    apply_morphism,
    is_acyclic,
    nullify_by,
    precomposition_is_bijective,
)
from services.group_core import displacement_subgroup, hom_enumeration
from services.xmod_core import (
    CrossedModule,
    ExactSequence,
    XModMorphism,
    cokernel,
    functor_R,
    functor_X,
    xmod_hom_enumeration,
)

NULLIFIER_KEYS = ("XZ2", "RZ2", "XZ3")


@dataclass
class SweepResult:
    name: str
    checked: int = 0
    skipped: int = 0
    failures: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.checked > 0

    def to_dict(self) -> dict:
        return {"name": self.name, "checked": self.checked, "skipped": self.skipped,
                "failures": self.failures[:5], "failure_count": len(self.failures)}


def suite_tags() -> List[FunctorTag]:
    """The seven functor shapes, with nullify instantiated for each nullifier."""
    return list(CLOSED_FORM_TAGS) + [nullify_by(get_xmod(k)) for k in NULLIFIER_KEYS]


def _progress(items: Sequence, desc: str):
    return tqdm(items, desc=desc, disable=not settings.current().progress, leave=False)


def _corpus_sequences(max_product: int) -> List[ExactSequence]:
    seen, out = set(), []
    for _, seqs in corpus(max_product):
        for s in seqs:
            if id(s) not in seen:
                seen.add(id(s))
                out.append(s)
    return out


def _corpus_objects(max_product: int) -> List[CrossedModule]:
    return [T for T, _ in corpus(max_product)]


def _seq_name(seq: ExactSequence) -> str:
    return f"{seq.n.name}->{seq.t.name}->{seq.q.name}"


def _finish(result: SweepResult, timer: audit_logger.Timer) -> SweepResult:
    audit_logger.log_sweep(result.name, result.checked, len(result.failures), result.skipped, timer.elapsed_ms)
    return result


# ---- fiberwise --------------------------------------------------------------------------------

def iff_sweep(max_product: int = 576, tags: Optional[List[FunctorTag]] = None,
              verify: bool = False) -> SweepResult:
    """Success ⇔ normality, Failure witnesses checked element-wise, optionally every Success
    re-verified, and conditions (1)/(2) checked on every transported kernel."""
    tags = tags if tags is not None else suite_tags()
    result = SweepResult("iff")
    with audit_logger.Timer() as t:
        for seq in _progress(_corpus_sequences(max_product), "iff"):
            for tag in tags:
                try:
                    outcome = fiberwise_localize(tag, seq)
                except NotRegularEpiLocalization:
                    result.skipped += 1
                    continue
                result.checked += 1
                verdict = normality_condition(tag, seq, outcome.run)
                where = {"functor": tag.name, "sequence": _seq_name(seq)}
                if outcome.success != verdict.holds:
                    result.failures.append({**where, "success": outcome.success, "normal": verdict.holds})
                    continue
                if not all(restriction_conditions(tag, seq, outcome.run)):
                    result.failures.append({**where, "restriction": False})
                if outcome.success:
                    if verify:
                        report = verify_fiberwise(tag, seq, outcome)
                        if not report.all_passed:
                            result.failures.append({**where, "failed_checks": report.failed})
                else:
                    K = verdict.transported
                    w = verdict.witness["w"]
                    D = displacement_subgroup(seq.t.action, K.s2.members, seq.t.g1.elements)
                    if w not in D or w in K.s1:
                        result.failures.append({**where, "bad_witness": w})
    return _finish(result, t)


def pz0_fiberwise_sweep() -> SweepResult:
    result = SweepResult("pz0_fiberwise")
    with audit_logger.Timer() as t:
        for key in _progress(sequence_keys(), "pz0 fiberwise"):
            seq = get_sequence(key)
            result.checked += 1
            outcome = fiberwise_localize(PZ0, seq)
            if not outcome.success:
                result.failures.append({"sequence": key, "witness": outcome.witness})
    return _finish(result, t)


def acyclic_kernel_sweep(max_product: int = 576) -> SweepResult:
    result = SweepResult("acyclic_kernel")
    with audit_logger.Timer() as t:
        for key in XMOD_KEYS:
            if get_xmod(key).order_product > max_product:
                continue
            for tag_name in ("pxz", "pz0", "c"):
                seq = get_sequence(f"kernel-coaug({tag_name},{key})")
                tag = FunctorTag(tag_name)
                if not fiberwise_localize(tag, seq).success:
                    result.skipped += 1
                    continue
                result.checked += 1
                if not is_acyclic(tag, seq.n):
                    result.failures.append({"functor": tag_name, "object": key})
    return _finish(result, t)


# ---- functors ---------------------------------------------------------------------------------

def idempotence_sweep(max_product: int = 576, tags: Optional[List[FunctorTag]] = None) -> SweepResult:
    tags = tags if tags is not None else suite_tags()
    result = SweepResult("idempotence")
    with audit_logger.Timer() as t:
        for T in _progress(_corpus_objects(max_product), "idempotence"):
            for tag in tags:
                result.checked += 1
                out = apply(tag, T).output
                if not apply(tag, out).coaug.is_iso:
                    result.failures.append({"functor": tag.name, "object": T.name})
    return _finish(result, t)


def regular_epi_sweep(max_product: int = 576, tags: Optional[List[FunctorTag]] = None) -> SweepResult:
    tags = [tg for tg in (tags if tags is not None else suite_tags()) if tg != I]
    result = SweepResult("regular_epi")
    with audit_logger.Timer() as t:
        for T in _progress(_corpus_objects(max_product), "regular epi"):
            for tag in tags:
                result.checked += 1
                if not apply(tag, T).coaug.is_regular_epi:
                    result.failures.append({"functor": tag.name, "object": T.name})
    return _finish(result, t)


def pz0_mono_sweep(max_product: int = 576) -> SweepResult:
    result = SweepResult("pz0_mono")
    objects = _corpus_objects(max_product)
    runs: Dict[int, LocalizationRun] = {id(T): apply(PZ0, T) for T in objects}
    with audit_logger.Timer() as t:
        for A in _progress(objects, "pz0 mono"):
            for B in objects:
                for f in xmod_hom_enumeration(A, B):
                    if not f.is_mono:
                        continue
                    result.checked += 1
                    Lf = apply_morphism(PZ0, f, runs[id(A)], runs[id(B)])
                    if not Lf.is_mono:
                        result.failures.append({"source": A.name, "target": B.name,
                                                "f1": list(f.f1.image), "f2": list(f.f2.image)})
    return _finish(result, t)


def universal_property_sweep(max_product: int = 576, tags: Optional[List[FunctorTag]] = None) -> SweepResult:
    """Hom(ℓ, K) is a bijection for every local K in the corpus."""
    tags = tags if tags is not None else suite_tags()
    result = SweepResult("universal_property")
    objects = _corpus_objects(max_product)
    with audit_logger.Timer() as t:
        for tag in _progress(tags, "universal property"):
            local = [K for K in objects if apply(tag, K).coaug.is_iso]
            for T in objects:
                coaug = apply(tag, T).coaug
                for K in local:
                    result.checked += 1
                    if not precomposition_is_bijective(coaug, K):
                        result.failures.append({"functor": tag.name, "object": T.name, "local": K.name})
    return _finish(result, t)


# ---- xmod-core --------------------------------------------------------------------------------

def adjunction_sweep(max_order: int = 24) -> SweepResult:
    result = SweepResult("adjunction")
    groups = [get_group(k) for k in GROUP_KEYS if get_group(k).order <= max_order]
    objects = [get_xmod(k) for k in XMOD_KEYS if get_xmod(k).g2.order <= max_order]
    with audit_logger.Timer() as t:
        for G in _progress(groups, "adjunction"):
            XG, RG = functor_X(G), functor_R(G)
            for T in objects:
                result.checked += 1
                left = (len(xmod_hom_enumeration(XG, T)), len(hom_enumeration(G, T.g2)))
                right = (len(xmod_hom_enumeration(T, RG)), len(hom_enumeration(T.g2, G)))
                if left[0] != left[1] or right[0] != right[1]:
                    result.failures.append({"group": G.name, "object": T.name,
                                            "X_side": list(left), "R_side": list(right)})
    return _finish(result, t)


def cokernel_universal_sweep(max_level: int = 8) -> SweepResult:
    """For f: H→T and β: T→G between small catalog objects: β∘f = 1 ⇔ exactly one β̃ with
    β̃∘proj = β (and none otherwise)."""
    result = SweepResult("cokernel_universal")
    objects = [get_xmod(k) for k in XMOD_KEYS if max(get_xmod(k).orders) <= max_level]
    homs: Dict[Tuple[int, int], List[XModMorphism]] = {}

    def hom(A: CrossedModule, B: CrossedModule) -> List[XModMorphism]:
        key = (id(A), id(B))
        if key not in homs:
            homs[key] = xmod_hom_enumeration(A, B)
        return homs[key]

    with audit_logger.Timer() as t:
        for H in _progress(objects, "cokernel"):
            for T in objects:
                for f in hom(H, T):
                    C, proj = cokernel(f)
                    for G in objects:
                        counts: Dict[tuple, int] = {}
                        for b in xmod_hom_enumeration(C, G):
                            k = b.compose(proj)
                            key = (k.f1.image, k.f2.image)
                            counts[key] = counts.get(key, 0) + 1
                        for beta in hom(T, G):
                            result.checked += 1
                            n = counts.get((beta.f1.image, beta.f2.image), 0)
                            expected = 1 if beta.compose(f).is_trivial else 0
                            if n != expected:
                                result.failures.append({"H": H.name, "T": T.name, "G": G.name,
                                                        "factorizations": n, "expected": expected})
    return _finish(result, t)


def run_all(max_product: int = 576, verify: bool = True) -> List[SweepResult]:
    return [
        iff_sweep(max_product, verify=verify),
        idempotence_sweep(max_product),
        regular_epi_sweep(max_product),
        adjunction_sweep(),
        cokernel_universal_sweep(),
        pz0_mono_sweep(max_product),
        universal_property_sweep(max_product),
        pz0_fiberwise_sweep(),
        acyclic_kernel_sweep(max_product),
    ]
