# services/fiberwise.py
"""
Fiberwise localization of short exact sequences 1 → N →κ T →α Q → 1.

For a regular-epi localization L with coaugmentation ℓᴺ: N → LN, put K = κ(ker ℓᴺ) ⊆ T.
A fiberwise localization 1 → LN →j E →p Q → 1 with g: T → E exists exactly when K is a normal
subcrossed module of T, and only the displacement condition

    [κ2(ker ℓ2ᴺ), T1] ⊆ κ1(ker ℓ1ᴺ)

can fail (K2 is always normal in T2 and always T2-stable in T1, see restriction_conditions).
When it holds, E = T / K, g is the projection, j comes from N / ker ℓᴺ ↪ T / K composed with
the explicit isomorphism LN ≅ N / ker ℓᴺ, and p is induced by α.

verify_fiberwise re-checks a constructed diagram from scratch: exactness of the bottom row, both
squares, g being inverted by L, and ker g = K.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple, Union

from services import audit_logger
from services.errors import (
    AlgebraError,
    InvariantBroken,
    NotExactAtT,
    NotInjective,
    NotRegularEpiLocalization,
    NotSurjective,
    SequenceMismatch,
)
from services.functors import (
    FunctorTag,
    LocalizationRun,
    apply,
    apply_morphism,
    is_local,
    precomposition_is_bijective,
    require_nullification,
)
from services.group_core import GroupHom, displacement_subgroup, factor_through, normal_witness
from services.xmod_core import (
    CrossedModule,
    ExactSequence,
    SubXMod,
    XModMorphism,
    displacement_witness,
    image_subxmod,
    is_normal_subcrossed,
    kernel,
    quotient_xmod,
    validate_morphism,
)


# ---- exact sequences --------------------------------------------------------------------------

def _duplicate_pair(f: GroupHom) -> Optional[Tuple[int, int]]:
    first = {}
    for x, y in enumerate(f.image):
        if y in first:
            return first[y], x
        first[y] = x
    return None


def make_exact_sequence(kappa: XModMorphism, alpha: XModMorphism) -> ExactSequence:
    if kappa.target is not alpha.source:
        raise SequenceMismatch("kappa must land where alpha starts", {})
    for level, fk, fa in ((1, kappa.f1, alpha.f1), (2, kappa.f2, alpha.f2)):
        dup = _duplicate_pair(fk)
        if dup is not None:
            raise NotInjective(f"kappa is not injective on level {level}",
                               {"level": level, "x": dup[0], "x2": dup[1]})
        if not fa.is_surjective:
            missing = sorted(set(fa.target.elements) - set(fa.image))[0]
            raise NotSurjective(f"alpha is not surjective on level {level}",
                                {"level": level, "missing": missing, "missing_elem": fa.target.render(missing)})
        img = set(fk.image)
        ker = set(fa.kernel().members)
        if img != ker:
            t = min(img ^ ker)
            raise NotExactAtT(f"image(kappa) != kernel(alpha) on level {level}",
                              {"level": level, "t": t, "t_elem": fk.target.render(t),
                               "in_image": t in img, "in_kernel": t in ker})
    return ExactSequence(kappa.source, kappa.target, alpha.target, kappa, alpha)


# ---- normality --------------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalityVerdict:
    holds: bool
    transported: SubXMod
    displacement_order: int
    target_order: int
    witness: Optional[dict] = None

    @property
    def factors(self) -> Optional[Tuple[int, int]]:
        if self.witness is None:
            return None
        return self.witness["n2"], self.witness["t1"]


def transported_kernel(seq: ExactSequence, run: LocalizationRun) -> SubXMod:
    """κ(ker ℓᴺ) inside T."""
    return image_subxmod(seq.kappa, run.kernel)


def normality_condition(tag: FunctorTag, seq: ExactSequence,
                        run: Optional[LocalizationRun] = None) -> NormalityVerdict:
    run = run or apply(tag, seq.n)
    K = transported_kernel(seq, run)
    T = seq.t
    D = displacement_subgroup(T.action, K.s2.members, T.g1.elements)
    holds = D.issubset(K.s1)
    witness = None if holds else displacement_witness(T, K.s2.members, K.s1)
    if is_normal_subcrossed(K).holds != holds:
        raise InvariantBroken("displacement criterion disagrees with normality of κ(ker ℓ)",
                              {"functor": tag.name, "criterion": holds})
    return NormalityVerdict(holds, K, D.order, K.s1.order, witness)


def restriction_conditions(tag: FunctorTag, seq: ExactSequence,
                           run: Optional[LocalizationRun] = None) -> Tuple[bool, bool]:
    """Conditions (1) κ2(ker ℓ2) ⊴ T2 and (2) T2-stability of κ1(ker ℓ1)."""
    run = run or apply(tag, seq.n)
    K = transported_kernel(seq, run)
    cond1 = normal_witness(K.s2) is None
    rows = seq.t.action.rows
    cond2 = all(rows[t2][n1] in K.s1 for t2 in seq.t.g2.elements for n1 in K.s1.members)
    return cond1, cond2


# ---- construction -----------------------------------------------------------------------------

@dataclass(frozen=True)
class FiberwiseSuccess:
    tag: FunctorTag
    seq: ExactSequence
    run: LocalizationRun
    transported: SubXMod
    e: CrossedModule
    g: XModMorphism
    j: XModMorphism
    p: XModMorphism
    success: bool = field(default=True, init=False)


@dataclass(frozen=True)
class FiberwiseFailure:
    tag: FunctorTag
    seq: ExactSequence
    run: LocalizationRun
    verdict: NormalityVerdict
    success: bool = field(default=False, init=False)

    @property
    def witness(self) -> dict:
        return self.verdict.witness

    @property
    def factors(self) -> Tuple[int, int]:
        return self.verdict.factors


FiberwiseOutcome = Union[FiberwiseSuccess, FiberwiseFailure]


def _seq_label(seq: ExactSequence) -> str:
    return f"{seq.n.name or '?'}->{seq.t.name or '?'}->{seq.q.name or '?'}"


def assemble(tag: FunctorTag, seq: ExactSequence, run: LocalizationRun, sub: SubXMod,
             strict: bool = True) -> FiberwiseSuccess:
    """Build (E, g, j, p) from a normal subcrossed module `sub` of T. With strict=False the maps j
    and p are taken fiber by fiber without checking they are well defined (negative controls)."""
    T = seq.t
    E, g = quotient_xmod(T, sub, f"E[{tag.name}]({T.name})" if T.name else None)

    # LN ≅ N / ker ℓᴺ, computed and checked
    NK, q = quotient_xmod(seq.n, run.kernel)
    phi1 = factor_through(q.f1, run.coaug.f1)
    phi2 = factor_through(q.f2, run.coaug.f2)
    if not (phi1.is_bijective and phi2.is_bijective):
        raise InvariantBroken("N / ker ℓᴺ is not isomorphic to LN", {"functor": tag.name})

    iota1 = factor_through(q.f1, g.f1.compose(seq.kappa.f1), strict)
    iota2 = factor_through(q.f2, g.f2.compose(seq.kappa.f2), strict)
    j1 = iota1.compose(phi1.inverse())
    j2 = iota2.compose(phi2.inverse())
    p1 = factor_through(g.f1, seq.alpha.f1, strict)
    p2 = factor_through(g.f2, seq.alpha.f2, strict)
    if strict:
        j = validate_morphism(run.output, E, j1, j2)
        p = validate_morphism(E, seq.q, p1, p2)
    else:
        j = XModMorphism(run.output, E, j1, j2)
        p = XModMorphism(E, seq.q, p1, p2)
    return FiberwiseSuccess(tag, seq, run, sub, E, g, j, p)


def fiberwise_localize(tag: FunctorTag, seq: ExactSequence) -> FiberwiseOutcome:
    run = apply(tag, seq.n)
    if not run.coaug.is_regular_epi:
        raise NotRegularEpiLocalization(
            f"{tag.name} is not a regular-epi localization on {seq.n.name or 'N'}",
            {"functor": tag.name, "coaug_surjective": [run.coaug.f1.is_surjective, run.coaug.f2.is_surjective]})
    verdict = normality_condition(tag, seq, run)
    if not verdict.holds:
        audit_logger.log_fiberwise(tag.name, _seq_label(seq), False, verdict.witness)
        return FiberwiseFailure(tag, seq, run, verdict)
    outcome = assemble(tag, seq, run, verdict.transported)
    audit_logger.log_fiberwise(tag.name, _seq_label(seq), True, {"e_orders": list(outcome.e.orders)})
    return outcome


# ---- verification -----------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: Optional[dict] = None


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    def verdicts(self) -> dict:
        return {c.name: c.passed for c in self.checks}


def _first_difference(a: Tuple[int, ...], b: Tuple[int, ...]) -> Optional[int]:
    for x, (u, v) in enumerate(zip(a, b)):
        if u != v:
            return x
    return None


def _check_exact(o: FiberwiseSuccess) -> Optional[dict]:
    for level, fj, fp in ((1, o.j.f1, o.p.f1), (2, o.j.f2, o.p.f2)):
        dup = _duplicate_pair(fj)
        if dup is not None:
            return {"level": level, "j_not_injective": list(dup)}
        if not fp.is_surjective:
            return {"level": level, "p_not_surjective": True}
        img, ker = set(fj.image), set(fp.kernel().members)
        if img != ker:
            return {"level": level, "e": min(img ^ ker)}
    return None


def _check_square(left: XModMorphism, right: XModMorphism) -> Optional[dict]:
    for level, a, b in ((1, left.f1, right.f1), (2, left.f2, right.f2)):
        x = _first_difference(a.image, b.image)
        if x is not None:
            return {"level": level, "x": x, "values": [a.image[x], b.image[x]]}
    return None


def _check_l_equivalence(o: FiberwiseSuccess) -> Optional[dict]:
    Lg = apply_morphism(o.tag, o.g)
    if Lg.is_iso:
        return None
    return {"orders": [list(Lg.source.orders), list(Lg.target.orders)],
            "bijective": [Lg.f1.is_bijective, Lg.f2.is_bijective]}


def _check_kernel(o: FiberwiseSuccess) -> Optional[dict]:
    expected = transported_kernel(o.seq, o.run)
    ker, _ = kernel(o.g)
    for level, a, b in ((1, ker.s1, expected.s1), (2, ker.s2, expected.s2)):
        if a.members != b.members:
            diff = sorted(a.member_set ^ b.member_set)
            return {"level": level, "element": diff[0], "kernel_order": a.order, "expected_order": b.order}
    return None


def verify_fiberwise(tag: FunctorTag, seq: ExactSequence, outcome: FiberwiseSuccess,
                     local_objects: Iterable[CrossedModule] = ()) -> VerificationReport:
    o = outcome
    checks = [
        ("exact_bottom_row", lambda: _check_exact(o)),
        ("left_square", lambda: _check_square(o.j.compose(o.run.coaug), o.g.compose(seq.kappa))),
        ("right_square", lambda: _check_square(o.p.compose(o.g), seq.alpha)),
        ("l_equivalence", lambda: _check_l_equivalence(o)),
        ("kernel_matches", lambda: _check_kernel(o)),
    ]
    report = VerificationReport()
    for name, fn in checks:
        try:
            witness = fn()
        except AlgebraError as e:
            witness = e.to_dict()
        report.checks.append(CheckResult(name, witness is None, witness))

    locals_ = [K for K in local_objects if is_local(tag, K)]
    if locals_:
        bad = [K.name or "?" for K in locals_ if not precomposition_is_bijective(o.g, K)]
        report.checks.append(CheckResult("universal_property", not bad,
                                         {"objects": bad} if bad else None))
    if not report.all_passed:
        audit_logger.log("FIBERWISE", "verify", f"{tag.name}: failed {report.failed}",
                         severity="ERROR", target=_seq_label(seq))
    return report


# ---- acyclicity -------------------------------------------------------------------------------

@dataclass(frozen=True)
class AcyclicityReport:
    tag: FunctorTag
    input_orders: Tuple[int, int]
    kernel: CrossedModule
    output: CrossedModule
    steps: int

    @property
    def acyclic(self) -> bool:
        return self.output.is_trivial


def acyclicity_probe(tag: FunctorTag, T: CrossedModule) -> AcyclicityReport:
    require_nullification(tag)
    run = apply(tag, T)
    K, _ = run.kernel.as_xmod
    kr = apply(tag, K)
    return AcyclicityReport(tag, T.orders, K, kr.output, kr.steps)
