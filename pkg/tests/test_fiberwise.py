# tests/test_fiberwise.py
"""
Fiberwise localization of short exact sequences: exactness checks on input, the normality
criterion, construction of E with its verification, Failure witnesses and the acyclicity probe.
Run:
    python tests/test_fiberwise.py
"""
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from services.catalog import get_group, get_sequence, get_xmod, perm_subgroup, sign_map
from services.errors import NotExactAtT, NotInjective, NotRegularEpiLocalization, NotSurjective, SequenceMismatch
from services.fiberwise import (
    FiberwiseFailure,
    FiberwiseSuccess,
    acyclicity_probe,
    assemble,
    fiberwise_localize,
    make_exact_sequence,
    normality_condition,
    restriction_conditions,
    verify_fiberwise,
)
from services.functors import AB, I, PXZ, PZ0, apply
from services.group_core import trivial_subgroup
from services.xmod_core import SubXMod, XModMorphism, is_isomorphic_xmod, validate_morphism


# --- exactness on input ------------------------------------------------------------------

def test_identity_twice_is_not_exact():
    T = get_xmod("RS3")
    one = XModMorphism.identity(T)
    try:
        make_exact_sequence(one, one)
        assert False
    except NotExactAtT as e:
        assert e.witness["level"] == 1

def test_trivial_kappa_is_not_injective():
    T = get_xmod("RS3")
    try:
        make_exact_sequence(XModMorphism.trivial(T, T), XModMorphism.identity(T))
        assert False
    except NotInjective as e:
        assert e.witness["level"] == 1

def test_trivial_alpha_is_not_surjective():
    T = get_xmod("RS3")
    try:
        make_exact_sequence(XModMorphism.trivial(get_xmod("X1"), T), XModMorphism.trivial(T, get_xmod("RZ2")))
        assert False
    except NotSurjective as e:
        assert e.witness["missing"] == 1

def test_mismatched_middle_terms():
    try:
        make_exact_sequence(XModMorphism.identity(get_xmod("RS3")), XModMorphism.identity(get_xmod("RD8")))
        assert False
    except SequenceMismatch:
        pass

def test_sign_map_after_v4_is_not_exact():
    kappa = get_sequence("V4-S4-S3").kappa
    T = kappa.target
    alpha = validate_morphism(T, get_xmod("RZ2"), sign_map(T.g1).image, sign_map(T.g2).image)
    try:
        make_exact_sequence(kappa, alpha)
        assert False
    except NotExactAtT as e:
        assert e.witness["level"] in (1, 2)


# --- success -----------------------------------------------------------------------------

def test_ab_on_a4_s4_z2_gives_s3():
    seq = get_sequence("A4-S4-Z2")
    out = fiberwise_localize(AB, seq)
    assert isinstance(out, FiberwiseSuccess)
    assert out.e.orders == (6, 6)
    assert is_isomorphic_xmod(out.e, get_xmod("RS3")) is not None
    report = verify_fiberwise(AB, seq, out)
    assert len(report.checks) == 5 and report.all_passed

def test_universal_property_against_local_objects():
    seq = get_sequence("A4-S4-Z2")
    out = fiberwise_localize(AB, seq)
    report = verify_fiberwise(AB, seq, out, [get_xmod("RZ2"), get_xmod("RZ3")])
    assert len(report.checks) == 6
    assert report.verdicts()["universal_property"]
    assert report.failed == []

def test_trivial_n_leaves_t_alone():
    out = fiberwise_localize(AB, get_sequence("trivialN(RD8)"))
    assert out.success and out.e.orders == (8, 8)
    assert out.g.is_iso

def test_pz0_normality_holds():
    assert normality_condition(PZ0, get_sequence("A4-S4-Z2")).holds

def test_corrupted_e_fails_verification():
    seq = get_sequence("A4-S4-Z2")
    T = seq.t
    unquotiented = SubXMod(T, trivial_subgroup(T.g1), trivial_subgroup(T.g2))
    broken = assemble(AB, seq, apply(AB, seq.n), unquotiented, strict=False)
    report = verify_fiberwise(AB, seq, broken)
    assert not report.all_passed
    assert {"exact_bottom_row", "kernel_matches"} <= set(report.failed)
    assert "l_equivalence" not in report.failed


# --- failure -----------------------------------------------------------------------------

def test_pxz_on_a4_s4_z2_fails_with_witness():
    seq = get_sequence("A4-S4-Z2")
    out = fiberwise_localize(PXZ, seq)
    assert isinstance(out, FiberwiseFailure)
    assert out.verdict.displacement_order == 12 and out.verdict.target_order == 4
    S4 = seq.t.g1
    A4, V4 = perm_subgroup(S4, get_group("A4")), perm_subgroup(S4, get_group("V4"))
    w = out.witness["w"]
    assert w in A4 and w not in V4
    n2, t1 = out.factors
    assert S4.rows[seq.t.act(n2, t1)][S4.inverses[t1]] == w

def test_restriction_conditions_hold_even_when_normality_fails():
    seq = get_sequence("A4-S4-Z2")
    assert restriction_conditions(AB, seq) == (True, True)
    assert restriction_conditions(PXZ, seq) == (True, True)
    assert not normality_condition(PXZ, seq).holds

def test_i_is_not_regular_epi():
    try:
        fiberwise_localize(I, get_sequence("wholeN(XZ2)"))
        assert False
    except NotRegularEpiLocalization as e:
        assert e.witness["coaug_surjective"] == [False, True]


# --- acyclicity --------------------------------------------------------------------------

def test_pxz_kernel_on_rd8_is_not_acyclic():
    r = acyclicity_probe(PXZ, get_xmod("RD8"))
    assert r.kernel.orders == (2, 8)
    assert r.output.orders == (2, 1)
    assert not r.acyclic

def test_pxz_kernel_on_x_s3_is_acyclic():
    assert acyclicity_probe(PXZ, get_xmod("XS3")).acyclic


if __name__ == "__main__":
    fns = [v for k, v in sorted(globals().items()) if k.startswith("test_") and callable(v)]
    passed = 0
    for fn in fns:
        try:
            fn(); print(f"PASS {fn.__name__}"); passed += 1
        except AssertionError as e:
            print(f"FAIL {fn.__name__}: {e}")
        except Exception as e:
            print(f"ERROR {fn.__name__}: {type(e).__name__}: {e}")
    print(f"\n{passed}/{len(fns)} fiberwise tests passed")
    sys.exit(0 if passed == len(fns) else 1)
