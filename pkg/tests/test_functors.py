# tests/test_functors.py
"""
Localization functors: closed forms on the catalog, the functor on morphisms, locality,
idempotence, the nullification engine and acyclicity. Run:
    python tests/test_functors.py
"""
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from services.catalog import XMOD_KEYS, get_xmod
from services.errors import MissingNullifier, NotANullification, UnknownFunctor
from services.functors import (
    AB,
    C,
    CLOSED_FORM_TAGS,
    I,
    NIL2,
    PXZ,
    PZ0,
    apply,
    apply_morphism,
    functor_from_name,
    is_acyclic,
    is_local,
    nullify_by,
)
from services.group_core import GroupHom, is_isomorphic, quotient_group
from services.xmod_core import XModMorphism, is_isomorphic_xmod, validate_morphism, xmod_hom_enumeration


def _iso(T, key):
    return is_isomorphic_xmod(T, get_xmod(key)) is not None


# --- closed forms ------------------------------------------------------------------------

def test_ab_of_ra4_is_rz3():
    run = apply(AB, get_xmod("RA4"))
    assert run.output.orders == (3, 3)
    assert _iso(run.output, "RZ3")
    assert run.coaug.is_regular_epi

def test_ab_of_rd8():
    assert apply(AB, get_xmod("RD8")).output.orders == (4, 4)

def test_pxz_of_c2_in_d8():
    assert apply(PXZ, get_xmod("C2inD8")).output.orders == (2, 1)

def test_pxz_of_ra4_and_rd8():
    assert apply(PXZ, get_xmod("RA4")).output.orders == (3, 1)
    assert apply(PXZ, get_xmod("RD8")).output.orders == (4, 1)

def test_i_collapses_to_r_of_level_two():
    run = apply(I, get_xmod("XZ2"))
    assert run.output.orders == (2, 2)
    assert _iso(run.output, "RZ2")
    assert not run.coaug.is_regular_epi                   # ℓ1 = ∂ from the trivial group

def test_c_examples():
    assert apply(C, get_xmod("RS4")).output.orders == (1, 1)
    assert apply(C, get_xmod("A4inS4")).output.orders == (1, 2)

def test_c_is_the_cokernel_of_the_boundary():
    for key in XMOD_KEYS:
        T = get_xmod(key)
        out = apply(C, T).output
        assert out.g1.order == 1, key
        Q, _ = quotient_group(T.g2, T.boundary.image_subgroup())
        assert is_isomorphic(out.g2, Q) is not None, key

def test_pz0():
    assert apply(PZ0, get_xmod("RD8")).coaug.is_iso       # ∂ already injective
    assert apply(PZ0, get_xmod("XS3")).coaug.is_iso
    run = apply(PZ0, get_xmod("Z4overZ2-central"))
    assert run.output.orders == (2, 2)
    assert run.output.boundary.is_injective

def test_nil2():
    assert _iso(apply(NIL2, get_xmod("RS3")).output, "RZ2")
    assert apply(NIL2, get_xmod("RD8")).coaug.is_iso      # D8 has class 2

def test_idempotent_on_rs4():
    for tag in CLOSED_FORM_TAGS:
        out = apply(tag, get_xmod("RS4")).output
        assert apply(tag, out).coaug.is_iso, tag.name


# --- names -------------------------------------------------------------------------------

def test_functor_names():
    assert functor_from_name("AB") == AB
    assert functor_from_name(" pz0 ") == PZ0
    try:
        functor_from_name("bogus")
        assert False
    except UnknownFunctor:
        pass
    try:
        functor_from_name("nullify")
        assert False
    except MissingNullifier:
        pass
    assert functor_from_name("nullify", get_xmod("XZ2")).name == "nullify[XZ2]"


# --- nullification -----------------------------------------------------------------------

def test_nullify_x_z4_by_x_z2_takes_two_rounds():
    run = apply(nullify_by(get_xmod("XZ2")), get_xmod("XZ4"))
    assert run.output.is_trivial
    assert run.steps == 2

def test_nullify_without_maps_is_identity():
    tag = nullify_by(get_xmod("XZ3"))
    run = apply(tag, get_xmod("XZ4"))
    assert run.coaug.is_iso and run.steps == 1
    assert is_local(tag, get_xmod("XZ4"))

def test_nullify_rd8_by_rz2():
    run = apply(nullify_by(get_xmod("RZ2")), get_xmod("RD8"))
    assert run.output.is_trivial and run.steps == 1

def test_nullify_leaves_exactly_one_map_from_the_nullifier():
    for akey in ("XZ2", "RZ2", "XZ3"):
        A = get_xmod(akey)
        tag = nullify_by(A)
        for key in XMOD_KEYS:
            T = get_xmod(key)
            if T.order_product > 144:
                continue
            out = apply(tag, T).output
            assert len(xmod_hom_enumeration(A, out)) == 1, (akey, key)

def test_acyclicity():
    assert is_acyclic(PXZ, get_xmod("XS3"))
    assert not is_acyclic(PXZ, get_xmod("C2inD8"))
    assert is_acyclic(C, get_xmod("RS3"))
    try:
        is_acyclic(AB, get_xmod("RS3"))
        assert False
    except NotANullification:
        pass


# --- on morphisms ------------------------------------------------------------------------

def test_c_does_not_preserve_monos():
    A4inS4, RS4 = get_xmod("A4inS4"), get_xmod("RS4")
    f = validate_morphism(A4inS4, RS4, A4inS4.boundary, GroupHom.identity(RS4.g2))
    assert f.is_mono
    Lf = apply_morphism(C, f)
    assert Lf.source.orders == (1, 2) and Lf.target.orders == (1, 1)
    assert not Lf.f2.is_injective

def test_identity_goes_to_identity():
    T = get_xmod("RA4")
    for tag in (AB, PZ0, I):
        assert apply_morphism(tag, XModMorphism.identity(T)).is_iso


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
    print(f"\n{passed}/{len(fns)} functor tests passed")
    sys.exit(0 if passed == len(fns) else 1)
