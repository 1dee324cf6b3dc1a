# tests/test_catalog.py
"""
Built-in groups, crossed modules and exact sequences: orders of every key, sequence order in
the corpus, the order-product bound and isomorphism labels. Run:
    python tests/test_catalog.py
"""
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

import settings
from services.catalog import (
    GROUP_KEYS,
    XMOD_KEYS,
    corpus,
    get_group,
    get_sequence,
    get_xmod,
    group_label,
    sequence_keys,
    sequence_keys_for,
    xmod_label,
)
from services.errors import GroupTooLarge, UnknownKey
from services.functors import AB, apply
from services.xmod_core import is_isomorphic_xmod

EXPECTED_ORDERS = {
    "X1": (1, 1), "XZ2": (1, 2), "XZ3": (1, 3), "XZ4": (1, 4), "XS3": (1, 6),
    "RZ2": (2, 2), "RZ3": (3, 3), "RV4": (4, 4), "RS3": (6, 6), "RD8": (8, 8),
    "RA4": (12, 12), "RS4": (24, 24),
    "C2inD8": (2, 8), "V4inA4": (4, 12), "V4inS4": (4, 24), "A4inS4": (12, 24),
    "Z4overZ2-central": (4, 2),
}


# --- objects -----------------------------------------------------------------------------

def test_every_xmod_key_has_expected_orders():
    assert set(EXPECTED_ORDERS) == set(XMOD_KEYS)
    for key, orders in EXPECTED_ORDERS.items():
        assert get_xmod(key).orders == orders, key

def test_group_orders():
    orders = {k: get_group(k).order for k in GROUP_KEYS}
    assert orders == {"trivial": 1, "Z2": 2, "Z3": 3, "Z4": 4, "Z6": 6, "V4": 4, "S3": 6,
                      "D8": 8, "A4": 12, "S4": 24, "C2-in-D8-witness": 2}

def test_lookups_are_cached():
    assert get_xmod("RS4") is get_xmod("RS4")
    assert get_sequence("A4-S4-Z2") is get_sequence("A4-S4-Z2")

def test_unknown_keys():
    for lookup, key in ((get_group, "Q8"), (get_xmod, "RQ8"), (get_sequence, "S4-S4"),
                        (get_sequence, "kernel-coaug(i,RS3)")):
        try:
            lookup(key)
            assert False, key
        except UnknownKey:
            pass


# --- sequences ---------------------------------------------------------------------------

def test_fixed_sequences():
    assert get_sequence("A4-S4-Z2").q.orders == (2, 2)
    assert is_isomorphic_xmod(get_sequence("V4-S4-S3").q, get_xmod("RS3")) is not None
    assert is_isomorphic_xmod(get_sequence("V4-A4-Z3").q, get_xmod("RZ3")) is not None

def test_kernel_coaug_sequence():
    seq = get_sequence("kernel-coaug(pxz,RD8)")
    assert seq.n.orders == (2, 8)
    assert seq.q.orders == (4, 1)

def test_trivial_and_whole_n():
    assert get_sequence("trivialN(RS3)").n.is_trivial
    assert get_sequence("wholeN(RS3)").q.is_trivial

def test_sequence_keys_for_ra4():
    assert sequence_keys_for("RA4") == [
        "wholeN(RA4)", "A4-S4-Z2", "trivialN(RA4)", "V4-A4-Z3",
        "kernel-coaug(ab,RA4)", "kernel-coaug(nil2,RA4)", "kernel-coaug(c,RA4)",
        "kernel-coaug(pxz,RA4)", "kernel-coaug(pz0,RA4)",
    ]
    keys = sequence_keys()
    assert len(keys) == len(set(keys))


# --- corpus ------------------------------------------------------------------------------

def test_corpus_sizes():
    assert len(corpus(576)) == 17
    small = corpus(100)
    assert len(small) == 14
    assert {T.name for T, _ in small}.isdisjoint({"RA4", "RS4", "A4inS4"})

def test_corpus_bound_capped_by_max_order():
    with settings.use(max_order=10):
        try:
            corpus(576)
            assert False
        except GroupTooLarge as e:
            assert e.witness["max"] == 100


# --- labels ------------------------------------------------------------------------------

def test_labels():
    assert xmod_label(apply(AB, get_xmod("RA4")).output) == "RZ3"
    assert xmod_label(get_xmod("RS3")) == "RS3"
    assert group_label(get_xmod("RD8").g2) == "D8"
    assert group_label(get_group("trivial")) == "trivial"


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
    print(f"\n{passed}/{len(fns)} catalog tests passed")
    sys.exit(0 if passed == len(fns) else 1)
