# tests/test_group_core.py
"""
Finite-group arithmetic on multiplication tables: constructors, axiom rejection, subgroups,
commutators, quotients, induced maps and homomorphism search. Pure, no files. Run:
    python tests/test_group_core.py
"""
import contextvars
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

import settings
from services.catalog import GROUP_KEYS, get_group
from services.errors import (
    GroupTooLarge,
    IndexOutOfRange,
    InducedMapIllDefined,
    NoIdentity,
    NotAHomomorphism,
    NotAnAction,
    NotAPermutation,
    NotAssociative,
    NotNormal,
)
from services.group_core import (
    ActionByAutomorphisms,
    GroupHom,
    action_closure,
    center,
    commutator_subgroup,
    conjugation_action,
    cyclic_group,
    displacement_subgroup,
    factor_through,
    group_from_permutations,
    group_from_table,
    hom_enumeration,
    inner_action,
    is_isomorphic,
    isomorphisms,
    lower_central_series,
    normal_closure,
    parse_permutation,
    quotient_group,
    subgroup_generated,
    validate_hom,
    whole,
)
import numpy as np


def _s3():
    return group_from_permutations(3, ["(1 2)", "(1 2 3)"], "S3")


def _s4():
    return group_from_permutations(4, ["(1 2)", "(1 2 3 4)"], "S4")


def _d8():
    return group_from_permutations(4, ["(1 2 3 4)", "(1 3)"], "D8")


def _index(G, cycles):
    return G.perms.index(parse_permutation(cycles, len(G.perms[0])))


# --- constructors ------------------------------------------------------------------------

def test_cyclic_table():
    G = group_from_table([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert G.order == 3
    assert G.generators == (1,)
    assert G.is_abelian
    assert G.element_orders == (1, 3, 3)

def test_permutation_orders():
    assert _s3().order == 6
    assert _d8().order == 8
    assert _s4().order == 24
    assert group_from_permutations(4, ["(1 2 3)", "(1 2)(3 4)"]).order == 12   # A4

def test_product_applies_right_factor_first():
    S3 = _s3()
    t, c = _index(S3, "(1 2)"), _index(S3, "(1 2 3)")
    assert S3.render(S3.op(S3.op(t, c), t)) == "(1 3 2)"

def test_one_based_image_list():
    assert parse_permutation([2, 1, 3], 3) == (1, 0, 2)
    assert parse_permutation("()", 3) == (0, 1, 2)


# --- rejection ---------------------------------------------------------------------------

def test_non_associative_loop_rejected():
    loop = [[0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0]]
    try:
        group_from_table(loop)
        assert False, "loop accepted"
    except NotAssociative as e:
        assert set(e.witness) == {"a", "b", "c"}

def test_missing_identity_rejected():
    try:
        group_from_table([[1, 0], [0, 1]])
        assert False
    except NoIdentity:
        pass

def test_out_of_range_entry_rejected():
    for table in ([[0, 5], [1, 0]], [[0, 1], [1, 10 ** 23]]):
        try:
            group_from_table(table)
            assert False, table
        except IndexOutOfRange:
            pass

def test_degree_cap():
    try:
        group_from_permutations(10 ** 11, ["(1 2)"])
        assert False
    except NotAPermutation as e:
        assert e.witness["degree"] == 10 ** 11
    assert group_from_permutations(settings.MAX_DEGREE, ["(1 2)"]).order == 2

def test_bad_permutations_rejected():
    for spec, degree in (("(1 5)", 4), ("(1 2", 3), ([2, 1, 1], 3), ("(1 1)", 2)):
        try:
            parse_permutation(spec, degree)
            assert False, f"{spec!r} accepted"
        except NotAPermutation:
            pass

def test_max_order_cap():
    with settings.use(max_order=4):
        try:
            cyclic_group(5)
            assert False
        except GroupTooLarge as e:
            assert e.witness["max_order"] == 4
        assert cyclic_group(4).order == 4
    assert cyclic_group(5).order == 5                     # cap restored on exit

def test_settings_override_stays_in_its_context():
    outside = contextvars.copy_context()
    with settings.use(max_order=4):
        assert outside.run(settings.current).max_order == settings.HARD_MAX_ORDER
        assert outside.run(cyclic_group, 5).order == 5
        assert settings.current().max_order == 4
    assert settings.current() == settings.DEFAULTS


# --- subgroups and commutators -----------------------------------------------------------

def test_d8_commutator_is_center():
    D8 = _d8()
    assert center(D8).order == 2
    assert commutator_subgroup(D8).members == center(D8).members

def test_lower_central_series():
    assert [s.order for s in lower_central_series(_d8())] == [8, 2, 1]
    assert [s.order for s in lower_central_series(_s3())] == [6, 3]    # stalls at A3

def test_s4_displacement_by_a4_is_a4():
    S4 = _s4()
    A4 = subgroup_generated(S4, [_index(S4, "(1 2 3)"), _index(S4, "(1 2)(3 4)")])
    assert A4.order == 12
    D = displacement_subgroup(inner_action(S4), A4.members, S4.elements)
    assert D.members == A4.members

def test_normal_closure_of_transposition():
    S4 = _s4()
    assert normal_closure(S4, [_index(S4, "(1 2)")]).is_whole

def test_center_of_s3_trivial():
    assert center(_s3()).is_trivial

def test_exponents():
    expected = {"trivial": 1, "Z2": 2, "Z4": 4, "Z6": 6, "V4": 2, "S3": 6, "D8": 4, "A4": 6, "S4": 12}
    for key, e in expected.items():
        assert get_group(key).exponent == e, key

def test_subgroup_generated_idempotent_and_monotone():
    for key in ("D8", "S4"):
        G = get_group(key)
        for x in G.elements:
            S = subgroup_generated(G, [x])
            assert subgroup_generated(G, S.members).members == S.members
            for y in G.elements:
                assert S.issubset(subgroup_generated(G, [x, y]))


def _stable_closure(act, seed):
    """Smallest act-stable, product-closed set containing seed, by iterating to a fixed point."""
    X = act.acted
    current = set(seed) | {0}
    while True:
        grown = current | {act.act(g, s) for g in act.actor.elements for s in current}
        grown |= {X.op(a, b) for a in grown for b in grown}
        if grown == current:
            return tuple(sorted(current))
        current = grown

def test_action_closure_matches_fixed_point():
    S4 = _s4()
    V4 = subgroup_generated(S4, [_index(S4, "(1 2)(3 4)"), _index(S4, "(1 3)(2 4)")])
    for act in (inner_action(S4), inner_action(_d8()), conjugation_action(S4, V4)):
        for x in act.acted.elements:
            assert action_closure(act, [x]).members == _stable_closure(act, [x]), x

def test_commutator_subgroup_two_ways():
    for key in GROUP_KEYS:
        G = get_group(key)
        commutators = {G.op(G.op(a, b), G.op(G.inverses[a], G.inverses[b]))
                       for a in G.elements for b in G.elements}
        assert commutator_subgroup(G).members == subgroup_generated(G, commutators).members, key


# --- quotients and induced maps ----------------------------------------------------------

def test_s4_mod_v4_is_s3():
    S4 = _s4()
    V4 = subgroup_generated(S4, [_index(S4, "(1 2)(3 4)"), _index(S4, "(1 3)(2 4)")])
    Q, p = quotient_group(S4, V4)
    assert Q.order == 6
    assert is_isomorphic(Q, _s3()) is not None
    assert Q.labels[0] == "[()]"
    assert p.is_surjective and p.kernel().members == V4.members

def test_quotient_by_non_normal_rejected():
    S3 = _s3()
    try:
        quotient_group(S3, subgroup_generated(S3, [_index(S3, "(1 2)")]))
        assert False
    except NotNormal:
        pass

def test_factor_through():
    S3 = _s3()
    Q, p = quotient_group(S3, commutator_subgroup(S3))
    assert factor_through(p, p).is_bijective
    try:
        factor_through(p, GroupHom.identity(S3))
        assert False, "identity does not kill A3"
    except InducedMapIllDefined:
        pass


# --- homomorphisms -----------------------------------------------------------------------

def test_hom_counts():
    Z2, Z4 = cyclic_group(2), cyclic_group(4)
    S3 = _s3()
    V4 = group_from_permutations(4, ["(1 2)(3 4)", "(1 3)(2 4)"])
    assert len(hom_enumeration(Z2, S3)) == 4
    assert len(hom_enumeration(S3, Z2)) == 2
    assert len(hom_enumeration(Z4, Z2)) == 2
    assert len(hom_enumeration(V4, V4)) == 16
    assert len(hom_enumeration(S3, S3)) == 10

def test_automorphism_counts():
    assert len(list(isomorphisms(_s3(), _s3()))) == 6
    A4 = group_from_permutations(4, ["(1 2 3)", "(1 2)(3 4)"])
    assert len(list(isomorphisms(A4, A4))) == 24
    assert is_isomorphic(cyclic_group(4), group_from_permutations(4, ["(1 2)(3 4)", "(1 3)(2 4)"])) is None

def _descending_generators(G):
    gens, generated = [], {0}
    for x in reversed(G.elements):
        if x not in generated:
            gens.append(x)
            generated = subgroup_generated(G, gens).member_set
    return gens or [0]

def test_hom_count_ignores_generating_set():
    targets = [get_group(k) for k in ("Z2", "Z3", "Z4", "V4", "S3", "D8")]
    for key in ("Z6", "V4", "S3", "D8", "A4", "S4"):
        G = get_group(key)
        regen = group_from_table(G.rows, _descending_generators(G))
        for H in targets:
            assert len(hom_enumeration(regen, H)) == len(hom_enumeration(G, H)), (key, H.name)

def test_is_isomorphic_reflexive_and_symmetric():
    groups = [get_group(k) for k in GROUP_KEYS]
    for G in groups:
        assert is_isomorphic(G, G) is not None, G.name
        for H in groups:
            assert (is_isomorphic(G, H) is None) == (is_isomorphic(H, G) is None), (G.name, H.name)

def test_non_hom_rejected():
    try:
        validate_hom(cyclic_group(3), cyclic_group(2), [0, 1, 0])
        assert False
    except NotAHomomorphism as e:
        assert {"x", "y"} <= set(e.witness)


# --- actions -----------------------------------------------------------------------------

def test_inversion_is_an_action():
    Z2, Z3 = cyclic_group(2), cyclic_group(3)
    table = np.array([[0, 1, 2], [0, 2, 1]])
    ActionByAutomorphisms(Z2, Z3, table).validate()

def test_non_bijective_row_rejected():
    Z2, Z3 = cyclic_group(2), cyclic_group(3)
    try:
        ActionByAutomorphisms(Z2, Z3, np.array([[0, 1, 2], [0, 1, 1]])).validate()
        assert False
    except NotAnAction:
        pass

def test_whole_as_group_is_ambient():
    S3 = _s3()
    H, incl = whole(S3).as_group
    assert H is S3 and incl.is_bijective


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
    print(f"\n{passed}/{len(fns)} group-core tests passed")
    sys.exit(0 if passed == len(fns) else 1)
