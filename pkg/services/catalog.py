# services/catalog.py
"""
Named groups, crossed modules and exact sequences, built deterministically and cached.

Permutation groups are realized on points 1..n (S4 from (1 2), (1 2 3 4); D8, the dihedral group
of order eight, from (1 2 3 4), (1 3)). Subgroups and inclusions between catalog groups are found
by matching permutations, so every inclusion is an honest restriction of the ambient table.

Sequence keys:
    A4-S4-Z2, V4-S4-S3, V4-A4-Z3        fixed sequences of R-objects
    trivialN(K)                        1 → K = K
    wholeN(K)                          K = K → 1
    kernel-coaug(tag,K)                ker ℓᴷ → K → LK   (tag in ab, nil2, c, pxz, pz0)
"""
from __future__ import annotations

import dataclasses
import re
from functools import lru_cache
from typing import List, Optional, Tuple

import settings
from services import audit_logger
from services.errors import GroupTooLarge, UnknownKey
from services.fiberwise import make_exact_sequence
from services.functors import FunctorTag, apply
from services.group_core import (
    FiniteGroup,
    GroupHom,
    Subgroup,
    center,
    cyclic_group,
    group_from_permutations,
    is_isomorphic,
    renamed,
)
from services.xmod_core import (
    CrossedModule,
    ExactSequence,
    SubXMod,
    XModMorphism,
    central_extension_xmod,
    functor_R,
    functor_X,
    is_isomorphic_xmod,
    normal_inclusion_xmod,
    quotient_xmod,
    trivial_group,
    trivial_xmod,
    validate_morphism,
)

GROUP_KEYS = ("trivial", "Z2", "Z3", "Z4", "Z6", "V4", "S3", "D8", "A4", "S4", "C2-in-D8-witness")

XMOD_KEYS = (
    "X1", "XZ2", "XZ3", "XZ4", "XS3",
    "RZ2", "RZ3", "RV4", "RS3", "RD8", "RA4", "RS4",
    "C2inD8", "V4inA4", "V4inS4", "A4inS4", "Z4overZ2-central",
)

FIXED_SEQUENCES = {
    # key: (N key, T key)
    "A4-S4-Z2": ("RA4", "RS4"),
    "V4-S4-S3": ("RV4", "RS4"),
    "V4-A4-Z3": ("RV4", "RA4"),
}

KERNEL_COAUG_TAGS = ("ab", "nil2", "c", "pxz", "pz0")

_PERMUTATIONS = {
    "V4": (4, ("(1 2)(3 4)", "(1 3)(2 4)")),
    "S3": (3, ("(1 2)", "(1 2 3)")),
    "D8": (4, ("(1 2 3 4)", "(1 3)")),
    "A4": (4, ("(1 2 3)", "(1 2)(3 4)")),
    "S4": (4, ("(1 2)", "(1 2 3 4)")),
}


# ---- groups -----------------------------------------------------------------------------------

@lru_cache(maxsize=None)
def get_group(key: str) -> FiniteGroup:
    if key == "trivial":
        return trivial_group()
    if re.fullmatch(r"Z[2346]", key):
        return cyclic_group(int(key[1:]), key)
    if key in _PERMUTATIONS:
        degree, gens = _PERMUTATIONS[key]
        return group_from_permutations(degree, gens, key)
    if key == "C2-in-D8-witness":
        return renamed(center(get_group("D8")).as_group[0], "C2")
    raise UnknownKey(f"unknown group key {key!r}", {"key": key, "known": list(GROUP_KEYS)})


def perm_subgroup(ambient: FiniteGroup, sub: FiniteGroup) -> Subgroup:
    """`sub`'s permutations located inside `ambient`."""
    index = {p: i for i, p in enumerate(ambient.perms)}
    return Subgroup(ambient, tuple(sorted(index[p] for p in sub.perms)))


def perm_embedding(sub: FiniteGroup, ambient: FiniteGroup) -> GroupHom:
    index = {p: i for i, p in enumerate(ambient.perms)}
    return GroupHom(sub, ambient, tuple(index[p] for p in sub.perms))


def sign_map(G: FiniteGroup) -> GroupHom:
    """Parity of each permutation, into Z2."""
    Z2 = get_group("Z2")
    image = []
    for p in G.perms:
        seen, cycles = set(), 0
        for start in range(len(p)):
            if start not in seen:
                cycles += 1
                x = start
                while x not in seen:
                    seen.add(x)
                    x = p[x]
        image.append((len(p) - cycles) % 2)
    return GroupHom(G, Z2, tuple(image))


# ---- crossed modules --------------------------------------------------------------------------

def _named(T: CrossedModule, name: str) -> CrossedModule:
    return dataclasses.replace(T, name=name)


@lru_cache(maxsize=None)
def get_xmod(key: str) -> CrossedModule:
    if key == "X1":
        return trivial_xmod()
    if key.startswith("R") and key[1:] in GROUP_KEYS:
        return _named(functor_R(get_group(key[1:])), key)
    if key.startswith("X") and key[1:] in GROUP_KEYS:
        return _named(functor_X(get_group(key[1:])), key)
    if key == "C2inD8":
        D8 = get_group("D8")
        return normal_inclusion_xmod(D8, center(D8), key)
    inclusions = {"V4inA4": ("A4", "V4"), "V4inS4": ("S4", "V4"), "A4inS4": ("S4", "A4")}
    if key in inclusions:
        big, small = (get_group(k) for k in inclusions[key])
        return normal_inclusion_xmod(big, perm_subgroup(big, small), key)
    if key == "Z4overZ2-central":
        Z4, Z2 = get_group("Z4"), get_group("Z2")
        return central_extension_xmod(GroupHom(Z4, Z2, tuple(x % 2 for x in Z4.elements)), key)
    raise UnknownKey(f"unknown crossed module key {key!r}", {"key": key, "known": list(XMOD_KEYS)})


# ---- exact sequences --------------------------------------------------------------------------

def _r_inclusion(n_key: str, t_key: str) -> XModMorphism:
    N, T = get_xmod(n_key), get_xmod(t_key)
    e = perm_embedding(N.g2, T.g2)
    return validate_morphism(N, T, e, e)


def _fixed_sequence(key: str) -> ExactSequence:
    n_key, t_key = FIXED_SEQUENCES[key]
    kappa = _r_inclusion(n_key, t_key)
    T = kappa.target
    if key == "A4-S4-Z2":
        s = sign_map(T.g2)
        alpha = validate_morphism(T, get_xmod("RZ2"), s, s)
    else:
        img = kappa.f1.image_subgroup()
        _, alpha = quotient_xmod(T, SubXMod(T, img, kappa.f2.image_subgroup()), f"{t_key}/{n_key}")
    return make_exact_sequence(kappa, alpha)


_SEQ_ONE = re.compile(r"^(trivialN|wholeN)\(([^(),]+)\)$")
_SEQ_KER = re.compile(r"^kernel-coaug\(([^(),]+),\s*([^(),]+)\)$")


@lru_cache(maxsize=None)
def get_sequence(key: str) -> ExactSequence:
    if key in FIXED_SEQUENCES:
        return _fixed_sequence(key)
    m = _SEQ_ONE.match(key)
    if m:
        kind, xkey = m.group(1), m.group(2).strip()
        T = get_xmod(xkey)
        one = trivial_xmod()
        if kind == "trivialN":
            return make_exact_sequence(XModMorphism.trivial(one, T), XModMorphism.identity(T))
        return make_exact_sequence(XModMorphism.identity(T), XModMorphism.trivial(T, one))
    m = _SEQ_KER.match(key)
    if m:
        tag_name, xkey = m.group(1).strip(), m.group(2).strip()
        if tag_name not in KERNEL_COAUG_TAGS:
            raise UnknownKey(f"kernel-coaug needs one of {KERNEL_COAUG_TAGS}", {"key": key})
        T = get_xmod(xkey)
        run = apply(FunctorTag(tag_name), T)
        N, incl = run.kernel.as_xmod
        if N is not T:
            N = _named(N, f"ker[{tag_name}]({xkey})")
            incl = XModMorphism(N, T, incl.f1, incl.f2)
        return make_exact_sequence(incl, run.coaug)
    raise UnknownKey(f"unknown sequence key {key!r}", {"key": key})


def sequence_keys_for(xkey: str) -> List[str]:
    """Catalog sequences with `xkey` as N or as the middle term, in a fixed order."""
    keys = [f"wholeN({xkey})"]
    keys += [k for k, (n, _) in FIXED_SEQUENCES.items() if n == xkey]
    keys.append(f"trivialN({xkey})")
    keys += [k for k, (_, t) in FIXED_SEQUENCES.items() if t == xkey]
    keys += [f"kernel-coaug({tag},{xkey})" for tag in KERNEL_COAUG_TAGS]
    return keys


def sequence_keys() -> List[str]:
    out: List[str] = []
    for xkey in XMOD_KEYS:
        for k in sequence_keys_for(xkey):
            if k not in out:
                out.append(k)
    return out


def corpus(max_order_product: int) -> List[Tuple[CrossedModule, List[ExactSequence]]]:
    cap = settings.current().max_order ** 2
    if max_order_product > cap:
        raise GroupTooLarge(f"corpus bound {max_order_product} exceeds {cap}",
                            {"bound": max_order_product, "max": cap})
    out = []
    for xkey in XMOD_KEYS:
        T = get_xmod(xkey)
        if T.order_product <= max_order_product:
            out.append((T, [get_sequence(k) for k in sequence_keys_for(xkey)]))
    audit_logger.log("CATALOG", "corpus", f"{len(out)} objects with |T1|·|T2| <= {max_order_product}",
                     details={"bound": max_order_product, "objects": [T.name for T, _ in out]})
    return out


# ---- labels -----------------------------------------------------------------------------------

def xmod_label(T: CrossedModule) -> Optional[str]:
    """First catalog key isomorphic to T, if any."""
    for key in XMOD_KEYS:
        K = get_xmod(key)
        if K.orders == T.orders and is_isomorphic_xmod(T, K) is not None:
            return key
    return None


def group_label(G: FiniteGroup) -> Optional[str]:
    for key in GROUP_KEYS:
        H = get_group(key)
        if H.order == G.order and is_isomorphic(G, H) is not None:
            return "trivial" if key == "trivial" else H.name
    return None

