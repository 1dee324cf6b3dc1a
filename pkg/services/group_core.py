# services/group_core.py
"""
Finite-group arithmetic on explicit multiplication tables.

A group is a read-only numpy table over the indices 0..n-1 with 0 the identity. Everything else
(subgroups, actions, quotients, homomorphisms) is expressed as index sets or index maps over such
tables, so all results are deterministic and comparable by value.

    group_from_table / group_from_permutations - validated constructors
    subgroup_generated / action_closure / displacement_subgroup - closure by multiplication
    quotient_group                             - cosets ordered by minimal member, identity first
    hom_enumeration / isomorphisms             - generator-image search with order pruning
    center / conjugation_action                - the two standard actions of a group on itself

Orders are capped by settings.current().max_order (never above 64).
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

import settings
from services import audit_logger
from services.errors import (
    GeneratorsDoNotGenerate,
    GroupTooLarge,
    IndexOutOfRange,
    InducedMapIllDefined,
    NoIdentity,
    NoInverse,
    NotAHomomorphism,
    NotAnAction,
    NotAPermutation,
    NotAssociative,
    NotNormal,
    NotSurjective,
)

Perm = Tuple[int, ...]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def _check_order(n: int, name: Optional[str]) -> None:
    cap = settings.current().max_order
    if n > cap:
        audit_logger.log("GROUP", "limit", f"order {n} exceeds max_order {cap}",
                         severity="WARN", target=name)
        raise GroupTooLarge(f"group {name or '?'} would have order > {cap}",
                            {"order": n, "max_order": cap})


# ---- permutations (1-based in text, 0-based in storage) ----------------------------------------

_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_permutation(spec: Union[str, Sequence[int]], degree: int) -> Perm:
    """Cycle notation "(1 2)(3 4)" or a 1-based image list [2, 1, 4, 3] -> 0-based image tuple."""
    if isinstance(spec, str):
        text = spec.strip()
        if _CYCLE.sub("", text).strip(" ,"):
            raise NotAPermutation(f"not in cycle notation: {spec!r}", {"perm": spec})
        images = list(range(degree))
        seen: set = set()
        for body in _CYCLE.findall(text):
            try:
                points = [int(tok) - 1 for tok in body.replace(",", " ").split()]
            except ValueError:
                raise NotAPermutation(f"non-integer point in {spec!r}", {"perm": spec})
            for p in points:
                if p < 0 or p >= degree or p in seen:
                    raise NotAPermutation(f"bad or repeated point {p + 1} in {spec!r}",
                                          {"perm": spec, "point": p + 1})
                seen.add(p)
            for i, p in enumerate(points):
                images[p] = points[(i + 1) % len(points)]
        return tuple(images)
    values = [int(v) - 1 for v in spec]
    if len(values) != degree or sorted(values) != list(range(degree)):
        raise NotAPermutation(f"not a bijection on 1..{degree}: {list(spec)}", {"perm": list(spec)})
    return tuple(values)


def cycle_string(perm: Perm) -> str:
    seen: set = set()
    parts = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        nxt = perm[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = perm[nxt]
        parts.append("(" + " ".join(str(p + 1) for p in cycle) + ")")
    return "".join(parts) or "()"


def _compose(p: Perm, q: Perm) -> Perm:
    """p·q = p∘q: apply q first."""
    return tuple(p[i] for i in q)


# ---- types ------------------------------------------------------------------------------------

@dataclass(frozen=True, eq=False, repr=False)
class FiniteGroup:
    mul: np.ndarray
    inv: np.ndarray
    generators: Tuple[int, ...]
    name: Optional[str] = None
    perms: Optional[Tuple[Perm, ...]] = None
    labels: Optional[Tuple[str, ...]] = None

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    @property
    def elements(self) -> range:
        return range(self.order)

    @cached_property
    def rows(self) -> List[List[int]]:
        return self.mul.tolist()

    @cached_property
    def inverses(self) -> List[int]:
        return self.inv.tolist()

    def op(self, a: int, b: int) -> int:
        return self.rows[a][b]

    @cached_property
    def element_orders(self) -> Tuple[int, ...]:
        out = []
        for x in self.elements:
            k, y = 1, x
            while y != 0:
                y = self.rows[y][x]
                k += 1
            out.append(k)
        return tuple(out)

    @cached_property
    def order_profile(self) -> Tuple[int, ...]:
        return tuple(sorted(self.element_orders))

    @property
    def exponent(self) -> int:
        return math.lcm(*self.element_orders)

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    @cached_property
    def conjugation_table(self) -> np.ndarray:
        """conj[g, x] = g·x·g⁻¹"""
        return _frozen(self.mul[self.mul, self.inv[:, None]])

    @cached_property
    def spanning_tree(self) -> Tuple[Tuple[int, int, int], ...]:
        """BFS words: (x, parent, k) with x = parent · generators[k]; identity excluded."""
        seen = {0}
        queue = [0]
        tree = []
        for x in queue:
            for k, g in enumerate(self.generators):
                y = self.rows[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
                    tree.append((y, x, k))
        return tuple(tree)

    def render(self, x: int) -> str:
        if self.perms is not None:
            return cycle_string(self.perms[x])
        if self.labels is not None:
            return self.labels[x]
        return str(x)

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or '?'}, order={self.order})"


@dataclass(frozen=True)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    image: Tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.image[x]

    @cached_property
    def array(self) -> np.ndarray:
        return _frozen(self.image)

    @property
    def is_injective(self) -> bool:
        return len(set(self.image)) == len(self.image)

    @property
    def is_surjective(self) -> bool:
        return len(set(self.image)) == self.target.order

    @property
    def is_bijective(self) -> bool:
        return self.is_injective and self.is_surjective

    @property
    def is_trivial(self) -> bool:
        return not any(self.image)

    def kernel(self) -> "Subgroup":
        return Subgroup(self.source, tuple(x for x, y in enumerate(self.image) if y == 0))

    def image_subgroup(self) -> "Subgroup":
        return Subgroup(self.target, tuple(sorted(set(self.image))))

    def image_of(self, members: Iterable[int]) -> "Subgroup":
        return Subgroup(self.target, tuple(sorted({self.image[x] for x in members})))

    def compose(self, first: "GroupHom") -> "GroupHom":
        """self ∘ first"""
        return GroupHom(first.source, self.target, tuple(self.image[y] for y in first.image))

    def inverse(self) -> "GroupHom":
        back = [0] * self.target.order
        for x, y in enumerate(self.image):
            back[y] = x
        return GroupHom(self.target, self.source, tuple(back))

    @staticmethod
    def identity(G: FiniteGroup) -> "GroupHom":
        return GroupHom(G, G, tuple(G.elements))

    @staticmethod
    def trivial(G: FiniteGroup, H: FiniteGroup) -> "GroupHom":
        return GroupHom(G, H, (0,) * G.order)

    def __repr__(self) -> str:
        return f"GroupHom({self.source!r} -> {self.target!r})"


@dataclass(frozen=True)
class Subgroup:
    ambient: FiniteGroup
    members: Tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    @cached_property
    def index(self) -> dict:
        return {m: i for i, m in enumerate(self.members)}

    def __contains__(self, x: int) -> bool:
        return x in self.member_set

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def issubset(self, other: "Subgroup") -> bool:
        return self.member_set <= other.member_set

    @property
    def is_whole(self) -> bool:
        return self.order == self.ambient.order

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def is_normal(self) -> bool:
        return normal_witness(self) is None

    @cached_property
    def as_group(self) -> Tuple[FiniteGroup, GroupHom]:
        """The subgroup as a standalone group (members relabeled in sorted order) + inclusion."""
        G = self.ambient
        if self.is_whole:
            return G, GroupHom.identity(G)
        pos = self.index
        table = [[pos[G.rows[a][b]] for b in self.members] for a in self.members]
        inv = [pos[G.inverses[a]] for a in self.members]
        perms = tuple(G.perms[m] for m in self.members) if G.perms is not None else None
        labels = tuple(G.labels[m] for m in self.members) if G.labels is not None else None
        mul = _frozen(table)
        H = FiniteGroup(mul, _frozen(inv), greedy_generators(mul.tolist()), None, perms, labels)
        return H, GroupHom(H, G, self.members)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order} of {self.ambient!r})"


@dataclass(frozen=True, eq=False, repr=False)
class ActionByAutomorphisms:
    actor: FiniteGroup
    acted: FiniteGroup
    table: np.ndarray

    @cached_property
    def rows(self) -> List[List[int]]:
        return self.table.tolist()

    def act(self, b: int, x: int) -> int:
        return self.rows[b][x]

    def validate(self) -> "ActionByAutomorphisms":
        A, X, T = self.actor, self.acted, self.table
        if T.shape != (A.order, X.order) or T.min(initial=0) < 0 or T.max(initial=0) >= X.order:
            raise NotAnAction("action table has the wrong shape or out-of-range entries",
                              {"shape": list(T.shape), "expected": [A.order, X.order]})
        if not np.array_equal(T[0], np.arange(X.order)):
            x = int(np.argmax(T[0] != np.arange(X.order)))
            raise NotAnAction("identity does not act trivially", {"b": 0, "x": x})
        for b in A.elements:
            row = T[b]
            if len(set(row.tolist())) != X.order:
                raise NotAnAction("act(b, ·) is not a bijection", {"b": b})
            bad = np.argwhere(row[X.mul] != X.mul[row[:, None], row[None, :]])
            if len(bad):
                x, y = (int(v) for v in bad[0])
                raise NotAnAction("act(b, ·) is not a homomorphism", {"b": b, "x": x, "y": y})
        # act(b·b', x) == act(b, act(b', x))
        lhs = T[A.mul]
        rhs = T[np.arange(A.order)[:, None, None], T[None, :, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            b, b2, x = (int(v) for v in bad[0])
            raise NotAnAction("act is not compatible with multiplication", {"b": b, "b2": b2, "x": x})
        return self

    @staticmethod
    def trivial(actor: FiniteGroup, acted: FiniteGroup) -> "ActionByAutomorphisms":
        return ActionByAutomorphisms(actor, acted, _frozen(np.tile(np.arange(acted.order), (actor.order, 1))))


# ---- closures ---------------------------------------------------------------------------------

def _closure(rows: List[List[int]], seed: Iterable[int]) -> Tuple[int, ...]:
    gens = [s for s in dict.fromkeys(seed) if s != 0]
    members = [0]
    seen = {0}
    for x in members:
        for s in gens:
            y = rows[x][s]
            if y not in seen:
                seen.add(y)
                members.append(y)
    return tuple(sorted(seen))


def greedy_generators(rows: List[List[int]]) -> Tuple[int, ...]:
    """Repeatedly add the smallest element not yet generated."""
    gens: List[int] = []
    generated = {0}
    for x in range(len(rows)):
        if x not in generated:
            gens.append(x)
            generated = set(_closure(rows, gens))
    return tuple(gens) or (0,)


def _check_indices(G: FiniteGroup, indices: Iterable[int], what: str) -> List[int]:
    out = [int(i) for i in indices]
    for i in out:
        if i < 0 or i >= G.order:
            raise IndexOutOfRange(f"{what}: index {i} outside 0..{G.order - 1}", {"index": i, "order": G.order})
    return out


# ---- constructors -----------------------------------------------------------------------------

def group_from_table(table, generators: Optional[Sequence[int]] = None, name: Optional[str] = None,
                     labels: Optional[Sequence[str]] = None,
                     perms: Optional[Sequence[Perm]] = None) -> FiniteGroup:
    try:
        arr = np.array(table, dtype=np.int64)
    except (TypeError, ValueError, OverflowError):
        raise IndexOutOfRange("table is not a rectangular integer array", {})
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise IndexOutOfRange("table must be a non-empty square array", {"shape": list(arr.shape)})
    n = int(arr.shape[0])
    _check_order(n, name)
    bad = np.argwhere((arr < 0) | (arr >= n))
    if len(bad):
        a, b = (int(v) for v in bad[0])
        raise IndexOutOfRange(f"entry ({a},{b}) = {int(arr[a, b])} outside 0..{n - 1}", {"a": a, "b": b})
    ident = np.arange(n)
    if not (np.array_equal(arr[0], ident) and np.array_equal(arr[:, 0], ident)):
        x = int(np.argmax((arr[0] != ident) | (arr[:, 0] != ident)))
        raise NoIdentity("element 0 is not a two-sided identity", {"x": x})
    # (ab)c vs a(bc)
    left = arr[arr]
    right = arr[ident[:, None, None], arr[None, :, :]]
    bad = np.argwhere(left != right)
    if len(bad):
        a, b, c = (int(v) for v in bad[0])
        raise NotAssociative(f"({a}·{b})·{c} != {a}·({b}·{c})", {"a": a, "b": b, "c": c})
    zero = arr == 0
    two_sided = zero & zero.T
    missing = np.flatnonzero(~two_sided.any(axis=1))
    if len(missing):
        raise NoInverse(f"element {int(missing[0])} has no two-sided inverse", {"x": int(missing[0])})
    inv = two_sided.argmax(axis=1)

    rows = arr.tolist()
    if generators is None or len(generators) == 0:
        gens = greedy_generators(rows)
    else:
        gens = tuple(_check_indices_raw(generators, n))
        if len(_closure(rows, gens)) != n:
            raise GeneratorsDoNotGenerate(f"generators {list(gens)} generate a proper subgroup",
                                          {"generators": list(gens)})
    return FiniteGroup(_frozen(arr), _frozen(inv), gens, name,
                       tuple(tuple(p) for p in perms) if perms is not None else None,
                       tuple(labels) if labels is not None else None)


def _check_indices_raw(indices: Sequence[int], n: int) -> List[int]:
    out = [int(i) for i in indices]
    for i in out:
        if i < 0 or i >= n:
            raise IndexOutOfRange(f"generator index {i} outside 0..{n - 1}", {"index": i})
    return out


def group_from_permutations(degree: int, perms: Sequence[Union[str, Sequence[int]]],
                            name: Optional[str] = None) -> FiniteGroup:
    """Closure of `perms` in Sym(degree); identity first, then breadth-first discovery (x·g)."""
    if degree < 1 or degree > settings.MAX_DEGREE:
        raise NotAPermutation(f"degree must be in 1..{settings.MAX_DEGREE}, got {degree}", {"degree": degree})
    gens = [parse_permutation(p, degree) for p in perms]
    identity = tuple(range(degree))
    elements: List[Perm] = [identity]
    index = {identity: 0}
    cap = settings.current().max_order
    for x in elements:
        for g in gens:
            y = _compose(x, g)
            if y not in index:
                if len(elements) >= cap:
                    _check_order(len(elements) + 1, name)
                index[y] = len(elements)
                elements.append(y)
    table = [[index[_compose(p, q)] for q in elements] for p in elements]
    inv = [index[tuple(sorted(range(degree), key=lambda i: p[i]))] for p in elements]
    generators = tuple(dict.fromkeys(index[g] for g in gens if index[g] != 0)) or (0,)
    return FiniteGroup(_frozen(table), _frozen(inv), generators, name, tuple(elements))


def cyclic_group(n: int, name: Optional[str] = None) -> FiniteGroup:
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return group_from_table(table, [1] if n > 1 else None, name or f"Z{n}")


def renamed(G: FiniteGroup, name: str) -> FiniteGroup:
    """Same table, new label (a distinct object)."""
    return FiniteGroup(G.mul, G.inv, G.generators, name, G.perms, G.labels)


# ---- subgroup generation ----------------------------------------------------------------------

def subgroup_generated(G: FiniteGroup, seed: Iterable[int]) -> Subgroup:
    return Subgroup(G, _closure(G.rows, _check_indices(G, seed, "seed")))


def whole(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, tuple(G.elements))


def trivial_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, (0,))


def action_closure(act: ActionByAutomorphisms, S: Iterable[int]) -> Subgroup:
    """S_G: the smallest act-stable subgroup of `acted` containing S."""
    S = _check_indices(act.acted, S, "closure seed")
    seed = {act.rows[g][s] for g in act.actor.elements for s in S}
    return Subgroup(act.acted, _closure(act.acted.rows, seed))


def displacement_subgroup(act: ActionByAutomorphisms, A: Iterable[int], B: Iterable[int]) -> Subgroup:
    """[A, B] = < act(a, b)·b⁻¹ >; with conjugation this is the commutator subgroup."""
    A = _check_indices(act.actor, A, "actor set")
    B = _check_indices(act.acted, B, "acted set")
    X = act.acted
    seed = {X.rows[act.rows[a][b]][X.inverses[b]] for a in A for b in B}
    return Subgroup(X, _closure(X.rows, seed))


def inner_action(G: FiniteGroup) -> ActionByAutomorphisms:
    return ActionByAutomorphisms(G, G, G.conjugation_table)


def normal_closure(G: FiniteGroup, S: Iterable[int]) -> Subgroup:
    return action_closure(inner_action(G), S)


def commutator_subgroup(G: FiniteGroup, A: Optional[Iterable[int]] = None,
                        B: Optional[Iterable[int]] = None) -> Subgroup:
    A = G.elements if A is None else A
    B = G.elements if B is None else B
    return displacement_subgroup(inner_action(G), A, B)


def lower_central_series(G: FiniteGroup) -> List[Subgroup]:
    """γ1 = G, γ(k+1) = [γk, G], until it stabilizes."""
    series = [whole(G)]
    while True:
        nxt = commutator_subgroup(G, series[-1].members, G.elements)
        if nxt.members == series[-1].members:
            return series
        series.append(nxt)


def normal_witness(N: Subgroup) -> Optional[Tuple[int, int, int]]:
    """First (g, n) with g·n·g⁻¹ outside N, or None when N is normal."""
    conj = N.ambient.conjugation_table
    for g in N.ambient.elements:
        row = conj[g]
        for n in N.members:
            c = int(row[n])
            if c not in N:
                return g, n, c
    return None


def center(G: FiniteGroup) -> Subgroup:
    commuting = np.all(G.mul == G.mul.T, axis=1)
    return Subgroup(G, tuple(int(x) for x in np.flatnonzero(commuting)))


def conjugation_action(G: FiniteGroup, N: Subgroup) -> ActionByAutomorphisms:
    """G acting on N (as a standalone group) by conjugation."""
    w = normal_witness(N)
    if w is not None:
        raise NotNormal("subgroup is not normal", {"g": w[0], "n": w[1], "conjugate": w[2]})
    H, _ = N.as_group
    conj = G.conjugation_table.tolist()
    pos = N.index
    table = [[pos[conj[g][m]] for m in N.members] for g in G.elements]
    return ActionByAutomorphisms(G, H, _frozen(table))


# ---- quotients and induced maps ---------------------------------------------------------------

def quotient_group(G: FiniteGroup, N: Subgroup, name: Optional[str] = None) -> Tuple[FiniteGroup, GroupHom]:
    w = normal_witness(N)
    if w is not None:
        raise NotNormal("cannot quotient by a non-normal subgroup",
                        {"g": w[0], "n": w[1], "conjugate": w[2]})
    if N.is_trivial:
        return G, GroupHom.identity(G)
    coset_of = [-1] * G.order
    reps: List[int] = []
    for x in G.elements:
        if coset_of[x] < 0:
            idx = len(reps)
            reps.append(x)
            for m in N.members:
                coset_of[G.rows[x][m]] = idx
    table = [[coset_of[G.rows[a][b]] for b in reps] for a in reps]
    inv = [coset_of[G.inverses[a]] for a in reps]
    gens = tuple(dict.fromkeys(coset_of[g] for g in G.generators if coset_of[g] != 0)) or (0,)
    labels = tuple("[" + G.render(r) + "]" for r in reps)
    Q = FiniteGroup(_frozen(table), _frozen(inv), gens, name, None, labels)
    return Q, GroupHom(G, Q, tuple(coset_of))


def factor_through(s: GroupHom, h: GroupHom, strict: bool = True) -> GroupHom:
    """For a surjection s: A→B and h: A→C with ker s ⊆ ker h, the unique k: B→C with k∘s = h.
    strict=False keeps the first value seen per fiber instead of raising."""
    if s.source is not h.source:
        raise InducedMapIllDefined("maps do not share a source", {})
    image = [-1] * s.target.order
    first = [-1] * s.target.order
    for x in s.source.elements:
        y, v = s.image[x], h.image[x]
        if image[y] < 0:
            image[y], first[y] = v, x
        elif image[y] != v and strict:
            raise InducedMapIllDefined("induced map is not well defined",
                                       {"x": first[y], "x2": x, "values": [image[y], v]})
    if -1 in image:
        y = image.index(-1)
        raise NotSurjective("cannot factor through a non-surjective map", {"missing": y})
    return GroupHom(s.target, h.target, tuple(image))


# ---- homomorphisms ----------------------------------------------------------------------------

def _is_hom_array(G: FiniteGroup, H: FiniteGroup, img: np.ndarray) -> bool:
    return bool(np.array_equal(img[G.mul], H.mul[img[:, None], img[None, :]]))


def validate_hom(G: FiniteGroup, H: FiniteGroup, image: Sequence[int]) -> GroupHom:
    image = [int(v) for v in image]
    if len(image) != G.order:
        raise NotAHomomorphism(f"image table has {len(image)} entries, expected {G.order}", {})
    _check_indices(H, image, "image")
    img = np.array(image, dtype=np.int64)
    bad = np.argwhere(img[G.mul] != H.mul[img[:, None], img[None, :]])
    if len(bad):
        x, y = (int(v) for v in bad[0])
        raise NotAHomomorphism(f"f({x}·{y}) != f({x})·f({y})", {"x": x, "y": y})
    return GroupHom(G, H, tuple(image))


def _extend(G: FiniteGroup, H: FiniteGroup, choice: Sequence[int]) -> np.ndarray:
    img = [0] * G.order
    rows = H.rows
    for x, parent, k in G.spanning_tree:
        img[x] = rows[img[parent]][choice[k]]
    return np.array(img, dtype=np.int64)


def hom_enumeration(G: FiniteGroup, H: FiniteGroup) -> List[GroupHom]:
    """All homomorphisms G→H, lexicographic in the images of G.generators."""
    go, ho = G.element_orders, H.element_orders
    candidates = [[h for h in H.elements if go[g] % ho[h] == 0] for g in G.generators]
    out = []
    for choice in itertools.product(*candidates):
        img = _extend(G, H, choice)
        if _is_hom_array(G, H, img):
            out.append(GroupHom(G, H, tuple(img.tolist())))
    return out


def isomorphisms(G: FiniteGroup, H: FiniteGroup) -> Iterator[GroupHom]:
    if G.order != H.order or G.order_profile != H.order_profile:
        return
    go, ho = G.element_orders, H.element_orders
    candidates = [[h for h in H.elements if ho[h] == go[g]] for g in G.generators]
    for choice in itertools.product(*candidates):
        img = _extend(G, H, choice)
        if len(set(img.tolist())) == G.order and _is_hom_array(G, H, img):
            yield GroupHom(G, H, tuple(img.tolist()))


def is_isomorphic(G: FiniteGroup, H: FiniteGroup) -> Optional[GroupHom]:
    return next(isomorphisms(G, H), None)
