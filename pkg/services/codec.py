# services/codec.py
"""
JSON file format <-> domain objects.

A reference is either `catalog:<key>` or a filesystem path. Files are parsed in two passes: the
pydantic models in schemas.py check the shape (ParseError with the offending field path), then the
domain validators check the algebra (StructureError subclasses with witnesses).

Serialization always writes groups as kind "table" with their generators, so parse(serialize(x))
rebuilds the same tables, generator choice and element order.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from pydantic import TypeAdapter, ValidationError

from schemas import GroupFile, MorphismFile, PermGroupFile, SequenceFile, XModFile
from services import audit_logger
from services.catalog import GROUP_KEYS, XMOD_KEYS, get_group, get_sequence, get_xmod
from services.errors import IndexOutOfRange, NotAnAction, ParseError, UnknownKey
from services.fiberwise import make_exact_sequence
from services.group_core import (
    ActionByAutomorphisms,
    FiniteGroup,
    GroupHom,
    cycle_string,
    group_from_permutations,
    group_from_table,
    parse_permutation,
)
from services.xmod_core import (
    CrossedModule,
    ExactSequence,
    XModMorphism,
    validate_crossed_module,
    validate_morphism,
)

CATALOG_PREFIX = "catalog:"

Algebraic = Union[FiniteGroup, CrossedModule, XModMorphism, ExactSequence]

_GROUP_ADAPTER = TypeAdapter(GroupFile)
_MODELS = {
    "group": _GROUP_ADAPTER.validate_python,
    "xmod": XModFile.model_validate,
    "morphism": MorphismFile.model_validate,
    "sequence": SequenceFile.model_validate,
}


# ---- canonical JSON ---------------------------------------------------------------------------

def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def pretty_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False)


def digest(payload: Any) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


# ---- serialize --------------------------------------------------------------------------------

def group_to_dict(G: FiniteGroup) -> Dict[str, Any]:
    out: Dict[str, Any] = {"kind": "table", "table": G.mul.tolist(), "generators": list(G.generators)}
    if G.name:
        out["name"] = G.name
    if G.perms is not None:
        out["degree"] = len(G.perms[0])
        out["permutations"] = [cycle_string(p) for p in G.perms]
    elif G.labels is not None:
        out["labels"] = list(G.labels)
    return out


def xmod_to_dict(T: CrossedModule) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "g1": group_to_dict(T.g1),
        "g2": group_to_dict(T.g2),
        "boundary": list(T.boundary.image),
        "action": T.action.table.tolist(),
    }
    if T.name:
        out["name"] = T.name
    return out


def morphism_to_dict(f: XModMorphism) -> Dict[str, Any]:
    return {"source": xmod_to_dict(f.source), "target": xmod_to_dict(f.target),
            "f1": list(f.f1.image), "f2": list(f.f2.image)}


def sequence_to_dict(seq: ExactSequence) -> Dict[str, Any]:
    return {
        "n": xmod_to_dict(seq.n),
        "t": xmod_to_dict(seq.t),
        "q": xmod_to_dict(seq.q),
        "kappa": {"f1": list(seq.kappa.f1.image), "f2": list(seq.kappa.f2.image)},
        "alpha": {"f1": list(seq.alpha.f1.image), "f2": list(seq.alpha.f2.image)},
    }


def kind_of(obj: Algebraic) -> str:
    if isinstance(obj, FiniteGroup):
        return "group"
    if isinstance(obj, CrossedModule):
        return "xmod"
    if isinstance(obj, XModMorphism):
        return "morphism"
    if isinstance(obj, ExactSequence):
        return "sequence"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_dict(obj: Algebraic) -> Dict[str, Any]:
    return {
        "group": group_to_dict,
        "xmod": xmod_to_dict,
        "morphism": morphism_to_dict,
        "sequence": sequence_to_dict,
    }[kind_of(obj)](obj)


# ---- parse ------------------------------------------------------------------------------------

def _parse_error(e: ValidationError, ref: str) -> ParseError:
    first = e.errors()[0]
    path = ".".join(str(p) for p in first.get("loc", ()))
    return ParseError(f"{ref}: {path or '<root>'}: {first.get('msg', 'invalid')}",
                      {"ref": ref, "path": path, "reason": first.get("type")})


def load_json(path: Union[str, Path]) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {p}: {e.strerror or e}", {"ref": str(p)})
    except UnicodeDecodeError as e:
        raise ParseError(f"{p}: not UTF-8 text (byte {e.start})", {"ref": str(p), "byte": e.start})
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{p}: line {e.lineno} column {e.colno}: {e.msg}",
                         {"ref": str(p), "line": e.lineno, "column": e.colno})


def detect_kind(data: Any) -> str:
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object", {"path": ""})
    if "kind" in data:
        return "group"
    if "kappa" in data or "alpha" in data:
        return "sequence"
    if "source" in data:
        return "morphism"
    if "g1" in data:
        return "xmod"
    raise ParseError("cannot tell which object this file describes",
                     {"path": "", "keys": sorted(data)})


def group_from_file(model) -> FiniteGroup:
    if isinstance(model, PermGroupFile):
        return group_from_permutations(model.degree, model.generators, model.name)
    perms = None
    if model.permutations is not None:
        perms = [parse_permutation(p, model.degree) for p in model.permutations]
    return group_from_table(model.table, model.generators, model.name, model.labels, perms)


def _action_table(g2: FiniteGroup, g1: FiniteGroup, rows) -> np.ndarray:
    if len(rows) != g2.order or any(len(r) != g1.order for r in rows):
        raise NotAnAction("action must have one row per level-2 element and one entry per level-1 element",
                          {"rows": len(rows), "expected": [g2.order, g1.order]})
    for b, row in enumerate(rows):
        for x, v in enumerate(row):
            if not 0 <= v < g1.order:
                raise IndexOutOfRange(f"action[{b}][{x}] = {v} outside 0..{g1.order - 1}", {"b": b, "x": x})
    arr = np.array(rows, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def xmod_from_file(model: XModFile) -> CrossedModule:
    g1 = group_from_file(model.g1)
    g2 = group_from_file(model.g2)
    action = ActionByAutomorphisms(g2, g1, _action_table(g2, g1, model.action))
    return validate_crossed_module(g1, g2, GroupHom(g1, g2, tuple(model.boundary)), action, model.name)


def morphism_from_file(model: MorphismFile) -> XModMorphism:
    return validate_morphism(xmod_from_file(model.source), xmod_from_file(model.target), model.f1, model.f2)


def sequence_from_file(model: SequenceFile) -> ExactSequence:
    n, t, q = (xmod_from_file(m) for m in (model.n, model.t, model.q))
    kappa = validate_morphism(n, t, model.kappa.f1, model.kappa.f2)
    alpha = validate_morphism(t, q, model.alpha.f1, model.alpha.f2)
    return make_exact_sequence(kappa, alpha)


_BUILDERS = {
    "group": group_from_file,
    "xmod": xmod_from_file,
    "morphism": morphism_from_file,
    "sequence": sequence_from_file,
}


def from_dict(data: Any, ref: str = "<input>", kind: Optional[str] = None) -> Tuple[str, Algebraic]:
    kind = kind or detect_kind(data)
    try:
        model = _MODELS[kind](data)
    except ValidationError as e:
        raise _parse_error(e, ref)
    return kind, _BUILDERS[kind](model)


# ---- references -------------------------------------------------------------------------------

@dataclass(frozen=True)
class Resolved:
    ref: str
    kind: str
    obj: Algebraic
    payload: Any  # the JSON the object was read from (catalog objects: their serialization)

    @property
    def sha256(self) -> str:
        return digest(self.payload)


def _from_catalog(key: str) -> Tuple[str, Algebraic]:
    if key in GROUP_KEYS:
        return "group", get_group(key)
    if key in XMOD_KEYS:
        return "xmod", get_xmod(key)
    try:
        return "sequence", get_sequence(key)
    except UnknownKey:
        raise UnknownKey(f"unknown catalog key {key!r}", {"key": key})


def resolve(ref: str, expect: Optional[str] = None) -> Resolved:
    """`catalog:<key>` or a path, parsed and validated. `expect` pins the kind."""
    if ref.startswith(CATALOG_PREFIX):
        kind, obj = _from_catalog(ref[len(CATALOG_PREFIX):].strip())
        payload = to_dict(obj)
        audit_logger.log("CATALOG", "resolve", f"{ref} -> {kind}", target=ref)
    else:
        payload = load_json(ref)
        kind, obj = from_dict(payload, ref)
    if expect is not None and kind != expect:
        raise ParseError(f"{ref}: expected a {expect}, found a {kind}",
                         {"ref": ref, "expected": expect, "found": kind})
    return Resolved(ref, kind, obj, payload)
