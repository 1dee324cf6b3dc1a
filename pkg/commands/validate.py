# commands/validate.py
"""validate: parse a file (or catalog key) and run the validator matching its kind."""
from __future__ import annotations

from typing import Any, Dict, List

import click

from commands.common import Options, Outcome, execute, report_options
from schemas import InputDigest
from services import codec
from services.catalog import group_label, xmod_label
from services.errors import StructureError


def describe(kind: str, obj) -> Dict[str, Any]:
    if kind == "group":
        return {"order": obj.order, "abelian": obj.is_abelian, "label": group_label(obj)}
    if kind == "xmod":
        return {"orders": list(obj.orders), "label": xmod_label(obj)}
    if kind == "morphism":
        return {"source_orders": list(obj.source.orders), "target_orders": list(obj.target.orders),
                "mono": obj.is_mono, "regular_epi": obj.is_regular_epi, "iso": obj.is_iso}
    return {"orders": {"n": list(obj.n.orders), "t": list(obj.t.orders), "q": list(obj.q.orders)}}


@click.command("validate")
@click.argument("ref")
@report_options
def validate(opts: Options, ref: str) -> None:
    """Check every axiom of REF; exit 1 with the first violation if one fails."""

    def body(inputs: List[InputDigest]) -> Outcome:
        if ref.startswith(codec.CATALOG_PREFIX):
            payload = None
            resolved = codec.resolve(ref)
            kind, obj = resolved.kind, resolved.obj
            inputs.append(InputDigest(ref=ref, kind=kind, sha256=resolved.sha256))
        else:
            payload = codec.load_json(ref)
            kind = codec.detect_kind(payload)
            inputs.append(InputDigest(ref=ref, kind=kind, sha256=codec.digest(payload)))
            try:
                _, obj = codec.from_dict(payload, ref, kind)
            except StructureError as e:
                return Outcome({"kind": kind, "valid": False, "violation": e.to_dict()}, {"valid": False}, 1)
        return Outcome({"kind": kind, "valid": True, **describe(kind, obj)}, {"valid": True}, 0)

    execute("validate", {"ref": ref}, opts, body)
