# commands/compare.py
"""hom-count and iso between two groups or two crossed modules."""
from __future__ import annotations

from typing import List, Tuple

import click

from commands.common import Options, Outcome, execute, load, report_options
from schemas import InputDigest
from services.errors import ParseError
from services.group_core import hom_enumeration, is_isomorphic
from services.xmod_core import is_isomorphic_xmod, xmod_hom_enumeration


def _pair(a_ref: str, b_ref: str, inputs: List[InputDigest]) -> Tuple[str, object, object]:
    a = load(a_ref, inputs)
    kind = inputs[-1].kind
    if kind not in ("group", "xmod"):
        raise ParseError(f"{a_ref}: expected a group or a crossed module, found a {kind}",
                         {"ref": a_ref, "found": kind})
    b = load(b_ref, inputs, kind)
    return kind, a, b


@click.command("hom-count")
@click.argument("a_ref", metavar="A")
@click.argument("b_ref", metavar="B")
@report_options
def hom_count(opts: Options, a_ref: str, b_ref: str) -> None:
    """Count the homomorphisms A → B."""

    def body(inputs: List[InputDigest]) -> Outcome:
        kind, a, b = _pair(a_ref, b_ref, inputs)
        homs = hom_enumeration(a, b) if kind == "group" else xmod_hom_enumeration(a, b)
        return Outcome({"kind": kind, "count": len(homs)}, {}, 0)

    execute("hom-count", {"a": a_ref, "b": b_ref}, opts, body)


@click.command("iso")
@click.argument("a_ref", metavar="A")
@click.argument("b_ref", metavar="B")
@report_options
def iso(opts: Options, a_ref: str, b_ref: str) -> None:
    """Find an isomorphism A → B; exit 1 when there is none."""

    def body(inputs: List[InputDigest]) -> Outcome:
        kind, a, b = _pair(a_ref, b_ref, inputs)
        if kind == "group":
            f = is_isomorphic(a, b)
            maps = {"f": list(f.image)} if f is not None else None
        else:
            f = is_isomorphic_xmod(a, b)
            maps = {"f1": list(f.f1.image), "f2": list(f.f2.image)} if f is not None else None
        payload = {"kind": kind, "isomorphic": maps is not None}
        if maps is not None:
            payload["map"] = maps
        return Outcome(payload, {"isomorphic": maps is not None}, 0 if maps is not None else 1)

    execute("iso", {"a": a_ref, "b": b_ref}, opts, body)
