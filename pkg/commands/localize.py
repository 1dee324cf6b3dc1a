# commands/localize.py
"""Verbs that run a localization functor: apply, fiberwise, check-normal, acyclic."""
from __future__ import annotations

from typing import List, Optional

import click

from commands.common import Options, Outcome, execute, functor_option, load, load_tag, report_options
from schemas import InputDigest
from services.catalog import xmod_label
from services.errors import NotRegularEpiLocalization
from services.fiberwise import (
    acyclicity_probe,
    fiberwise_localize,
    normality_condition,
    restriction_conditions,
    verify_fiberwise,
)
from services.functors import apply


def _args(functor: str, nullifier_ref: Optional[str], **rest) -> dict:
    return {"functor": functor, "nullifier": nullifier_ref, **rest}


@click.command("apply")
@functor_option
@click.argument("input_ref", metavar="INPUT")
@report_options
def apply_cmd(opts: Options, functor: str, nullifier_ref: Optional[str], input_ref: str) -> None:
    """Localize the crossed module INPUT."""

    def body(inputs: List[InputDigest]) -> Outcome:
        tag = load_tag(functor, nullifier_ref, inputs)
        T = load(input_ref, inputs, "xmod")
        run = apply(tag, T)
        payload = {
            "functor": tag.name,
            "input_orders": list(T.orders),
            "output_orders": list(run.output.orders),
            "label": xmod_label(run.output),
            "steps": run.steps,
            "coaugmentation": {"f1": list(run.coaug.f1.image), "f2": list(run.coaug.f2.image)},
        }
        verdicts = {"regular_epi": run.coaug.is_regular_epi, "input_local": run.coaug.is_iso}
        return Outcome(payload, verdicts, 0)

    execute("apply", _args(functor, nullifier_ref, input=input_ref), opts, body)


@click.command("fiberwise")
@functor_option
@click.argument("sequence_ref", metavar="SEQUENCE")
@report_options
def fiberwise_cmd(opts: Options, functor: str, nullifier_ref: Optional[str], sequence_ref: str) -> None:
    """Construct the fiberwise localization of SEQUENCE, or report why none exists."""

    def body(inputs: List[InputDigest]) -> Outcome:
        tag = load_tag(functor, nullifier_ref, inputs)
        seq = load(sequence_ref, inputs, "sequence")
        try:
            outcome = fiberwise_localize(tag, seq)
        except NotRegularEpiLocalization as e:
            return Outcome({"functor": tag.name, "result": "not-regular-epi", **e.to_dict()},
                           {"regular_epi": False}, 1)
        if not outcome.success:
            v = outcome.verdict
            payload = {
                "functor": tag.name,
                "result": "failure",
                "witness": v.witness,
                "inclusion": {"displacement_order": v.displacement_order, "target_order": v.target_order},
            }
            return Outcome(payload, {"success": False, "normal": False}, 1)
        report = verify_fiberwise(tag, seq, outcome)
        payload = {
            "functor": tag.name,
            "result": "success",
            "e_orders": list(outcome.e.orders),
            "e_label": xmod_label(outcome.e),
            "lnn_orders": list(outcome.run.output.orders),
            "checks": report.verdicts(),
        }
        if not report.all_passed:
            payload["failed_checks"] = {c.name: c.witness for c in report.checks if not c.passed}
        return Outcome(payload, {"success": True, **report.verdicts()}, 0 if report.all_passed else 3)

    execute("fiberwise", _args(functor, nullifier_ref, sequence=sequence_ref), opts, body)


@click.command("check-normal")
@functor_option
@click.argument("sequence_ref", metavar="SEQUENCE")
@report_options
def check_normal_cmd(opts: Options, functor: str, nullifier_ref: Optional[str], sequence_ref: str) -> None:
    """Decide whether κ(ker ℓᴺ) is normal in the middle term of SEQUENCE."""

    def body(inputs: List[InputDigest]) -> Outcome:
        tag = load_tag(functor, nullifier_ref, inputs)
        seq = load(sequence_ref, inputs, "sequence")
        verdict = normality_condition(tag, seq)
        cond1, cond2 = restriction_conditions(tag, seq)
        payload = {
            "functor": tag.name,
            "holds": verdict.holds,
            "transported_orders": list(verdict.transported.orders),
            "displacement_order": verdict.displacement_order,
            "target_order": verdict.target_order,
            "conditions": {"1": cond1, "2": cond2, "3": verdict.holds},
        }
        if verdict.witness is not None:
            payload["witness"] = verdict.witness
        return Outcome(payload, {"normal": verdict.holds}, 0 if verdict.holds else 1)

    execute("check-normal", _args(functor, nullifier_ref, sequence=sequence_ref), opts, body)


@click.command("acyclic")
@functor_option
@click.argument("input_ref", metavar="INPUT")
@report_options
def acyclic_cmd(opts: Options, functor: str, nullifier_ref: Optional[str], input_ref: str) -> None:
    """Apply a nullification to the kernel of its own coaugmentation on INPUT."""

    def body(inputs: List[InputDigest]) -> Outcome:
        tag = load_tag(functor, nullifier_ref, inputs)
        T = load(input_ref, inputs, "xmod")
        probe = acyclicity_probe(tag, T)
        payload = {
            "functor": tag.name,
            "input_orders": list(probe.input_orders),
            "kernel_orders": list(probe.kernel.orders),
            "kernel_label": xmod_label(probe.kernel),
            "output_orders": list(probe.output.orders),
            "steps": probe.steps,
        }
        return Outcome(payload, {"acyclic": probe.acyclic}, 0 if probe.acyclic else 1)

    execute("acyclic", _args(functor, nullifier_ref, input=input_ref), opts, body)
