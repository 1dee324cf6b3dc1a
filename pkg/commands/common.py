# commands/common.py
"""
Plumbing shared by every verb: the common flags, input resolution with digests, and the single
place where a command body becomes a Report, a line on stdout and an exit code.

Exit codes: 0 success / true, 1 mathematical failure (a correct run whose answer is "no"),
2 input error, 3 internal error.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, NamedTuple, Optional

import click

import settings
from schemas import InputDigest, Report
from services import audit_logger, codec
from services.errors import AlgebraError, InternalError, MissingNullifier
from services.functors import FunctorTag, functor_from_name


@dataclass(frozen=True)
class Options:
    as_json: bool = True
    max_order: int = settings.HARD_MAX_ORDER
    log_dir: Optional[str] = None
    timing: bool = False
    progress: bool = False


class Outcome(NamedTuple):
    payload: Dict[str, Any]
    verdicts: Dict[str, bool]
    exit_code: int = 0


def report_options(fn: Callable) -> Callable:
    """Adds the flags every verb accepts and hands them to `fn` as one `opts` argument."""
    @functools.wraps(fn)
    def wrapper(as_json: bool, max_order: int, log_dir: Optional[str], timing: bool, progress: bool, **kwargs):
        return fn(Options(as_json, max_order, log_dir, timing, progress), **kwargs)

    decorators = [
        click.option("--json/--pretty", "as_json", default=True,
                     help="Canonical one-line JSON (default) or indented JSON."),
        click.option("--max-order", type=click.IntRange(1, settings.HARD_MAX_ORDER),
                     default=settings.HARD_MAX_ORDER, show_default=True, help="Largest group order accepted."),
        click.option("--log-dir", type=click.Path(file_okay=False), default=None,
                     help="Write JSON-lines audit logs under this directory."),
        click.option("--timing", is_flag=True, help="Include wall time (ms) in the report."),
        click.option("--progress", is_flag=True, help="Show sweep progress bars on stderr."),
    ]
    for deco in reversed(decorators):
        wrapper = deco(wrapper)
    return wrapper


def functor_option(fn: Callable) -> Callable:
    fn = click.option("--nullifier", "nullifier_ref", default=None,
                      help="Crossed module A for --functor nullify (catalog:<key> or path).")(fn)
    return click.option("--functor", "functor", required=True,
                        help="ab, nil2, c, i, pxz, pz0 or nullify.")(fn)


def load(ref: str, inputs: List[InputDigest], expect: Optional[str] = None):
    resolved = codec.resolve(ref, expect)
    inputs.append(InputDigest(ref=ref, kind=resolved.kind, sha256=resolved.sha256))
    return resolved.obj


def load_tag(functor: str, nullifier_ref: Optional[str], inputs: List[InputDigest]) -> FunctorTag:
    if (functor or "").strip().lower() != "nullify":
        return functor_from_name(functor)
    if not nullifier_ref:
        raise MissingNullifier("functor 'nullify' needs --nullifier", {})
    return functor_from_name(functor, load(nullifier_ref, inputs, "xmod"))


def render(report: Report, as_json: bool) -> str:
    payload = report.model_dump(exclude_none=True)
    return codec.canonical_json(payload) if as_json else codec.pretty_json(payload)


def execute(command: str, args: Dict[str, Any], opts: Options,
            body: Callable[[List[InputDigest]], Outcome]) -> None:
    audit_logger.configure(opts.log_dir)
    inputs: List[InputDigest] = []
    with audit_logger.Timer() as t:
        try:
            with settings.use(max_order=opts.max_order, progress=opts.progress):
                outcome = body(inputs)
        except InternalError as e:
            audit_logger.log_error(command, e.message, e.witness, e)
            outcome = Outcome(e.to_dict(), {}, 3)
        except AlgebraError as e:
            audit_logger.log_error(command, e.message, e.witness, e)
            outcome = Outcome(e.to_dict(), {}, 2)
        except Exception as e:
            audit_logger.log_error(command, "unexpected error", None, e)
            outcome = Outcome({"error": type(e).__name__, "message": str(e)}, {}, 3)

    report = Report(
        command=command,
        args={k: v for k, v in args.items() if v is not None},
        inputs=inputs,
        outcome=outcome.payload,
        verdicts=outcome.verdicts,
        ok=outcome.exit_code == 0,
        exit_code=outcome.exit_code,
        wall_ms=t.elapsed_ms if opts.timing else None,
    )
    click.echo(render(report, opts.as_json))
    audit_logger.log("CLI", command, f"exit {outcome.exit_code}",
                     severity="INFO" if outcome.exit_code < 2 else "ERROR",
                     details={"args": report.args, "exit_code": outcome.exit_code},
                     duration_ms=t.elapsed_ms)
    click.get_current_context().exit(outcome.exit_code)
