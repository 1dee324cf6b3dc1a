# commands/suite.py
"""paper-suite: the acceptance table."""
from __future__ import annotations

from typing import List

import click

from commands.common import Options, Outcome, execute, report_options
from schemas import InputDigest
from services.paper_suite import run_suite


@click.command("paper-suite")
@report_options
def paper_suite(opts: Options) -> None:
    """Run every worked example and property sweep; exit 1 if any row fails."""

    def body(inputs: List[InputDigest]) -> Outcome:
        rows = run_suite()
        payload = {"rows": [r.model_dump() for r in rows],
                   "passed": sum(r.passed for r in rows), "total": len(rows)}
        ok = all(r.passed for r in rows)
        return Outcome(payload, {"all_rows_pass": ok}, 0 if ok else 1)

    execute("paper-suite", {}, opts, body)
