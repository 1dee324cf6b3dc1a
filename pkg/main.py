# main.py
"""
Command-line entry point.

    python main.py validate catalog:RD8
    python main.py apply --functor ab catalog:RA4
    python main.py fiberwise --functor pxz catalog:A4-S4-Z2 --pretty
    python main.py paper-suite

Every verb prints one Report (canonical JSON unless --pretty) and exits 0 / 1 / 2 / 3 for
success, mathematical failure, input error and internal error.
"""
import sys
from pathlib import Path

import click

ROOT_DIR = Path(__file__).resolve().parent
sys.path.append(str(ROOT_DIR))

from commands import compare, localize, suite, validate  # noqa: E402


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli() -> None:
    """Finite crossed modules: localization functors and fiberwise localizations."""


cli.add_command(validate.validate)
cli.add_command(localize.apply_cmd)
cli.add_command(localize.fiberwise_cmd)
cli.add_command(localize.check_normal_cmd)
cli.add_command(localize.acyclic_cmd)
cli.add_command(compare.hom_count)
cli.add_command(compare.iso)
cli.add_command(suite.paper_suite)


if __name__ == "__main__":
    cli()
