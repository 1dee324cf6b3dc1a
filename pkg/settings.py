# settings.py
"""
Validated runtime configuration.

There is exactly one knob that changes results (`max_order`, the cap on group orders) and one
cosmetic knob (`progress`). Both come from CLI flags; nothing is read from the environment, so two
runs with the same arguments always see the same configuration.

The active settings live in a context variable: `use(...)` scopes an override to the current
thread or task, and a worker that never enters `use` sees the defaults.
"""
from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator

from pydantic import BaseModel, ConfigDict, Field

# Tables are quadratic in the order; 64 keeps every product we build small.
HARD_MAX_ORDER = 64
# Largest permutation degree accepted from files (fixed points included).
MAX_DEGREE = 256


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_order: int = Field(HARD_MAX_ORDER, ge=1, le=HARD_MAX_ORDER)
    progress: bool = False


DEFAULTS = Settings()
_active: ContextVar[Settings] = ContextVar("settings", default=DEFAULTS)


def current() -> Settings:
    return _active.get()


@contextmanager
def use(**overrides) -> Iterator[Settings]:
    """Temporarily replace the active settings (validated). Nested uses stack."""
    merged = Settings(**{**current().model_dump(), **overrides})
    token = _active.set(merged)
    try:
        yield merged
    finally:
        _active.reset(token)
