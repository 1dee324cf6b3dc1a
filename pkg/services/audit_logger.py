# services/audit_logger.py
"""
Structured event log for the algebra toolkit.
Fire-and-forget: nothing here may raise into a computation.

Output (JSON Lines, one record per line) once `configure(log_dir)` has been called:
    <log_dir>/all.log        - every event, all categories
    <log_dir>/group.log      - group constructions and limits
    <log_dir>/xmod.log       - crossed-module constructions (cokernels, quotients)
    <log_dir>/functor.log    - localization runs, nullification rounds
    <log_dir>/fiberwise.log  - normality decisions, fiberwise outcomes
    <log_dir>/catalog.log    - catalog resolution
    <log_dir>/cli.log        - command completion, input errors
    <log_dir>/suite.log      - sweep and acceptance-suite summaries
    <log_dir>/errors.log     - WARN / ERROR / FATAL across all categories

Without `configure` every logger has only a NullHandler: records are dropped, and nothing ever
reaches stdout (reports must stay byte-identical).
"""
import json
import logging
import os
import time
import traceback
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from typing import Any, Dict, Optional

# Max 10 MB per file, keep 5 rotated backups per category
MAX_BYTES = 10 * 1024 * 1024
BACKUP_COUNT = 5

CATEGORY_FILES = {
    "GROUP": "group.log",
    "XMOD": "xmod.log",
    "FUNCTOR": "functor.log",
    "FIBERWISE": "fiberwise.log",
    "CATALOG": "catalog.log",
    "CLI": "cli.log",
    "SUITE": "suite.log",
}

_loggers: Dict[str, logging.Logger] = {}
_log_dir: Optional[str] = None


def _make_handler(log_dir: str, filename: str) -> RotatingFileHandler:
    """Create a rotating file handler for structured JSON logs."""
    handler = RotatingFileHandler(
        os.path.join(log_dir, filename),
        maxBytes=MAX_BYTES,
        backupCount=BACKUP_COUNT,
        encoding="utf-8",
    )
    handler.setLevel(logging.DEBUG)
    # Raw formatter - records are pre-formatted JSON lines
    handler.setFormatter(logging.Formatter("%(message)s"))
    return handler


def _get_logger(name: str) -> logging.Logger:
    if name not in _loggers:
        logger = logging.getLogger(f"xmod_audit.{name}")
        logger.setLevel(logging.DEBUG)
        logger.propagate = False  # never to the root logger / console
        logger.addHandler(logging.NullHandler())
        _loggers[name] = logger
    return _loggers[name]


def configure(log_dir: Optional[str]) -> None:
    """Attach rotating file handlers under `log_dir`. Calling again with another directory moves
    the handlers; `None` detaches them."""
    global _log_dir
    try:
        names = ["all", "errors", *CATEGORY_FILES]
        for name in names:
            logger = _get_logger(name)
            for h in list(logger.handlers):
                if isinstance(h, RotatingFileHandler):
                    logger.removeHandler(h)
                    h.close()
        _log_dir = log_dir
        if not log_dir:
            return
        os.makedirs(log_dir, exist_ok=True)
        _get_logger("all").addHandler(_make_handler(log_dir, "all.log"))
        _get_logger("errors").addHandler(_make_handler(log_dir, "errors.log"))
        for cat, filename in CATEGORY_FILES.items():
            _get_logger(cat).addHandler(_make_handler(log_dir, filename))
    except Exception:
        pass  # logging must never break a computation


def log(
    category: str,
    action: str,
    message: str,
    severity: str = "INFO",
    target: Optional[str] = None,
    details: Optional[Dict[str, Any]] = None,
    duration_ms: Optional[int] = None,
    error_message: Optional[str] = None,
    stack_trace: Optional[str] = None,
) -> None:
    """Write one structured JSON line to all.log, the category file and (if severe) errors.log."""
    if _log_dir is None:
        return
    try:
        record: Dict[str, Any] = {
            "ts": datetime.now(timezone.utc).isoformat(),
            "category": category,
            "severity": severity,
            "action": action,
            "message": message,
        }
        # Only include non-null fields to keep lines concise
        if target:
            record["target"] = target
        if details:
            record["details"] = details
        if duration_ms is not None:
            record["duration_ms"] = duration_ms
        if error_message:
            record["error"] = error_message
        if stack_trace:
            record["stack_trace"] = stack_trace

        line = json.dumps(record, default=str, ensure_ascii=False, sort_keys=True)
        _get_logger("all").info(line)
        if category in CATEGORY_FILES:
            _get_logger(category).info(line)
        if severity in ("ERROR", "FATAL", "WARN"):
            _get_logger("errors").info(line)
    except Exception:
        pass


def log_error(source: str, message: str, details: Optional[Dict[str, Any]] = None,
              exc: Optional[BaseException] = None, category: str = "CLI") -> None:
    """Error event with optional stack trace."""
    tb = traceback.format_exception(type(exc), exc, exc.__traceback__) if exc else None
    log(
        category=category,
        action="error",
        message=message,
        severity="ERROR",
        target=source,
        details=details,
        error_message=str(exc) if exc else None,
        stack_trace="".join(tb) if tb else None,
    )


# --- domain helpers ----------------------------------------------------------------------------

def log_run(tag: str, target: str, orders_in, orders_out, steps: int,
            duration_ms: Optional[int] = None) -> None:
    log(
        category="FUNCTOR",
        action="apply",
        message=f"{tag} on {target}: {tuple(orders_in)} -> {tuple(orders_out)}",
        target=target,
        details={"tag": tag, "in": list(orders_in), "out": list(orders_out), "steps": steps},
        duration_ms=duration_ms,
    )


def log_fiberwise(tag: str, target: str, success: bool, details: Optional[Dict[str, Any]] = None) -> None:
    log(
        category="FIBERWISE",
        action="localize",
        message=f"{tag} on {target}: {'success' if success else 'failure'}",
        severity="INFO" if success else "WARN",
        target=target,
        details=details,
    )


def log_sweep(name: str, checked: int, failures: int, skipped: int = 0,
              duration_ms: Optional[int] = None) -> None:
    log(
        category="SUITE",
        action="sweep",
        message=f"{name}: {checked} checked, {failures} failures, {skipped} skipped",
        severity="INFO" if failures == 0 else "ERROR",
        target=name,
        details={"checked": checked, "failures": failures, "skipped": skipped},
        duration_ms=duration_ms,
    )


class Timer:
    """Context manager for timing operations in milliseconds."""
    def __init__(self):
        self.start_time = None
        self.elapsed_ms = 0

    def __enter__(self):
        self.start_time = time.monotonic()
        return self

    def __exit__(self, *args):
        self.elapsed_ms = int((time.monotonic() - self.start_time) * 1000)
