"""structlog rendering for stdlib loggers, plus run-scoped context fields.

Modules log through ``logging.getLogger(__name__)``; every record is passed
through a :class:`structlog.stdlib.ProcessorFormatter`, so fields bound with
:func:`run_context` (problem name, command, study level) show up on each line
in both the console and the JSON rendering.
"""

from __future__ import annotations

import logging
import sys
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import structlog

LOG_FILE = "wentzell.log"

# Third-party loggers held at WARNING or above.
QUIET_LOGGERS = ("sympy",)


def _shared_processors() -> list[structlog.types.Processor]:
    return [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_log_level,
        structlog.stdlib.add_logger_name,
        structlog.processors.TimeStamper(fmt="iso"),
    ]


def _renderer(log_format: str) -> structlog.types.Processor:
    if log_format == "json":
        return structlog.processors.JSONRenderer(sort_keys=True)
    return structlog.dev.ConsoleRenderer(colors=False)


def setup_logging(
    level: str = "INFO",
    log_format: str = "text",
    log_dir: str | None = None,
) -> None:
    """Configure structured logging for a CLI run.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR)
        log_format: "json" for one JSON object per line, "text" for the console renderer
        log_dir: Directory for ``wentzell.log``. If None, logs go to stderr only.

    Logs go to stderr; stdout is reserved for tables and CSV printed by the CLI.
    """
    log_level = getattr(logging, level.upper(), logging.INFO)
    shared = _shared_processors()

    structlog.configure(
        processors=[*shared, structlog.stdlib.ProcessorFormatter.wrap_for_formatter],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    formatter = structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=shared,
        processors=[
            structlog.stdlib.ProcessorFormatter.remove_processors_meta,
            _renderer(log_format),
        ],
    )

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_dir:
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_path / LOG_FILE))
    for handler in handlers:
        handler.setFormatter(formatter)

    logging.basicConfig(level=log_level, handlers=handlers, force=True)
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(max(log_level, logging.WARNING))


@contextmanager
def run_context(**fields: object) -> Iterator[None]:
    """Bind ``fields`` to every log line emitted inside the block."""
    with structlog.contextvars.bound_contextvars(**fields):
        yield
