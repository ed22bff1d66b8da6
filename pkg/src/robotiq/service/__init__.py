"""Sessions, metrics, benchmark harness, HTTP/WebSocket service."""

from .bench import jitter_start, make_navigator, run_bench
from .metrics import (
    MetricsReport,
    TaskStats,
    metrics_report,
    rows_from_records,
    write_cdf_csv,
    write_metrics_csv,
)
from .repl import run_repl
from .server import CreateSessionRequest, ServerDefaults, create_app
from .session import Session, SessionEvent, TaskRecord

__all__ = [
    "jitter_start",
    "make_navigator",
    "run_bench",
    "MetricsReport",
    "TaskStats",
    "metrics_report",
    "rows_from_records",
    "write_cdf_csv",
    "write_metrics_csv",
    "run_repl",
    "CreateSessionRequest",
    "ServerDefaults",
    "create_app",
    "Session",
    "SessionEvent",
    "TaskRecord",
]
