from .codec import (
    LOG_SUFFIX,
    ParseError,
    ParseReason,
    dumps_log,
    parse_line,
    read_log,
    read_log_file,
    read_logs,
    serialize_event,
    write_log,
)
from .events import CONTRACTS, ContractError, Diagnostic, EventId, LogDocument, MetricEvent, check_payload, flag
from .store import LOG_DIR_ENV, IngestResult, LogStore

__all__ = [
    "CONTRACTS",
    "ContractError",
    "Diagnostic",
    "EventId",
    "IngestResult",
    "LOG_DIR_ENV",
    "LOG_SUFFIX",
    "LogDocument",
    "LogStore",
    "MetricEvent",
    "ParseError",
    "ParseReason",
    "check_payload",
    "dumps_log",
    "flag",
    "parse_line",
    "read_log",
    "read_log_file",
    "read_logs",
    "serialize_event",
    "write_log",
]
