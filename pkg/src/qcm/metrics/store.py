"""Append-only per-player log store with idempotent batch ingestion."""

from __future__ import annotations

import logging
import os
import threading
from dataclasses import asdict, dataclass
from pathlib import Path
from urllib.parse import quote

from .codec import LOG_SUFFIX, ParseError, parse_line

log = logging.getLogger(__name__)

LOG_DIR_ENV = "QCM_LOG_DIR"


@dataclass
class IngestResult:
    accepted: int = 0
    duplicate: int = 0
    rejected: int = 0

    def as_dict(self) -> dict[str, int]:
        return asdict(self)


class LogStore:
    """Directory of ``{player_id}.qcmlog`` files.

    Appends for one player are serialized by a per-player lock; different
    players proceed in parallel. A record whose (player_id, seq) is already
    stored is counted as a duplicate and not written again.
    """

    def __init__(self, root: str | os.PathLike[str]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}
        self._seen: dict[str, set[int]] = {}

    @classmethod
    def from_env(cls, default: str | os.PathLike[str] = "qcm-logs") -> "LogStore":
        return cls(os.environ.get(LOG_DIR_ENV) or default)

    def path_for(self, player_id: str) -> Path:
        return self.root / f"{quote(player_id, safe='')}{LOG_SUFFIX}"

    def _lock(self, player_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(player_id, threading.Lock())

    def _load_seen(self, player_id: str) -> set[int]:
        seen = self._seen.get(player_id)
        if seen is not None:
            return seen
        seen = set()
        path = self.path_for(player_id)
        if path.exists():
            with open(path, "rb") as fh:
                for raw in fh:
                    try:
                        seen.add(parse_line(raw).seq)
                    except ParseError:
                        log.warning("unparseable line in %s", path)
        self._seen[player_id] = seen
        return seen

    def ingest(self, player_id: str, body: bytes) -> IngestResult:
        result = IngestResult()
        lines = body.split(b"\n")
        if lines and not lines[-1]:
            lines.pop()
        with self._lock(player_id):
            seen = self._load_seen(player_id)
            fresh: list[bytes] = []
            for raw in lines:
                try:
                    event = parse_line(raw)
                except ParseError:
                    result.rejected += 1
                    continue
                if event.player_id != player_id:
                    result.rejected += 1
                    continue
                if event.seq in seen:
                    result.duplicate += 1
                    continue
                seen.add(event.seq)
                fresh.append(raw + b"\n")
                result.accepted += 1
            if fresh:
                with open(self.path_for(player_id), "ab") as fh:
                    fh.write(b"".join(fresh))
                    fh.flush()
                    os.fsync(fh.fileno())
        return result
