"""HTTP front end for :class:`LogStore`.

``POST /logs/{player_id}`` with a ``text/plain`` body of log lines returns
``{"accepted": n, "duplicate": n, "rejected": n}``; ``GET /healthz``
returns 200.
"""

from __future__ import annotations

import json
import logging
import re
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import unquote

from .store import LogStore

log = logging.getLogger(__name__)

_LOG_PATH = re.compile(r"^/logs/([^/?#]+)$")


class IngestHandler(BaseHTTPRequestHandler):
    server: "IngestServer"
    protocol_version = "HTTP/1.1"

    def _reply(self, status: HTTPStatus, body: bytes, content_type: str = "application/json") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _not_found(self) -> None:
        self._reply(HTTPStatus.NOT_FOUND, b'{"error": "not found"}')

    def do_GET(self) -> None:  # noqa: N802
        if self.path == "/healthz":
            self._reply(HTTPStatus.OK, b"ok\n", "text/plain")
        else:
            self._not_found()

    def do_POST(self) -> None:  # noqa: N802
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length) if length else b""
        m = _LOG_PATH.match(self.path)
        if not m:
            self._not_found()
            return
        player_id = unquote(m.group(1))
        result = self.server.store.ingest(player_id, body)
        self._reply(HTTPStatus.OK, json.dumps(result.as_dict(), sort_keys=True).encode())

    def log_message(self, format: str, *args) -> None:  # noqa: A002
        log.debug("%s - %s", self.address_string(), format % args)


class IngestServer(ThreadingHTTPServer):
    daemon_threads = False
    # join in-flight request threads on server_close so appends finish
    block_on_close = True

    def __init__(self, address: tuple[str, int], store: LogStore):
        super().__init__(address, IngestHandler)
        self.store = store


def make_server(host: str, port: int, store: LogStore) -> IngestServer:
    return IngestServer((host, port), store)
