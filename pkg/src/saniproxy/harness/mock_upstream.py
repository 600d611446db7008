"""Mock protected application: a tiny banking site with hashed credentials.

The credential fixture maps username to the MD5 hex of the password. The
login endpoint expects the password field to arrive already hashed (the
proxy does that), so a straight equality check stands in for the database
lookup. Every request received is counted; the no-leakage tests assert the
counter never moves for denied traffic.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qsl, urlparse

from ..config import split_hostport

logger = logging.getLogger(__name__)


def load_credentials(path) -> dict[str, str]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in data.items()
    ):
        raise ValueError("credential fixture must map username to md5-hex strings")
    return data


class _UpstreamHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "mock-bank"

    def log_message(self, fmt, *args):
        logger.debug("upstream %s %s", self.address_string(), fmt % args)

    def _app(self) -> "MockUpstream":
        return self.server  # type: ignore[return-value]

    def _respond(self, status: int, text: str) -> None:
        payload = text.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(payload)

    def _form(self) -> dict[str, str]:
        length = int(self.headers.get("Content-Length", "0") or "0")
        body = self.rfile.read(length) if length else b""
        return dict(parse_qsl(body.decode("utf-8", "replace"), keep_blank_values=True))

    def do_GET(self):
        app = self._app()
        app.count_request(self.path)
        path = urlparse(self.path).path
        if path == "/":
            self._respond(200, "mock bank: home\n")
        else:
            self._respond(200, f"mock bank: resource {path}\n")

    do_HEAD = do_GET

    def do_POST(self):
        app = self._app()
        app.count_request(self.path)
        path = urlparse(self.path).path
        form = self._form()
        if path == "/login":
            username = form.get("username", "")
            submitted_hash = form.get("password", "")
            stored = app.credentials.get(username)
            if stored is not None and stored == submitted_hash:
                self._respond(200, f"welcome {username}: account access granted\n")
            else:
                self._respond(403, "login failed: bad credentials\n")
        else:
            self._respond(200, f"mock bank: accepted {len(form)} fields at {path}\n")


class MockUpstream(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, listen: str, credentials: Optional[dict[str, str]] = None):
        self.credentials = dict(credentials or {})
        self._count_lock = threading.Lock()
        self._request_count = 0
        self._path_counts: dict[str, int] = {}
        host, port = split_hostport(listen)
        super().__init__((host, port), _UpstreamHandler)
        self._thread: Optional[threading.Thread] = None

    def count_request(self, path: str) -> None:
        with self._count_lock:
            self._request_count += 1
            self._path_counts[path] = self._path_counts.get(path, 0) + 1

    @property
    def request_count(self) -> int:
        with self._count_lock:
            return self._request_count

    def path_count(self, path: str) -> int:
        with self._count_lock:
            return self._path_counts.get(path, 0)

    @property
    def bound_address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def start_background(self) -> None:
        # short poll interval keeps stop() prompt
        self._thread = threading.Thread(
            target=lambda: self.serve_forever(poll_interval=0.05),
            name="mock-upstream",
            daemon=True,
        )
        self._thread.start()

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
