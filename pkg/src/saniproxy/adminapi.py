"""Administrator endpoint surface, on its own listener.

Read endpoints project the reputation store's reports as JSON; mutating
endpoints (block/unblock) require the configured admin token. Static
console assets, when built, are served under /ui.
"""

from __future__ import annotations

import ipaddress
import json
import logging
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlparse

from .clock import Clock, SystemClock, format_ts, parse_ts
from .config import ProxyConfig, split_hostport
from .reputation import ReputationStore, SubjectKind

logger = logging.getLogger(__name__)


class AdminHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "saniproxy-admin"

    def _admin(self) -> "AdminServer":
        return self.server  # type: ignore[return-value]

    def log_message(self, fmt, *args):
        logger.debug("admin %s %s", self.address_string(), fmt % args)

    def _send_json(self, status: int, payload) -> None:
        data = json.dumps(payload, indent=2).encode("utf-8") + b"\n"
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(data)

    def _send_error_json(self, status: int, message: str) -> None:
        self._send_json(status, {"error": message})

    def _token_ok(self) -> bool:
        admin = self._admin()
        supplied = self.headers.get("X-Admin-Token", "")
        if not supplied:
            auth = self.headers.get("Authorization", "")
            if auth.lower().startswith("bearer "):
                supplied = auth[7:].strip()
        return supplied == admin.config.admin_token

    def do_GET(self):
        admin = self._admin()
        url = urlparse(self.path)
        query = parse_qs(url.query)
        now = admin.clock.now()
        store = admin.store

        if url.path == "/api/status":
            self._send_json(200, store.status(now))
        elif url.path == "/api/attacks":
            since: Optional[float] = None
            if "since" in query:
                try:
                    since = parse_ts(query["since"][0])
                except ValueError:
                    self._send_error_json(400, "bad since parameter")
                    return
            self._send_json(200, store.report_attack_list(since=since))
        elif url.path == "/api/blocked":
            self._send_json(200, store.report_blocked_ips(now))
        elif url.path == "/api/analysis/ip":
            ip = query.get("ip", [None])[0]
            self._send_json(200, store.report_ip_analysis(ip=ip))
        elif url.path == "/api/analysis/web":
            self._send_json(200, store.report_web_analysis())
        elif url.path == "/ui" or url.path.startswith("/ui/"):
            self._serve_static(url.path)
        else:
            self._send_error_json(404, f"no such endpoint: {url.path}")

    do_HEAD = do_GET

    def do_POST(self):
        admin = self._admin()
        url = urlparse(self.path)
        if url.path != "/api/block":
            self._send_error_json(404, f"no such endpoint: {url.path}")
            return
        if not self._token_ok():
            self._send_error_json(401, "missing or wrong admin token")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length) or b"{}")
            subject = payload["subject"]
            kind = SubjectKind(str(payload.get("kind", "IP")).upper())
            duration_s = float(payload.get("duration_s", admin.config.block_seconds))
        except (ValueError, KeyError, TypeError) as exc:
            self._send_error_json(400, f"bad block request: {exc}")
            return
        if kind is SubjectKind.IP:
            try:
                ipaddress.ip_address(subject)
            except ValueError:
                self._send_error_json(400, f"not an IP address: {subject!r}")
                return
        elif not subject or not isinstance(subject, str):
            self._send_error_json(400, "account subject must be a non-empty string")
            return
        try:
            entry = admin.store.manual_block(subject, kind, duration_s, admin.clock.now())
        except ValueError as exc:
            self._send_error_json(400, str(exc))
            return
        self._send_json(
            200,
            {
                "subject": entry.subject,
                "kind": entry.kind.value,
                "reason": entry.reason.value,
                "blocked_at": format_ts(entry.blocked_at),
                "block_until": format_ts(entry.block_until),
                "attacks": entry.attack_count_at_block,
            },
        )

    def do_DELETE(self):
        admin = self._admin()
        url = urlparse(self.path)
        prefix = "/api/block/"
        if not url.path.startswith(prefix):
            self._send_error_json(404, f"no such endpoint: {url.path}")
            return
        if not self._token_ok():
            self._send_error_json(401, "missing or wrong admin token")
            return
        subject = url.path[len(prefix):]
        if not subject:
            self._send_error_json(400, "missing subject")
            return
        removed = admin.store.manual_unblock(subject, admin.clock.now())
        self._send_json(
            200,
            {
                "subject": subject,
                "removed": removed is not None,
            },
        )

    def _serve_static(self, path: str) -> None:
        admin = self._admin()
        if admin.ui_dir is None:
            self._send_error_json(404, "console assets not built")
            return
        rel = path[len("/ui"):].lstrip("/") or "index.html"
        base = admin.ui_dir.resolve()
        candidate = (base / rel).resolve()
        if base not in candidate.parents and candidate != base:
            self._send_error_json(404, "not found")
            return
        if not candidate.is_file():
            self._send_error_json(404, f"no such asset: {rel}")
            return
        data = candidate.read_bytes()
        ctype = mimetypes.guess_type(candidate.name)[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(data)


class AdminServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(
        self,
        config: ProxyConfig,
        store: ReputationStore,
        clock: Optional[Clock] = None,
        listen: Optional[str] = None,
        ui_dir: Optional[str] = None,
    ):
        self.config = config
        self.store = store
        self.clock = clock or SystemClock()
        self.ui_dir = Path(ui_dir) if ui_dir else None
        host, port = split_hostport(listen or config.admin_listen)
        super().__init__((host, port), AdminHandler)
        self._thread: Optional[threading.Thread] = None

    @property
    def bound_address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def start_background(self) -> None:
        # short poll interval keeps stop() prompt
        self._thread = threading.Thread(
            target=lambda: self.serve_forever(poll_interval=0.05),
            name="saniproxy-admin",
            daemon=True,
        )
        self._thread.start()

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
