"""HTTP reverse-proxy front end around the sanitization pipeline.

Thread-per-connection server: detectors are pure functions, and the only
shared mutable state (the reputation store) serializes internally, so
handlers never coordinate with each other.
"""

from __future__ import annotations

import http.client
import logging
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from .clock import Clock, SystemClock
from .config import ProxyConfig, split_hostport
from .model import DENY_STATUS, ClientRequest, DecisionKind, ProxyDecision
from .pipeline import Pipeline

logger = logging.getLogger(__name__)

# request-framing limits; the pipeline's body cap is enforced separately
_HARD_BODY_CAP = 16 * 1024 * 1024
_UPSTREAM_TIMEOUT_S = 10.0

_HOP_BY_HOP = frozenset(
    {
        "connection",
        "keep-alive",
        "proxy-authenticate",
        "proxy-authorization",
        "proxy-connection",
        "te",
        "trailers",
        "transfer-encoding",
        "upgrade",
    }
)


class ProxyHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "saniproxy"

    # the server instance carries pipeline/config/clock
    def _proxy(self) -> "ProxyServer":
        return self.server  # type: ignore[return-value]

    def log_message(self, fmt, *args):  # route chatter to the ops log
        logger.debug("%s %s", self.address_string(), fmt % args)

    def _client_ip(self) -> str:
        proxy = self._proxy()
        if proxy.config.trust_forwarded_for:
            forwarded = self.headers.get("X-Forwarded-For", "")
            if forwarded:
                return forwarded.split(",")[0].strip()
        return self.client_address[0]

    def _read_body(self) -> Optional[bytes]:
        if self.headers.get("Transfer-Encoding"):
            self._plain_response(400, "chunked request bodies are not accepted\n")
            return None
        length_text = self.headers.get("Content-Length", "0")
        try:
            length = int(length_text)
        except ValueError:
            self._plain_response(400, "bad Content-Length\n")
            return None
        if length < 0:
            self._plain_response(400, "bad Content-Length\n")
            return None
        if length > _HARD_BODY_CAP:
            self.close_connection = True
            self._plain_response(413, "request body too large\n")
            return None
        return self.rfile.read(length) if length else b""

    def _plain_response(self, status: int, text: str) -> None:
        payload = text.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "text/plain; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(payload)

    def _handle(self) -> None:
        proxy = self._proxy()
        started = time.monotonic()
        now = proxy.clock.now()

        body = self._read_body()
        if body is None:
            return

        target = self.path if self.path.startswith("/") else "/" + self.path
        try:
            request = ClientRequest(
                method=self.command,
                target=target,
                headers=tuple((k, v) for k, v in self.headers.items()),
                body=body,
                client_ip=self._client_ip(),
                received_at=now,
            )
        except ValueError as exc:
            self._plain_response(400, f"bad request: {exc}\n")
            return

        decision = proxy.pipeline.handle_request(request, now)
        if decision.kind is DecisionKind.FORWARD:
            self._relay_upstream(request, decision)
        else:
            status = DENY_STATUS[decision.kind]
            self._plain_response(
                status, f"request denied: {decision.kind.value}\n{decision.detail}\n"
            )
        latency_ms = (time.monotonic() - started) * 1000.0
        proxy.pipeline.log_decision(request, decision, now, latency_ms)

    def _relay_upstream(self, request: ClientRequest, decision: ProxyDecision) -> None:
        proxy = self._proxy()
        plan = decision.sanitized_request
        host, port = proxy.upstream_hostport

        headers: list[tuple[str, str]] = []
        for name, value in plan.headers:
            low = name.lower()
            if low in _HOP_BY_HOP or low in ("content-length", "host", "x-forwarded-for"):
                continue
            headers.append((name, value))
        headers.append(("Host", f"{host}:{port}"))
        prior_xff = request.header("X-Forwarded-For")
        xff = f"{prior_xff}, {request.client_ip}" if prior_xff else request.client_ip
        headers.append(("X-Forwarded-For", xff))
        headers.append(("Content-Length", str(len(plan.body))))
        headers.append(("Connection", "close"))

        conn = http.client.HTTPConnection(host, port, timeout=_UPSTREAM_TIMEOUT_S)
        try:
            conn.putrequest(plan.method, plan.target, skip_host=True, skip_accept_encoding=True)
            for name, value in headers:
                conn.putheader(name, value)
            conn.endheaders(plan.body if plan.body else None)
            resp = conn.getresponse()
            resp_body = resp.read()
        except (OSError, http.client.HTTPException) as exc:
            logger.error("upstream %s:%d unreachable: %s", host, port, exc)
            self._plain_response(502, "upstream unreachable\n")
            return
        finally:
            conn.close()

        self.send_response(resp.status, resp.reason)
        for name, value in resp.getheaders():
            if name.lower() in _HOP_BY_HOP or name.lower() == "content-length":
                continue
            self.send_header(name, value)
        self.send_header("Content-Length", str(len(resp_body)))
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(resp_body)

    do_GET = _handle
    do_POST = _handle
    do_HEAD = _handle
    do_PUT = _handle
    do_DELETE = _handle
    do_PATCH = _handle
    do_OPTIONS = _handle


class ProxyServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(
        self,
        config: ProxyConfig,
        pipeline: Pipeline,
        clock: Optional[Clock] = None,
        listen: Optional[str] = None,
    ):
        self.config = config
        self.pipeline = pipeline
        self.clock = clock or SystemClock()
        self.upstream_hostport = split_hostport(config.upstream)
        host, port = split_hostport(listen or config.listen)
        super().__init__((host, port), ProxyHandler)
        self._thread: Optional[threading.Thread] = None

    @property
    def bound_address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"

    def start_background(self) -> None:
        # short poll interval keeps stop() prompt
        self._thread = threading.Thread(
            target=lambda: self.serve_forever(poll_interval=0.05),
            name="saniproxy-listener",
            daemon=True,
        )
        self._thread.start()

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
