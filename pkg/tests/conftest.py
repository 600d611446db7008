"""Shared fixtures: request builders and a full running proxy stack."""

from __future__ import annotations

import http.client
import json
from dataclasses import dataclass, field
from typing import Optional

import pytest

from saniproxy import md5hash
from saniproxy.adminapi import AdminServer
from saniproxy.config import ProxyConfig
from saniproxy.harness.mock_upstream import MockUpstream
from saniproxy.model import ClientRequest
from saniproxy.pipeline import Pipeline
from saniproxy.prototypes import PrototypeSet, load_prototypes
from saniproxy.reputation import LogNotifier, ReputationStore
from saniproxy.server import ProxyServer


@pytest.fixture(scope="session", autouse=True)
def compiled_md5():
    # jit compilation must not land inside a latency measurement
    md5hash.warm_up()


def wait_for(predicate, timeout: float = 2.0, interval: float = 0.01) -> None:
    """Spin until predicate() is true; access lines land just after the
    response bytes, so status polls can race the log writer."""
    import time

    deadline = time.monotonic() + timeout
    while not predicate():
        if time.monotonic() > deadline:
            raise AssertionError("condition not reached before timeout")
        time.sleep(interval)


def make_request(
    method: str = "GET",
    target: str = "/",
    body: bytes = b"",
    client_ip: str = "203.0.113.7",
    headers: Optional[dict[str, str]] = None,
    received_at: float = 0.0,
) -> ClientRequest:
    hdrs = {"host": "app.example"}
    if method in ("POST", "PUT", "PATCH") and body:
        hdrs["content-type"] = "application/x-www-form-urlencoded"
    hdrs.update(headers or {})
    return ClientRequest(
        method=method,
        target=target,
        headers=tuple(hdrs.items()),
        body=body,
        client_ip=client_ip,
        received_at=received_at,
    )


@dataclass
class Stack:
    config: ProxyConfig
    store: ReputationStore
    pipeline: Pipeline
    proxy: ProxyServer
    admin: AdminServer
    upstream: MockUpstream
    log_dir: str
    notifier: LogNotifier
    _closed: bool = field(default=False)

    @property
    def proxy_addr(self) -> str:
        return self.proxy.bound_address

    @property
    def admin_addr(self) -> str:
        return self.admin.bound_address

    @property
    def upstream_addr(self) -> str:
        return self.upstream.bound_address

    def request(
        self,
        method: str,
        target: str,
        body: Optional[bytes] = None,
        headers: Optional[dict[str, str]] = None,
        addr: Optional[str] = None,
    ):
        """Send one request; returns (status, headers dict, body bytes)."""
        host, _, port = (addr or self.proxy_addr).rpartition(":")
        conn = http.client.HTTPConnection(host, int(port), timeout=10)
        hdrs = {"Connection": "close"}
        if body is not None and "Content-Type" not in (headers or {}):
            hdrs["Content-Type"] = "application/x-www-form-urlencoded"
        hdrs.update(headers or {})
        try:
            conn.request(method, target, body=body, headers=hdrs)
            resp = conn.getresponse()
            return resp.status, dict(resp.getheaders()), resp.read()
        finally:
            conn.close()

    def admin_get(self, path: str, token: Optional[str] = None):
        headers = {"X-Admin-Token": token} if token else None
        status, _, body = self.request("GET", path, headers=headers, addr=self.admin_addr)
        return status, json.loads(body) if body else None

    def admin_send(self, method: str, path: str, payload=None, token: Optional[str] = None):
        headers = {}
        if token:
            headers["X-Admin-Token"] = token
        body = None
        if payload is not None:
            body = json.dumps(payload).encode()
            headers["Content-Type"] = "application/json"
        status, _, raw = self.request(method, path, body=body, headers=headers, addr=self.admin_addr)
        return status, json.loads(raw) if raw else None

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        self.proxy.stop()
        self.admin.stop()
        self.store.close()
        self.upstream.stop()


def build_stack(
    log_dir,
    credentials: Optional[dict[str, str]] = None,
    prototypes: Optional[str | PrototypeSet] = "data/prototypes.xml",
    **config_overrides,
) -> Stack:
    """Assemble a full live stack (upstream, proxy, admin) on ephemeral ports."""
    log_dir.mkdir(parents=True, exist_ok=True)
    upstream = MockUpstream("127.0.0.1:0", credentials)
    upstream.start_background()
    config_overrides.setdefault("trust_forwarded_for", True)
    cfg = ProxyConfig(
        listen="127.0.0.1:0",
        admin_listen="127.0.0.1:0",
        upstream=upstream.bound_address,
        log_dir=str(log_dir),
        **config_overrides,
    )
    notifier = LogNotifier()
    store = ReputationStore(
        str(log_dir),
        threshold=cfg.block_threshold,
        block_seconds=cfg.block_seconds,
        consecutive_only=cfg.consecutive_only,
        notifier=notifier,
    )
    if isinstance(prototypes, str):
        prototypes = load_prototypes(prototypes)
    pipeline = Pipeline(cfg, store, prototypes)
    proxy = ProxyServer(cfg, pipeline)
    proxy.start_background()
    admin = AdminServer(cfg, store)
    admin.start_background()
    return Stack(cfg, store, pipeline, proxy, admin, upstream, str(log_dir), notifier)


@pytest.fixture
def make_stack(tmp_path):
    """Factory for a full live stack on ephemeral ports."""
    stacks: list[Stack] = []
    counter = [0]

    def build(
        credentials: Optional[dict[str, str]] = None,
        prototypes: Optional[str | PrototypeSet] = "data/prototypes.xml",
        **config_overrides,
    ) -> Stack:
        counter[0] += 1
        stack = build_stack(
            tmp_path / f"logs{counter[0]}", credentials, prototypes,
            **config_overrides,
        )
        stacks.append(stack)
        return stack

    yield build
    for stack in stacks:
        stack.close()


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when == "call":
        if report.skipped:
            outcome = "SKIP"
        elif report.passed:
            outcome = "PASS"
        else:
            outcome = "FAIL"
        _ACCEPTANCE_RESULTS.append((name, outcome))
    elif report.when == "setup" and report.skipped:
        _ACCEPTANCE_RESULTS.append((name, "SKIP"))
    elif report.when == "setup" and report.failed:
        _ACCEPTANCE_RESULTS.append((name, "FAIL (setup)"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"  {name}: {outcome}")
