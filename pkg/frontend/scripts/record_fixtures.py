#!/usr/bin/env python3
"""Record the admin API fixtures that drive the console's contract tests.

Starts the real proxy stack, sends a small scripted traffic sample, and
saves the admin API's actual HTTP responses under tests/fixtures/. Run
from the repository root after installing the backend package:

    python3 frontend/scripts/record_fixtures.py
"""

import http.client
import json
import tempfile
from pathlib import Path

from saniproxy.adminapi import AdminServer
from saniproxy.config import ProxyConfig
from saniproxy.harness.mock_upstream import MockUpstream
from saniproxy.pipeline import Pipeline
from saniproxy.reputation import LogNotifier, ReputationStore
from saniproxy.server import ProxyServer

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
TOKEN = "change-me"

CHROME = ("Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 "
          "(KHTML, like Gecko) Chrome/126.0 Safari/537.36")
FIREFOX = "Mozilla/5.0 (X11; Linux x86_64; rv:127.0) Gecko/20100101 Firefox/127.0"
CURL = "curl/8.5.0"


def send(addr, method, target, body=None, headers=None):
    host, _, port = addr.rpartition(":")
    conn = http.client.HTTPConnection(host, int(port), timeout=10)
    hdrs = {"Connection": "close"}
    if body is not None:
        hdrs["Content-Type"] = "application/x-www-form-urlencoded"
    hdrs.update(headers or {})
    try:
        conn.request(method, target, body=body, headers=hdrs)
        resp = conn.getresponse()
        return resp.status, resp.read()
    finally:
        conn.close()


def main() -> None:
    log_dir = Path(tempfile.mkdtemp()) / "logs"
    upstream = MockUpstream("127.0.0.1:0")
    upstream.start_background()
    cfg = ProxyConfig(
        listen="127.0.0.1:0",
        admin_listen="127.0.0.1:0",
        upstream=upstream.bound_address,
        log_dir=str(log_dir),
        trust_forwarded_for=True,
    )
    store = ReputationStore(
        str(log_dir),
        threshold=cfg.block_threshold,
        block_seconds=cfg.block_seconds,
        notifier=LogNotifier(),
    )
    proxy = ProxyServer(cfg, Pipeline(cfg, store, None))
    proxy.start_background()
    admin = AdminServer(cfg, store)
    admin.start_background()

    try:
        taut = "/items?id=nil%27+OR+1%3D1--"
        for _ in range(4):  # fourth attack triggers the automatic block
            send(proxy.bound_address, "GET", taut,
                 headers={"X-Forwarded-For": "203.0.113.50", "User-Agent": CHROME})
        send(proxy.bound_address, "POST", "/login",
             body=b"username=eve&password=%27+UNION+SELECT+pin+FROM+cards+--",
             headers={"X-Forwarded-For": "203.0.113.51", "User-Agent": FIREFOX})
        send(proxy.bound_address, "GET",
             "/comment?text=%3Cscript%3Ealert%281%29%3C%2Fscript%3E",
             headers={"X-Forwarded-For": "203.0.113.52", "User-Agent": CURL})
        status, _ = send(
            admin.bound_address, "POST", "/api/block",
            body=json.dumps({"subject": "mallory", "kind": "account",
                             "duration_s": 7200, "reason": "abuse report"}).encode(),
            headers={"X-Admin-Token": TOKEN, "Content-Type": "application/json"},
        )
        assert status == 200, status

        captures = {
            "attacks.json": "/api/attacks",
            "blocked.json": "/api/blocked",
            "status.json": "/api/status",
            "analysis_ip.json": "/api/analysis/ip",
            "analysis_web.json": "/api/analysis/web",
            "analysis_ip_filtered.json": "/api/analysis/ip?ip=203.0.113.50",
        }
        FIXTURES.mkdir(parents=True, exist_ok=True)
        for name, path in captures.items():
            status, payload = send(admin.bound_address, "GET", path)
            assert status == 200, (path, status)
            parsed = json.loads(payload)
            (FIXTURES / name).write_text(json.dumps(parsed, indent=2) + "\n")
            size = len(parsed) if isinstance(parsed, list) else len(parsed.keys())
            print(f"wrote {name} ({size} entries)")
    finally:
        proxy.stop()
        admin.stop()
        store.close()
        upstream.stop()


if __name__ == "__main__":
    main()
