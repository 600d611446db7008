"""Admin endpoint tests: report projections, token gating, static console."""

from urllib.parse import quote_plus

from saniproxy.adminapi import AdminServer
from saniproxy.config import ProxyConfig
from saniproxy.reputation import LogNotifier, ReputationStore, SubjectKind

TAUT_QUERY = "/items?id=nil%27+OR+1%3D1--"
TOKEN = "change-me"  # ProxyConfig default; make_stack does not override it


def attack_from(stack, ip, target=TAUT_QUERY):
    status, _, body = stack.request(
        "GET", target, headers={"X-Forwarded-For": ip}
    )
    return status, body


def test_status_endpoint_counts_traffic(make_stack):
    import time

    from conftest import wait_for

    stack = make_stack()
    stack.request("GET", "/items?q=fine")
    attack_from(stack, "198.51.100.10")
    wait_for(lambda: stack.store.status(time.time())["total_requests"] == 2)
    status, payload = stack.admin_get("/api/status")
    assert status == 200
    assert payload["total_requests"] == 2
    assert payload["decisions"] == {"DENY_SQLI": 1, "FORWARD": 1}
    assert payload["events_recorded"] == 1
    assert payload["active_blocks"] == 0
    assert payload["uptime_s"] >= 0


def test_attacks_endpoint_returns_bare_list(make_stack):
    stack = make_stack()
    attack_from(stack, "198.51.100.11")
    attack_from(stack, "198.51.100.12")
    status, rows = stack.admin_get("/api/attacks")
    assert status == 200
    assert isinstance(rows, list) and len(rows) == 2
    # newest first
    assert rows[0]["ip"] == "198.51.100.12"
    assert set(rows[0]) == {
        "event_id", "class", "desc", "ip", "login", "browser", "url", "ts",
    }


def test_attacks_since_cursor(make_stack):
    stack = make_stack()
    attack_from(stack, "198.51.100.13")
    _, rows = stack.admin_get("/api/attacks")
    cursor = rows[0]["ts"]
    attack_from(stack, "198.51.100.14")
    # a row's own ts fed back as the cursor excludes it exactly
    status, newer = stack.admin_get("/api/attacks?since=" + quote_plus(cursor))
    assert status == 200
    ips = {r["ip"] for r in newer}
    assert "198.51.100.13" not in ips
    status, all_rows = stack.admin_get("/api/attacks?since=0")
    assert {r["ip"] for r in all_rows} == {"198.51.100.13", "198.51.100.14"}


def test_attacks_bad_since_rejected(make_stack):
    stack = make_stack()
    status, payload = stack.admin_get("/api/attacks?since=lastweek")
    assert status == 400
    assert "since" in payload["error"]


def test_read_endpoints_need_no_token(make_stack):
    stack = make_stack()
    for path in (
        "/api/status", "/api/attacks", "/api/blocked",
        "/api/analysis/ip", "/api/analysis/web",
    ):
        status, _ = stack.admin_get(path)
        assert status == 200, path


def test_unknown_endpoint_404(make_stack):
    stack = make_stack()
    status, payload = stack.admin_get("/api/nope")
    assert status == 404
    assert "error" in payload


def test_block_endpoint_requires_token(make_stack):
    stack = make_stack()
    payload = {"subject": "198.51.100.20", "kind": "IP", "duration_s": 60}
    status, body = stack.admin_send("POST", "/api/block", payload)
    assert status == 401
    status, _ = stack.admin_send("POST", "/api/block", payload, token="wrong")
    assert status == 401
    status, body = stack.admin_send("POST", "/api/block", payload, token=TOKEN)
    assert status == 200
    assert body["subject"] == "198.51.100.20"
    assert body["kind"] == "IP"
    assert body["reason"] == "MANUAL"
    assert body["block_until"] > body["blocked_at"]


def test_bearer_token_accepted(make_stack):
    import time

    stack = make_stack()
    status, _, raw = stack.request(
        "POST",
        "/api/block",
        b'{"subject": "198.51.100.21", "duration_s": 60}',
        headers={
            "Authorization": f"Bearer {TOKEN}",
            "Content-Type": "application/json",
        },
        addr=stack.admin_addr,
    )
    assert status == 200
    assert stack.store.is_blocked("198.51.100.21", SubjectKind.IP, time.time())


def test_manual_block_enforced_by_proxy(make_stack):
    stack = make_stack()
    stack.admin_send(
        "POST", "/api/block",
        {"subject": "198.51.100.22", "kind": "ip", "duration_s": 3600},
        token=TOKEN,
    )
    status, body = attack_from(stack, "198.51.100.22", target="/items?q=benign")
    assert status == 403
    assert body.decode().splitlines()[0] == "request denied: DENY_BLOCKED_IP"

    status, payload = stack.admin_send(
        "DELETE", "/api/block/198.51.100.22", token=TOKEN
    )
    assert status == 200
    assert payload == {"subject": "198.51.100.22", "removed": True}
    status, _ = attack_from(stack, "198.51.100.22", target="/items?q=benign")
    assert status == 200

    status, payload = stack.admin_send(
        "DELETE", "/api/block/198.51.100.22", token=TOKEN
    )
    assert payload == {"subject": "198.51.100.22", "removed": False}


def test_account_block_via_api_denies_login(make_stack):
    import hashlib

    stack = make_stack(credentials={"bob": hashlib.md5(b"pw").hexdigest()})
    stack.admin_send(
        "POST", "/api/block",
        {"subject": "eve", "kind": "account", "duration_s": 3600},
        token=TOKEN,
    )
    status, _, body = stack.request(
        "POST", "/login", b"username=eve&password=pw"
    )
    assert status == 403
    assert body.decode().splitlines()[0] == "request denied: DENY_BLOCKED_ACCOUNT"
    # other accounts from the same address still pass
    status, _, body = stack.request("POST", "/login", b"username=bob&password=pw")
    assert status == 200
    assert b"welcome bob" in body


def test_block_validation_errors(make_stack):
    stack = make_stack()
    cases = [
        {"subject": "not-an-ip", "kind": "IP"},
        {"subject": "198.51.100.23", "kind": "HOSTNAME"},
        {"subject": "198.51.100.23", "kind": "IP", "duration_s": -1},
        {"kind": "IP"},
    ]
    for payload in cases:
        status, body = stack.admin_send("POST", "/api/block", payload, token=TOKEN)
        assert status == 400, payload
        assert "error" in body


def test_unblock_requires_token(make_stack):
    stack = make_stack()
    status, _ = stack.admin_send("DELETE", "/api/block/198.51.100.24")
    assert status == 401


def test_blocked_listing_after_automatic_block(make_stack):
    stack = make_stack(block_threshold=1, block_seconds=3600)
    attack_from(stack, "198.51.100.25")
    attack_from(stack, "198.51.100.25")
    status, rows = stack.admin_get("/api/blocked")
    assert status == 200
    assert len(rows) == 1
    assert rows[0]["subject"] == "198.51.100.25"
    assert rows[0]["reason"] == "AUTOMATIC"
    assert rows[0]["attacks"] == 2


def test_analysis_endpoints_shapes(make_stack):
    stack = make_stack()
    attack_from(stack, "198.51.100.26")
    attack_from(stack, "198.51.100.26")
    attack_from(stack, "198.51.100.27")

    status, rows = stack.admin_get("/api/analysis/ip")
    assert status == 200
    by_ip = {r["ip"]: r for r in rows}
    assert by_ip["198.51.100.26"]["requests"] == 2
    assert "timestamps" not in by_ip["198.51.100.26"]

    status, rows = stack.admin_get("/api/analysis/ip?ip=198.51.100.26")
    assert len(rows) == 1 and len(rows[0]["timestamps"]) == 2

    status, rows = stack.admin_get("/api/analysis/web")
    assert status == 200
    assert rows and sum(r["count"] for r in rows) == 3
    assert set(rows[0]) == {"browser", "count"}


def test_static_console_serving(tmp_path):
    ui = tmp_path / "ui"
    (ui / "assets").mkdir(parents=True)
    (ui / "index.html").write_text("<!doctype html><title>console</title>")
    (ui / "assets" / "app.js").write_text("console.log('ready');")
    (tmp_path / "secret.txt").write_text("keep out")

    cfg = ProxyConfig(admin_listen="127.0.0.1:0", log_dir=str(tmp_path / "logs"))
    store = ReputationStore(cfg.log_dir, notifier=LogNotifier())
    admin = AdminServer(cfg, store, ui_dir=str(ui))
    admin.start_background()
    try:
        import http.client

        def get(path):
            host, _, port = admin.bound_address.rpartition(":")
            conn = http.client.HTTPConnection(host, int(port), timeout=10)
            try:
                conn.request("GET", path)
                resp = conn.getresponse()
                return resp.status, dict(resp.getheaders()), resp.read()
            finally:
                conn.close()

        status, headers, body = get("/ui")
        assert status == 200 and b"console" in body
        assert "text/html" in headers["Content-Type"]

        status, headers, body = get("/ui/assets/app.js")
        assert status == 200 and b"ready" in body
        assert "javascript" in headers["Content-Type"]

        status, _, _ = get("/ui/missing.css")
        assert status == 404
        status, _, body = get("/ui/../secret.txt")
        assert b"keep out" not in body
    finally:
        admin.stop()
        store.close()


def test_console_404_when_not_built(make_stack):
    stack = make_stack()
    status, payload = stack.admin_get("/ui")
    assert status == 404
    assert "not built" in payload["error"]
