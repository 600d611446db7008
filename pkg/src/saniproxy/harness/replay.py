"""Replays a labeled corpus through the proxy and scores the outcome.

Each corpus entry is sent from its own synthetic client address (via
X-Forwarded-For, so the proxy must be configured to trust that header) to
keep the reputation blocker from interfering with detection scoring. When a
baseline address is given, benign entries are also sent directly to it from
the same thread so per-request proxy overhead can be measured under matched
conditions.
"""

from __future__ import annotations

import http.client
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .corpus import CorpusEntry

_DENY_PREFIX = "request denied: "


@dataclass
class LabelScore:
    expected: int = 0
    detected: int = 0
    missed: int = 0
    false_positive: int = 0


@dataclass
class ReplayReport:
    per_label: dict = field(default_factory=dict)
    errored: list = field(default_factory=list)
    latency_ms: dict = field(default_factory=dict)
    overhead_ms: dict = field(default_factory=dict)
    elapsed_s: float = 0.0
    total: int = 0

    def score(self, label: str) -> LabelScore:
        return self.per_label.setdefault(label, LabelScore())

    def detection_rate(self, label: str) -> float:
        s = self.per_label[label]
        return s.detected / s.expected if s.expected else 0.0

    @property
    def false_positives(self) -> int:
        return sum(s.false_positive for s in self.per_label.values())

    def to_dict(self) -> dict:
        return {
            "per_label": {
                k: vars(v) for k, v in sorted(self.per_label.items())
            },
            "errored": self.errored,
            "latency_ms": self.latency_ms,
            "overhead_ms": self.overhead_ms,
            "elapsed_s": self.elapsed_s,
            "total": self.total,
        }


def _send(addr: str, entry: CorpusEntry, extra_headers: dict) -> tuple[int, str, float]:
    """One request over a fresh connection. Returns (status, body, rtt_ms)."""
    host, _, port = addr.rpartition(":")
    conn = http.client.HTTPConnection(host, int(port), timeout=30)
    headers = {"Connection": "close", **extra_headers}
    body = None
    if entry.method == "POST":
        body = entry.body.encode("utf-8")
        headers["Content-Type"] = "application/x-www-form-urlencoded"
    start = time.monotonic()
    try:
        conn.request(entry.method, entry.target, body=body, headers=headers)
        resp = conn.getresponse()
        payload = resp.read().decode("utf-8", "replace")
        return resp.status, payload, (time.monotonic() - start) * 1000.0
    finally:
        conn.close()


def _infer_decision(status: int, payload: str) -> str:
    # only the proxy's own denials carry this prefix; anything else means the
    # request was forwarded and whatever came back is the upstream's business
    first = payload.splitlines()[0] if payload else ""
    if first.startswith(_DENY_PREFIX):
        return first[len(_DENY_PREFIX):].strip()
    return "FORWARD"


def _client_ip_for(index: int) -> str:
    # collision-free for 255*255 entries, so the block counter never pools
    # attacks that belong to different corpus entries
    high, low = divmod(index, 255)
    return f"10.0.{high % 255}.{low + 1}"


def replay(
    entries: list[CorpusEntry],
    proxy_addr: str,
    baseline_addr: str | None = None,
    concurrency: int = 8,
) -> ReplayReport:
    report = ReplayReport(total=len(entries))

    def task(item):
        index, entry = item
        headers = {"X-Forwarded-For": _client_ip_for(index)}
        overhead = None
        try:
            if baseline_addr and entry.label == "BENIGN":
                _, _, direct_ms = _send(baseline_addr, entry, {})
                status, payload, rtt = _send(proxy_addr, entry, headers)
                overhead = rtt - direct_ms
            else:
                status, payload, rtt = _send(proxy_addr, entry, headers)
        except OSError as exc:
            return entry, None, None, str(exc)
        if status == 502:
            return entry, None, None, f"upstream failure: {payload.strip()}"
        return entry, _infer_decision(status, payload), rtt, overhead

    started = time.monotonic()
    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        results = list(pool.map(task, enumerate(entries)))
    report.elapsed_s = time.monotonic() - started

    latencies = []
    overheads = []
    for entry, decision, rtt, extra in results:
        score = report.score(entry.label)
        score.expected += 1
        if decision is None:
            report.errored.append({"target": entry.target, "error": extra})
            continue
        latencies.append(rtt)
        if isinstance(extra, float):
            overheads.append(extra)
        if entry.label == "BENIGN":
            if decision == "FORWARD":
                score.detected += 1
            else:
                score.false_positive += 1
        elif decision == entry.expect:
            score.detected += 1
        else:
            score.missed += 1

    report.latency_ms = _summary(latencies)
    if overheads:
        report.overhead_ms = _summary(overheads)
    return report


def _summary(values: list[float]) -> dict:
    if not values:
        return {}
    ordered = sorted(values)
    return {
        "count": len(values),
        "mean": statistics.fmean(values),
        "p50": ordered[len(ordered) // 2],
        "p95": ordered[min(len(ordered) - 1, int(len(ordered) * 0.95))],
        "max": ordered[-1],
    }
