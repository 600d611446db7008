"""Attacker reputation: event log, block policy, alerts, and reports.

State lives in memory behind one lock; durability comes from append-only
JSON-lines logs (`attacks.log`, `access.log`, `blocks.log`) that are replayed
on startup. Replay is deterministic, so a restarted store reproduces the
same reports the crashed one would have served.

Block policy: attacks are counted per IP (and per login name when one was
submitted) over a sliding window equal to the block duration. When a counter
exceeds the threshold the subject is blocked for the configured duration and
a notification is emitted. With ``consecutive_only`` the literal reading
applies instead: any forwarded request from an IP resets its counter.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Optional

from .clock import format_ts, parse_ts
from .model import AttackClass, AttackEvent, DecisionKind

logger = logging.getLogger(__name__)

DEFAULT_BLOCK_THRESHOLD = 3
DEFAULT_BLOCK_SECONDS = 10800  # three hours

ACCESS_LOG = "access.log"
ATTACKS_LOG = "attacks.log"
BLOCKS_LOG = "blocks.log"


class SubjectKind(Enum):
    IP = "IP"
    ACCOUNT = "ACCOUNT"


class BlockReason(Enum):
    AUTOMATIC = "AUTOMATIC"
    MANUAL = "MANUAL"


@dataclass(frozen=True)
class BlockEntry:
    subject: str
    kind: SubjectKind
    reason: BlockReason
    blocked_at: float
    block_until: float
    attack_count_at_block: int

    def __post_init__(self):
        if self.block_until <= self.blocked_at:
            raise ValueError("block_until must be after blocked_at")


class Notifier:
    """Alert sink for automatic blocks. Base class swallows nothing."""

    def notify(self, entry: BlockEntry, event: AttackEvent) -> None:
        raise NotImplementedError


class LogNotifier(Notifier):
    """Keeps alerts in memory and mirrors them to the ops log."""

    def __init__(self):
        self.alerts: list[tuple[BlockEntry, AttackEvent]] = []

    def notify(self, entry: BlockEntry, event: AttackEvent) -> None:
        self.alerts.append((entry, event))
        logger.warning(
            "blocked %s %s until %s after %d attacks (last: %s)",
            entry.kind.value,
            entry.subject,
            format_ts(entry.block_until),
            entry.attack_count_at_block,
            event.attack_class.value,
        )


class FileNotifier(Notifier):
    """Appends one JSON alert line per block; stands in for the alert e-mail."""

    def __init__(self, path):
        self.path = Path(path)

    def notify(self, entry: BlockEntry, event: AttackEvent) -> None:
        line = json.dumps(
            {
                "alert": "subject_blocked",
                "kind": entry.kind.value,
                "subject": entry.subject,
                "blocked_at": format_ts(entry.blocked_at),
                "block_until": format_ts(entry.block_until),
                "attacks": entry.attack_count_at_block,
                "last_attack_class": event.attack_class.value,
                "ip": event.client_ip,
                "login": event.login_name,
            },
            separators=(",", ":"),
        )
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")


def browser_family(user_agent: str) -> str:
    """Coarse User-Agent family for the web-based analysis report."""
    ua = user_agent.lower()
    if not ua:
        return "unknown"
    for needle, family in (
        ("edg", "Edge"),
        ("opr", "Opera"),
        ("opera", "Opera"),
        ("chrome", "Chrome"),
        ("firefox", "Firefox"),
        ("safari", "Safari"),
        ("msie", "Internet Explorer"),
        ("trident", "Internet Explorer"),
        ("curl", "curl"),
        ("python", "Python"),
    ):
        if needle in ua:
            return family
    return user_agent.split("/", 1)[0].strip() or "unknown"


@dataclass(frozen=True)
class AccessRecord:
    ts: float
    ip: str
    method: str
    target: str
    decision: DecisionKind
    latency_ms: float
    event_id: Optional[int] = None


class ReputationStore:
    """Shared mutable state of the proxy; every access goes through the lock."""

    def __init__(
        self,
        log_dir,
        threshold: int = DEFAULT_BLOCK_THRESHOLD,
        block_seconds: float = DEFAULT_BLOCK_SECONDS,
        consecutive_only: bool = False,
        notifier: Optional[Notifier] = None,
        replay: bool = True,
    ):
        self.log_dir = Path(log_dir)
        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.threshold = threshold
        self.block_seconds = float(block_seconds)
        self.window_seconds = float(block_seconds)
        self.consecutive_only = consecutive_only
        self.notifier = notifier or LogNotifier()

        self._lock = threading.Lock()
        self._events: list[AttackEvent] = []
        self._next_event_id = 1
        self._hits: dict[tuple[SubjectKind, str], list[float]] = {}
        self._blocks: dict[tuple[SubjectKind, str], BlockEntry] = {}
        self._decision_counts: dict[str, int] = {}
        self._total_requests = 0
        self._started_at: Optional[float] = None
        self._files: dict[str, object] = {}

        if replay:
            self._replay_logs()
        for name in (ACCESS_LOG, ATTACKS_LOG, BLOCKS_LOG):
            self._files[name] = open(self.log_dir / name, "a", encoding="utf-8")

    def close(self) -> None:
        with self._lock:
            for fh in self._files.values():
                try:
                    fh.close()
                except OSError:
                    pass
            self._files.clear()

    # ---------------- persistence ----------------

    def _append(self, name: str, record: dict) -> None:
        line = json.dumps(record, separators=(",", ":"))
        fh = self._files.get(name)
        try:
            if fh is None:
                raise OSError("log file not open")
            fh.write(line + "\n")
            fh.flush()
        except OSError as exc:
            logger.error("failed to append to %s: %s (record kept in memory)", name, exc)

    def _replay_logs(self) -> None:
        records: list[tuple[float, int, str, dict]] = []
        # source priority orders same-timestamp records: attacks before
        # access before manual block actions
        for priority, name in ((0, ATTACKS_LOG), (1, ACCESS_LOG), (2, BLOCKS_LOG)):
            path = self.log_dir / name
            if not path.exists():
                continue
            with open(path, "r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                        ts = parse_ts(rec["ts"])
                    except (ValueError, KeyError) as exc:
                        logger.error("skipping bad %s line %d: %s", name, lineno + 1, exc)
                        continue
                    records.append((ts, priority, name, rec))
        records.sort(key=lambda r: (r[0], r[1]))

        for ts, _, name, rec in records:
            if name == ATTACKS_LOG:
                event = AttackEvent(
                    event_id=int(rec["event_id"]),
                    attack_class=AttackClass(rec["class"]),
                    description=rec.get("desc", ""),
                    client_ip=rec.get("ip", ""),
                    login_name=rec.get("login"),
                    browser=rec.get("browser", ""),
                    url=rec.get("url", ""),
                    timestamp=ts,
                )
                self._apply_attack(
                    event, ts, persist=False, alert=False,
                    counted=rec.get("counted", True),
                )
                self._next_event_id = max(self._next_event_id, event.event_id + 1)
            elif name == ACCESS_LOG:
                # restore the status counters so a restart does not zero them
                self._total_requests += 1
                decision = rec.get("decision", "")
                self._decision_counts[decision] = self._decision_counts.get(decision, 0) + 1
                if self.consecutive_only and decision == DecisionKind.FORWARD.value:
                    self._hits.pop((SubjectKind.IP, rec.get("ip", "")), None)
            else:
                self._apply_block_action(rec, ts)

    def _apply_block_action(self, rec: dict, ts: float) -> None:
        action = rec.get("action")
        if action == "block":
            entry = BlockEntry(
                subject=rec["subject"],
                kind=SubjectKind(rec["kind"]),
                reason=BlockReason(rec.get("reason", "MANUAL")),
                blocked_at=ts,
                block_until=parse_ts(rec["block_until"]),
                attack_count_at_block=int(rec.get("attacks", 0)),
            )
            self._blocks[(entry.kind, entry.subject)] = entry
        elif action == "unblock":
            subject = rec.get("subject", "")
            for kind in SubjectKind:
                self._blocks.pop((kind, subject), None)

    # ---------------- core policy ----------------

    def record_attack(
        self, event: AttackEvent, now: float, counted: bool = True
    ) -> tuple[AttackEvent, Optional[BlockEntry]]:
        """Append the event (assigning its id) and apply the block policy.

        Audit-only events (counted=False) appear in the reports but do not
        feed block counters. Returns the stored event and the block entry
        when one fired.
        """
        # quantize to the log's millisecond precision so a report timestamp
        # fed back as a since-cursor excludes exactly the rows already seen
        now = round(now, 3)
        with self._lock:
            event = replace(event, event_id=self._next_event_id, timestamp=now)
            self._next_event_id += 1
            entry = self._apply_attack(event, now, persist=True, alert=True, counted=counted)
            return event, entry

    def _apply_attack(
        self, event: AttackEvent, now: float, persist: bool, alert: bool,
        counted: bool = True,
    ) -> Optional[BlockEntry]:
        self._events.append(event)
        if persist:
            record = {
                "event_id": event.event_id,
                "class": event.attack_class.value,
                "desc": event.description,
                "ip": event.client_ip,
                "login": event.login_name,
                "browser": event.browser,
                "url": event.url,
                "ts": format_ts(now),
            }
            if not counted:
                record["counted"] = False
            self._append(ATTACKS_LOG, record)
        if not counted:
            return None

        fired: Optional[BlockEntry] = None
        subjects = [(SubjectKind.IP, event.client_ip)]
        if event.login_name:
            subjects.append((SubjectKind.ACCOUNT, event.login_name))
        for kind, subject in subjects:
            if not subject:
                continue
            hits = self._hits.setdefault((kind, subject), [])
            cutoff = now - self.window_seconds
            hits[:] = [t for t in hits if t > cutoff]
            hits.append(now)
            if len(hits) > self.threshold:
                entry = BlockEntry(
                    subject=subject,
                    kind=kind,
                    reason=BlockReason.AUTOMATIC,
                    blocked_at=now,
                    block_until=now + self.block_seconds,
                    attack_count_at_block=len(hits),
                )
                self._blocks[(kind, subject)] = entry
                if fired is None:
                    fired = entry
                if alert:
                    try:
                        self.notifier.notify(entry, event)
                    except Exception:
                        logger.exception("notifier failed for %s %s", kind.value, subject)
        return fired

    def is_blocked(self, subject: str, kind: SubjectKind, now: float) -> bool:
        with self._lock:
            entry = self._blocks.get((kind, subject))
            if entry is None:
                return False
            if entry.block_until > now:
                return True
            del self._blocks[(kind, subject)]  # lazy retirement
            return False

    def manual_block(
        self, subject: str, kind: SubjectKind, duration_s: float, now: float
    ) -> BlockEntry:
        if duration_s <= 0:
            raise ValueError("duration must be positive")
        with self._lock:
            count = len(self._hits.get((kind, subject), []))
            entry = BlockEntry(
                subject=subject,
                kind=kind,
                reason=BlockReason.MANUAL,
                blocked_at=now,
                block_until=now + duration_s,
                attack_count_at_block=count,
            )
            self._blocks[(kind, subject)] = entry
            self._append(
                BLOCKS_LOG,
                {
                    "action": "block",
                    "subject": subject,
                    "kind": kind.value,
                    "reason": "MANUAL",
                    "block_until": format_ts(entry.block_until),
                    "attacks": count,
                    "ts": format_ts(now),
                },
            )
            return entry

    def manual_unblock(self, subject: str, now: float) -> Optional[BlockEntry]:
        """Remove any active block on the subject; None when nothing was blocked."""
        with self._lock:
            removed = None
            for kind in SubjectKind:
                entry = self._blocks.pop((kind, subject), None)
                if entry is not None:
                    removed = entry
            if removed is not None:
                self._append(
                    BLOCKS_LOG,
                    {"action": "unblock", "subject": subject, "ts": format_ts(now)},
                )
            return removed

    # ---------------- access log & status ----------------

    def log_access(self, record: AccessRecord) -> None:
        with self._lock:
            self._total_requests += 1
            key = record.decision.value
            self._decision_counts[key] = self._decision_counts.get(key, 0) + 1
            if self._started_at is None:
                self._started_at = record.ts
            if self.consecutive_only and record.decision is DecisionKind.FORWARD:
                self._hits.pop((SubjectKind.IP, record.ip), None)
            line = {
                "ts": format_ts(record.ts),
                "ip": record.ip,
                "method": record.method,
                "target": record.target,
                "decision": record.decision.value,
                "latency_ms": round(record.latency_ms, 3),
            }
            if record.event_id is not None:
                line["event_id"] = record.event_id
            self._append(ACCESS_LOG, line)

    def status(self, now: float) -> dict:
        with self._lock:
            active = sum(1 for e in self._blocks.values() if e.block_until > now)
            return {
                "uptime_s": round(now - self._started_at, 3) if self._started_at else 0.0,
                "total_requests": self._total_requests,
                "decisions": dict(sorted(self._decision_counts.items())),
                "active_blocks": active,
                "events_recorded": len(self._events),
            }

    # ---------------- reports ----------------

    def report_attack_list(self, since: Optional[float] = None) -> list[dict]:
        """All attack events, newest first; the administrator's main table.

        Sorted by (timestamp, event_id) rather than insertion order: under
        concurrency events can be recorded out of receive order, and a store
        rebuilt from the logs replays them sorted. The explicit key makes
        both stores report identically.
        """
        with self._lock:
            ordered = sorted(self._events, key=lambda e: (e.timestamp, e.event_id))
            rows = []
            for e in reversed(ordered):
                if since is not None and e.timestamp <= since:
                    continue
                rows.append(
                    {
                        "event_id": e.event_id,
                        "class": e.attack_class.value,
                        "desc": e.description,
                        "ip": e.client_ip,
                        "login": e.login_name,
                        "browser": e.browser,
                        "url": e.url,
                        "ts": format_ts(e.timestamp),
                    }
                )
            return rows

    def report_blocked_ips(self, now: float) -> list[dict]:
        with self._lock:
            rows = []
            for entry in self._blocks.values():
                if entry.block_until <= now:
                    continue
                if entry.kind is SubjectKind.IP:
                    attacks = sum(1 for e in self._events if e.client_ip == entry.subject)
                else:
                    attacks = sum(1 for e in self._events if e.login_name == entry.subject)
                rows.append(
                    {
                        "subject": entry.subject,
                        "kind": entry.kind.value,
                        "reason": entry.reason.value,
                        "blocked_at": format_ts(entry.blocked_at),
                        "block_until": format_ts(entry.block_until),
                        "attacks": attacks,
                    }
                )
            rows.sort(key=lambda r: (r["kind"], r["subject"]))
            return rows

    def report_ip_analysis(self, ip: Optional[str] = None) -> list[dict]:
        with self._lock:
            by_ip: dict[str, list[AttackEvent]] = {}
            for e in self._events:
                by_ip.setdefault(e.client_ip, []).append(e)
            rows = []
            for addr in sorted(by_ip):
                if ip is not None and addr != ip:
                    continue
                # same ordering rule as the attack list (see report_attack_list)
                events = sorted(by_ip[addr], key=lambda e: (e.timestamp, e.event_id))
                logins = [e.login_name for e in events if e.login_name]
                row = {
                    "user_id": logins[-1] if logins else "",
                    "ip": addr,
                    "requests": len(events),
                    "first_ts": format_ts(events[0].timestamp),
                    "last_ts": format_ts(events[-1].timestamp),
                }
                if ip is not None:
                    row["timestamps"] = [format_ts(e.timestamp) for e in events]
                rows.append(row)
            return rows

    def report_web_analysis(self) -> list[dict]:
        with self._lock:
            counts: dict[str, int] = {}
            for e in self._events:
                family = browser_family(e.browser)
                counts[family] = counts.get(family, 0) + 1
            return [
                {"browser": family, "count": counts[family]}
                for family in sorted(counts, key=lambda f: (-counts[f], f))
            ]
