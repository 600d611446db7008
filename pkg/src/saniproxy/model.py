"""Core request/decision structures shared across the proxy pipeline."""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass, field
from enum import Enum


class DecisionKind(str, Enum):
    FORWARD = "FORWARD"
    DENY_SQLI = "DENY_SQLI"
    DENY_XSS = "DENY_XSS"
    DENY_BLOCKED_IP = "DENY_BLOCKED_IP"
    DENY_BLOCKED_ACCOUNT = "DENY_BLOCKED_ACCOUNT"
    # Error denials (no AttackEvent attached): bad body framing / size cap.
    DENY_MALFORMED = "DENY_MALFORMED"
    DENY_OVERSIZE = "DENY_OVERSIZE"


# HTTP status each decision maps to when the proxy answers the client itself.
DENY_STATUS = {
    DecisionKind.DENY_SQLI: 403,
    DecisionKind.DENY_XSS: 403,
    DecisionKind.DENY_BLOCKED_IP: 403,
    DecisionKind.DENY_BLOCKED_ACCOUNT: 403,
    DecisionKind.DENY_MALFORMED: 403,
    DecisionKind.DENY_OVERSIZE: 413,
}


class AttackClass(str, Enum):
    TAUTOLOGY = "TAUTOLOGY"
    UNION_QUERY = "UNION_QUERY"
    PIGGYBACK = "PIGGYBACK"
    LOGICALLY_INCORRECT = "LOGICALLY_INCORRECT"
    STORED_PROCEDURE = "STORED_PROCEDURE"
    EVASION_ENCODING = "EVASION_ENCODING"
    GENERIC_SIGNATURE = "GENERIC_SIGNATURE"
    PROTOTYPE_MISMATCH = "PROTOTYPE_MISMATCH"
    STORED_XSS = "STORED_XSS"
    REFLECTED_XSS = "REFLECTED_XSS"
    NONE = "NONE"


@dataclass(frozen=True)
class ClientRequest:
    """One client HTTP request as seen by the proxy listener.

    target is the origin-form request URI (path plus optional query string);
    headers keep arrival order and may repeat names. received_at is UTC epoch
    seconds with millisecond resolution.
    """

    method: str
    target: str
    headers: tuple[tuple[str, str], ...]
    body: bytes
    client_ip: str
    received_at: float

    def __post_init__(self):
        if not self.target.startswith("/"):
            raise ValueError(f"request target must begin with '/': {self.target!r}")
        ipaddress.ip_address(self.client_ip)  # raises ValueError if invalid

    def header(self, name: str) -> str:
        """First header value for name (case-insensitive), or empty string."""
        wanted = name.lower()
        for key, value in self.headers:
            if key.lower() == wanted:
                return value
        return ""

    @property
    def user_agent(self) -> str:
        return self.header("User-Agent")


@dataclass(frozen=True)
class AttackEvent:
    """Audit record for one detected attack (admin console row)."""

    event_id: int
    attack_class: AttackClass
    description: str
    client_ip: str
    login_name: str | None
    browser: str
    url: str
    timestamp: float

    def __post_init__(self):
        if self.attack_class is AttackClass.NONE:
            raise ValueError("AttackEvent cannot carry class NONE")


@dataclass(frozen=True)
class ForwardPlan:
    """What actually goes upstream for a FORWARD decision.

    Falls back to the original bytes when the pipeline changed nothing, so
    untouched requests are relayed byte-faithfully.
    """

    method: str
    target: str
    headers: tuple[tuple[str, str], ...]
    body: bytes
    modified: bool


@dataclass(frozen=True)
class ProxyDecision:
    kind: DecisionKind
    sanitized_request: ForwardPlan | None = None
    attack_event: AttackEvent | None = None
    detail: str = ""

    def __post_init__(self):
        forward = self.kind is DecisionKind.FORWARD
        if forward != (self.sanitized_request is not None):
            raise ValueError("sanitized_request present iff kind=FORWARD")
        attack = self.kind in (DecisionKind.DENY_SQLI, DecisionKind.DENY_XSS)
        if attack != (self.attack_event is not None):
            raise ValueError("attack_event present iff kind is DENY_SQLI/DENY_XSS")
