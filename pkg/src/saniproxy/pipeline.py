"""The sanitization pipeline: one request in, one decision out.

Fixed stage order: IP blocklist, input extraction, account blocklist,
evasion check, SQL-injection scan, query-prototype audit, XSS scan,
sensitive-field hashing, forward. The first denying stage wins; a denied
request never reaches a later stage, so a blocked IP costs no detector work.
"""

from __future__ import annotations

import threading
from typing import Optional

from . import sqli, xss
from .config import ProxyConfig
from .extraction import (
    ExtractedInput,
    ExtractionError,
    OversizeError,
    extract_input,
    rebuild_body,
    rebuild_target,
)
from .md5hash import hash_sensitive_fields
from .model import (
    AttackClass,
    AttackEvent,
    ClientRequest,
    DecisionKind,
    ForwardPlan,
    ProxyDecision,
)
from .prototypes import PrototypeSet
from .queryxml import to_xml
from .reputation import AccessRecord, ReputationStore, SubjectKind
from .sqltokens import URL_KEY, KeywordSet, build_token_table


class Pipeline:
    def __init__(
        self,
        config: ProxyConfig,
        store: ReputationStore,
        prototypes: Optional[PrototypeSet] = None,
    ):
        self.config = config
        self.store = store
        self.prototypes = prototypes
        self.keywords = KeywordSet(config.sql_keywords)
        self._counter_lock = threading.Lock()
        self.sqli_scans = 0
        self.xss_scans = 0

    # counters let tests assert that blocked traffic skips the detectors
    def _count(self, attr: str) -> None:
        with self._counter_lock:
            setattr(self, attr, getattr(self, attr) + 1)

    def _record(self, request: ClientRequest, now: float, attack_class: AttackClass,
                description: str, login: Optional[str], counted: bool = True) -> AttackEvent:
        event = AttackEvent(
            event_id=0,
            attack_class=attack_class,
            description=description,
            client_ip=request.client_ip,
            login_name=login,
            browser=request.user_agent,
            url=request.target,
            timestamp=now,
        )
        stored, _ = self.store.record_attack(event, now, counted=counted)
        return stored

    def handle_request(self, request: ClientRequest, now: float) -> ProxyDecision:
        if self.store.is_blocked(request.client_ip, SubjectKind.IP, now):
            return ProxyDecision(
                DecisionKind.DENY_BLOCKED_IP,
                detail=f"client {request.client_ip} is blocked",
            )

        try:
            extracted = extract_input(request, self.config.max_body_bytes)
        except OversizeError as exc:
            return ProxyDecision(DecisionKind.DENY_OVERSIZE, detail=str(exc))
        except ExtractionError as exc:
            return ProxyDecision(DecisionKind.DENY_MALFORMED, detail=str(exc))

        login = extracted.login_name(list(self.config.username_fields))
        if login and self.store.is_blocked(login, SubjectKind.ACCOUNT, now):
            return ProxyDecision(
                DecisionKind.DENY_BLOCKED_ACCOUNT,
                detail=f"account {login!r} is blocked",
            )

        if extracted.has_evasion:
            where = self._evasion_site(extracted)
            event = self._record(
                request,
                now,
                AttackClass.EVASION_ENCODING,
                f"double URL-encoded input in {where} (privacy)",
                login,
            )
            return ProxyDecision(
                DecisionKind.DENY_SQLI, attack_event=event, detail=event.description
            )

        self._count("sqli_scans")
        table = build_token_table(extracted, self.keywords)
        verdict = sqli.scan(table, self.keywords)
        if verdict.malicious:
            site = "URL" if verdict.matched_key == URL_KEY else f"field {verdict.matched_key!r}"
            event = self._record(
                request,
                now,
                verdict.attack_class,
                f"{verdict.description} in {site}",
                login,
            )
            return ProxyDecision(
                DecisionKind.DENY_SQLI, attack_event=event, detail=event.description
            )

        if self.prototypes is not None:
            deny = self._audit_prototypes(request, now, table, login)
            if deny is not None:
                return deny

        self._count("xss_scans")
        xss_result = xss.scan_params(
            extracted, self.config.forbidden_tags, self.config.allowed_tags
        )
        if xss_result.overall is xss.XssVerdict.FORBIDDEN:
            tag = xss_result.removed_tags[0] if xss_result.removed_tags else "?"
            event = self._record(
                request,
                now,
                xss_result.attack_class,
                f"forbidden tag <{tag}> in field {xss_result.offending_key!r}; "
                f"removed stack {list(xss_result.removed_tags)}",
                login,
            )
            return ProxyDecision(
                DecisionKind.DENY_XSS, attack_event=event, detail=event.description
            )

        cleaned = xss_result.sanitized_input
        hashed = hash_sensitive_fields(cleaned, list(self.config.sensitive_fields))
        modified = hashed is not extracted

        plan = ForwardPlan(
            method=request.method,
            target=rebuild_target(hashed) if modified else request.target,
            headers=request.headers,
            body=rebuild_body(hashed) if modified else request.body,
            modified=modified,
        )
        return ProxyDecision(DecisionKind.FORWARD, sanitized_request=plan)

    def _audit_prototypes(
        self, request: ClientRequest, now: float, table, login: Optional[str]
    ) -> Optional[ProxyDecision]:
        """Match query-shaped inputs against the prototype document.

        In audit mode (default) a mismatch is recorded for the console but
        neither denies nor feeds the block counter; with enforce_prototypes
        it denies like any other injection.
        """
        for key, tokens in table.entries:
            doc = to_xml(tokens)
            if doc is None:
                continue
            result = self.prototypes.match(doc)
            if result.matched:
                continue
            site = "URL" if key == URL_KEY else f"field {key!r}"
            description = f"query shape deviates: {result.detail} ({site})"
            if self.config.enforce_prototypes:
                event = self._record(
                    request, now, AttackClass.PROTOTYPE_MISMATCH, description, login
                )
                return ProxyDecision(
                    DecisionKind.DENY_SQLI, attack_event=event, detail=description
                )
            self._record(
                request, now, AttackClass.PROTOTYPE_MISMATCH, description, login,
                counted=False,
            )
        return None

    @staticmethod
    def _evasion_site(extracted: ExtractedInput) -> str:
        if extracted.path_evasion:
            return "URL path"
        for p in extracted.query_params + extracted.body_params:
            if p.evasion:
                return f"field {p.name!r}"
        return "request"

    def log_decision(
        self,
        request: ClientRequest,
        decision: ProxyDecision,
        now: float,
        latency_ms: float,
    ) -> None:
        """Write the one access-log line every handled request gets."""
        self.store.log_access(
            AccessRecord(
                ts=now,
                ip=request.client_ip,
                method=request.method,
                target=request.target,
                decision=decision.kind,
                latency_ms=latency_ms,
                event_id=decision.attack_event.event_id if decision.attack_event else None,
            )
        )
