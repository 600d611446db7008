"""Proxy configuration: one JSON file, every key optional with a default.

Unknown keys are rejected so a typo cannot silently disable a protection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .sqltokens import DEFAULT_SQL_KEYWORDS
from .xss import DEFAULT_ALLOWED_TAGS, DEFAULT_FORBIDDEN_TAGS


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProxyConfig:
    # addresses (CLI flags override these)
    listen: str = "127.0.0.1:8080"
    admin_listen: str = "127.0.0.1:8081"
    upstream: str = "127.0.0.1:9000"
    log_dir: str = "./logs"

    # block policy
    block_threshold: int = 3
    block_seconds: float = 10800.0
    consecutive_only: bool = False

    # detection
    sql_keywords: tuple[str, ...] = DEFAULT_SQL_KEYWORDS
    forbidden_tags: tuple[str, ...] = DEFAULT_FORBIDDEN_TAGS
    allowed_tags: tuple[str, ...] = DEFAULT_ALLOWED_TAGS
    prototypes_path: Optional[str] = None
    enforce_prototypes: bool = False
    max_body_bytes: int = 65536

    # credential handling
    sensitive_fields: tuple[str, ...] = ("password",)
    username_fields: tuple[str, ...] = ("username", "login", "user")

    # plumbing
    notifier_sink: Optional[str] = None  # file path, or None for log-only
    admin_token: str = "change-me"
    # honor X-Forwarded-For as the client address (needed when a test
    # driver or load balancer sits between client and proxy)
    trust_forwarded_for: bool = False

    def __post_init__(self):
        if self.block_threshold < 1:
            raise ConfigError("block_threshold must be >= 1")
        if self.block_seconds <= 0:
            raise ConfigError("block_seconds must be positive")
        if self.max_body_bytes < 1:
            raise ConfigError("max_body_bytes must be >= 1")
        if not self.admin_token:
            raise ConfigError("admin_token must be non-empty")


_LIST_KEYS = {
    "sql_keywords",
    "forbidden_tags",
    "allowed_tags",
    "sensitive_fields",
    "username_fields",
}


def config_from_dict(data: dict) -> ProxyConfig:
    known = {f.name for f in fields(ProxyConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kwargs = {}
    for key, value in data.items():
        if key in _LIST_KEYS:
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                raise ConfigError(f"{key} must be a list of strings")
            kwargs[key] = tuple(value)
        else:
            kwargs[key] = value
    try:
        return ProxyConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: Optional[str]) -> ProxyConfig:
    """Read the JSON config file; None means all defaults."""
    if path is None:
        return ProxyConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return config_from_dict(data)


def split_hostport(address: str, default_host: str = "127.0.0.1") -> tuple[str, int]:
    """Parse "host:port" (host optional). IPv6 hosts use [brackets]."""
    addr = address.strip()
    if addr.startswith("["):
        host, _, rest = addr[1:].partition("]")
        port_text = rest.lstrip(":")
    elif ":" in addr:
        host, _, port_text = addr.rpartition(":")
    else:
        host, port_text = "", addr
    try:
        port = int(port_text)
    except ValueError:
        raise ConfigError(f"bad address {address!r}: port must be an integer") from None
    # port 0 is allowed: bind an ephemeral port (used by tests)
    if not 0 <= port < 65536:
        raise ConfigError(f"bad address {address!r}: port out of range")
    return (host or default_host, port)
