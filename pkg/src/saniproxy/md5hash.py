"""Hand-built MD5 digest and sensitive-field hashing.

Two interchangeable backends compute the same RFC 1321 digest:

  * "njit" — numba-compiled kernel (default when numba imports cleanly)
  * "pure" — pure Python, no compilation

Set SANIPROXY_PURE_MD5=1 to force the pure backend. benchmarks/bench_md5.py
compares the two.

Security note: MD5 is cryptographically broken. It is used here because the
credential-hashing scheme this proxy implements is defined in terms of MD5;
salted modern KDFs are out of scope.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

from . import _md5_pure
from .extraction import ExtractedInput

logger = logging.getLogger(__name__)

_ENV_FLAG = "SANIPROXY_PURE_MD5"
_backend_name = "pure"
_backend_digest = _md5_pure.digest

if os.environ.get(_ENV_FLAG, "") not in ("1", "true", "yes"):
    try:
        from . import _md5_njit

        _backend_name = "njit"
        _backend_digest = _md5_njit.digest
    except ImportError:  # numba not installed; keep pure backend
        logger.info("numba unavailable, MD5 falls back to the pure backend")


def active_backend() -> str:
    return _backend_name


def warm_up() -> None:
    """Compile the jit kernel (no-op on the pure backend). Call at startup."""
    _backend_digest(b"")


@dataclass(frozen=True)
class Digest128:
    bytes: bytes

    def __post_init__(self):
        if len(self.bytes) != 16:
            raise ValueError("MD5 digest must be 16 bytes")

    @property
    def hex(self) -> str:
        return self.bytes.hex()


def md5_digest(data: bytes) -> Digest128:
    """RFC 1321 digest of data (any length, including empty)."""
    return Digest128(_backend_digest(data))


def hash_sensitive_fields(extracted: ExtractedInput, sensitive: list[str]) -> ExtractedInput:
    """Replace each sensitive body/query param value with its MD5 hex digest.

    Hashes the raw submitted value (pre URL-decode) so the digest matches what
    the upstream stored when the credential was registered through the same
    path. Single application is enforced via the transformed flag.
    """
    if extracted.hashed:
        raise ValueError("sensitive fields already hashed for this request")
    wanted = {name.lower() for name in sensitive}
    if not wanted:
        return extracted

    changed = False

    def transform(params):
        nonlocal changed
        out = []
        for p in params:
            if p.name.lower() in wanted:
                hexd = md5_digest(p.raw_value.encode("utf-8", "surrogateescape")).hex
                out.append(p.replaced(hexd))
                changed = True
            else:
                out.append(p)
        return out

    new_query = transform(extracted.query_params)
    new_body = transform(extracted.body_params)
    if not changed:
        return extracted
    return extracted.with_params(new_query, new_body, hashed=True)
