"""Splits a client request into URL and user data for the detectors.

Every value gets exactly one URL-decode pass before scanning; the raw form is
kept alongside so untouched requests can be forwarded byte-faithfully and so
credential hashing can operate on the submitted bytes. A value whose decoded
form decodes *again* to something different is double-encoded — the classic
filter-evasion trick — and carries an evasion flag the pipeline turns into a
deny.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from urllib.parse import quote, unquote, unquote_plus

from .model import ClientRequest

FORM_CONTENT_TYPE = "application/x-www-form-urlencoded"


class ExtractionError(ValueError):
    """Request body/params cannot be safely decomposed (proxy answers 403)."""


class OversizeError(ExtractionError):
    """Body exceeds the configured cap (proxy answers 413, no AttackEvent)."""


@dataclass(frozen=True)
class Param:
    """One name/value pair, decoded once, with the wire form retained."""

    name: str
    value: str       # after one decode pass
    raw_name: str    # as transmitted
    raw_value: str   # as transmitted
    evasion: bool    # a second decode pass would change value again

    def replaced(self, new_value: str) -> "Param":
        """Substitute a transformed value; raw form is re-encoded to match."""
        return Param(
            name=self.name,
            value=new_value,
            raw_name=self.raw_name,
            raw_value=quote(new_value, safe=""),
            evasion=False,
        )


@dataclass(frozen=True)
class ExtractedInput:
    url_path: str                  # decoded
    raw_path: str
    raw_query: str                 # query string as transmitted ("" if none)
    query_params: tuple[Param, ...]
    body_params: tuple[Param, ...]
    user_agent: str
    path_evasion: bool = False
    hashed: bool = False           # sensitive-field digests applied

    @property
    def has_evasion(self) -> bool:
        if self.path_evasion:
            return True
        return any(p.evasion for p in self.query_params + self.body_params)

    def with_params(self, query_params, body_params, hashed: bool | None = None) -> "ExtractedInput":
        return replace(
            self,
            query_params=tuple(query_params),
            body_params=tuple(body_params),
            hashed=self.hashed if hashed is None else hashed,
        )

    def login_name(self, username_fields: list[str]) -> str | None:
        """Value of the first username-like field (body first, then query)."""
        wanted = [f.lower() for f in username_fields]
        for params in (self.body_params, self.query_params):
            for p in params:
                if p.name.lower() in wanted:
                    return p.value
        return None


def _decode_once(raw: str, plus_is_space: bool) -> tuple[str, bool]:
    """One decode pass; evasion flag set when a second pass changes it again.

    The second pass is percent-only: '+' is transport-level and only ever
    decoded once, otherwise any legitimate literal '+' would look like
    evasion.
    """
    decoded = unquote_plus(raw) if plus_is_space else unquote(raw)
    return decoded, unquote(decoded) != decoded


def _split_pairs(encoded: str, where: str) -> tuple[Param, ...]:
    params = []
    for segment in encoded.split("&"):
        if segment == "":
            continue
        raw_name, sep, raw_value = segment.partition("=")
        name = unquote_plus(raw_name)
        if name == "":
            # An anonymous value would be forwarded unscanned; refuse it.
            raise ExtractionError(f"empty parameter name in {where}")
        value, evasion = _decode_once(raw_value, plus_is_space=True)
        params.append(Param(name=name, value=value, raw_name=raw_name,
                            raw_value=raw_value, evasion=evasion))
    return tuple(params)


def extract_input(request: ClientRequest, max_body_bytes: int = 65536) -> ExtractedInput:
    """Separate URL and user data from one request.

    Raises ExtractionError for bodies that are present but not
    form-urlencoded (multipart uploads are outside the login-form threat
    model) and for oversize bodies.
    """
    if len(request.body) > max_body_bytes:
        raise OversizeError(f"body of {len(request.body)} bytes exceeds cap {max_body_bytes}")

    raw_path, _, raw_query = request.target.partition("?")
    path, path_evasion = _decode_once(raw_path, plus_is_space=False)
    query_params = _split_pairs(raw_query, "query string") if raw_query else ()

    body_params: tuple[Param, ...] = ()
    if request.body:
        content_type = request.header("Content-Type").split(";")[0].strip().lower()
        if content_type and content_type != FORM_CONTENT_TYPE:
            raise ExtractionError(f"unsupported request body type {content_type!r}")
        try:
            body_text = request.body.decode("utf-8", "surrogateescape")
        except Exception as exc:  # pragma: no cover - surrogateescape never raises
            raise ExtractionError(f"undecodable body: {exc}")
        if "\x00" in body_text:
            raise ExtractionError("NUL byte in form body")
        body_params = _split_pairs(body_text, "form body")

    return ExtractedInput(
        url_path=path,
        raw_path=raw_path,
        raw_query=raw_query,
        query_params=query_params,
        body_params=body_params,
        user_agent=request.user_agent,
        path_evasion=path_evasion,
    )


def rebuild_query(params: tuple[Param, ...]) -> str:
    return "&".join(f"{p.raw_name}={p.raw_value}" for p in params)


def rebuild_target(extracted: ExtractedInput) -> str:
    if not extracted.raw_query and not extracted.query_params:
        return extracted.raw_path
    return extracted.raw_path + "?" + rebuild_query(extracted.query_params)


def rebuild_body(extracted: ExtractedInput) -> bytes:
    return rebuild_query(extracted.body_params).encode("utf-8", "surrogateescape")
