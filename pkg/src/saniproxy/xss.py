"""Cross-site-scripting sanitizer over parameter values.

Values are parsed as lossless HTML token streams, then filtered:

  * a forbidden tag anywhere discards the whole request;
  * a tag carrying href/src/onclick (or any on*-prefixed attribute) is
    removed, with each dangerous value percent-encoded into adjacent text
    and the tag name pushed onto the removed-tag stack;
  * tags outside the allowlist are removed, their text content kept;
  * anything untouched passes through byte-identical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional
from urllib.parse import quote

from .extraction import ExtractedInput
from .model import AttackClass

DEFAULT_FORBIDDEN_TAGS = (
    "script", "iframe", "object", "embed", "form", "meta", "link", "style",
    "base",
)
DEFAULT_ALLOWED_TAGS = ("b", "i", "u", "em", "strong", "p", "br", "a", "img", "span", "div")

# the enumerated dangerous attributes; on* covers the inline handler family
_NAMED_DANGEROUS = frozenset({"href", "src", "onclick"})


def is_dangerous_attr(name: str) -> bool:
    low = name.lower()
    return low in _NAMED_DANGEROUS or low.startswith("on")


class HtmlKind(Enum):
    TEXT = "TEXT"
    OPEN_TAG = "OPEN_TAG"
    CLOSE_TAG = "CLOSE_TAG"
    SELF_CLOSE_TAG = "SELF_CLOSE_TAG"


@dataclass(frozen=True)
class HtmlToken:
    kind: HtmlKind
    tag_name: str
    attributes: tuple[tuple[str, str], ...]
    raw: str

    def __post_init__(self):
        if self.kind is HtmlKind.TEXT:
            if self.tag_name:
                raise ValueError("TEXT tokens carry no tag name")
        elif not self.tag_name:
            raise ValueError("tag tokens need a tag name")


_TAG_RE = re.compile(
    r"<\s*(/?)([A-Za-z][A-Za-z0-9:-]*)"
    r"((?:[^<>\"']|\"[^\"]*\"|'[^']*')*?)"
    r"(/?)\s*>"
)
_ATTR_RE = re.compile(r"([^\s=/>]+)(?:\s*=\s*(\"[^\"]*\"|'[^']*'|[^\s>]*))?")


def _parse_attrs(raw: str) -> tuple[tuple[str, str], ...]:
    attrs = []
    for m in _ATTR_RE.finditer(raw):
        name = m.group(1)
        value = m.group(2)
        if value is None:
            value = ""
        elif len(value) >= 2 and value[0] in "\"'" and value[-1] == value[0]:
            value = value[1:-1]
        attrs.append((name.lower(), value))
    return tuple(attrs)


def parse_html(text: str) -> tuple[HtmlToken, ...]:
    """Lossless HTML-ish tokenization; anything unparseable stays TEXT."""
    tokens: list[HtmlToken] = []
    i = 0
    text_start = 0
    n = len(text)
    while i < n:
        if text[i] == "<":
            m = _TAG_RE.match(text, i)
            if m:
                if text_start < i:
                    tokens.append(
                        HtmlToken(HtmlKind.TEXT, "", (), text[text_start:i])
                    )
                closing, name, attr_raw, self_close = m.groups()
                if closing:
                    kind = HtmlKind.CLOSE_TAG
                    attrs: tuple = ()
                elif self_close:
                    kind = HtmlKind.SELF_CLOSE_TAG
                    attrs = _parse_attrs(attr_raw)
                else:
                    kind = HtmlKind.OPEN_TAG
                    attrs = _parse_attrs(attr_raw)
                tokens.append(HtmlToken(kind, name.lower(), attrs, m.group()))
                i = m.end()
                text_start = i
                continue
        i += 1
    if text_start < n:
        tokens.append(HtmlToken(HtmlKind.TEXT, "", (), text[text_start:]))
    return tuple(tokens)


class XssVerdict(Enum):
    CLEAN = "CLEAN"
    SANITIZED = "SANITIZED"
    FORBIDDEN = "FORBIDDEN"


@dataclass(frozen=True)
class XssOutcome:
    verdict: XssVerdict
    output: Optional[str]
    removed_tags: tuple[str, ...] = ()

    def __post_init__(self):
        if (self.output is None) != (self.verdict is XssVerdict.FORBIDDEN):
            raise ValueError("output is absent exactly when FORBIDDEN")


def sanitize(
    tokens,
    forbidden=DEFAULT_FORBIDDEN_TAGS,
    allowed=DEFAULT_ALLOWED_TAGS,
) -> XssOutcome:
    forbidden_set = frozenset(t.lower() for t in forbidden)
    allowed_set = frozenset(t.lower() for t in allowed)

    for tok in tokens:
        if tok.kind is not HtmlKind.TEXT and tok.tag_name in forbidden_set:
            return XssOutcome(XssVerdict.FORBIDDEN, None, (tok.tag_name,))

    out: list[str] = []
    removed: list[str] = []
    pending_close: dict[str, int] = {}
    original = "".join(t.raw for t in tokens)

    for tok in tokens:
        if tok.kind is HtmlKind.TEXT:
            out.append(tok.raw)
            continue
        if tok.kind is HtmlKind.CLOSE_TAG:
            if pending_close.get(tok.tag_name, 0) > 0:
                pending_close[tok.tag_name] -= 1
            elif tok.tag_name in allowed_set:
                out.append(tok.raw)
            continue
        dangerous_values = [v for (a, v) in tok.attributes if is_dangerous_attr(a)]
        if dangerous_values:
            out.extend(quote(v, safe="") for v in dangerous_values)
            removed.append(tok.tag_name)
            if tok.kind is HtmlKind.OPEN_TAG:
                pending_close[tok.tag_name] = pending_close.get(tok.tag_name, 0) + 1
        elif tok.tag_name in allowed_set:
            out.append(tok.raw)
        # unknown tag: dropped, surrounding text kept

    output = "".join(out)
    if output == original and not removed:
        return XssOutcome(XssVerdict.CLEAN, output, ())
    return XssOutcome(XssVerdict.SANITIZED, output, tuple(removed))


@dataclass(frozen=True)
class XssScanResult:
    overall: XssVerdict
    outcomes: tuple[tuple[str, XssOutcome], ...]
    sanitized_input: Optional[ExtractedInput]
    offending_key: Optional[str] = None
    attack_class: AttackClass = AttackClass.NONE
    removed_tags: tuple[str, ...] = ()

    def __post_init__(self):
        if (self.sanitized_input is None) != (self.overall is XssVerdict.FORBIDDEN):
            raise ValueError("sanitized_input absent exactly when FORBIDDEN")


def scan_params(
    extracted: ExtractedInput,
    forbidden=DEFAULT_FORBIDDEN_TAGS,
    allowed=DEFAULT_ALLOWED_TAGS,
) -> XssScanResult:
    """Sanitize every param value; a forbidden tag anywhere denies."""
    outcomes: list[tuple[str, XssOutcome]] = []
    new_query = []
    new_body = []
    changed = False

    for params, bucket, is_body in (
        (extracted.query_params, new_query, False),
        (extracted.body_params, new_body, True),
    ):
        for p in params:
            outcome = sanitize(parse_html(p.value), forbidden, allowed)
            outcomes.append((p.name, outcome))
            if outcome.verdict is XssVerdict.FORBIDDEN:
                return XssScanResult(
                    overall=XssVerdict.FORBIDDEN,
                    outcomes=tuple(outcomes),
                    sanitized_input=None,
                    offending_key=p.name,
                    attack_class=(
                        AttackClass.STORED_XSS if is_body else AttackClass.REFLECTED_XSS
                    ),
                    removed_tags=outcome.removed_tags,
                )
            if outcome.verdict is XssVerdict.SANITIZED:
                changed = True
                bucket.append(p.replaced(outcome.output))
            else:
                bucket.append(p)

    if not changed:
        return XssScanResult(XssVerdict.CLEAN, tuple(outcomes), extracted)
    removed_all = tuple(
        name for _, oc in outcomes for name in oc.removed_tags
    )
    return XssScanResult(
        XssVerdict.SANITIZED,
        tuple(outcomes),
        extracted.with_params(tuple(new_query), tuple(new_body)),
        removed_tags=removed_all,
    )
