"""Lossless lexer for URL and form values, plus the keyed token table.

The lexer never fails: every byte sequence tokenizes, and concatenating the
lexemes in order reconstructs the input exactly. That losslessness is what
lets the signature checks reason about exact source spans.

Quote pairing: a quote pairs greedily with the next identical quote to form a
STRING_LITERAL; a quote with no partner stands alone as a QUOTE token. The
lone unmatched quote is the classic injection tell — it is what breaks the
attacker's value out of the application's own string literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from urllib.parse import unquote_plus

from .extraction import ExtractedInput


class TokenKind(Enum):
    KEYWORD = "KEYWORD"
    IDENTIFIER = "IDENTIFIER"
    INT_LITERAL = "INT_LITERAL"
    STRING_LITERAL = "STRING_LITERAL"
    OPERATOR = "OPERATOR"
    QUOTE = "QUOTE"
    COMMENT_START = "COMMENT_START"
    SEMICOLON = "SEMICOLON"
    PAREN = "PAREN"
    WHITESPACE = "WHITESPACE"
    TAG = "TAG"
    OTHER = "OTHER"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    position: int  # 0-based start offset in the decoded value

    @property
    def end(self) -> int:
        return self.position + len(self.lexeme)

    @property
    def lower(self) -> str:
        return self.lexeme.lower()

    @property
    def string_content(self) -> str:
        """Inner text of a STRING_LITERAL (without the enclosing quotes)."""
        return self.lexeme[1:-1] if self.kind is TokenKind.STRING_LITERAL else ""


# Default reserved-word list; configurable. Entries ending in "_" are
# prefixes and match any identifier that starts with them (xp_cmdshell etc).
DEFAULT_SQL_KEYWORDS = (
    "select", "insert", "update", "delete", "drop", "union", "and", "or",
    "where", "from", "table", "exec", "execute", "declare", "cast",
    "convert", "shutdown", "sp_", "xp_",
)

# Keywords that can start a standalone SQL statement; the piggyback check and
# the query-structure builder key off these.
COMMAND_KEYWORDS = frozenset(
    {"select", "insert", "update", "delete", "drop", "exec", "execute",
     "declare", "shutdown"}
)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"[0-9]+")
_WS_RE = re.compile(r"[ \t\r\n\f\v]+")
_TAG_RE = re.compile(r"<[A-Za-z/!][^>]*>")
_TWO_CHAR_OPS = ("<=", ">=", "<>", "!=", "||")
_ONE_CHAR_OPS = "=<>+-*/"


class KeywordSet:
    """Configured reserved words split into exact entries and prefixes."""

    def __init__(self, keywords=DEFAULT_SQL_KEYWORDS):
        self.exact = frozenset(k.lower() for k in keywords if not k.endswith("_"))
        self.prefixes = tuple(k.lower() for k in keywords if k.endswith("_"))

    def is_keyword(self, ident: str) -> bool:
        low = ident.lower()
        return low in self.exact or low.startswith(self.prefixes)


DEFAULT_KEYWORD_SET = KeywordSet()


def tokenize(text: str, keywords: KeywordSet = DEFAULT_KEYWORD_SET) -> tuple[Token, ...]:
    """Lex one decoded value. Lossless: lexemes concatenate back to text."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    other_start = -1

    def flush_other(upto: int):
        nonlocal other_start
        if other_start >= 0:
            tokens.append(Token(TokenKind.OTHER, text[other_start:upto], other_start))
            other_start = -1

    while i < n:
        ch = text[i]

        if ch in " \t\r\n\f\v":
            flush_other(i)
            m = _WS_RE.match(text, i)
            tokens.append(Token(TokenKind.WHITESPACE, m.group(), i))
            i = m.end()
            continue

        if ch.isascii() and (ch.isalpha() or ch == "_"):
            flush_other(i)
            m = _IDENT_RE.match(text, i)
            word = m.group()
            kind = TokenKind.KEYWORD if keywords.is_keyword(word) else TokenKind.IDENTIFIER
            tokens.append(Token(kind, word, i))
            i = m.end()
            continue

        if ch.isascii() and ch.isdigit():
            flush_other(i)
            m = _INT_RE.match(text, i)
            tokens.append(Token(TokenKind.INT_LITERAL, m.group(), i))
            i = m.end()
            continue

        if ch in "'\"":
            flush_other(i)
            closing = text.find(ch, i + 1)
            if closing != -1:
                tokens.append(Token(TokenKind.STRING_LITERAL, text[i : closing + 1], i))
                i = closing + 1
            else:
                tokens.append(Token(TokenKind.QUOTE, ch, i))
                i += 1
            continue

        if text.startswith("--", i) or ch == "#" or text.startswith("/*", i):
            flush_other(i)
            lexeme = "#" if ch == "#" else text[i : i + 2]
            tokens.append(Token(TokenKind.COMMENT_START, lexeme, i))
            i += len(lexeme)
            continue

        if ch == "<":
            m = _TAG_RE.match(text, i)
            if m:
                flush_other(i)
                tokens.append(Token(TokenKind.TAG, m.group(), i))
                i = m.end()
                continue

        two = text[i : i + 2]
        if two in _TWO_CHAR_OPS:
            flush_other(i)
            tokens.append(Token(TokenKind.OPERATOR, two, i))
            i += 2
            continue
        if ch in _ONE_CHAR_OPS:
            flush_other(i)
            tokens.append(Token(TokenKind.OPERATOR, ch, i))
            i += 1
            continue

        if ch == ";":
            flush_other(i)
            tokens.append(Token(TokenKind.SEMICOLON, ch, i))
            i += 1
            continue
        if ch in "()":
            flush_other(i)
            tokens.append(Token(TokenKind.PAREN, ch, i))
            i += 1
            continue

        if other_start < 0:
            other_start = i
        i += 1

    flush_other(n)
    return tuple(tokens)


@dataclass(frozen=True)
class TokenTable:
    """Token sequences keyed by field name, plus the reserved "URL" entry."""

    entries: tuple[tuple[str, tuple[Token, ...]], ...]

    def keys(self) -> list[str]:
        return [k for k, _ in self.entries]

    def get(self, key: str) -> tuple[Token, ...]:
        for k, toks in self.entries:
            if k == key:
                return toks
        raise KeyError(key)

    def __len__(self) -> int:
        return len(self.entries)


URL_KEY = "URL"


def url_scan_text(extracted: ExtractedInput) -> str:
    """The decoded path+query string scanned under the "URL" key."""
    if extracted.raw_query:
        return extracted.url_path + "?" + unquote_plus(extracted.raw_query)
    return extracted.url_path


def build_token_table(
    extracted: ExtractedInput, keywords: KeywordSet = DEFAULT_KEYWORD_SET
) -> TokenTable:
    """One entry per param plus "URL"; key order is insertion order (URL,
    query params, body params) so scans are independent of dict quirks.

    Duplicate param names (and any param unluckily named "URL") get a "#i"
    occurrence suffix to keep keys unique.
    """
    params = list(extracted.query_params) + list(extracted.body_params)
    counts: dict[str, int] = {}
    for p in params:
        counts[p.name] = counts.get(p.name, 0) + 1

    entries: list[tuple[str, tuple[Token, ...]]] = [
        (URL_KEY, tokenize(url_scan_text(extracted), keywords))
    ]
    seen: dict[str, int] = {}
    for p in params:
        if counts[p.name] > 1 or p.name == URL_KEY:
            index = seen.get(p.name, 0)
            seen[p.name] = index + 1
            key = f"{p.name}#{index}"
        else:
            key = p.name
        entries.append((key, tokenize(p.value, keywords)))
    return TokenTable(tuple(entries))
