"""SQL-injection signature checks over keyed token tables.

Three checks run per table entry, in fixed order:

  1. AND_OR_Integer: a connective followed by an integer comparison
     (``OR 1=1``).
  2. AND_OR_String: a connective followed by a string comparison, including
     connectives the quote-pairing rule swallowed into a string literal
     (``' OR '1'='1``, ``OR '1=1'``).
  3. SQL-Statement: structural injections — piggybacked statement after a
     semicolon, UNION SELECT, stored-procedure references, and
     type-conversion probes over a nested SELECT.

The first entry that matches anything decides the verdict. When connective
and structural shapes co-occur in one value, the structural class wins:
a piggybacked DROP dressed up with a tautology is reported as PIGGYBACK.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .model import AttackClass
from .sqltokens import (
    COMMAND_KEYWORDS,
    KeywordSet,
    Token,
    TokenKind,
    TokenTable,
    tokenize,
)

_DEFAULT_KEYWORDS = KeywordSet()

_CONNECTIVES = ("and", "or")
_INT_CMP = frozenset({"=", "<", ">", "<>", "!="})
_STR_CMP = frozenset({"=", "<", ">", "<=", ">=", "<>", "!="})
_LITERALISH = (
    TokenKind.STRING_LITERAL,
    TokenKind.INT_LITERAL,
    TokenKind.IDENTIFIER,
)

_EMBEDDED_CONNECTIVE_RE = re.compile(r"\b(?:and|or)\b", re.IGNORECASE)
_EMBEDDED_CMP_RE = re.compile(r"[=<>]")
_PURE_CMP_RE = re.compile(r"^\s*[=<>!]+\s*$")

# verdict classes the scanner may emit, in descending severity: structural
# shapes outrank the connective (tautology) shapes
_SHAPE_CLASS = {
    "piggyback": AttackClass.PIGGYBACK,
    "union": AttackClass.UNION_QUERY,
    "conversion": AttackClass.LOGICALLY_INCORRECT,
    "stored_procedure": AttackClass.STORED_PROCEDURE,
}
_SHAPE_ORDER = ("piggyback", "union", "conversion", "stored_procedure")

_SCAN_CLASSES = frozenset(
    {
        AttackClass.TAUTOLOGY,
        AttackClass.UNION_QUERY,
        AttackClass.PIGGYBACK,
        AttackClass.LOGICALLY_INCORRECT,
        AttackClass.STORED_PROCEDURE,
        AttackClass.EVASION_ENCODING,
        AttackClass.GENERIC_SIGNATURE,
        AttackClass.NONE,
    }
)


@dataclass(frozen=True)
class SigHit:
    span: tuple[int, int]
    description: str
    shape: str = ""


@dataclass(frozen=True)
class SqliVerdict:
    malicious: bool
    attack_class: AttackClass
    matched_key: Optional[str] = None
    matched_span: Optional[tuple[int, int]] = None
    description: str = ""

    def __post_init__(self):
        if self.attack_class not in _SCAN_CLASSES:
            raise ValueError(f"not a SQLi verdict class: {self.attack_class}")
        if self.malicious != (self.attack_class is not AttackClass.NONE):
            raise ValueError("malicious must track attack_class != NONE")
        if self.malicious != (self.matched_key is not None):
            raise ValueError("matched_key present iff malicious")
        if self.malicious != (self.matched_span is not None):
            raise ValueError("matched_span present iff malicious")


BENIGN_VERDICT = SqliVerdict(False, AttackClass.NONE)


def _significant(tokens) -> list[Token]:
    return [t for t in tokens if t.kind is not TokenKind.WHITESPACE]


def check_and_or_integer(tokens) -> Optional[SigHit]:
    """Connective + integer comparison: ⟨AND|OR⟩ INT ⟨=,<,>,<>,!=⟩ INT."""
    sig = _significant(tokens)
    for i in range(len(sig) - 3):
        t = sig[i]
        if t.kind is not TokenKind.KEYWORD or t.lower not in _CONNECTIVES:
            continue
        a, op, b = sig[i + 1], sig[i + 2], sig[i + 3]
        if (
            a.kind is TokenKind.INT_LITERAL
            and op.kind is TokenKind.OPERATOR
            and op.lexeme in _INT_CMP
            and b.kind is TokenKind.INT_LITERAL
        ):
            frag = f"{t.lexeme} {a.lexeme}{op.lexeme}{b.lexeme}"
            return SigHit((t.position, b.end), f"integer tautology {frag!r}")
    return None


def _is_connective_site(tok: Token) -> Optional[str]:
    if tok.kind is TokenKind.KEYWORD and tok.lower in _CONNECTIVES:
        return "keyword"
    if tok.kind is TokenKind.STRING_LITERAL and _EMBEDDED_CONNECTIVE_RE.search(
        tok.string_content
    ):
        return "string"
    return None


def check_and_or_string(tokens) -> Optional[SigHit]:
    """Connective + string comparison, in token or quote-swallowed form."""
    sig = _significant(tokens)
    for i, tok in enumerate(sig):
        site = _is_connective_site(tok)
        if site is None:
            continue
        if site == "string" and _EMBEDDED_CMP_RE.search(tok.string_content):
            return SigHit(
                (tok.position, tok.end),
                f"quoted fragment {tok.lexeme!r} carries a connective and a comparison",
            )
        t1 = sig[i + 1] if i + 1 < len(sig) else None
        t2 = sig[i + 2] if i + 2 < len(sig) else None
        t3 = sig[i + 3] if i + 3 < len(sig) else None

        if (
            t1 is not None
            and t1.kind is TokenKind.STRING_LITERAL
            and _EMBEDDED_CMP_RE.search(t1.string_content)
        ):
            return SigHit(
                (tok.position, t1.end),
                f"connective followed by quoted comparison {t1.lexeme!r}",
            )
        if t1 is not None and t2 is not None and t3 is not None:
            if (
                t1.kind in _LITERALISH
                and t2.kind is TokenKind.OPERATOR
                and t2.lexeme in _STR_CMP
                and t3.kind in _LITERALISH
            ):
                has_string_side = TokenKind.STRING_LITERAL in (t1.kind, t3.kind)
                if site == "string" or has_string_side:
                    return SigHit(
                        (tok.position, t3.end),
                        "connective followed by a string comparison",
                    )
            if (
                t1.kind in _LITERALISH
                and t2.kind is TokenKind.STRING_LITERAL
                and _PURE_CMP_RE.match(t2.string_content)
                and t3.kind in _LITERALISH
            ):
                # '1'='1 lexes as INT, STRING("'='"), INT
                return SigHit(
                    (tok.position, t3.end),
                    "connective followed by a quote-split comparison",
                )
    return None


def _has_injection_context(sig: list[Token]) -> bool:
    return any(
        t.kind in (TokenKind.QUOTE, TokenKind.SEMICOLON) for t in sig
    )


def _statement_hits(sig: list[Token], context_ok: bool) -> dict[str, SigHit]:
    hits: dict[str, SigHit] = {}

    for i, tok in enumerate(sig):
        if (
            "piggyback" not in hits
            and tok.kind is TokenKind.SEMICOLON
            and i + 1 < len(sig)
            and sig[i + 1].kind is TokenKind.KEYWORD
            and sig[i + 1].lower in COMMAND_KEYWORDS
        ):
            hits["piggyback"] = SigHit(
                (tok.position, sig[i + 1].end),
                f"piggybacked statement: semicolon then {sig[i + 1].lexeme!r}",
                "piggyback",
            )

        if (
            "union" not in hits
            and tok.kind is TokenKind.KEYWORD
            and tok.lower == "union"
        ):
            j = i + 1
            if (
                j < len(sig)
                and sig[j].kind is TokenKind.IDENTIFIER
                and sig[j].lower in ("all", "distinct")
            ):
                j += 1
            if (
                j < len(sig)
                and sig[j].kind is TokenKind.KEYWORD
                and sig[j].lower == "select"
            ):
                hits["union"] = SigHit(
                    (tok.position, sig[j].end), "UNION SELECT appended", "union"
                )

        if (
            "conversion" not in hits
            and tok.kind is TokenKind.KEYWORD
            and tok.lower in ("convert", "cast")
            and i + 1 < len(sig)
            and sig[i + 1].kind is TokenKind.PAREN
            and sig[i + 1].lexeme == "("
        ):
            # require nesting (second paren or a comma) before the SELECT so
            # prose like "convert (select one)" stays benign
            nested = False
            for k in range(i + 2, len(sig)):
                tk = sig[k]
                if (tk.kind is TokenKind.PAREN and tk.lexeme == "(") or (
                    tk.kind is TokenKind.OTHER and "," in tk.lexeme
                ):
                    nested = True
                elif (
                    tk.kind is TokenKind.KEYWORD
                    and tk.lower == "select"
                    and nested
                ):
                    hits["conversion"] = SigHit(
                        (tok.position, tk.end),
                        f"{tok.lower} over a nested SELECT (type-conversion probe)",
                        "conversion",
                    )
                    break

        if "stored_procedure" not in hits and tok.kind in (
            TokenKind.KEYWORD,
            TokenKind.IDENTIFIER,
        ):
            if tok.lower.startswith(("sp_", "xp_")):
                hits["stored_procedure"] = SigHit(
                    (tok.position, tok.end),
                    f"stored procedure reference {tok.lexeme!r}",
                    "stored_procedure",
                )
            elif (
                tok.lower in ("exec", "execute")
                and tok.kind is TokenKind.KEYWORD
                and context_ok
            ):
                hits["stored_procedure"] = SigHit(
                    (tok.position, tok.end),
                    f"{tok.lexeme!r} in an injection context",
                    "stored_procedure",
                )

    return hits


def check_sql_statement(tokens, keywords: Optional[KeywordSet] = None) -> Optional[SigHit]:
    """Structural statement shapes; strongest shape wins.

    Quote pairing can swallow an injected fragment into a string literal
    (``' exec xp_cmdshell 'net user' --`` pairs the outer quotes), so each
    string literal's content is re-lexed and checked once as well. Outer
    hits take precedence for the same shape.
    """
    keywords = keywords or _DEFAULT_KEYWORDS
    sig = _significant(tokens)
    context_ok = _has_injection_context(sig)
    hits = _statement_hits(sig, context_ok)

    for tok in sig:
        if tok.kind is not TokenKind.STRING_LITERAL or not tok.string_content:
            continue
        inner = _significant(tokenize(tok.string_content, keywords))
        inner_hits = _statement_hits(
            inner, context_ok or _has_injection_context(inner)
        )
        for shape, hit in inner_hits.items():
            hits.setdefault(
                shape,
                SigHit(
                    (tok.position, tok.end),
                    hit.description + " (inside a string literal)",
                    hit.shape,
                ),
            )

    for shape in _SHAPE_ORDER:
        if shape in hits:
            return hits[shape]
    return None


def scan(table: TokenTable, keywords: Optional[KeywordSet] = None) -> SqliVerdict:
    """Run the three checks over every entry in fixed key order."""
    for key, tokens in table.entries:
        hit4 = check_and_or_integer(tokens)
        hit5 = check_and_or_string(tokens)
        hit6 = check_sql_statement(tokens, keywords)
        if hit4 is None and hit5 is None and hit6 is None:
            continue
        if hit6 is not None:
            winner, attack_class = hit6, _SHAPE_CLASS[hit6.shape]
        else:
            winner, attack_class = (hit4 or hit5), AttackClass.TAUTOLOGY
        return SqliVerdict(
            malicious=True,
            attack_class=attack_class,
            matched_key=key,
            matched_span=winner.span,
            description=winner.description,
        )
    return BENIGN_VERDICT
