"""Structural XML representation of SQL queries for prototype matching.

A query is abstracted to its shape: the command, the projected attributes,
the source relation, and an ordered condition list where each right-hand
side is reduced to a literal-shape label. Concrete literal values are
deliberately dropped, so two queries that differ only in user data map to
the same document while any structural tampering changes it.

Element vocabulary (fixed, interchange format): Queries, Query, command,
project_attribute, From, LHS_condition, RHS_condition, logical_operator.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .sqltokens import COMMAND_KEYWORDS, Token, TokenKind


class QueryXmlError(ValueError):
    """Raised when a document does not fit the interchange vocabulary."""


class RhsShape(Enum):
    STRING_LITERAL = "String Literal"
    INT_LITERAL = "Integer Literal"
    STRING_AND_INT_LITERAL = "String and Integer Literal"
    IDENTIFIER = "Identifier"


class Connective(Enum):
    AND = "and"
    OR = "or"


_SHAPE_BY_LABEL = {
    "string literal": RhsShape.STRING_LITERAL,
    "integer literal": RhsShape.INT_LITERAL,
    "int literal": RhsShape.INT_LITERAL,
    "string and integer literal": RhsShape.STRING_AND_INT_LITERAL,
    "identifier": RhsShape.IDENTIFIER,
}

_COMPARATORS = frozenset({"=", "<", ">", "<=", ">=", "<>", "!="})

# A quoted literal like '1=1' carries its comparison inside the string; the
# digits beside the comparator are what make it count as an integer shape.
_DIGIT_CMP_RE = re.compile(r"[0-9]\s*[=<>]|[=<>]\s*[0-9]")


@dataclass(frozen=True)
class Condition:
    lhs: str
    rhs_shape: RhsShape
    connective: Optional[Connective] = None


@dataclass(frozen=True)
class XmlQueryDoc:
    query_id: int
    command: str
    project_attribute: str
    from_relation: str
    conditions: tuple[Condition, ...] = ()
    malformed: bool = field(default=False, compare=True)

    def __post_init__(self):
        if self.query_id <= 0:
            raise ValueError("query_id must be positive")
        for i, cond in enumerate(self.conditions):
            if i == 0 and cond.connective is not None:
                raise ValueError("first condition must not carry a connective")
            if i > 0 and cond.connective is None:
                raise ValueError("non-first condition must carry a connective")

    def shape_key(self) -> tuple:
        """Everything the matcher compares, as one hashable value."""
        return (
            self.command,
            self.project_attribute,
            self.from_relation,
            tuple((c.lhs, c.rhs_shape, c.connective) for c in self.conditions),
        )


def serialize(doc: XmlQueryDoc) -> str:
    return serialize_queries([doc])


def serialize_queries(docs) -> str:
    lines = ["<Queries>"]
    for doc in docs:
        if doc.malformed:
            raise QueryXmlError("cannot serialize a malformed query document")
        lines.append(f'  <Query id="{doc.query_id}">')
        lines.append(f"    <command> {doc.command} </command>")
        lines.append(
            f"    <project_attribute> {doc.project_attribute} </project_attribute>"
        )
        lines.append(f"    <From> {doc.from_relation} </From>")
        for cond in doc.conditions:
            if cond.connective is not None:
                lines.append(
                    f"    <logical_operator> {cond.connective.value} </logical_operator>"
                )
            lines.append(f"    <LHS_condition> {cond.lhs} </LHS_condition>")
            lines.append(
                f"    <RHS_condition> {cond.rhs_shape.value} </RHS_condition>"
            )
        lines.append("  </Query>")
    lines.append("</Queries>")
    return "\n".join(lines) + "\n"


def _clean(text: Optional[str]) -> str:
    return re.sub(r"\s+", " ", text or "").strip()


def _parse_query_element(el: ET.Element) -> XmlQueryDoc:
    raw_id = el.get("id") or el.get("ID")
    if raw_id is None:
        raise QueryXmlError("Query element missing id attribute")
    try:
        query_id = int(raw_id.strip())
    except ValueError:
        raise QueryXmlError(f"Query id is not an integer: {raw_id!r}") from None

    command = ""
    project = ""
    relation = ""
    conditions: list[Condition] = []
    pending_connective: Optional[Connective] = None
    pending_lhs: Optional[str] = None

    for child in el:
        tag = child.tag
        if not isinstance(tag, str):  # comment or processing instruction
            continue
        text = _clean(child.text)
        if tag == "command":
            command = text.lower()
        elif tag == "project_attribute":
            project = text.lower()
        elif tag == "From":
            relation = text.lower()
        elif tag == "logical_operator":
            low = text.lower()
            if low not in ("and", "or"):
                raise QueryXmlError(f"unknown logical_operator: {text!r}")
            if pending_lhs is not None:
                raise QueryXmlError("logical_operator between LHS and RHS")
            pending_connective = Connective(low)
        elif tag == "LHS_condition":
            if pending_lhs is not None:
                raise QueryXmlError("two LHS_condition elements in a row")
            pending_lhs = text.lower()
        elif tag == "RHS_condition":
            if pending_lhs is None:
                raise QueryXmlError("RHS_condition without preceding LHS_condition")
            shape = _SHAPE_BY_LABEL.get(text.lower())
            if shape is None:
                raise QueryXmlError(f"unknown RHS_condition shape: {text!r}")
            if conditions and pending_connective is None:
                raise QueryXmlError("non-first condition missing logical_operator")
            if not conditions and pending_connective is not None:
                raise QueryXmlError("first condition must not follow a logical_operator")
            conditions.append(Condition(pending_lhs, shape, pending_connective))
            pending_lhs = None
            pending_connective = None
        else:
            raise QueryXmlError(f"unknown element inside Query: {tag!r}")

    if pending_lhs is not None:
        raise QueryXmlError("LHS_condition without RHS_condition")
    if pending_connective is not None:
        raise QueryXmlError("trailing logical_operator")
    if not command:
        raise QueryXmlError("Query missing command element")
    return XmlQueryDoc(
        query_id=query_id,
        command=command,
        project_attribute=project,
        from_relation=relation,
        conditions=tuple(conditions),
    )


def parse_queries(text: str) -> tuple[XmlQueryDoc, ...]:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise QueryXmlError(f"not well-formed XML: {exc}") from exc
    if root.tag != "Queries":
        raise QueryXmlError(f"root element must be Queries, got {root.tag!r}")
    docs = []
    for child in root:
        if not isinstance(child.tag, str):
            continue
        if child.tag != "Query":
            raise QueryXmlError(f"unexpected element under Queries: {child.tag!r}")
        docs.append(_parse_query_element(child))
    return tuple(docs)


def parse(text: str) -> XmlQueryDoc:
    docs = parse_queries(text)
    if len(docs) != 1:
        raise QueryXmlError(f"expected exactly one Query, got {len(docs)}")
    return docs[0]


def _significant(tokens) -> list[Token]:
    return [t for t in tokens if t.kind is not TokenKind.WHITESPACE]


def _rhs_shape(run: list[Token]) -> Optional[RhsShape]:
    has_string = False
    has_int = False
    has_ident = False
    for tok in run:
        if tok.kind is TokenKind.STRING_LITERAL:
            has_string = True
            if _DIGIT_CMP_RE.search(tok.string_content):
                has_int = True
        elif tok.kind is TokenKind.INT_LITERAL:
            has_int = True
        elif tok.kind is TokenKind.IDENTIFIER:
            has_ident = True
        elif tok.kind is TokenKind.KEYWORD and tok.lower not in ("and", "or"):
            has_ident = True
        elif tok.kind is TokenKind.QUOTE:
            return None  # unpaired quote: broken literal
    if has_string and has_int:
        return RhsShape.STRING_AND_INT_LITERAL
    if has_string:
        return RhsShape.STRING_LITERAL
    if has_int:
        return RhsShape.INT_LITERAL
    if has_ident:
        return RhsShape.IDENTIFIER
    return None


def _starts_new_condition(sig: list[Token], i: int) -> bool:
    """True when sig[i] is a connective introducing `lhs cmp ...`.

    A connective that is not followed by that shape belongs to the previous
    right-hand side (this is what turns a trailing OR '1=1' into part of the
    prior condition's shape instead of a fresh condition).
    """
    if sig[i].kind is not TokenKind.KEYWORD or sig[i].lower not in ("and", "or"):
        return False
    if i + 2 >= len(sig):
        return False
    nxt, cmp_tok = sig[i + 1], sig[i + 2]
    return (
        nxt.kind is TokenKind.IDENTIFIER
        and cmp_tok.kind is TokenKind.OPERATOR
        and cmp_tok.lexeme in _COMPARATORS
    )


def to_xml(tokens, query_id: int = 1) -> Optional[XmlQueryDoc]:
    """Abstract a token sequence to its structural document.

    Returns None (not a query) when the sequence does not start with a
    command keyword. Structural problems after a valid command produce a
    doc with malformed=True, which the matcher treats as a mismatch.
    """
    all_tokens = list(tokens)
    sig = _significant(all_tokens)
    # everything after a comment marker is commentary, not structure
    for idx, tok in enumerate(sig):
        if tok.kind is TokenKind.COMMENT_START:
            sig = sig[:idx]
            break
    if not sig or sig[0].kind is not TokenKind.KEYWORD or sig[0].lower not in COMMAND_KEYWORDS:
        return None

    command = sig[0].lower
    malformed = False
    project = ""
    relation = ""
    where_index = None

    if command == "select":
        from_index = None
        for i, tok in enumerate(sig):
            if tok.kind is TokenKind.KEYWORD and tok.lower == "from":
                from_index = i
                break
        if from_index is None or from_index == 1:
            # no FROM clause, or nothing projected before it
            malformed = True
            project_tokens = sig[1:from_index] if from_index else sig[1:]
            project = "".join(t.lexeme for t in project_tokens).strip().lower()
        else:
            # rebuild the projection from source text so `a, b` keeps its comma
            start = sig[1].position
            end = sig[from_index - 1].end
            source = "".join(t.lexeme for t in all_tokens)
            project = re.sub(r"\s+", " ", source[start:end]).strip().lower()
        next_i = None
        if from_index is not None:
            if from_index + 1 < len(sig) and sig[from_index + 1].kind in (
                TokenKind.IDENTIFIER,
                TokenKind.KEYWORD,
            ):
                relation = sig[from_index + 1].lower
                next_i = from_index + 2
            else:
                malformed = True
    else:
        # non-select commands: the relation follows the first structural
        # marker (into/from/table) or, failing that, is the next identifier
        next_i = 1
        for i in range(1, len(sig)):
            tok = sig[i]
            if (
                tok.kind is TokenKind.KEYWORD
                and tok.lower in ("from", "table")
                or tok.kind is TokenKind.IDENTIFIER
                and tok.lower == "into"
            ):
                if i + 1 < len(sig) and sig[i + 1].kind in (
                    TokenKind.IDENTIFIER,
                    TokenKind.KEYWORD,
                ):
                    relation = sig[i + 1].lower
                    next_i = i + 2
                break
        else:
            if len(sig) > 1 and sig[1].kind is TokenKind.IDENTIFIER:
                relation = sig[1].lower
                next_i = 2

    conditions: list[Condition] = []
    if next_i is not None and next_i < len(sig):
        if sig[next_i].kind is TokenKind.KEYWORD and sig[next_i].lower == "where":
            i = next_i + 1
            connective: Optional[Connective] = None
            while i < len(sig):
                lhs_tok = sig[i]
                if lhs_tok.kind is not TokenKind.IDENTIFIER:
                    malformed = True
                    break
                if i + 1 >= len(sig) or not (
                    sig[i + 1].kind is TokenKind.OPERATOR
                    and sig[i + 1].lexeme in _COMPARATORS
                ):
                    malformed = True
                    break
                run_start = i + 2
                j = run_start
                while j < len(sig) and not _starts_new_condition(sig, j):
                    j += 1
                run = sig[run_start:j]
                shape = _rhs_shape(run)
                if shape is None:
                    malformed = True
                    break
                conditions.append(Condition(lhs_tok.lower, shape, connective))
                if j < len(sig):
                    connective = Connective(sig[j].lower)
                    i = j + 1
                else:
                    break
        else:
            # trailing clauses we do not model (ORDER BY etc) make the doc
            # unsafe to structurally compare
            malformed = True
    elif next_i is None:
        malformed = True

    if conditions and conditions[0].connective is not None:  # pragma: no cover
        malformed = True
        conditions = []

    return XmlQueryDoc(
        query_id=query_id,
        command=command,
        project_attribute=project,
        from_relation=relation,
        conditions=tuple(conditions),
        malformed=malformed,
    )
