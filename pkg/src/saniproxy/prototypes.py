"""Expected-query prototypes and structural matching.

The prototype document lists every query shape the protected application is
expected to issue. An incoming query matches when its structural document is
field-for-field identical to some prototype: same command, same projection,
same relation, and the same ordered conditions (lhs names, connectives, and
rhs shapes). Literal values never participate, so user data cannot cause a
mismatch; structure changes always do.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

from .queryxml import Condition, XmlQueryDoc, parse_queries


class PrototypeError(ValueError):
    """Raised when a prototype document cannot be loaded."""


@dataclass(frozen=True)
class MatchResult:
    matched: bool
    query_id: Optional[int] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.matched


class PrototypeSet:
    def __init__(self, prototypes, source_path: str = "<memory>"):
        self.source_path = source_path
        self._by_id: dict[int, XmlQueryDoc] = {}
        self._by_shape: dict[tuple, XmlQueryDoc] = {}
        for proto in prototypes:
            if proto.malformed:
                raise PrototypeError(
                    f"prototype {proto.query_id} is structurally incomplete"
                )
            if proto.query_id in self._by_id:
                raise PrototypeError(f"duplicate prototype id {proto.query_id}")
            key = proto.shape_key()
            if key in self._by_shape:
                warnings.warn(
                    f"prototype {proto.query_id} duplicates the structure of "
                    f"prototype {self._by_shape[key].query_id}; ignoring it",
                    stacklevel=2,
                )
                continue
            self._by_id[proto.query_id] = proto
            self._by_shape[key] = proto

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self):
        return iter(self._by_id.values())

    def get(self, query_id: int) -> Optional[XmlQueryDoc]:
        return self._by_id.get(query_id)

    def match(self, doc: XmlQueryDoc) -> MatchResult:
        if not self._by_id:
            return MatchResult(False, None, "no prototype loaded")
        if doc.malformed:
            return MatchResult(False, None, "query structure is malformed")
        hit = self._by_shape.get(doc.shape_key())
        if hit is not None:
            return MatchResult(True, hit.query_id, "")
        return MatchResult(False, None, self._describe_deviation(doc))

    def _describe_deviation(self, doc: XmlQueryDoc) -> str:
        # narrow to prototypes sharing command+relation, then name the first
        # structural difference against the closest one
        same_relation = [
            p
            for p in self._by_id.values()
            if p.command == doc.command and p.from_relation == doc.from_relation
        ]
        if not same_relation:
            return (
                f"no prototype for command {doc.command!r} "
                f"on relation {doc.from_relation!r}"
            )
        best = max(
            same_relation, key=lambda p: _condition_agreement(p.conditions, doc.conditions)
        )
        if doc.project_attribute != best.project_attribute:
            return (
                f"projection {doc.project_attribute!r} differs from prototype "
                f"{best.query_id} ({best.project_attribute!r})"
            )
        pc, dc = best.conditions, doc.conditions
        for i in range(min(len(pc), len(dc))):
            p, d = pc[i], dc[i]
            if d.lhs != p.lhs:
                return (
                    f"condition {i + 1} targets {d.lhs!r}, prototype "
                    f"{best.query_id} expects {p.lhs!r}"
                )
            if d.connective != p.connective:
                return (
                    f"condition {i + 1} connective changed to "
                    f"{d.connective.value if d.connective else 'none'} "
                    f"(prototype {best.query_id})"
                )
            if d.rhs_shape != p.rhs_shape:
                return (
                    f"condition {i + 1} ({d.lhs}) rhs shape changed to "
                    f"{d.rhs_shape.value!r}, prototype {best.query_id} expects "
                    f"{p.rhs_shape.value!r}"
                )
        if len(dc) > len(pc):
            extra = dc[len(pc)]
            conn = extra.connective.value.upper() if extra.connective else ""
            return (
                f"extra {conn} condition on {extra.lhs!r} beyond prototype "
                f"{best.query_id}"
            )
        if len(dc) < len(pc):
            missing = pc[len(dc)]
            return (
                f"missing condition on {missing.lhs!r} required by prototype "
                f"{best.query_id}"
            )
        return f"structure differs from prototype {best.query_id}"


def _condition_agreement(a: tuple[Condition, ...], b: tuple[Condition, ...]) -> int:
    score = 0
    for ca, cb in zip(a, b):
        if ca.lhs == cb.lhs:
            score += 2
            if ca.rhs_shape == cb.rhs_shape and ca.connective == cb.connective:
                score += 1
    return score


def load_prototypes(path) -> PrototypeSet:
    """Read a prototype document file. Raises PrototypeError on any problem."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise PrototypeError(f"cannot read prototype file {path}: {exc}") from exc
    try:
        docs = parse_queries(text)
    except ValueError as exc:
        raise PrototypeError(f"bad prototype document {path}: {exc}") from exc
    return PrototypeSet(docs, source_path=str(path))
