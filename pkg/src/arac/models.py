"""Domain entities.

Every entity is a frozen dataclass: values handed out by the store are
immutable snapshots and safe to share between threads. Each entity knows
how to serialize itself to plain JSON-compatible dicts (used by both the
durability snapshot and the corpus archive); text bodies are kept out of
the JSON in archives so they can round-trip byte-for-byte as raw files.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

from .lom import LomRecord, lom_from_dict, lom_to_dict
from .tokenizer import Token, TokenSequence


class Role(str, Enum):
    ADMIN = "admin"
    TEACHER = "teacher"
    STUDENT = "student"


class AnnotationSource(str, Enum):
    AUTOMATIC = "automatic"
    MANUAL = "manual"


class AssignmentStatus(str, Enum):
    ASSIGNED = "assigned"
    ACCOMPLISHED = "accomplished"


class Verdict(str, Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"


def _dt(value: Optional[str]) -> Optional[datetime]:
    return datetime.fromisoformat(value) if value else None


def _iso(value: Optional[datetime]) -> Optional[str]:
    return value.isoformat() if value else None


# -- corpus ---------------------------------------------------------------------

@dataclass(frozen=True)
class Theme:
    id: str
    name: str

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "name": self.name}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Theme":
        return cls(id=d["id"], name=d["name"])


@dataclass(frozen=True)
class TextDocument:
    id: str
    title: str
    body: str
    theme_id: str
    tokens: TokenSequence
    lom: LomRecord
    created_by: str
    created_at: datetime

    def token_fingerprint(self) -> str:
        """Hash of the token surfaces; exercises snapshot this to detect
        later body edits."""
        joined = "\x00".join(t.surface for t in self.tokens)
        return hashlib.sha256(joined.encode("utf-8")).hexdigest()

    def to_dict(self, include_body: bool = True) -> dict[str, Any]:
        d = {
            "id": self.id,
            "title": self.title,
            "theme_id": self.theme_id,
            "tokens": [[t.index, t.surface, t.start, t.end] for t in self.tokens],
            "lom": lom_to_dict(self.lom),
            "created_by": self.created_by,
            "created_at": _iso(self.created_at),
        }
        if include_body:
            d["body"] = self.body
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any], body: Optional[str] = None) -> "TextDocument":
        return cls(
            id=d["id"],
            title=d["title"],
            body=d["body"] if body is None else body,
            theme_id=d["theme_id"],
            tokens=tuple(Token(i, s, a, b) for i, s, a, b in d["tokens"]),
            lom=lom_from_dict(d["lom"]),
            created_by=d["created_by"],
            created_at=_dt(d["created_at"]),
        )


@dataclass(frozen=True)
class Taxonomy:
    id: str
    name: str
    entries: tuple[str, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "name": self.name, "entries": list(self.entries)}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Taxonomy":
        return cls(id=d["id"], name=d["name"], entries=tuple(d["entries"]))


@dataclass(frozen=True)
class Annotation:
    id: str
    text_id: str
    token_index: int
    label: str
    source: AnnotationSource
    taxonomy_id: Optional[str] = None
    entry_index: Optional[int] = None
    created_by: Optional[str] = None

    def label_key(self) -> tuple:
        """Identity of the label for duplicate detection: automatic labels
        are the (taxonomy, entry) pair, manual labels the string itself."""
        if self.source is AnnotationSource.AUTOMATIC:
            return ("automatic", self.taxonomy_id, self.entry_index)
        return ("manual", self.label)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "text_id": self.text_id,
            "token_index": self.token_index,
            "label": self.label,
            "source": self.source.value,
            "taxonomy_id": self.taxonomy_id,
            "entry_index": self.entry_index,
            "created_by": self.created_by,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Annotation":
        return cls(
            id=d["id"],
            text_id=d["text_id"],
            token_index=d["token_index"],
            label=d["label"],
            source=AnnotationSource(d["source"]),
            taxonomy_id=d.get("taxonomy_id"),
            entry_index=d.get("entry_index"),
            created_by=d.get("created_by"),
        )


@dataclass(frozen=True)
class QueryCriteria:
    """Conjunction of optional filters; all unset means every text."""

    theme_id: Optional[str] = None
    keyword: Optional[str] = None
    difficulty: Optional[str] = None
    context: Optional[str] = None
    has_taxonomy: Optional[str] = None
    author: Optional[str] = None

    def is_empty(self) -> bool:
        return all(
            v is None
            for v in (
                self.theme_id,
                self.keyword,
                self.difficulty,
                self.context,
                self.has_taxonomy,
                self.author,
            )
        )


@dataclass(frozen=True)
class TextSummary:
    id: str
    title: str
    theme_id: str
    difficulty: str
    context: str
    created_by: str
    created_at: datetime
    token_count: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "theme_id": self.theme_id,
            "difficulty": self.difficulty,
            "context": self.context,
            "created_by": self.created_by,
            "created_at": _iso(self.created_at),
            "token_count": self.token_count,
        }


# -- activities -------------------------------------------------------------------

@dataclass(frozen=True)
class Exercise:
    id: str
    text_id: str
    title: str
    instructions: str
    gaps: tuple[int, ...]
    expected_answers: tuple[str, ...]
    text_fingerprint: str
    created_by: str
    created_at: datetime

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "text_id": self.text_id,
            "title": self.title,
            "instructions": self.instructions,
            "gaps": list(self.gaps),
            "expected_answers": list(self.expected_answers),
            "text_fingerprint": self.text_fingerprint,
            "created_by": self.created_by,
            "created_at": _iso(self.created_at),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Exercise":
        return cls(
            id=d["id"],
            text_id=d["text_id"],
            title=d["title"],
            instructions=d["instructions"],
            gaps=tuple(d["gaps"]),
            expected_answers=tuple(d["expected_answers"]),
            text_fingerprint=d["text_fingerprint"],
            created_by=d["created_by"],
            created_at=_dt(d["created_at"]),
        )


@dataclass(frozen=True)
class LiteralSegment:
    text: str

    def to_dict(self) -> dict[str, Any]:
        return {"literal": self.text}


@dataclass(frozen=True)
class GapSegment:
    ordinal: int

    def to_dict(self) -> dict[str, Any]:
        return {"gap": self.ordinal}


Segment = LiteralSegment | GapSegment


@dataclass(frozen=True)
class ExerciseView:
    exercise_id: str
    title: str
    instructions: str
    segments: tuple[Segment, ...]
    gap_count: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "exercise_id": self.exercise_id,
            "title": self.title,
            "instructions": self.instructions,
            "segments": [s.to_dict() for s in self.segments],
            "gap_count": self.gap_count,
        }


@dataclass(frozen=True)
class Exam:
    id: str
    title: str
    exercise_ids: tuple[str, ...]
    created_by: str
    created_at: datetime

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "exercise_ids": list(self.exercise_ids),
            "created_by": self.created_by,
            "created_at": _iso(self.created_at),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Exam":
        return cls(
            id=d["id"],
            title=d["title"],
            exercise_ids=tuple(d["exercise_ids"]),
            created_by=d["created_by"],
            created_at=_dt(d["created_at"]),
        )


@dataclass(frozen=True)
class Assignment:
    id: str
    exam_id: str
    student_id: str
    status: AssignmentStatus
    assigned_at: datetime
    accomplished_at: Optional[datetime] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "exam_id": self.exam_id,
            "student_id": self.student_id,
            "status": self.status.value,
            "assigned_at": _iso(self.assigned_at),
            "accomplished_at": _iso(self.accomplished_at),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Assignment":
        return cls(
            id=d["id"],
            exam_id=d["exam_id"],
            student_id=d["student_id"],
            status=AssignmentStatus(d["status"]),
            assigned_at=_dt(d["assigned_at"]),
            accomplished_at=_dt(d.get("accomplished_at")),
        )


@dataclass(frozen=True)
class GapAnswer:
    exercise_id: str
    ordinal: int
    text: str


@dataclass(frozen=True)
class Submission:
    id: str
    exam_id: str
    student_id: str
    answers: tuple[GapAnswer, ...]
    submitted_at: datetime
    assignment_id: Optional[str] = None

    def answer_map(self) -> dict[tuple[str, int], str]:
        return {(a.exercise_id, a.ordinal): a.text for a in self.answers}

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "exam_id": self.exam_id,
            "student_id": self.student_id,
            "answers": [[a.exercise_id, a.ordinal, a.text] for a in self.answers],
            "submitted_at": _iso(self.submitted_at),
            "assignment_id": self.assignment_id,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Submission":
        return cls(
            id=d["id"],
            exam_id=d["exam_id"],
            student_id=d["student_id"],
            answers=tuple(GapAnswer(e, o, t) for e, o, t in d["answers"]),
            submitted_at=_dt(d["submitted_at"]),
            assignment_id=d.get("assignment_id"),
        )


@dataclass(frozen=True)
class GapResult:
    exercise_id: str
    ordinal: int
    expected: str
    given: Optional[str]
    verdict: Verdict

    def to_dict(self) -> dict[str, Any]:
        return {
            "exercise_id": self.exercise_id,
            "gap": self.ordinal,
            "expected": self.expected,
            "given": self.given,
            "verdict": self.verdict.value,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GapResult":
        return cls(
            exercise_id=d["exercise_id"],
            ordinal=d["gap"],
            expected=d["expected"],
            given=d.get("given"),
            verdict=Verdict(d["verdict"]),
        )


@dataclass(frozen=True)
class CorrectionReport:
    id: str
    exam_id: str
    student_id: str
    assignment_id: str
    per_gap: tuple[GapResult, ...]
    correct_count: int
    question_count: int
    performance: Fraction

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "exam_id": self.exam_id,
            "student_id": self.student_id,
            "assignment_id": self.assignment_id,
            "per_gap": [g.to_dict() for g in self.per_gap],
            "correct_count": self.correct_count,
            "question_count": self.question_count,
            "performance": str(self.performance),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CorrectionReport":
        return cls(
            id=d["id"],
            exam_id=d["exam_id"],
            student_id=d["student_id"],
            assignment_id=d["assignment_id"],
            per_gap=tuple(GapResult.from_dict(g) for g in d["per_gap"]),
            correct_count=d["correct_count"],
            question_count=d["question_count"],
            performance=Fraction(d["performance"]),
        )


# -- accounts ---------------------------------------------------------------------

@dataclass(frozen=True)
class User:
    id: str
    login: str
    password_digest: str
    role: Role
    created_at: datetime
    active: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "login": self.login,
            "password_digest": self.password_digest,
            "role": self.role.value,
            "created_at": _iso(self.created_at),
            "active": self.active,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "User":
        return cls(
            id=d["id"],
            login=d["login"],
            password_digest=d["password_digest"],
            role=Role(d["role"]),
            created_at=_dt(d["created_at"]),
            active=d["active"],
        )


@dataclass(frozen=True)
class SessionToken:
    token: str
    user_id: str
    expires_at: datetime


@dataclass(frozen=True)
class HistoryEntry:
    exam_id: str
    accomplished_at: datetime
    performance: Fraction


@dataclass(frozen=True)
class PerformanceHistory:
    student_id: str
    entries: tuple[HistoryEntry, ...]


def deactivated(user: User) -> User:
    return replace(user, active=False)
