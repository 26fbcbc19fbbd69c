"""Learning-object metadata attached to corpus texts.

A deliberately small subset of the LOM element tree: the general,
educational and lifecycle categories carry just enough to answer
teacher queries (theme/difficulty/context/keyword/author). Full LOM
conformance is out of scope.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum
from typing import Any

from .errors import InvalidMetadata

_LANGUAGE_RE = re.compile(r"^[a-z]{2}$")


class Difficulty(str, Enum):
    VERY_EASY = "very_easy"
    EASY = "easy"
    MEDIUM = "medium"
    DIFFICULT = "difficult"
    VERY_DIFFICULT = "very_difficult"


class EducationalContext(str, Enum):
    SCHOOL = "school"
    HIGHER_EDUCATION = "higher_education"
    TRAINING = "training"
    OTHER = "other"


@dataclass(frozen=True)
class LomGeneral:
    title: str = ""
    language: str = "ar"
    description: str = ""
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class LomEducational:
    difficulty: Difficulty = Difficulty.MEDIUM
    context: EducationalContext = EducationalContext.OTHER
    learning_resource_type: str = "text"


@dataclass(frozen=True)
class LomLifecycle:
    author: str = ""
    date: datetime | None = None


@dataclass(frozen=True)
class LomRecord:
    general: LomGeneral = field(default_factory=LomGeneral)
    educational: LomEducational = field(default_factory=LomEducational)
    lifecycle: LomLifecycle = field(default_factory=LomLifecycle)


def validate_lom(lom: LomRecord) -> LomRecord:
    """Check field-level invariants, raising InvalidMetadata on the first
    violation. Returns the record unchanged so calls can be chained."""
    if not _LANGUAGE_RE.match(lom.general.language):
        raise InvalidMetadata(
            f"language must be a two-letter lowercase code, got {lom.general.language!r}"
        )
    if not isinstance(lom.educational.difficulty, Difficulty):
        raise InvalidMetadata(f"unknown difficulty {lom.educational.difficulty!r}")
    if not isinstance(lom.educational.context, EducationalContext):
        raise InvalidMetadata(f"unknown context {lom.educational.context!r}")
    return lom


def lom_from_dict(data: dict[str, Any]) -> LomRecord:
    """Build a LomRecord from nested plain dicts (wire and archive format).

    Unknown difficulty/context strings and malformed language codes raise
    InvalidMetadata rather than being coerced.
    """
    general_d = data.get("general", {}) or {}
    educational_d = data.get("educational", {}) or {}
    lifecycle_d = data.get("lifecycle", {}) or {}

    try:
        difficulty = Difficulty(educational_d.get("difficulty", Difficulty.MEDIUM.value))
    except ValueError:
        raise InvalidMetadata(f"unknown difficulty {educational_d.get('difficulty')!r}")
    try:
        context = EducationalContext(educational_d.get("context", EducationalContext.OTHER.value))
    except ValueError:
        raise InvalidMetadata(f"unknown context {educational_d.get('context')!r}")

    date_raw = lifecycle_d.get("date")
    date = datetime.fromisoformat(date_raw) if date_raw else None

    lom = LomRecord(
        general=LomGeneral(
            title=general_d.get("title", ""),
            language=general_d.get("language", "ar"),
            description=general_d.get("description", ""),
            keywords=tuple(general_d.get("keywords", ())),
        ),
        educational=LomEducational(
            difficulty=difficulty,
            context=context,
            learning_resource_type=educational_d.get("learning_resource_type", "text"),
        ),
        lifecycle=LomLifecycle(
            author=lifecycle_d.get("author", ""),
            date=date,
        ),
    )
    return validate_lom(lom)


def lom_to_dict(lom: LomRecord) -> dict[str, Any]:
    return {
        "general": {
            "title": lom.general.title,
            "language": lom.general.language,
            "description": lom.general.description,
            "keywords": list(lom.general.keywords),
        },
        "educational": {
            "difficulty": lom.educational.difficulty.value,
            "context": lom.educational.context.value,
            "learning_resource_type": lom.educational.learning_resource_type,
        },
        "lifecycle": {
            "author": lom.lifecycle.author,
            "date": lom.lifecycle.date.isoformat() if lom.lifecycle.date else None,
        },
    }


def with_title(lom: LomRecord, title: str) -> LomRecord:
    return replace(lom, general=replace(lom.general, title=title))
