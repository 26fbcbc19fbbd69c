"""Embedded transactional entity store.

All entities live in one in-process store. Mutations go through
``transact``: a batch is applied to a copy of the current state, the
constraint set (referential integrity, unique keys, structural
invariants) is validated against that post-state, and only then is the
state swapped in, atomically for readers. A failed constraint aborts the
whole batch with ConstraintViolation and leaves nothing applied.

Durability is an atomic JSON snapshot: each committed batch serializes
the full post-state to a temp file and renames it over the storage path,
so a crash can never leave a torn file. With no path configured the
store is memory-only (tests, offline runs).

Readers never block: they grab the current state reference and read
immutable entities from it, so a concurrent commit is invisible until it
has fully succeeded.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from . import models
from .errors import ConstraintViolation
from .tokenizer import tokenize

SCHEMA_VERSION = 1

THEMES = "themes"
TEXTS = "texts"
TAXONOMIES = "taxonomies"
ANNOTATIONS = "annotations"
EXERCISES = "exercises"
EXAMS = "exams"
ASSIGNMENTS = "assignments"
SUBMISSIONS = "submissions"
REPORTS = "reports"
USERS = "users"

KINDS = (
    THEMES,
    TEXTS,
    TAXONOMIES,
    ANNOTATIONS,
    EXERCISES,
    EXAMS,
    ASSIGNMENTS,
    SUBMISSIONS,
    REPORTS,
    USERS,
)

ENTITY_CLASSES = {
    THEMES: models.Theme,
    TEXTS: models.TextDocument,
    TAXONOMIES: models.Taxonomy,
    ANNOTATIONS: models.Annotation,
    EXERCISES: models.Exercise,
    EXAMS: models.Exam,
    ASSIGNMENTS: models.Assignment,
    SUBMISSIONS: models.Submission,
    REPORTS: models.CorrectionReport,
    USERS: models.User,
}


@dataclass(frozen=True)
class Put:
    kind: str
    entity: Any


@dataclass(frozen=True)
class Delete:
    kind: str
    entity_id: str


Mutation = Union[Put, Delete]


class _State:
    """One immutable-by-convention snapshot of every entity table plus the
    secondary indexes derived from them."""

    __slots__ = (
        "tables",
        "annotations_by_text",
        "annotations_by_taxonomy",
        "texts_by_theme",
        "assignments_by_student",
        "reports_by_assignment",
    )

    def __init__(self, tables: dict[str, dict[str, Any]]):
        self.tables = tables
        self.annotations_by_text: dict[str, list[str]] = {}
        self.annotations_by_taxonomy: dict[str, list[str]] = {}
        self.texts_by_theme: dict[str, list[str]] = {}
        self.assignments_by_student: dict[str, list[str]] = {}
        self.reports_by_assignment: dict[str, str] = {}
        for ann in tables[ANNOTATIONS].values():
            self.annotations_by_text.setdefault(ann.text_id, []).append(ann.id)
            if ann.taxonomy_id is not None:
                self.annotations_by_taxonomy.setdefault(ann.taxonomy_id, []).append(ann.id)
        for text in tables[TEXTS].values():
            self.texts_by_theme.setdefault(text.theme_id, []).append(text.id)
        for assignment in tables[ASSIGNMENTS].values():
            self.assignments_by_student.setdefault(assignment.student_id, []).append(assignment.id)
        for report in tables[REPORTS].values():
            self.reports_by_assignment[report.assignment_id] = report.id


def _empty_tables() -> dict[str, dict[str, Any]]:
    return {kind: {} for kind in KINDS}


def _check(condition: bool, constraint: str, kind: str, entity_id: str):
    if not condition:
        raise ConstraintViolation(constraint, kind, entity_id)


def _validate_entity(tables: dict[str, dict[str, Any]], kind: str, entity: Any):
    """Structural and referential checks for one entity against a candidate
    post-state. Exercise gap bounds are deliberately not checked against the
    current text: exercises are snapshots and may legitimately go stale."""
    if kind == THEMES:
        _check(bool(entity.name.strip()), "theme name non-empty", kind, entity.id)
    elif kind == TEXTS:
        _check(bool(entity.body.strip()), "text body non-empty", kind, entity.id)
        _check(entity.theme_id in tables[THEMES], "text references existing theme", kind, entity.id)
        _check(entity.created_by in tables[USERS], "text references existing user", kind, entity.id)
        _check(entity.tokens == tokenize(entity.body), "text token cache matches body", kind, entity.id)
    elif kind == TAXONOMIES:
        _check(all(e.strip() for e in entity.entries), "taxonomy entries non-empty", kind, entity.id)
        _check(len(set(entity.entries)) == len(entity.entries), "taxonomy entries unique", kind, entity.id)
    elif kind == ANNOTATIONS:
        text = tables[TEXTS].get(entity.text_id)
        _check(text is not None, "annotation references existing text", kind, entity.id)
        _check(0 <= entity.token_index < len(text.tokens), "annotation token index in range", kind, entity.id)
        _check(bool(entity.label), "annotation label non-empty", kind, entity.id)
        if entity.source is models.AnnotationSource.AUTOMATIC:
            taxonomy = tables[TAXONOMIES].get(entity.taxonomy_id)
            _check(taxonomy is not None, "annotation references existing taxonomy", kind, entity.id)
            _check(
                entity.entry_index is not None and 0 <= entity.entry_index < len(taxonomy.entries),
                "annotation entry index in range",
                kind,
                entity.id,
            )
    elif kind == EXERCISES:
        _check(entity.text_id in tables[TEXTS], "exercise references existing text", kind, entity.id)
        _check(entity.created_by in tables[USERS], "exercise references existing user", kind, entity.id)
        _check(len(entity.gaps) > 0, "exercise gaps non-empty", kind, entity.id)
        _check(
            all(a < b for a, b in zip(entity.gaps, entity.gaps[1:])),
            "exercise gaps strictly increasing",
            kind,
            entity.id,
        )
        _check(
            len(entity.expected_answers) == len(entity.gaps),
            "exercise answers aligned with gaps",
            kind,
            entity.id,
        )
    elif kind == EXAMS:
        _check(len(entity.exercise_ids) > 0, "exam non-empty", kind, entity.id)
        _check(
            len(set(entity.exercise_ids)) == len(entity.exercise_ids),
            "exam exercises duplicate-free",
            kind,
            entity.id,
        )
        _check(
            all(eid in tables[EXERCISES] for eid in entity.exercise_ids),
            "exam references existing exercises",
            kind,
            entity.id,
        )
        _check(entity.created_by in tables[USERS], "exam references existing user", kind, entity.id)
    elif kind == ASSIGNMENTS:
        _check(entity.exam_id in tables[EXAMS], "assignment references existing exam", kind, entity.id)
        _check(entity.student_id in tables[USERS], "assignment references existing user", kind, entity.id)
        _check(
            (entity.status is models.AssignmentStatus.ACCOMPLISHED)
            == (entity.accomplished_at is not None),
            "accomplished_at set iff accomplished",
            kind,
            entity.id,
        )
    elif kind == SUBMISSIONS:
        _check(entity.exam_id in tables[EXAMS], "submission references existing exam", kind, entity.id)
        _check(entity.student_id in tables[USERS], "submission references existing user", kind, entity.id)
        if entity.assignment_id is not None:
            _check(
                entity.assignment_id in tables[ASSIGNMENTS],
                "submission references existing assignment",
                kind,
                entity.id,
            )
    elif kind == REPORTS:
        _check(entity.exam_id in tables[EXAMS], "report references existing exam", kind, entity.id)
        _check(entity.student_id in tables[USERS], "report references existing user", kind, entity.id)
        _check(
            entity.assignment_id in tables[ASSIGNMENTS],
            "report references existing assignment",
            kind,
            entity.id,
        )
        correct = sum(1 for g in entity.per_gap if g.verdict is models.Verdict.CORRECT)
        _check(entity.correct_count == correct, "report correct count consistent", kind, entity.id)
        _check(entity.question_count == len(entity.per_gap), "report question count consistent", kind, entity.id)
    elif kind == USERS:
        _check(bool(entity.login.strip()), "user login non-empty", kind, entity.id)
    else:
        raise ConstraintViolation("unknown entity kind", kind, getattr(entity, "id", None))


def _validate_uniques(tables: dict[str, dict[str, Any]], kinds: Optional[set[str]] = None):
    """Unique-key checks. ``kinds`` limits the scan to the entity kinds a
    batch touched (a batch cannot break uniqueness of a kind it never
    wrote); integrity_scan passes None to check everything."""

    def relevant(kind: str) -> bool:
        return kinds is None or kind in kinds

    if relevant(THEMES):
        names: set[str] = set()
        for theme in tables[THEMES].values():
            _check(theme.name not in names, "theme name unique", THEMES, theme.id)
            names.add(theme.name)

    if relevant(USERS):
        logins: set[str] = set()
        for user in tables[USERS].values():
            if user.active:
                _check(user.login not in logins, "login unique among active users", USERS, user.id)
                logins.add(user.login)

    if relevant(ANNOTATIONS):
        ann_keys: set[tuple] = set()
        for ann in tables[ANNOTATIONS].values():
            key = (ann.text_id, ann.token_index, ann.label_key())
            _check(key not in ann_keys, "no duplicate (token_index, label) per text", ANNOTATIONS, ann.id)
            ann_keys.add(key)

    if relevant(ASSIGNMENTS):
        assignment_keys: set[tuple[str, str]] = set()
        for assignment in tables[ASSIGNMENTS].values():
            key = (assignment.exam_id, assignment.student_id)
            _check(key not in assignment_keys, "one assignment per (exam, student)", ASSIGNMENTS, assignment.id)
            assignment_keys.add(key)

    if relevant(SUBMISSIONS):
        submission_assignments: set[str] = set()
        for sub in tables[SUBMISSIONS].values():
            if sub.assignment_id is not None:
                _check(
                    sub.assignment_id not in submission_assignments,
                    "one submission per assignment",
                    SUBMISSIONS,
                    sub.id,
                )
                submission_assignments.add(sub.assignment_id)

    if relevant(REPORTS):
        report_assignments: set[str] = set()
        for report in tables[REPORTS].values():
            _check(
                report.assignment_id not in report_assignments,
                "one report per assignment",
                REPORTS,
                report.id,
            )
            report_assignments.add(report.assignment_id)


def _validate_deletes(tables: dict[str, dict[str, Any]], deleted: list[tuple[str, str]]):
    """Reject deletes that would leave dangling references in the post-state."""
    refs: list[tuple[str, str, str, str]] = []  # (referrer kind, referrer id, target kind, target id)
    for text in tables[TEXTS].values():
        refs.append((TEXTS, text.id, THEMES, text.theme_id))
        refs.append((TEXTS, text.id, USERS, text.created_by))
    for ann in tables[ANNOTATIONS].values():
        refs.append((ANNOTATIONS, ann.id, TEXTS, ann.text_id))
        if ann.taxonomy_id is not None:
            refs.append((ANNOTATIONS, ann.id, TAXONOMIES, ann.taxonomy_id))
    for ex in tables[EXERCISES].values():
        refs.append((EXERCISES, ex.id, TEXTS, ex.text_id))
    for exam in tables[EXAMS].values():
        for eid in exam.exercise_ids:
            refs.append((EXAMS, exam.id, EXERCISES, eid))
    for a in tables[ASSIGNMENTS].values():
        refs.append((ASSIGNMENTS, a.id, EXAMS, a.exam_id))
        refs.append((ASSIGNMENTS, a.id, USERS, a.student_id))
    for s in tables[SUBMISSIONS].values():
        refs.append((SUBMISSIONS, s.id, EXAMS, s.exam_id))
    for r in tables[REPORTS].values():
        refs.append((REPORTS, r.id, EXAMS, r.exam_id))
        refs.append((REPORTS, r.id, ASSIGNMENTS, r.assignment_id))

    deleted_set = set(deleted)
    for referrer_kind, referrer_id, target_kind, target_id in refs:
        if (target_kind, target_id) in deleted_set:
            raise ConstraintViolation(
                f"still referenced by {referrer_kind} {referrer_id}", target_kind, target_id
            )


class EntityStore:
    """Thread-safe entity store with batch transactions and an optional
    durable snapshot file."""

    def __init__(self, path: Optional[Union[str, Path]] = None):
        self._path = Path(path) if path is not None else None
        self._write_lock = threading.RLock()
        if self._path is not None and self._path.exists():
            self._state = _State(_load_tables(self._path))
        else:
            self._state = _State(_empty_tables())
            if self._path is not None:
                self._persist(self._state)

    # -- transactions ------------------------------------------------------

    def transact(self, batch: Sequence[Mutation]):
        """Apply the batch all-or-nothing; raises ConstraintViolation on the
        first violated constraint, leaving the store untouched."""
        with self._write_lock:
            tables = {kind: dict(table) for kind, table in self._state.tables.items()}
            deleted: list[tuple[str, str]] = []
            touched: list[tuple[str, Any]] = []
            for mutation in batch:
                if isinstance(mutation, Put):
                    if mutation.kind not in tables:
                        raise ConstraintViolation("unknown entity kind", mutation.kind, None)
                    expected = ENTITY_CLASSES[mutation.kind]
                    if not isinstance(mutation.entity, expected):
                        raise ConstraintViolation(
                            f"entity type mismatch (expected {expected.__name__})",
                            mutation.kind,
                            getattr(mutation.entity, "id", None),
                        )
                    tables[mutation.kind][mutation.entity.id] = mutation.entity
                    touched.append((mutation.kind, mutation.entity))
                elif isinstance(mutation, Delete):
                    if mutation.kind not in tables:
                        raise ConstraintViolation("unknown entity kind", mutation.kind, None)
                    if mutation.entity_id not in tables[mutation.kind]:
                        raise ConstraintViolation("delete of missing entity", mutation.kind, mutation.entity_id)
                    del tables[mutation.kind][mutation.entity_id]
                    deleted.append((mutation.kind, mutation.entity_id))
                else:
                    raise ConstraintViolation("unknown mutation type", str(type(mutation)), None)

            for kind, entity in touched:
                if entity.id in tables[kind]:  # not deleted later in the same batch
                    _validate_entity(tables, kind, entity)
            _validate_uniques(tables, {kind for kind, _ in touched})
            if deleted:
                _validate_deletes(tables, deleted)

            new_state = _State(tables)
            self._persist(new_state)
            self._state = new_state

    def _persist(self, state: _State):
        if self._path is None:
            return
        payload = {
            "schema_version": SCHEMA_VERSION,
            "entities": {
                kind: [entity.to_dict() for entity in state.tables[kind].values()]
                for kind in KINDS
            },
        }
        tmp = self._path.with_suffix(self._path.suffix + ".tmp")
        self._path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)
        os.replace(tmp, self._path)

    # -- reads --------------------------------------------------------------

    def get(self, kind: str, entity_id: str):
        return self._state.tables[kind].get(entity_id)

    def list(self, kind: str) -> tuple:
        return tuple(self._state.tables[kind].values())

    def count(self, kind: str) -> int:
        return len(self._state.tables[kind])

    def annotations_for_text(self, text_id: str) -> tuple[models.Annotation, ...]:
        state = self._state
        ids = state.annotations_by_text.get(text_id, [])
        return tuple(state.tables[ANNOTATIONS][i] for i in ids)

    def annotations_for_taxonomy(self, taxonomy_id: str) -> tuple[models.Annotation, ...]:
        state = self._state
        ids = state.annotations_by_taxonomy.get(taxonomy_id, [])
        return tuple(state.tables[ANNOTATIONS][i] for i in ids)

    def texts_for_theme(self, theme_id: str) -> tuple[models.TextDocument, ...]:
        state = self._state
        ids = state.texts_by_theme.get(theme_id, [])
        return tuple(state.tables[TEXTS][i] for i in ids)

    def assignments_for_student(self, student_id: str) -> tuple[models.Assignment, ...]:
        state = self._state
        ids = state.assignments_by_student.get(student_id, [])
        return tuple(state.tables[ASSIGNMENTS][i] for i in ids)

    def assignment_for(self, exam_id: str, student_id: str) -> Optional[models.Assignment]:
        for assignment in self.assignments_for_student(student_id):
            if assignment.exam_id == exam_id:
                return assignment
        return None

    def report_for_assignment(self, assignment_id: str) -> Optional[models.CorrectionReport]:
        state = self._state
        report_id = state.reports_by_assignment.get(assignment_id)
        return state.tables[REPORTS].get(report_id) if report_id else None

    def user_by_login(self, login: str, active_only: bool = True) -> Optional[models.User]:
        for user in self._state.tables[USERS].values():
            if user.login == login and (user.active or not active_only):
                return user
        return None

    def theme_by_name(self, name: str) -> Optional[models.Theme]:
        for theme in self._state.tables[THEMES].values():
            if theme.name == name:
                return theme
        return None

    # -- integrity ------------------------------------------------------------

    def integrity_scan(self) -> list[str]:
        """Run every constraint over the whole store; returns a list of
        violation descriptions (empty means the store is consistent)."""
        state = self._state
        violations: list[str] = []
        for kind in KINDS:
            for entity in state.tables[kind].values():
                try:
                    _validate_entity(state.tables, kind, entity)
                except ConstraintViolation as exc:
                    violations.append(exc.message)
        try:
            _validate_uniques(state.tables)
        except ConstraintViolation as exc:
            violations.append(exc.message)
        return violations

    def entity_sets(self) -> dict[str, dict[str, Any]]:
        """Current tables keyed by kind; entities are immutable, the dicts
        are fresh copies."""
        return {kind: dict(table) for kind, table in self._state.tables.items()}


def _load_tables(path: Path) -> dict[str, dict[str, Any]]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        from .errors import UnsupportedVersion

        raise UnsupportedVersion(f"storage schema {version!r} not supported (expected {SCHEMA_VERSION})")
    tables = _empty_tables()
    for kind in KINDS:
        cls = ENTITY_CLASSES[kind]
        for record in payload.get("entities", {}).get(kind, []):
            entity = cls.from_dict(record)
            tables[kind][entity.id] = entity
    return tables
