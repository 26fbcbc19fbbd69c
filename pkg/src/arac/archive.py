"""Corpus archive: a versioned zip container for full export/import.

Layout: ``manifest.json`` (format marker + schema version), one raw UTF-8
file per text body under ``texts/`` (so Arabic bodies round-trip
byte-for-byte), and ``entities.json`` holding every entity record with
text bodies omitted.

Import never overwrites: an incoming entity whose id already exists is
skipped when identical and reported as a conflict when different, along
with everything that references a conflicting entity.
"""
from __future__ import annotations

import json
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from . import store as st
from .errors import ConflictingIds, UnsupportedVersion

ARCHIVE_FORMAT = "arac-corpus"
ARCHIVE_VERSION = 1

# import order honors reference direction
_KIND_ORDER = (
    st.USERS,
    st.THEMES,
    st.TAXONOMIES,
    st.TEXTS,
    st.ANNOTATIONS,
    st.EXERCISES,
    st.EXAMS,
    st.ASSIGNMENTS,
    st.SUBMISSIONS,
    st.REPORTS,
)

# referenced (kind, id) pairs of one entity, used for conflict cascading
def _references(kind: str, entity) -> list[tuple[str, str]]:
    if kind == st.TEXTS:
        return [(st.THEMES, entity.theme_id), (st.USERS, entity.created_by)]
    if kind == st.ANNOTATIONS:
        refs = [(st.TEXTS, entity.text_id)]
        if entity.taxonomy_id is not None:
            refs.append((st.TAXONOMIES, entity.taxonomy_id))
        return refs
    if kind == st.EXERCISES:
        return [(st.TEXTS, entity.text_id), (st.USERS, entity.created_by)]
    if kind == st.EXAMS:
        return [(st.EXERCISES, eid) for eid in entity.exercise_ids] + [(st.USERS, entity.created_by)]
    if kind == st.ASSIGNMENTS:
        return [(st.EXAMS, entity.exam_id), (st.USERS, entity.student_id)]
    if kind == st.SUBMISSIONS:
        refs = [(st.EXAMS, entity.exam_id), (st.USERS, entity.student_id)]
        if entity.assignment_id is not None:
            refs.append((st.ASSIGNMENTS, entity.assignment_id))
        return refs
    if kind == st.REPORTS:
        return [
            (st.EXAMS, entity.exam_id),
            (st.USERS, entity.student_id),
            (st.ASSIGNMENTS, entity.assignment_id),
        ]
    return []


def _unique_key_collides(store: st.EntityStore, kind: str, incoming) -> bool:
    """Cross-id unique-key collisions (login, theme name) make the incoming
    entity a conflict instead of aborting the whole import."""
    if kind == st.USERS and incoming.active:
        other = store.user_by_login(incoming.login)
        return other is not None and other.id != incoming.id
    if kind == st.THEMES:
        other = store.theme_by_name(incoming.name)
        return other is not None and other.id != incoming.id
    return False


@dataclass
class ImportReport:
    created: dict[str, list[str]] = field(default_factory=dict)
    skipped: dict[str, list[str]] = field(default_factory=dict)
    conflicts: dict[str, list[str]] = field(default_factory=dict)

    def _add(self, bucket: dict[str, list[str]], kind: str, entity_id: str):
        bucket.setdefault(kind, []).append(entity_id)

    def counts(self) -> dict[str, int]:
        return {
            "created": sum(len(v) for v in self.created.values()),
            "skipped": sum(len(v) for v in self.skipped.values()),
            "conflicts": sum(len(v) for v in self.conflicts.values()),
        }

    def to_dict(self) -> dict:
        return {"created": self.created, "skipped": self.skipped, "conflicts": self.conflicts}


def export_corpus(store: st.EntityStore, path: Union[str, Path]) -> Path:
    """Write the whole store to a corpus archive at ``path``."""
    path = Path(path)
    tables = store.entity_sets()
    entities = {}
    for kind in _KIND_ORDER:
        records = []
        for entity in tables[kind].values():
            if kind == st.TEXTS:
                records.append(entity.to_dict(include_body=False))
            else:
                records.append(entity.to_dict())
        records.sort(key=lambda r: r["id"])
        entities[kind] = records

    manifest = {"format": ARCHIVE_FORMAT, "schema_version": ARCHIVE_VERSION}
    path.parent.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("manifest.json", json.dumps(manifest, ensure_ascii=False))
        zf.writestr("entities.json", json.dumps(entities, ensure_ascii=False))
        for text in tables[st.TEXTS].values():
            zf.writestr(f"texts/{text.id}.txt", text.body.encode("utf-8"))
    return path


def import_corpus(store: st.EntityStore, path: Union[str, Path]) -> ImportReport:
    """Merge an archive into ``store``; returns what was created, skipped
    (identical duplicates) and left alone as conflicts."""
    path = Path(path)
    with zipfile.ZipFile(path) as zf:
        manifest = json.loads(zf.read("manifest.json"))
        if manifest.get("format") != ARCHIVE_FORMAT:
            raise UnsupportedVersion(f"not a corpus archive: {manifest.get('format')!r}")
        version = manifest.get("schema_version")
        if version != ARCHIVE_VERSION:
            raise UnsupportedVersion(
                f"archive schema {version!r} not supported (expected {ARCHIVE_VERSION})"
            )
        entities = json.loads(zf.read("entities.json"))
        bodies = {
            name[len("texts/"):-len(".txt")]: zf.read(name)
            for name in zf.namelist()
            if name.startswith("texts/") and name.endswith(".txt")
        }

    report = ImportReport()
    batch: list[st.Mutation] = []
    conflicted: set[tuple[str, str]] = set()

    for kind in _KIND_ORDER:
        cls = st.ENTITY_CLASSES[kind]
        seen_ids: set[str] = set()
        for record in entities.get(kind, []):
            if record["id"] in seen_ids:
                raise ConflictingIds(f"archive lists {kind} id {record['id']!r} twice")
            seen_ids.add(record["id"])

            if kind == st.TEXTS:
                body = bodies.get(record["id"], b"").decode("utf-8")
                incoming = cls.from_dict(record, body=body)
            else:
                incoming = cls.from_dict(record)

            if any(ref in conflicted for ref in _references(kind, incoming)):
                report._add(report.conflicts, kind, incoming.id)
                conflicted.add((kind, incoming.id))
                continue

            existing = store.get(kind, incoming.id)
            if existing is None:
                if _unique_key_collides(store, kind, incoming):
                    report._add(report.conflicts, kind, incoming.id)
                    conflicted.add((kind, incoming.id))
                    continue
                batch.append(st.Put(kind, incoming))
                report._add(report.created, kind, incoming.id)
            elif existing == incoming:
                report._add(report.skipped, kind, incoming.id)
            else:
                report._add(report.conflicts, kind, incoming.id)
                conflicted.add((kind, incoming.id))

    if batch:
        store.transact(batch)
    return report
