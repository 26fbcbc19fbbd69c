"""Corpus core: ingestion, classification, annotation and teacher queries.

Automatic annotation matches every taxonomy entry against every token of a
text under the platform normalization config and persists one annotation
per (entry, position) match, idempotently. The matcher indexes token
surfaces by their comparison form, so re-annotation of large texts stays
linear; the brute-force double loop over entries and tokens exists only in
the test suite as the independent oracle.
"""
from __future__ import annotations

import uuid
from datetime import datetime, timezone
from typing import Callable, Iterable, Sequence

from . import store as st
from .locks import KeyedLocks
from .errors import (
    DuplicateAnnotation,
    DuplicateName,
    EmptyBody,
    EncodingError,
    IndexOutOfRange,
    InvalidTaxonomyEntry,
    NotAuthorized,
    UnknownTaxonomy,
    UnknownText,
    UnknownTheme,
)
from .lom import LomRecord, validate_lom
from .models import (
    Annotation,
    AnnotationSource,
    QueryCriteria,
    Role,
    Taxonomy,
    TextDocument,
    TextSummary,
    Theme,
    User,
)
from .normalization import NormalizationConfig, normalize
from .tokenizer import TokenSequence, tokenize

UTF8_BOM = b"\xef\xbb\xbf"


def new_id() -> str:
    return uuid.uuid4().hex


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def decode_text_upload(data: bytes) -> str:
    """Decode a raw text upload: strict UTF-8, leading BOM stripped."""
    if data.startswith(UTF8_BOM):
        data = data[len(UTF8_BOM):]
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"body is not valid UTF-8: {exc}") from None


def parse_taxonomy_file(data: bytes) -> list[str]:
    """Parse the taxonomy line format: one entry per line, LF or CRLF,
    lines trimmed, blank lines and '#' comments ignored."""
    content = decode_text_upload(data)
    entries = []
    for line in content.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        entries.append(line)
    return entries


def find_taxonomy_matches(
    tokens: TokenSequence,
    entries: Sequence[str],
    config: NormalizationConfig,
) -> list[tuple[int, int]]:
    """Return all (entry_index, token_index) pairs whose comparison forms
    are equal. Pure function of its inputs."""
    by_form: dict[str, list[int]] = {}
    for token in tokens:
        by_form.setdefault(normalize(token.surface, config), []).append(token.index)
    matches: list[tuple[int, int]] = []
    for j, entry in enumerate(entries):
        for i in by_form.get(normalize(entry, config), ()):
            matches.append((j, i))
    matches.sort()
    return matches


def _require_teacher(user: User):
    if user.role not in (Role.TEACHER, Role.ADMIN):
        raise NotAuthorized(f"{user.login} ({user.role.value}) may not manage corpus content")


class CorpusService:
    def __init__(
        self,
        store: st.EntityStore,
        config: NormalizationConfig = NormalizationConfig(),
        clock: Callable[[], datetime] = utc_now,
        idgen: Callable[[], str] = new_id,
    ):
        self.store = store
        self.config = config
        self.clock = clock
        self.idgen = idgen
        self.locks = KeyedLocks()

    # -- themes -------------------------------------------------------------

    def create_theme(self, name: str, caller: User) -> Theme:
        if caller.role is not Role.ADMIN:
            raise NotAuthorized("only administrators create themes")
        name = name.strip()
        if self.store.theme_by_name(name) is not None:
            raise DuplicateName(f"theme {name!r} already exists")
        theme = Theme(id=self.idgen(), name=name)
        self.store.transact([st.Put(st.THEMES, theme)])
        return theme

    def list_themes(self) -> tuple[Theme, ...]:
        return tuple(sorted(self.store.list(st.THEMES), key=lambda t: t.name))

    # -- taxonomies -----------------------------------------------------------

    def create_taxonomy(self, name: str, entries: Iterable[str], caller: User) -> Taxonomy:
        _require_teacher(caller)
        cleaned = [entry.strip() for entry in entries]
        seen: set[str] = set()
        for entry in cleaned:
            if not entry:
                raise InvalidTaxonomyEntry("taxonomy entries must be non-empty")
            if entry in seen:
                raise InvalidTaxonomyEntry(f"duplicate taxonomy entry {entry!r}")
            if len(tokenize(entry)) != 1:
                raise InvalidTaxonomyEntry(
                    f"taxonomy entry {entry!r} is not a single token; multi-token entries are unsupported"
                )
            seen.add(entry)
        taxonomy = Taxonomy(id=self.idgen(), name=name.strip(), entries=tuple(cleaned))
        self.store.transact([st.Put(st.TAXONOMIES, taxonomy)])
        return taxonomy

    def create_taxonomy_from_file(self, name: str, data: bytes, caller: User) -> Taxonomy:
        return self.create_taxonomy(name, parse_taxonomy_file(data), caller)

    def get_taxonomy(self, taxonomy_id: str) -> Taxonomy:
        taxonomy = self.store.get(st.TAXONOMIES, taxonomy_id)
        if taxonomy is None:
            raise UnknownTaxonomy(f"no taxonomy {taxonomy_id!r}")
        return taxonomy

    # -- texts ------------------------------------------------------------------

    def ingest_text(
        self,
        title: str,
        body_bytes: bytes,
        theme_id: str,
        lom: LomRecord,
        author: User,
    ) -> TextDocument:
        _require_teacher(author)
        body = decode_text_upload(body_bytes)
        if not body.strip():
            raise EmptyBody("text body is blank")
        if self.store.get(st.THEMES, theme_id) is None:
            raise UnknownTheme(f"no theme {theme_id!r}")
        validate_lom(lom)
        text = TextDocument(
            id=self.idgen(),
            title=title,
            body=body,
            theme_id=theme_id,
            tokens=tokenize(body),
            lom=lom,
            created_by=author.id,
            created_at=self.clock(),
        )
        self.store.transact([st.Put(st.TEXTS, text)])
        return text

    def get_text(self, text_id: str) -> TextDocument:
        text = self.store.get(st.TEXTS, text_id)
        if text is None:
            raise UnknownText(f"no text {text_id!r}")
        return text

    def update_text_body(self, text_id: str, body_bytes: bytes, caller: User) -> TextDocument:
        """Replace a text's body, re-deriving its token cache.

        Positional annotations describe the old token sequence, so they are
        dropped in the same transaction; exercises built on the old body
        become stale and are rejected at grading/rendering time.
        """
        _require_teacher(caller)
        body = decode_text_upload(body_bytes)
        if not body.strip():
            raise EmptyBody("text body is blank")
        with self.locks.for_key(text_id):
            text = self.get_text(text_id)
            updated = TextDocument(
                id=text.id,
                title=text.title,
                body=body,
                theme_id=text.theme_id,
                tokens=tokenize(body),
                lom=text.lom,
                created_by=text.created_by,
                created_at=text.created_at,
            )
            batch: list[st.Mutation] = [
                st.Delete(st.ANNOTATIONS, ann.id)
                for ann in self.store.annotations_for_text(text_id)
            ]
            batch.append(st.Put(st.TEXTS, updated))
            self.store.transact(batch)
            return updated

    def attach_metadata(self, text_id: str, lom: LomRecord) -> TextDocument:
        validate_lom(lom)
        with self.locks.for_key(text_id):
            text = self.get_text(text_id)
            updated = TextDocument(
                id=text.id,
                title=text.title,
                body=text.body,
                theme_id=text.theme_id,
                tokens=text.tokens,
                lom=lom,
                created_by=text.created_by,
                created_at=text.created_at,
            )
            self.store.transact([st.Put(st.TEXTS, updated)])
            return updated

    # -- annotation ----------------------------------------------------------------

    def annotate_automatic(self, text_id: str, taxonomy_id: str) -> tuple[Annotation, ...]:
        """Match taxonomy entries against the text's tokens and persist the
        match set in one batch.

        Idempotent: the stored automatic annotations for (text, taxonomy)
        equal the match set after every run; manual annotations and other
        taxonomies' annotations are untouched.
        """
        with self.locks.for_key(text_id):
            text = self.get_text(text_id)
            taxonomy = self.get_taxonomy(taxonomy_id)

            matches = find_taxonomy_matches(text.tokens, taxonomy.entries, self.config)
            existing = {
                (ann.entry_index, ann.token_index): ann
                for ann in self.store.annotations_for_text(text_id)
                if ann.source is AnnotationSource.AUTOMATIC and ann.taxonomy_id == taxonomy_id
            }

            batch: list[st.Mutation] = []
            result: list[Annotation] = []
            for j, i in matches:
                ann = existing.get((j, i))
                if ann is None:
                    ann = Annotation(
                        id=self.idgen(),
                        text_id=text_id,
                        token_index=i,
                        label=taxonomy.entries[j],
                        source=AnnotationSource.AUTOMATIC,
                        taxonomy_id=taxonomy_id,
                        entry_index=j,
                    )
                    batch.append(st.Put(st.ANNOTATIONS, ann))
                result.append(ann)
            match_keys = set(matches)
            for key, ann in existing.items():
                if key not in match_keys:
                    batch.append(st.Delete(st.ANNOTATIONS, ann.id))
            if batch:
                self.store.transact(batch)
            result.sort(key=lambda a: (a.token_index, a.entry_index))
            return tuple(result)

    def annotate_manual(self, text_id: str, token_index: int, label: str, author: User) -> Annotation:
        _require_teacher(author)
        if not label or not label.strip():
            raise InvalidTaxonomyEntry("manual annotation label must be non-empty")
        with self.locks.for_key(text_id):
            text = self.get_text(text_id)
            if not 0 <= token_index < len(text.tokens):
                raise IndexOutOfRange(
                    f"token index {token_index} out of range for text with {len(text.tokens)} tokens"
                )
            annotation = Annotation(
                id=self.idgen(),
                text_id=text_id,
                token_index=token_index,
                label=label,
                source=AnnotationSource.MANUAL,
                created_by=author.id,
            )
            for existing in self.store.annotations_for_text(text_id):
                if (existing.token_index, existing.label_key()) == (token_index, annotation.label_key()):
                    raise DuplicateAnnotation(
                        f"token {token_index} already carries label {label!r}"
                    )
            self.store.transact([st.Put(st.ANNOTATIONS, annotation)])
            return annotation

    def annotations_for_text(self, text_id: str) -> tuple[Annotation, ...]:
        self.get_text(text_id)
        anns = list(self.store.annotations_for_text(text_id))
        anns.sort(key=lambda a: (a.token_index, a.source.value, a.label))
        return tuple(anns)

    # -- queries -----------------------------------------------------------------

    def query_texts(self, criteria: QueryCriteria) -> tuple[TextSummary, ...]:
        """All texts satisfying the conjunction of the set criteria, newest
        first (created_at descending, then id). Candidate narrowing uses the
        theme and taxonomy indexes; remaining filters run per candidate."""
        if criteria.theme_id is not None:
            if self.store.get(st.THEMES, criteria.theme_id) is None:
                raise UnknownTheme(f"no theme {criteria.theme_id!r}")
            candidates = list(self.store.texts_for_theme(criteria.theme_id))
        else:
            candidates = list(self.store.list(st.TEXTS))

        if criteria.has_taxonomy is not None:
            if self.store.get(st.TAXONOMIES, criteria.has_taxonomy) is None:
                raise UnknownTaxonomy(f"no taxonomy {criteria.has_taxonomy!r}")
            annotated_ids = {
                ann.text_id
                for ann in self.store.annotations_for_taxonomy(criteria.has_taxonomy)
                if ann.source is AnnotationSource.AUTOMATIC
            }
            candidates = [t for t in candidates if t.id in annotated_ids]

        if criteria.author is not None:
            candidates = [t for t in candidates if t.created_by == criteria.author]
        if criteria.difficulty is not None:
            candidates = [
                t for t in candidates if t.lom.educational.difficulty.value == criteria.difficulty
            ]
        if criteria.context is not None:
            candidates = [
                t for t in candidates if t.lom.educational.context.value == criteria.context
            ]
        if criteria.keyword is not None:
            needle = normalize(criteria.keyword, self.config)
            candidates = [
                t
                for t in candidates
                if needle in normalize(t.title, self.config)
                or needle in normalize(t.body, self.config)
            ]

        candidates.sort(key=lambda t: t.id)
        candidates.sort(key=lambda t: t.created_at, reverse=True)
        return tuple(
            TextSummary(
                id=t.id,
                title=t.title,
                theme_id=t.theme_id,
                difficulty=t.lom.educational.difficulty.value,
                context=t.lom.educational.context.value,
                created_by=t.created_by,
                created_at=t.created_at,
                token_count=len(t.tokens),
            )
            for t in candidates
        )
