"""Acceptance suite: one test per acceptance criterion, at its stated size
and tolerance. Each test prints a [PASS] line on success (run with -s or
read the -v report; test names identify the criteria)."""
from __future__ import annotations

import json
import random
import time
from datetime import datetime, timezone
from fractions import Fraction

import pytest

from arac import store as st
from arac.activities import ActivityService, compute_performance
from arac.archive import export_corpus, import_corpus
from arac.corpus import CorpusService
from arac.errors import EncodingError
from arac.lom import Difficulty, EducationalContext, LomEducational, LomRecord
from arac.models import GapAnswer, Role, User
from arac.normalization import NormalizationConfig
from arac.tokenizer import surfaces, tokenize

from api_helpers import make_client, seed_scenario, submit_answers
from conftest import (
    ARABIC_DIACRITICS,
    ARABIC_LETTERS,
    ARABIC_PUNCT,
    FakeClock,
    brute_force_matches,
    random_body,
    random_word,
)

COORDINATION = ["و", "ف", "ثم", "أو"]
SENTENCE = "ذهب محمد ثم عاد"


def _ok(label: str):
    print(f"[PASS] {label}")


def bare_corpus(config: NormalizationConfig | None = None):
    """Store + corpus/activity services seeded with credential-less admin,
    teacher and students (no password hashing: these suites exercise the
    corpus and grading paths, not authentication)."""
    store = st.EntityStore()
    clock = FakeClock()
    now = clock()
    users = {
        "admin": User("u-admin", "admin", "!", Role.ADMIN, now),
        "teacher": User("u-teacher", "teacher", "!", Role.TEACHER, now),
        "student_a": User("u-sa", "student_a", "!", Role.STUDENT, now),
        "student_b": User("u-sb", "student_b", "!", Role.STUDENT, now),
    }
    store.transact([st.Put(st.USERS, u) for u in users.values()])
    corpus = CorpusService(store, config or NormalizationConfig(), clock=clock)
    activities = ActivityService(store, corpus, clock=clock)
    return store, corpus, activities, users


# -- criterion 1: Annotatik oracle equivalence -----------------------------------

def test_criterion_annotatik_oracle_equivalence():
    """1,000 randomized (text <= 200 tokens, taxonomy <= 20 entries) cases:
    automatic annotation equals the brute-force double loop exactly, in
    under 10 seconds overall. Each case runs against its own store."""
    rng = random.Random(0xA12AC)
    vocabulary = [random_word(rng, 4) for _ in range(40)]

    start = time.monotonic()
    for case in range(1000):
        store, corpus, activities, users = bare_corpus()
        theme = corpus.create_theme("عشوائي", users["admin"])
        n_tokens = rng.randint(1, 200)
        body = random_body(rng, n_tokens, vocabulary)
        text = corpus.ingest_text(f"n{case}", body.encode(), theme.id, LomRecord(), users["teacher"])
        assert len(text.tokens) <= 200

        entries, seen = [], set()
        for _ in range(rng.randint(1, 20)):
            word = rng.choice(vocabulary) if rng.random() < 0.8 else random_word(rng, 4)
            if word not in seen:
                seen.add(word)
                entries.append(word)
        taxonomy = corpus.create_taxonomy(f"t{case}", entries, users["teacher"])

        produced = corpus.annotate_automatic(text.id, taxonomy.id)
        expected = brute_force_matches(text.tokens, entries, corpus.config)
        assert sorted((a.entry_index, a.token_index) for a in produced) == expected
    elapsed = time.monotonic() - start
    assert elapsed < 10.0, f"oracle suite took {elapsed:.2f}s (budget 10s)"
    _ok(f"annotatik oracle equivalence: 1000 cases in {elapsed:.2f}s")


# -- criterion 2: Annotatik fixture ------------------------------------------------

def test_criterion_annotatik_fixture():
    """The coordination taxonomy finds exactly one match, at token 2."""
    store, corpus, activities, users = bare_corpus()
    theme = corpus.create_theme("سياسة", users["admin"])
    text = corpus.ingest_text("نص", SENTENCE.encode(), theme.id, LomRecord(), users["teacher"])
    taxonomy = corpus.create_taxonomy("عطف", COORDINATION, users["teacher"])
    annotations = corpus.annotate_automatic(text.id, taxonomy.id)
    assert [(a.token_index, a.entry_index) for a in annotations] == [(2, 2)]
    assert brute_force_matches(text.tokens, COORDINATION, corpus.config) == [(2, 2)]
    _ok("annotatik fixture: one annotation at token_index 2")


# -- criterion 3: idempotence ---------------------------------------------------------

def test_criterion_annotatik_idempotence():
    """Re-running automatic annotation leaves the store unchanged, on 100
    random cases."""
    rng = random.Random(0x1DE9)
    vocabulary = [random_word(rng, 3) for _ in range(25)]
    for case in range(100):
        store, corpus, activities, users = bare_corpus()
        theme = corpus.create_theme("عشوائي", users["admin"])
        body = random_body(rng, rng.randint(1, 80), vocabulary)
        text = corpus.ingest_text(f"n{case}", body.encode(), theme.id, LomRecord(), users["teacher"])
        entries = list(dict.fromkeys(rng.choice(vocabulary) for _ in range(rng.randint(1, 12))))
        taxonomy = corpus.create_taxonomy(f"t{case}", entries, users["teacher"])

        first = corpus.annotate_automatic(text.id, taxonomy.id)
        snapshot = set(store.annotations_for_text(text.id))
        second = corpus.annotate_automatic(text.id, taxonomy.id)
        assert set(store.annotations_for_text(text.id)) == snapshot
        assert first == second
    _ok("annotatik idempotence: 100 cases, store unchanged on re-run")


# -- criterion 4: Eq. (1) exactness ------------------------------------------------------

def test_criterion_performance_formula_exactness():
    """Fixture values plus the exhaustive exactness property over every
    (correct, total) with 1 <= total <= 1000."""
    assert compute_performance(3, 4) == 75.0
    for n in (1, 7, 1000):
        assert compute_performance(0, n) == 0.0
        assert compute_performance(n, n) == 100.0
    for total in range(1, 1001):
        for correct in range(0, total + 1):
            value = compute_performance(correct, total)
            assert 0 <= value <= 100
            assert value * total == 100 * correct
    _ok("performance formula: exhaustive exactness up to total=1000")


# -- criterion 5: grading round trip ------------------------------------------------------

def test_criterion_grading_round_trip():
    """100 randomized exercises: expected answers score 100.0; flipping k
    answers scores exactly 100*(total-k)/total."""
    rng = random.Random(0x9A0DE)
    store, corpus, activities, users = bare_corpus()
    theme = corpus.create_theme("عشوائي", users["admin"])
    for case in range(100):
        words = [random_word(rng, 5) for _ in range(rng.randint(1, 20))]
        text = corpus.ingest_text(
            f"n{case}", " ".join(words).encode(), theme.id, LomRecord(), users["teacher"]
        )
        total = rng.randint(1, len(text.tokens))
        gaps = sorted(rng.sample(range(len(text.tokens)), total))
        exercise = activities.create_exercise(text.id, gaps, "x", "", users["teacher"])
        exam = activities.assemble_exam(f"e{case}", [exercise.id], users["teacher"])
        activities.assign_exam(exam.id, [users["student_a"].id, users["student_b"].id], users["teacher"])

        expected = [
            GapAnswer(exercise.id, i + 1, answer)
            for i, answer in enumerate(exercise.expected_answers)
        ]
        perfect = activities.grade_submission(
            activities.make_submission(exam.id, users["student_a"].id, expected)
        )
        assert perfect.performance == 100.0

        k = rng.randint(0, total)
        flipped_ordinals = set(rng.sample(range(1, total + 1), k))
        flipped = [
            GapAnswer(
                exercise.id,
                i + 1,
                "×غلط×" if (i + 1) in flipped_ordinals else answer,
            )
            for i, answer in enumerate(exercise.expected_answers)
        ]
        report = activities.grade_submission(
            activities.make_submission(exam.id, users["student_b"].id, flipped)
        )
        assert report.performance == Fraction(100 * (total - k), total)
    _ok("grading round trip: 100 cases, exact flip arithmetic")


# -- criterion 6: tokenizer round trip ------------------------------------------------------

def test_criterion_tokenizer_round_trip():
    """1,000 random Arabic-weighted strings: concatenated surfaces equal the
    input minus whitespace; invalid UTF-8 ingestion always raises."""
    rng = random.Random(0x70CE)
    alphabet = (
        ARABIC_LETTERS * 4  # Arabic-weighted
        + ARABIC_DIACRITICS
        + ARABIC_PUNCT
        + " \t\n  "
        + "abcDEF012-_"
        + "ـ"  # tatweel
    )
    for _ in range(1000):
        body = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 160)))
        tokens = tokenize(body)
        assert "".join(surfaces(tokens)) == "".join(ch for ch in body if not ch.isspace())

    store, corpus, activities, users = bare_corpus()
    theme = corpus.create_theme("سياسة", users["admin"])
    for attempt in range(50):
        valid = random_body(rng, rng.randint(1, 10)).encode()
        cut = rng.randint(0, len(valid))
        invalid = valid[:cut] + bytes([rng.choice([0xFF, 0xFE, 0xC0, 0x80])]) + valid[cut:]
        if rng.random() < 0.3:
            invalid = valid[: len(valid) - 1]  # truncate a multibyte sequence
            if not invalid or invalid[-1] < 0x80:
                invalid = valid + b"\xd8"  # dangling lead byte instead
        with pytest.raises(EncodingError):
            corpus.ingest_text(f"bad{attempt}", invalid, theme.id, LomRecord(), users["teacher"])
    _ok("tokenizer round trip: 1000 strings + 50 invalid-UTF-8 rejections")


# -- criterion 7: query oracle ----------------------------------------------------------------

def _linear_scan(store, corpus, criteria):
    from arac.models import AnnotationSource
    from arac.normalization import normalize

    matches = []
    for text in store.list(st.TEXTS):
        if criteria.theme_id is not None and text.theme_id != criteria.theme_id:
            continue
        if criteria.author is not None and text.created_by != criteria.author:
            continue
        if (
            criteria.difficulty is not None
            and text.lom.educational.difficulty.value != criteria.difficulty
        ):
            continue
        if criteria.context is not None and text.lom.educational.context.value != criteria.context:
            continue
        if criteria.keyword is not None:
            needle = normalize(criteria.keyword, corpus.config)
            if needle not in normalize(text.title, corpus.config) and needle not in normalize(
                text.body, corpus.config
            ):
                continue
        if criteria.has_taxonomy is not None:
            if not any(
                ann.text_id == text.id
                and ann.taxonomy_id == criteria.has_taxonomy
                and ann.source is AnnotationSource.AUTOMATIC
                for ann in store.list(st.ANNOTATIONS)
            ):
                continue
        matches.append(text)
    matches.sort(key=lambda t: t.id)
    matches.sort(key=lambda t: t.created_at, reverse=True)
    return [t.id for t in matches]


def test_criterion_query_oracle():
    """200 random criteria over a randomized base of <= 100 texts: the query
    operation equals independent linear-scan filtering."""
    from arac.models import QueryCriteria

    rng = random.Random(0x5CA11)
    store, corpus, activities, users = bare_corpus()
    teacher2 = User("u-teacher2", "teacher2", "!", Role.TEACHER, datetime(2024, 1, 1, tzinfo=timezone.utc))
    store.transact([st.Put(st.USERS, teacher2)])
    authors = [users["teacher"], teacher2]
    themes = [corpus.create_theme(f"موضوع{i}", users["admin"]) for i in range(5)]
    vocabulary = [random_word(rng, 4) for _ in range(30)]
    taxonomies = [
        corpus.create_taxonomy(f"tax{i}", rng.sample(vocabulary, 5), users["teacher"])
        for i in range(2)
    ]
    difficulties = [d.value for d in Difficulty]
    contexts = [c.value for c in EducationalContext]

    for i in range(100):
        lom = LomRecord(
            educational=LomEducational(
                difficulty=Difficulty(rng.choice(difficulties)),
                context=EducationalContext(rng.choice(contexts)),
            )
        )
        text = corpus.ingest_text(
            f"نص{i}",
            random_body(rng, rng.randint(1, 25), vocabulary).encode(),
            rng.choice(themes).id,
            lom,
            rng.choice(authors),
        )
        for taxonomy in taxonomies:
            if rng.random() < 0.5:
                corpus.annotate_automatic(text.id, taxonomy.id)
    assert store.count(st.TEXTS) <= 100

    for _ in range(200):
        criteria = QueryCriteria(
            theme_id=rng.choice(themes).id if rng.random() < 0.4 else None,
            keyword=(rng.choice(vocabulary) if rng.random() < 0.7 else random_word(rng, 3))
            if rng.random() < 0.4
            else None,
            difficulty=rng.choice(difficulties) if rng.random() < 0.3 else None,
            context=rng.choice(contexts) if rng.random() < 0.3 else None,
            has_taxonomy=rng.choice(taxonomies).id if rng.random() < 0.3 else None,
            author=rng.choice(authors).id if rng.random() < 0.25 else None,
        )
        produced = [s.id for s in corpus.query_texts(criteria)]
        assert produced == _linear_scan(store, corpus, criteria)
    _ok("query oracle: 200 random criteria match linear scan")


# -- criterion 8: API contract ------------------------------------------------------------------

def test_criterion_api_contract_scenario_and_isolation_fuzz():
    """The scripted admin->teacher->student->teacher scenario passes against
    a fresh server in under 5 seconds, and >= 200 role-crossed requests leak
    no expected answer and no foreign report."""
    client, platform = make_client()
    start = time.monotonic()

    scenario = seed_scenario(client)
    exercise_id = scenario["exercise"]["id"]
    answers = [
        {"exercise_id": exercise_id, "gap": 1, "answer": "ذهب"},
        {"exercise_id": exercise_id, "gap": 2, "answer": "محمد"},
        {"exercise_id": exercise_id, "gap": 3, "answer": "ثم"},
        {"exercise_id": exercise_id, "gap": 4, "answer": "غلط"},
    ]
    graded = submit_answers(client, scenario["student"], scenario["assignment"]["id"], answers)
    assert graded.status_code == 200
    assert graded.json()["performance_display"] == "75.0"

    teacher_read = client.get(
        f"/api/assignments/{scenario['assignment']['id']}/report", headers=scenario["teacher"]
    )
    assert teacher_read.status_code == 200
    assert teacher_read.json()["performance"] == 75.0

    elapsed = time.monotonic() - start
    assert elapsed < 5.0, f"scenario took {elapsed:.2f}s (budget 5s)"

    # -- role-crossed fuzz ------------------------------------------------
    secret_answers = scenario["expected_answers"]  # ذهب محمد ثم عاد
    student_report_marker = scenario["assignment"]["id"]
    text_id = scenario["text"]["id"]
    taxonomy_id = scenario["taxonomy"]["id"]
    exam_id = scenario["exam"]["id"]
    student_id = scenario["student_user"]["id"]

    get_targets = [
        "/api/themes",
        "/api/texts",
        f"/api/texts/{text_id}",
        f"/api/texts/{text_id}/annotations",
        f"/api/assignments/{scenario['assignment']['id']}/report",
        f"/api/students/{student_id}/history",
        "/api/texts?keyword=%D9%85%D8%AD%D9%85%D8%AF",
    ]
    post_targets = [
        ("/api/themes", {"name": "اختراق"}),
        (f"/api/texts/{text_id}/annotate/{taxonomy_id}", None),
        (f"/api/texts/{text_id}/annotations", {"token_index": 0, "label": "x"}),
        ("/api/exercises", {"text_id": text_id, "gap_positions": [0], "title": "x"}),
        ("/api/exams", {"title": "x", "exercise_ids": [exercise_id]}),
        (f"/api/exams/{exam_id}/assign", {"student_ids": [student_id]}),
        ("/api/users", {"login": "hx", "password": "password1", "role": "admin"}),
        (f"/api/assignments/{scenario['assignment']['id']}/submit", {"answers": []}),
    ]

    requests_made = 0
    violations = []
    for session_name in ("other", "student"):
        headers = scenario[session_name]
        for _ in range(7):
            for url in get_targets:
                response = client.get(url, headers=headers)
                requests_made += 1
                _check_isolation(
                    violations, session_name, "GET", url, response,
                    secret_answers, student_report_marker,
                    own_report_ok=(session_name == "student"),
                )
            for url, payload in post_targets:
                response = client.post(url, headers=headers, json=payload) if payload is not None else client.post(url, headers=headers)
                requests_made += 1
                _check_isolation(
                    violations, session_name, "POST", url, response,
                    secret_answers, student_report_marker,
                    own_report_ok=(session_name == "student"),
                )

    assert requests_made >= 200
    assert violations == [], violations
    _ok(f"api contract: scenario in {elapsed:.2f}s, {requests_made} fuzz requests, 0 leaks")


def _check_isolation(violations, session, method, url, response, secrets, report_marker, own_report_ok):
    body = response.text
    if response.status_code < 400:
        # the only 2xx the student may see here is their own report/submit state
        own_allowed = own_report_ok and "/report" in url
        if not own_allowed:
            for secret in secrets:
                if secret in body:
                    violations.append(f"{session} {method} {url}: leaked {secret!r}")
        if not own_report_ok and report_marker in body:
            violations.append(f"{session} {method} {url}: foreign report visible")
    else:
        payload = response.json()
        if set(payload) != {"code", "message"}:
            violations.append(f"{session} {method} {url}: malformed error body")
        for secret in secrets:
            if secret in body:
                violations.append(f"{session} {method} {url}: error leaked {secret!r}")


# -- criterion 9: persistence round trip -----------------------------------------------------------

ARABIC_BODIES = [
    "ذهب محمد ثم عاد",
    "هل جاء؟ نعم، جاء مسرعا",
    "وَقَفَ الوَلَدُ أمام الباب",
    "الديمقراطية سلاح استراتيجي في الانتخابات",
    "كرة القدم لعبة شعبية في كل مكان",
    "اللغة العربية من أغنى اللغات مفردات",
    "فــي الصباح الباكر تغرد العصافير",
    "قرأ الطالب الكتاب ثم لخصه",
    "أو تفضل الشاي على القهوة؟",
    "العلم نور والجهل ظلام",
    "سافر الوفد إلى تونس صباحا",
    "كتب المؤرخ عن الحضارة الأندلسية",
]


def test_criterion_persistence_round_trip():
    """export then import is the identity on a corpus of >= 10 Arabic texts,
    bodies compared byte-for-byte."""
    import tempfile
    from pathlib import Path

    store, corpus, activities, users = bare_corpus()
    theme = corpus.create_theme("متنوع", users["admin"])
    taxonomy = corpus.create_taxonomy("عطف", COORDINATION, users["teacher"])
    for i, body in enumerate(ARABIC_BODIES):
        text = corpus.ingest_text(f"نص{i}", body.encode(), theme.id, LomRecord(), users["teacher"])
        corpus.annotate_automatic(text.id, taxonomy.id)
    assert store.count(st.TEXTS) >= 10

    with tempfile.TemporaryDirectory() as tmp:
        archive = Path(tmp) / "corpus.zip"
        export_corpus(store, archive)
        target = st.EntityStore()
        report = import_corpus(target, archive)

    assert report.counts()["conflicts"] == 0
    assert target.entity_sets() == store.entity_sets()
    for text in store.list(st.TEXTS):
        assert target.get(st.TEXTS, text.id).body.encode("utf-8") == text.body.encode("utf-8")
    assert target.integrity_scan() == []
    _ok("persistence round trip: 12 Arabic texts identical byte-for-byte")
