"""Shared fixtures: an in-memory platform with seeded accounts, a fake
clock for deterministic ordering, and Arabic-weighted random text
generators used by the randomized oracle tests."""
from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

import pytest

from arac import Platform, ServiceConfig
from arac.lom import Difficulty, EducationalContext, LomEducational, LomRecord
from arac.models import Role

ADMIN_PASSWORD = "adminpass1"
TEACHER_PASSWORD = "s3cretpw1"
STUDENT_PASSWORD = "studentpw1"

ARABIC_LETTERS = "ابتثجحخدذرزسشصضطظعغفقكلمنهويأإآءؤئة"
ARABIC_DIACRITICS = "".join(chr(cp) for cp in range(0x064B, 0x0653))
ARABIC_PUNCT = "؟،؛.!:"
WHITESPACE = "  \t\n"  # weighted toward plain space


class FakeClock:
    """Strictly increasing clock; one second per call."""

    def __init__(self, start: datetime | None = None):
        self.now = start or datetime(2024, 1, 1, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        self.now += timedelta(seconds=1)
        return self.now


def make_platform(**config_kwargs) -> Platform:
    config = ServiceConfig(
        admin_login="admin", admin_password=ADMIN_PASSWORD, **config_kwargs
    )
    return Platform(config, clock=FakeClock())


@pytest.fixture
def platform() -> Platform:
    return make_platform()


@pytest.fixture
def admin(platform):
    return platform.store.user_by_login("admin")


@pytest.fixture
def teacher(platform, admin):
    return platform.accounts.create_account("t1", TEACHER_PASSWORD, Role.TEACHER, admin)


@pytest.fixture
def student(platform, admin):
    return platform.accounts.create_account("s1", STUDENT_PASSWORD, Role.STUDENT, admin)


def lom_with(difficulty=Difficulty.MEDIUM, context=EducationalContext.SCHOOL) -> LomRecord:
    return LomRecord(educational=LomEducational(difficulty=difficulty, context=context))


def random_word(rng: random.Random, max_len: int = 6, with_diacritics: bool = False) -> str:
    length = rng.randint(1, max_len)
    chars = [rng.choice(ARABIC_LETTERS) for _ in range(length)]
    if with_diacritics and rng.random() < 0.3:
        pos = rng.randint(1, len(chars))
        chars.insert(pos, rng.choice(ARABIC_DIACRITICS))
    return "".join(chars)


def random_body(rng: random.Random, n_tokens: int, vocabulary: list[str] | None = None) -> str:
    """Whitespace-joined token stream; punctuation shows up as separate
    words so the expected token count stays exact."""
    parts = []
    for _ in range(n_tokens):
        if vocabulary is not None and rng.random() < 0.8:
            parts.append(rng.choice(vocabulary))
        elif rng.random() < 0.1:
            parts.append(rng.choice(ARABIC_PUNCT))
        else:
            parts.append(random_word(rng))
    return " ".join(parts)


def brute_force_matches(tokens, entries, config) -> list[tuple[int, int]]:
    """Independent oracle: the double loop over taxonomy entries and text
    tokens, comparing comparison forms pairwise."""
    from arac.normalization import normalize

    result = []
    for j, entry in enumerate(entries):
        for i, token in enumerate(tokens):
            if normalize(entry, config) == normalize(token.surface, config):
                result.append((j, i))
    return sorted(result)
