import random
import unicodedata

from hypothesis import given, settings
from hypothesis import strategies as hst

from arac.tokenizer import surfaces, tokenize

from conftest import ARABIC_DIACRITICS, ARABIC_LETTERS, ARABIC_PUNCT


def test_plain_sentence_splits_on_whitespace():
    assert surfaces(tokenize("ذهب محمد ثم عاد")) == ("ذهب", "محمد", "ثم", "عاد")


def test_empty_body_yields_empty_sequence():
    assert tokenize("") == ()
    assert tokenize("   \n\t ") == ()


def test_arabic_question_mark_is_its_own_token():
    assert surfaces(tokenize("هل جاء؟")) == ("هل", "جاء", "؟")


def test_adjacent_punctuation_marks_split_individually():
    assert surfaces(tokenize("قال: نعم، لا!")) == ("قال", ":", "نعم", "،", "لا", "!")


def test_diacritics_stay_inside_word_tokens():
    body = "وَقَفَ الوَلَدُ"
    assert surfaces(tokenize(body)) == ("وَقَفَ", "الوَلَدُ")


def test_indices_consecutive_from_zero():
    tokens = tokenize("ذهب محمد، ثم عاد؟")
    assert [t.index for t in tokens] == list(range(len(tokens)))


def test_byte_spans_address_the_body():
    body = "هل جاء؟ نعم"
    encoded = body.encode("utf-8")
    tokens = tokenize(body)
    previous_end = 0
    for token in tokens:
        assert token.start >= previous_end
        assert token.end > token.start
        # spans decode cleanly (whole code points) and reproduce the surface
        assert encoded[token.start:token.end].decode("utf-8") == token.surface
        previous_end = token.end


def test_deterministic():
    body = "ذهب محمد ثم عاد؟ ثم عاد."
    assert tokenize(body) == tokenize(body)


def _strip_whitespace(text: str) -> str:
    return "".join(ch for ch in text if not ch.isspace())


arabic_text = hst.text(
    alphabet=ARABIC_LETTERS + ARABIC_DIACRITICS + ARABIC_PUNCT + " \t\n" + "abc012",
    max_size=120,
)


@settings(max_examples=300)
@given(arabic_text)
def test_round_trip_property(body):
    tokens = tokenize(body)
    assert "".join(surfaces(tokens)) == _strip_whitespace(body)


@settings(max_examples=300)
@given(arabic_text)
def test_spans_partition_non_whitespace(body):
    encoded = body.encode("utf-8")
    tokens = tokenize(body)
    previous_end = 0
    for token in tokens:
        assert token.start >= previous_end
        between = encoded[previous_end:token.start].decode("utf-8")
        assert between.strip() == ""  # only whitespace between tokens
        previous_end = token.end


def test_punctuation_category_is_the_membership_rule():
    rng = random.Random(7)
    for _ in range(200):
        ch = chr(rng.randint(0x20, 0x2AFF))
        if not ch.isspace() and unicodedata.category(ch).startswith("P"):
            tokens = tokenize(f"ا{ch}ب")
            assert surfaces(tokens) == ("ا", ch, "ب")
