"""Deterministic tokenizer over UTF-8 text.

Tokens are maximal runs of code points that are neither whitespace nor
punctuation; every punctuation mark is emitted as a token of its own, and
whitespace is dropped. Membership is decided by Unicode properties:
``str.isspace()`` for whitespace and general category P* for punctuation,
so Arabic punctuation (U+061F question mark, U+060C comma, ...) and
combining diacritics (which stay inside word tokens) behave correctly
without language-specific tables.

Each token records its [start, end) byte span in the UTF-8 encoding of
the body; spans always cover whole code points.
"""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    start: int
    end: int

    @property
    def byte_span(self) -> tuple[int, int]:
        return (self.start, self.end)


TokenSequence = tuple[Token, ...]


def is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(body: str) -> TokenSequence:
    """Split ``body`` into the platform's token sequence.

    Pure and deterministic; an empty body yields an empty sequence.
    """
    tokens: list[Token] = []
    run: list[str] = []
    run_start = 0
    offset = 0

    def flush(end: int):
        if run:
            tokens.append(Token(len(tokens), "".join(run), run_start, end))
            run.clear()

    for ch in body:
        width = len(ch.encode("utf-8"))
        if ch.isspace():
            flush(offset)
        elif is_punctuation(ch):
            flush(offset)
            tokens.append(Token(len(tokens), ch, offset, offset + width))
        else:
            if not run:
                run_start = offset
            run.append(ch)
        offset += width
    flush(offset)
    return tuple(tokens)


def surfaces(tokens: TokenSequence) -> tuple[str, ...]:
    return tuple(t.surface for t in tokens)
