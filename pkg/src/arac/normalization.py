"""Lexeme comparison policy.

One normalization config drives every string comparison on the platform:
taxonomy matching during automatic annotation, keyword search, and answer
grading. Comparison is NFC-exact by default; the two strip flags are
opt-in relaxations for Arabic orthography (undiacritized taxonomy entries,
stretched script) and are never applied silently.

The stored text itself is never rewritten; normalization happens only at
comparison time.
"""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass

# Arabic combining marks fathatan..sukun (U+064B..U+0652)
DIACRITICS = frozenset(chr(cp) for cp in range(0x064B, 0x0653))
TATWEEL = "ـ"


@dataclass(frozen=True)
class NormalizationConfig:
    """Comparison settings.

    nfc_compare is part of the documented surface but is not optional:
    comparisons always canonically compose. Constructing a config with
    nfc_compare=False raises.
    """

    nfc_compare: bool = True
    strip_diacritics: bool = False
    strip_tatweel: bool = False

    def __post_init__(self):
        if not self.nfc_compare:
            raise ValueError("nfc_compare cannot be disabled")


DEFAULT_CONFIG = NormalizationConfig()


def normalize(text: str, config: NormalizationConfig = DEFAULT_CONFIG) -> str:
    """Return the comparison form of ``text`` under ``config``."""
    out = unicodedata.normalize("NFC", text)
    if config.strip_diacritics:
        out = "".join(ch for ch in out if ch not in DIACRITICS)
    if config.strip_tatweel:
        out = out.replace(TATWEEL, "")
    return out


def lexemes_equal(a: str, b: str, config: NormalizationConfig = DEFAULT_CONFIG) -> bool:
    return normalize(a, config) == normalize(b, config)
