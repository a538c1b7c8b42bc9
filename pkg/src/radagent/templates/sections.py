"""Organ-section extraction from free-text reports.

Sentence splitting is deliberately simple (punctuation followed by
whitespace); report prose rarely needs more, and the rule is easy to
audit.
"""
from __future__ import annotations

import re

_SENTENCE_BREAK = re.compile(r"(?<=[.!?])\s+")

DEFAULT_KEYWORDS: dict[str, tuple[str, ...]] = {
    "liver": ("liver", "hepatic"),
}


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENTENCE_BREAK.split(text.strip()) if s]


def keywords_for(organ: str) -> tuple[str, ...]:
    return DEFAULT_KEYWORDS.get(organ.lower(), (organ.lower(),))


def extract_organ_section(
    full_text: str, organ: str, keywords: tuple[str, ...] | None = None
) -> str | None:
    """In-order concatenation of sentences mentioning any keyword,
    case-insensitively; None when nothing matches."""
    kws = tuple(k.lower() for k in (keywords or keywords_for(organ)))
    picked = [
        s
        for s in split_sentences(full_text)
        if any(k in s.lower() for k in kws)
    ]
    if not picked:
        return None
    return " ".join(picked)
