"""Small text helpers shared by the mock provider, classification and metrics."""

from __future__ import annotations

import re

# Function words ignored wherever "content tokens" are compared.
STOPWORDS = frozenset(
    """
    a an the this that these those it its they them their there here
    i you we he she me him her my your our us
    is are was were be been being am do does did done has have had having
    and or not but if then else when while as so such than too very
    of in on at by for with about from into over under between during to
    what which who whom whose how why where can could will would shall should
    may might must need each every all any some no nor only both few more most other
    """.split()
)

_WORD_RE = re.compile(r"[a-z0-9][a-z0-9_'-]*")
# Sentence boundary: terminator followed by whitespace and an upper-case/quote
# opener, or end of text.  Good enough for the short declarative fixture prose.
_SENT_RE = re.compile(r"(?<=[.!?])\s+(?=[A-Z\"'(])")


def tokens(text: str) -> list[str]:
    """All lowercase word tokens, in order."""
    return _WORD_RE.findall(text.lower())


def content_tokens(text: str) -> set[str]:
    """Lowercased tokens minus stopwords, as a set."""
    return {t for t in tokens(text) if t not in STOPWORDS}


def split_sentences(text: str) -> list[str]:
    """Split prose into sentences, dropping blank fragments."""
    parts: list[str] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        parts.extend(p.strip() for p in _SENT_RE.split(line) if p.strip())
    return parts


def singularize(word: str) -> str:
    """Naive singular form: strip one trailing 's' from longer plurals."""
    if len(word) > 3 and word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return word


def words_match(a: str, b: str) -> bool:
    """Lenient token equality: exact, singular/plural, or long-prefix match."""
    a, b = a.lower(), b.lower()
    if a == b or singularize(a) == singularize(b):
        return True
    longer, shorter = (a, b) if len(a) >= len(b) else (b, a)
    return len(shorter) >= 4 and longer.startswith(shorter)
