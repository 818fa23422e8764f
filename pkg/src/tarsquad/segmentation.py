"""Sentence splitting, tokenization and char/token/word coordinate maps.

A *word* is a maximal run of non-whitespace characters in the raw text.
Tokens are produced per word, so every token lies inside exactly one word.

Tokenization rules, applied inside each word:

=========================  ===========================================
characters                 token
=========================  ===========================================
letters, digits, marks     start or extend an alphanumeric token
``- ‐ ‑ – — ' ’ . , : /``  kept inside an alphanumeric token when both
``_ & @ ·``                neighbours are letters/digits/marks
anything else              a token per run of the *same* character
=========================  ===========================================

So ``"(907-960),"`` gives ``(``, ``907-960``, ``)``, ``,`` and ``"..."``
stays one token.

Sentences end after a run of ``. ? ! …`` plus optional closing quotes or
brackets, when followed by whitespace and then an uppercase letter, a digit,
``¿``, ``¡`` or an opening quote. A single ``.`` does not end a sentence when
the word it ends is a listed abbreviation or a capital initial such as ``R.``.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, NamedTuple

__all__ = [
    "Span",
    "SegmentedContext",
    "load_abbreviations",
    "default_abbreviations",
    "split_sentences",
    "tokenize",
    "word_spans",
    "build_segmented_context",
]


class Span(NamedTuple):
    start: int
    end: int


JOINERS = frozenset("-‐‑–—'’.,:/_&@·")
_TERMINATOR = re.compile(r"[.?!…]+[\"'”’»)\]]*(?=\s)")
_WORD = re.compile(r"\S+")
_SENT_OPENERS = frozenset("¿¡\"'“‘«")
_LEADING_OPENERS = "([{\"'“‘«¿¡"


def _is_wordchar(c: str) -> bool:
    return unicodedata.category(c)[0] in "LNM"


def load_abbreviations(path: str | Path) -> frozenset[str]:
    """Read an abbreviation list: one entry per line, ``#`` starts a comment."""
    with open(path, encoding="utf-8") as f:
        return _parse_abbreviations(f)


def _parse_abbreviations(lines: Iterable[str]) -> frozenset[str]:
    out = set()
    for line in lines:
        line = line.strip()
        if line and not line.startswith("#"):
            out.add(line)
    return frozenset(out)


@lru_cache(maxsize=1)
def default_abbreviations() -> frozenset[str]:
    text = resources.files("tarsquad").joinpath("data/abbreviations.txt").read_text(
        encoding="utf-8"
    )
    return _parse_abbreviations(text.splitlines())


def _is_abbreviation(word: str, abbreviations: frozenset[str]) -> bool:
    word = word.lstrip(_LEADING_OPENERS)
    if word in abbreviations:
        return True
    # capital initial, e.g. "George R. R. Martin"
    return len(word) == 2 and word[0].isalpha() and word[0].isupper()


def _starts_sentence(c: str) -> bool:
    return c.isupper() or c.isdigit() or c in _SENT_OPENERS


def split_sentences(
    text: str, abbreviations: frozenset[str] | None = None
) -> list[Span]:
    """Split ``text`` into sentence spans trimmed of surrounding whitespace."""
    if abbreviations is None:
        abbreviations = default_abbreviations()
    cuts = [0]
    for m in _TERMINATOR.finditer(text):
        nxt = m.end()
        while nxt < len(text) and text[nxt].isspace():
            nxt += 1
        if nxt >= len(text) or not _starts_sentence(text[nxt]):
            continue
        if m.group() == ".":
            word_start = m.start()
            while word_start > 0 and not text[word_start - 1].isspace():
                word_start -= 1
            if _is_abbreviation(text[word_start : m.end()], abbreviations):
                continue
        cuts.append(m.end())
    cuts.append(len(text))

    spans = []
    for a, b in zip(cuts, cuts[1:]):
        while a < b and text[a].isspace():
            a += 1
        while b > a and text[b - 1].isspace():
            b -= 1
        if a < b:
            spans.append(Span(a, b))
    return spans


def word_spans(text: str) -> list[Span]:
    return [Span(m.start(), m.end()) for m in _WORD.finditer(text)]


def _tokenize_word(text: str, start: int, end: int, out: list) -> None:
    i = start
    while i < end:
        c = text[i]
        j = i + 1
        if _is_wordchar(c):
            while j < end:
                if _is_wordchar(text[j]):
                    j += 1
                elif text[j] in JOINERS and j + 1 < end and _is_wordchar(text[j + 1]):
                    j += 2
                else:
                    break
        else:
            while j < end and text[j] == c:
                j += 1
        out.append((text[i:j], Span(i, j)))
        i = j


def tokenize(text: str) -> list[tuple[str, Span]]:
    """Tokenize with character spans; see the module docstring for the rules."""
    out: list[tuple[str, Span]] = []
    for m in _WORD.finditer(text):
        _tokenize_word(text, m.start(), m.end(), out)
    return out


@dataclass(frozen=True)
class SegmentedContext:
    text: str
    sentences: tuple[Span, ...]
    tokens: tuple[tuple[str, Span], ...]
    words: tuple[Span, ...]
    token_to_word: tuple[int, ...]
    # whitespace maps to the following word, or the previous one at the end
    char_to_word: tuple[int, ...]

    @property
    def token_texts(self) -> list[str]:
        return [t for t, _ in self.tokens]

    def sentence_token_ranges(self) -> list[tuple[int, int]]:
        """Half-open token index range of each sentence."""
        ranges = []
        k = 0
        n = len(self.tokens)
        for sent in self.sentences:
            while k < n and self.tokens[k][1].start < sent.start:
                k += 1
            first = k
            while k < n and self.tokens[k][1].start < sent.end:
                k += 1
            ranges.append((first, k))
        return ranges

    def words_overlapping(self, start: int, end: int) -> list[int]:
        """Indices of words sharing at least one character with [start, end)."""
        return [i for i, w in enumerate(self.words) if w.start < end and start < w.end]

    def sentence_index_at(self, pos: int) -> int | None:
        """Sentence containing ``pos``; whitespace resolves to the next sentence."""
        for i, s in enumerate(self.sentences):
            if pos < s.end:
                return i
        return None


def build_segmented_context(
    text: str, abbreviations: frozenset[str] | None = None
) -> SegmentedContext:
    sentences = split_sentences(text, abbreviations)
    words = word_spans(text)
    tokens = []
    token_to_word = []
    for wi, w in enumerate(words):
        before = len(tokens)
        _tokenize_word(text, w.start, w.end, tokens)
        token_to_word.extend([wi] * (len(tokens) - before))

    char_to_word = [0] * len(text)
    if words:
        wi = 0
        for pos in range(len(text)):
            while wi < len(words) - 1 and pos >= words[wi].end:
                wi += 1
            char_to_word[pos] = wi
    return SegmentedContext(
        text=text,
        sentences=tuple(sentences),
        tokens=tuple(tokens),
        words=tuple(words),
        token_to_word=tuple(token_to_word),
        char_to_word=tuple(char_to_word) if words else (),
    )
