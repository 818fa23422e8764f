"""Answer retrieval in a translated context, plus answer cleanup.

Retrieval first looks for the separately translated answer inside the
translated context (case-insensitive), starting at the first target word the
alignment maps the source answer to and falling back to a search from the
beginning. Failing that, the answer becomes the span between the leftmost
and rightmost aligned target words.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

from .alignment import ContextAlignment, map_word_positions
from .segmentation import SegmentedContext
from .squad import Answer

__all__ = [
    "Method",
    "DropReason",
    "RiskTag",
    "RetrievedAnswer",
    "fold_case",
    "is_strippable",
    "source_word_range",
    "retrieve_answer",
    "cleanup_answer",
    "classify_error_risk",
]


class Method(str, Enum):
    DIRECT_MATCH = "DirectMatch"
    ALIGNMENT_SPAN = "AlignmentSpan"


class DropReason(str, Enum):
    NO_ALIGNMENT = "NoAlignment"
    EMPTY_AFTER_CLEANUP = "EmptyAfterCleanup"
    INCONSISTENT_SOURCE = "InconsistentSource"


class RiskTag(str, Enum):
    CROSSED_SENTENCE = "CrossedSentence"
    EDGE_PUNCTUATION = "EdgePunctuation"
    ALIGNMENT_FALLBACK = "AlignmentFallback"
    LOWERCASE_MATCH_CASE_CHANGED = "LowercaseMatchCaseChanged"


@dataclass(frozen=True)
class RetrievedAnswer:
    text: str
    answer_start: int
    method: Method | None
    dropped_reason: DropReason | None = None
    literal: str = ""
    # set by cleanup_answer
    truncated: bool = False
    stripped: bool = False

    @property
    def dropped(self) -> bool:
        return self.dropped_reason is not None

    @property
    def end(self) -> int:
        return self.answer_start + len(self.text)


def _fold_char(c: str) -> str:
    low = c.lower()
    return low if len(low) == 1 else c


@lru_cache(maxsize=512)
def fold_case(s: str) -> str:
    """Per-character lowercase that never changes string length."""
    return "".join(map(_fold_char, s))


# kept on answer edges although they are Unicode punctuation
_KEEP = frozenset("%‰‱")


def is_strippable(c: str) -> bool:
    if c in _KEEP:
        return False
    return c.isspace() or unicodedata.category(c).startswith("P") or c in "«»¿¡"


def source_word_range(seg: SegmentedContext, start: int, length: int) -> list[int]:
    """Words touched by the answer characters, including partially covered ones."""
    words = seg.words_overlapping(start, start + max(length, 1))
    if not words and seg.char_to_word and 0 <= start < len(seg.text):
        words = [seg.char_to_word[start]]
    if not words:
        return []
    return list(range(words[0], words[-1] + 1))


def retrieve_answer(
    c_src_seg: SegmentedContext,
    c_tran_seg: SegmentedContext,
    ca: ContextAlignment,
    a_src: Answer,
    a_tran_literal: str,
) -> RetrievedAnswer:
    src_words = source_word_range(c_src_seg, a_src.answer_start, len(a_src.text))
    mapped = map_word_positions(ca, src_words)
    c_tran = c_tran_seg.text

    needle = a_tran_literal.strip()
    if needle:
        hay = fold_case(c_tran)
        folded = fold_case(needle)
        origin = c_tran_seg.words[mapped[0]].start if mapped else 0
        pos = hay.find(folded, origin)
        if pos < 0 and origin > 0:
            pos = hay.find(folded)
        if pos >= 0:
            return RetrievedAnswer(
                c_tran[pos : pos + len(needle)], pos, Method.DIRECT_MATCH,
                literal=a_tran_literal,
            )

    if mapped:
        start = c_tran_seg.words[mapped[0]].start
        end = c_tran_seg.words[mapped[-1]].end
        return RetrievedAnswer(
            c_tran[start:end], start, Method.ALIGNMENT_SPAN, literal=a_tran_literal
        )
    return RetrievedAnswer(
        "", -1, None, DropReason.NO_ALIGNMENT, literal=a_tran_literal
    )


def cleanup_answer(ra: RetrievedAnswer, c_tran_seg: SegmentedContext) -> RetrievedAnswer:
    """Cut the span at its sentence end, then strip edge punctuation/whitespace."""
    if ra.dropped:
        return ra
    text = c_tran_seg.text
    start, end = ra.answer_start, ra.end
    truncated = stripped = False

    k = c_tran_seg.sentence_index_at(start)
    if k is not None and end > c_tran_seg.sentences[k].end:
        end = c_tran_seg.sentences[k].end
        truncated = True

    while start < end and is_strippable(text[start]):
        stripped = stripped or not text[start].isspace()
        start += 1
    while end > start and is_strippable(text[end - 1]):
        stripped = stripped or not text[end - 1].isspace()
        end -= 1

    out = replace(
        ra,
        text=text[start:end],
        answer_start=start,
        truncated=ra.truncated or truncated,
        stripped=ra.stripped or stripped,
    )
    if start >= end:
        out = replace(out, text="", dropped_reason=DropReason.EMPTY_AFTER_CLEANUP)
    return out


def classify_error_risk(ra: RetrievedAnswer, pre_cleanup_text: str) -> frozenset[RiskTag]:
    """Machine-detectable signals that correlate with misaligned/overlapping spans.

    ``ra`` is the answer after :func:`cleanup_answer`; ``pre_cleanup_text`` is
    what retrieval returned.
    """
    tags = set()
    if ra.truncated:
        tags.add(RiskTag.CROSSED_SENTENCE)
    if ra.stripped:
        tags.add(RiskTag.EDGE_PUNCTUATION)
    if ra.method is Method.ALIGNMENT_SPAN:
        tags.add(RiskTag.ALIGNMENT_FALLBACK)
    if ra.method is Method.DIRECT_MATCH and pre_cleanup_text != ra.literal.strip():
        tags.add(RiskTag.LOWERCASE_MATCH_CASE_CHANGED)
    return frozenset(tags)
