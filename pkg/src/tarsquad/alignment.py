"""Context-level word alignment assembled from per-sentence token alignments."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .backends import TokenAlignment
from .segmentation import SegmentedContext

log = logging.getLogger(__name__)


class AlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class ContextAlignment:
    src_word_to_tgt_words: dict[int, tuple[int, ...]]
    src_word_count: int
    tgt_word_count: int

    @classmethod
    def from_word_pairs(
        cls, pairs: Iterable[tuple[int, int]], src_word_count: int, tgt_word_count: int
    ) -> "ContextAlignment":
        mapping: dict[int, set[int]] = {}
        for s, t in pairs:
            if not (0 <= s < src_word_count and 0 <= t < tgt_word_count):
                raise AlignmentError(
                    f"word pair {s}-{t} outside {src_word_count}x{tgt_word_count}"
                )
            mapping.setdefault(s, set()).add(t)
        return cls(
            {s: tuple(sorted(ts)) for s, ts in sorted(mapping.items())},
            src_word_count,
            tgt_word_count,
        )

    def word_pairs(self) -> set[tuple[int, int]]:
        return {(s, t) for s, ts in self.src_word_to_tgt_words.items() for t in ts}


def positional_sentence_offsets(
    src_ranges: Sequence[tuple[int, int]], tgt_ranges: Sequence[tuple[int, int]]
) -> list[tuple[int, int]]:
    """Pair sentences by position; extra sentences on either side stay unaligned."""
    if len(src_ranges) != len(tgt_ranges):
        log.warning(
            "sentence count mismatch: %d source vs %d target; pairing the first %d",
            len(src_ranges), len(tgt_ranges), min(len(src_ranges), len(tgt_ranges)),
        )
    return [(s[0], t[0]) for s, t in zip(src_ranges, tgt_ranges)]


def context_token_pairs(
    per_sentence: Sequence[TokenAlignment],
    sentence_token_offsets: Sequence[tuple[int, int]],
) -> set[tuple[int, int]]:
    """Sentence-local token links shifted to context token indices (unchecked)."""
    return {
        (i + off_s, j + off_t)
        for al, (off_s, off_t) in zip(per_sentence, sentence_token_offsets)
        for i, j in al.pairs
    }


def merge_sentence_alignments(
    src_seg: SegmentedContext,
    tgt_seg: SegmentedContext,
    per_sentence: Sequence[TokenAlignment],
    sentence_token_offsets: Sequence[tuple[int, int]],
) -> ContextAlignment:
    """Shift sentence-local token links by their offsets and lift them to words."""
    if len(per_sentence) != len(sentence_token_offsets):
        raise AlignmentError(
            f"{len(per_sentence)} sentence alignments for "
            f"{len(sentence_token_offsets)} offset pairs"
        )
    n_src, n_tgt = len(src_seg.tokens), len(tgt_seg.tokens)
    src_starts = [o[0] for o in sentence_token_offsets]
    tgt_starts = [o[1] for o in sentence_token_offsets]
    if src_starts != sorted(src_starts) or tgt_starts != sorted(tgt_starts):
        raise AlignmentError("sentence token offsets are not ordered")

    pairs = set()
    for k, (al, (off_s, off_t)) in enumerate(zip(per_sentence, sentence_token_offsets)):
        last = k + 1 == len(sentence_token_offsets)
        end_s = n_src if last else src_starts[k + 1]
        end_t = n_tgt if last else tgt_starts[k + 1]
        if off_s > n_src or off_t > n_tgt:
            raise AlignmentError(f"sentence {k}: offsets ({off_s}, {off_t}) out of range")
        for i, j in al.pairs:
            gi, gj = i + off_s, j + off_t
            if not (off_s <= gi < end_s and off_t <= gj < end_t):
                raise AlignmentError(
                    f"sentence {k}: link {i}-{j} leaves its sentence "
                    f"(tokens {off_s}..{end_s} / {off_t}..{end_t})"
                )
            pairs.add((src_seg.token_to_word[gi], tgt_seg.token_to_word[gj]))
    return ContextAlignment.from_word_pairs(pairs, len(src_seg.words), len(tgt_seg.words))


def map_word_positions(ca: ContextAlignment, src_words: Iterable[int]) -> tuple[int, ...]:
    """Sorted union of target words linked to any of ``src_words``."""
    out: set[int] = set()
    for w in src_words:
        out.update(ca.src_word_to_tgt_words.get(w, ()))
    return tuple(sorted(out))


def dump_alignment(ca: ContextAlignment, src_seg: SegmentedContext) -> str:
    """``src_index<TAB>src_word<TAB>[tgt indices]`` per source word."""
    lines = []
    for i, w in enumerate(src_seg.words):
        tgt = list(ca.src_word_to_tgt_words.get(i, ()))
        lines.append(f"{i}\t{src_seg.text[w.start:w.end]}\t{tgt}")
    return "\n".join(lines) + ("\n" if lines else "")
