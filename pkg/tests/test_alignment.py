import random

import pytest

from tarsquad.alignment import (
    AlignmentError,
    ContextAlignment,
    context_token_pairs,
    dump_alignment,
    map_word_positions,
    merge_sentence_alignments,
    positional_sentence_offsets,
)
from tarsquad.backends import TokenAlignment
from tarsquad.segmentation import build_segmented_context

from conftest import random_context


def _al(*pairs):
    return TokenAlignment(frozenset(pairs))


def _identity(n):
    return _al(*((i, i) for i in range(n)))


def test_identity_single_sentence():
    seg = build_segmented_context("uno dos tres cuatro")
    ca = merge_sentence_alignments(seg, seg, [_identity(4)], [(0, 0)])
    assert ca.src_word_to_tgt_words == {k: (k,) for k in range(4)}


def test_offset_arithmetic():
    assert context_token_pairs([_al(), _al((0, 1))], [(0, 0), (5, 6)]) == {(5, 7)}


def test_punctuation_token_joins_its_word():
    # "Wola" and "," are both word 0; their links land on target words 4 and 5
    src = build_segmented_context("Wola,")
    tgt = build_segmented_context("a b c d Wola ,")
    ca = merge_sentence_alignments(src, tgt, [_al((0, 4), (1, 5))], [(0, 0)])
    assert ca.src_word_to_tgt_words[0] == (4, 5)


def test_two_sentences_shifted():
    src = build_segmented_context("A b. C d.")
    tgt = build_segmented_context("X y. Z w.")
    ranges_s = src.sentence_token_ranges()
    ranges_t = tgt.sentence_token_ranges()
    offsets = positional_sentence_offsets(ranges_s, ranges_t)
    assert offsets == [(0, 0), (3, 3)]
    ca = merge_sentence_alignments(src, tgt, [_al((0, 1)), _al((1, 0))], offsets)
    assert ca.word_pairs() == {(0, 1), (3, 2)}


def test_positional_pairing_truncates():
    assert positional_sentence_offsets([(0, 3), (3, 5)], [(0, 4)]) == [(0, 0)]


def test_errors():
    seg = build_segmented_context("a b. c d.")
    with pytest.raises(AlignmentError, match="offset pairs"):
        merge_sentence_alignments(seg, seg, [_al()], [(0, 0), (3, 3)])
    with pytest.raises(AlignmentError, match="leaves its sentence"):
        merge_sentence_alignments(seg, seg, [_al((3, 0)), _al()], [(0, 0), (3, 3)])
    with pytest.raises(AlignmentError, match="not ordered"):
        merge_sentence_alignments(seg, seg, [_al(), _al()], [(3, 3), (0, 0)])
    with pytest.raises(AlignmentError, match="outside"):
        ContextAlignment.from_word_pairs([(0, 9)], 2, 2)


def test_map_word_positions():
    ident = ContextAlignment.from_word_pairs([(k, k) for k in range(4)], 4, 4)
    assert map_word_positions(ident, [1, 2]) == (1, 2)
    rev = ContextAlignment.from_word_pairs([(0, 3), (1, 2), (2, 1), (3, 0)], 4, 4)
    assert map_word_positions(rev, [1, 2]) == (1, 2)
    assert map_word_positions(rev, [5]) == ()
    many = ContextAlignment.from_word_pairs([(0, 5), (0, 1), (1, 3)], 2, 6)
    assert map_word_positions(many, [0, 1]) == (1, 3, 5)


def test_dump():
    seg = build_segmented_context("la casa")
    ca = ContextAlignment.from_word_pairs([(0, 0), (0, 2)], 2, 3)
    assert dump_alignment(ca, seg) == "0\tla\t[0, 2]\n1\tcasa\t[]\n"


@pytest.mark.parametrize("seed", range(60))
def test_merge_matches_brute_force(seed):
    rng = random.Random(seed)
    src = build_segmented_context(random_context(rng))
    tgt = build_segmented_context(random_context(rng))
    rs, rt = src.sentence_token_ranges(), tgt.sentence_token_ranges()
    offsets = positional_sentence_offsets(rs, rt)
    per_sentence = []
    for (s0, s1), (t0, t1) in zip(rs, rt):
        pairs = {(rng.randrange(s1 - s0), rng.randrange(t1 - t0)) for _ in range(rng.randint(0, 6))}
        per_sentence.append(TokenAlignment(frozenset(pairs)))
    ca = merge_sentence_alignments(src, tgt, per_sentence, offsets)

    # brute force: locate each token's word by character containment
    def word_of(seg, tok):
        span = seg.tokens[tok][1]
        return next(k for k, w in enumerate(seg.words) if w.start <= span.start < w.end)

    expected = {
        (word_of(src, i + os_), word_of(tgt, j + ot))
        for al, (os_, ot) in zip(per_sentence, offsets)
        for i, j in al.pairs
    }
    assert ca.word_pairs() == expected
    # reordering the input pairs changes nothing
    shuffled = [TokenAlignment(frozenset(sorted(al.pairs, reverse=True))) for al in per_sentence]
    assert merge_sentence_alignments(src, tgt, shuffled, offsets) == ca


@pytest.mark.parametrize("seed", range(20))
def test_identity_tokens_give_identity_words(seed):
    seg = build_segmented_context(random_context(random.Random(seed)))
    ranges = seg.sentence_token_ranges()
    per_sentence = [_identity(b - a) for a, b in ranges]
    ca = merge_sentence_alignments(seg, seg, per_sentence, positional_sentence_offsets(ranges, ranges))
    assert ca.src_word_to_tgt_words == {k: (k,) for k in range(len(seg.words))}
