"""IBM Model 1 lexical translation table trained with EM.

Self-contained fallback aligner. No NULL source word is modelled; unseen
(src, tgt) pairs score :data:`OOV_FLOOR` at alignment time.

The EM inner loop runs in a compiled kernel when it was built; otherwise a
pure-Python implementation with identical arithmetic is used. Set
``TARSQUAD_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _ibm1_py

try:
    if os.environ.get("TARSQUAD_PURE_PYTHON"):
        raise ImportError("pure-Python kernel requested")
    from . import _ibm1_kernel
except ImportError:
    _ibm1_kernel = None

KERNELS = {"python": _ibm1_py}
if _ibm1_kernel is not None:
    KERNELS["cython"] = _ibm1_kernel
KERNEL = "cython" if _ibm1_kernel is not None else "python"

OOV_FLOOR = 1e-6
DEFAULT_ITERATIONS = 5

Corpus = Sequence[tuple[Sequence[str], Sequence[str]]]


@dataclass
class LexicalTable:
    """t(tgt | src) stored as ``probs[src][tgt]``."""

    probs: dict[str, dict[str, float]]
    # corpus log-likelihood before each iteration, plus after the last one
    log_likelihoods: list[float] = field(default_factory=list)

    def prob(self, tgt: str, src: str) -> float:
        return self.probs.get(src, {}).get(tgt, OOV_FLOOR)

    def save(self, path: str | Path) -> None:
        """Write ``src<TAB>tgt<TAB>prob`` lines, sorted, probs in repr form."""
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for src in sorted(self.probs):
                row = self.probs[src]
                for tgt in sorted(row):
                    f.write(f"{src}\t{tgt}\t{row[tgt]!r}\n")

    @classmethod
    def load(cls, path: str | Path) -> "LexicalTable":
        probs: dict[str, dict[str, float]] = {}
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: expected src<TAB>tgt<TAB>prob")
                src, tgt, p = parts
                probs.setdefault(src, {})[tgt] = float(p)
        return cls(probs)


class _Encoded:
    """Corpus flattened to pair ids in (sentence, tgt position, src position) order."""

    def __init__(self, corpus: Corpus):
        src_ids: dict[str, int] = {}
        tgt_vocab: set[str] = set()
        pair_index: dict[tuple[int, str], int] = {}
        pair_src: list[int] = []
        pair_ids: list[int] = []
        src_lens, tgt_lens = [], []
        for src, tgt in corpus:
            if not src or not tgt:
                continue
            sids = [src_ids.setdefault(w, len(src_ids)) for w in src]
            for f in tgt:
                tgt_vocab.add(f)
                for e in sids:
                    key = (e, f)
                    p = pair_index.get(key)
                    if p is None:
                        p = pair_index[key] = len(pair_src)
                        pair_src.append(e)
                    pair_ids.append(p)
            src_lens.append(len(src))
            tgt_lens.append(len(tgt))
        self.src_words = list(src_ids)
        self.tgt_vocab_size = len(tgt_vocab)
        self.pairs = list(pair_index)
        self.pair_ids = np.asarray(pair_ids, dtype=np.int64)
        self.pair_src = np.asarray(pair_src, dtype=np.int64)
        self.src_lens = np.asarray(src_lens, dtype=np.int64)
        self.tgt_lens = np.asarray(tgt_lens, dtype=np.int64)


def train_ibm1(
    corpus: Corpus, iterations: int = DEFAULT_ITERATIONS, kernel: str | None = None
) -> LexicalTable:
    """Train t(tgt|src) on ``[(src_tokens, tgt_tokens), ...]``.

    Initialization is uniform over the target vocabulary. Pairs with an
    empty side are skipped.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    enc = _Encoded(corpus)
    if not enc.pairs:
        raise ValueError("empty corpus")
    impl = KERNELS[kernel or KERNEL]

    t = np.full(len(enc.pairs), 1.0 / enc.tgt_vocab_size, dtype=np.float64)
    history = []
    for _ in range(iterations):
        history.append(
            impl.em_step(
                enc.pair_ids, enc.src_lens, enc.tgt_lens, enc.pair_src, t,
                len(enc.src_words),
            )
        )
    history.append(impl.log_likelihood(enc.pair_ids, enc.src_lens, enc.tgt_lens, t))

    probs: dict[str, dict[str, float]] = {}
    for (e, f), p in zip(enc.pairs, t.tolist()):
        probs.setdefault(enc.src_words[e], {})[f] = p
    return LexicalTable(probs, history)


def ibm1_align(
    table: LexicalTable, src_tokens: Sequence[str], tgt_tokens: Sequence[str]
) -> frozenset[tuple[int, int]]:
    """Link every target position to its most probable source position.

    Ties go to the smallest source index.
    """
    pairs = set()
    rows = [table.probs.get(e, {}) for e in src_tokens]
    for j, f in enumerate(tgt_tokens):
        best_i, best_p = 0, -math.inf
        for i, row in enumerate(rows):
            p = row.get(f, OOV_FLOOR)
            if p > best_p:
                best_i, best_p = i, p
        if rows:
            pairs.add((best_i, j))
    return frozenset(pairs)
