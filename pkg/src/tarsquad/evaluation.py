"""Exact Match / F1 for extractive QA, multilingual variant of the SQuAD scorer."""

from __future__ import annotations

import json
import logging
import string
import unicodedata
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .squad import Dataset

log = logging.getLogger(__name__)

ARTICLES = {
    "en": frozenset({"a", "an", "the"}),
    "es": frozenset({"el", "la", "los", "las", "un", "una", "unos", "unas"}),
}

_ASCII_PUNCT = frozenset(string.punctuation)


def _is_punct(c: str) -> bool:
    return c in _ASCII_PUNCT or unicodedata.category(c).startswith("P")


@dataclass(frozen=True)
class EvalReport:
    exact_match: float
    f1: float
    count: int

    def to_json(self) -> dict:
        return {"exact_match": self.exact_match, "f1": self.f1}


def normalize_text(s: str, language: str) -> list[str]:
    """lowercase, drop punctuation, drop articles, split on whitespace."""
    try:
        articles = ARTICLES[language]
    except KeyError:
        raise ValueError(
            f"unknown language {language!r}; known: {sorted(ARTICLES)}"
        ) from None
    s = "".join(c for c in s.lower() if not _is_punct(c))
    return [tok for tok in s.split() if tok not in articles]


def exact_match(prediction: str, gold: str, language: str) -> float:
    return float(normalize_text(prediction, language) == normalize_text(gold, language))


def f1_score(prediction: str, gold: str, language: str) -> float:
    pred = normalize_text(prediction, language)
    ref = normalize_text(gold, language)
    if not pred or not ref:
        # both empty counts as a match, otherwise EM could exceed F1
        return float(pred == ref)
    common = Counter(pred) & Counter(ref)
    same = sum(common.values())
    if same == 0:
        return 0.0
    precision = same / len(pred)
    recall = same / len(ref)
    return 2 * precision * recall / (precision + recall)


def score(gold: Dataset, preds: dict[str, str], language: str) -> EvalReport:
    em_total = f1_total = 0.0
    count = 0
    missing = 0
    for _, _, _, qa in gold.iter_qas():
        count += 1
        if qa.id not in preds:
            missing += 1
            log.warning("no prediction for question %s, scored as 0", qa.id)
            continue
        pred = preds[qa.id]
        golds = [a.text for a in qa.answers]
        if not golds:
            continue
        em_total += max(exact_match(pred, g, language) for g in golds)
        f1_total += max(f1_score(pred, g, language) for g in golds)
    if missing:
        log.warning("%d of %d questions had no prediction", missing, count)
    if count == 0:
        return EvalReport(0.0, 0.0, 0)
    return EvalReport(100.0 * em_total / count, 100.0 * f1_total / count, count)


def read_predictions(path: str | Path) -> dict[str, str]:
    with open(path, encoding="utf-8") as f:
        obj = json.load(f)
    if not isinstance(obj, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in obj.items()
    ):
        raise ValueError(f"{path}: predictions must be a JSON object of id -> string")
    return obj
