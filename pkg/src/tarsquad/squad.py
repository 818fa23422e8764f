"""SQuAD v1.1 object tree and JSON I/O.

All character offsets are Python string indices, i.e. Unicode code points.
Keys not part of the SQuAD v1.1 schema are kept in ``extra`` and written
back unchanged.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

log = logging.getLogger(__name__)

__all__ = [
    "Answer",
    "QA",
    "Paragraph",
    "Article",
    "Dataset",
    "DatasetError",
    "SpanError",
    "read_dataset",
    "write_dataset",
    "dataset_from_json",
    "dataset_to_json",
    "check_spans",
]


class DatasetError(ValueError):
    """Malformed SQuAD JSON (bad JSON, missing keys, wrong types)."""


class SpanError(DatasetError):
    """One or more answers do not match their context at answer_start."""

    def __init__(self, problems: list[tuple[str, int, str]]):
        self.problems = problems
        lines = [f"{qid} answer {idx}: {msg}" for qid, idx, msg in problems[:20]]
        more = f"\n... and {len(problems) - 20} more" if len(problems) > 20 else ""
        super().__init__(
            f"{len(problems)} span inconsistencies:\n" + "\n".join(lines) + more
        )


@dataclass(frozen=True)
class Answer:
    text: str
    answer_start: int
    extra: dict[str, Any] = field(default_factory=dict, hash=False)
    # False only when read in lenient mode and the span did not match.
    span_ok: bool = True

    @property
    def end(self) -> int:
        return self.answer_start + len(self.text)


@dataclass(frozen=True)
class QA:
    id: str
    question: str
    answers: tuple[Answer, ...]
    extra: dict[str, Any] = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class Paragraph:
    context: str
    qas: tuple[QA, ...]
    extra: dict[str, Any] = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class Article:
    title: str
    paragraphs: tuple[Paragraph, ...]
    extra: dict[str, Any] = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class Dataset:
    version: str
    articles: tuple[Article, ...]
    extra: dict[str, Any] = field(default_factory=dict, hash=False)

    def iter_qas(self):
        """Yield ``(article_idx, paragraph_idx, paragraph, qa)`` in file order."""
        for ai, art in enumerate(self.articles):
            for pi, par in enumerate(art.paragraphs):
                for qa in par.qas:
                    yield ai, pi, par, qa

    def counts(self) -> tuple[int, int, int, int]:
        """(articles, paragraphs, questions, answers)."""
        n_par = n_qa = n_ans = 0
        for art in self.articles:
            n_par += len(art.paragraphs)
            for par in art.paragraphs:
                n_qa += len(par.qas)
                n_ans += sum(len(qa.answers) for qa in par.qas)
        return len(self.articles), n_par, n_qa, n_ans


def span_problem(context: str, answer: Answer) -> str | None:
    start, text = answer.answer_start, answer.text
    if start < 0 or start + len(text) > len(context):
        return (
            f"answer_start {start} + len {len(text)} outside context of "
            f"length {len(context)}"
        )
    found = context[start : start + len(text)]
    if found != text:
        return f"context has {found!r} at {start}, answer text is {text!r}"
    return None


def check_spans(ds: Dataset) -> list[tuple[str, int, str]]:
    """Return ``(qa_id, answer_index, message)`` for each inconsistent answer."""
    problems = []
    for _, _, par, qa in ds.iter_qas():
        for idx, ans in enumerate(qa.answers):
            msg = span_problem(par.context, ans)
            if msg is not None:
                problems.append((qa.id, idx, msg))
    return problems


def _take(obj: Any, key: str, kind: type, where: str) -> Any:
    if not isinstance(obj, dict):
        raise DatasetError(f"{where}: expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise DatasetError(f"{where}: missing required key {key!r}")
    value = obj[key]
    if kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise DatasetError(
            f"{where}: key {key!r} should be {kind.__name__}, "
            f"got {type(value).__name__}"
        )
    return value


def _extras(obj: dict, known: tuple[str, ...]) -> dict[str, Any]:
    return {k: v for k, v in obj.items() if k not in known}


def dataset_from_json(obj: Any, lenient: bool = False) -> Dataset:
    """Build a validated :class:`Dataset` from parsed JSON."""
    version = _take(obj, "version", str, "top level")
    articles = []
    seen_ids: dict[str, str] = {}
    problems = []
    for ai, art in enumerate(_take(obj, "data", list, "top level")):
        where_a = f"data[{ai}]"
        paragraphs = []
        for pi, par in enumerate(_take(art, "paragraphs", list, where_a)):
            where_p = f"{where_a}.paragraphs[{pi}]"
            context = _take(par, "context", str, where_p)
            qas = []
            for qi, qa in enumerate(_take(par, "qas", list, where_p)):
                where_q = f"{where_p}.qas[{qi}]"
                qid = _take(qa, "id", str, where_q)
                if qid in seen_ids:
                    raise DatasetError(
                        f"{where_q}: duplicate QA id {qid!r} (first at {seen_ids[qid]})"
                    )
                seen_ids[qid] = where_q
                answers = []
                for mi, ans in enumerate(_take(qa, "answers", list, where_q)):
                    where_m = f"{where_q}.answers[{mi}]"
                    answer = Answer(
                        text=_take(ans, "text", str, where_m),
                        answer_start=_take(ans, "answer_start", int, where_m),
                        extra=_extras(ans, ("text", "answer_start")),
                    )
                    msg = span_problem(context, answer)
                    if msg is not None:
                        problems.append((qid, mi, msg))
                        answer = Answer(
                            answer.text, answer.answer_start, answer.extra, span_ok=False
                        )
                    answers.append(answer)
                qas.append(
                    QA(
                        id=qid,
                        question=_take(qa, "question", str, where_q),
                        answers=tuple(answers),
                        extra=_extras(qa, ("id", "question", "answers")),
                    )
                )
            paragraphs.append(
                Paragraph(context, tuple(qas), _extras(par, ("context", "qas")))
            )
        articles.append(
            Article(
                title=_take(art, "title", str, where_a),
                paragraphs=tuple(paragraphs),
                extra=_extras(art, ("title", "paragraphs")),
            )
        )
    if problems:
        if not lenient:
            raise SpanError(problems)
        for qid, mi, msg in problems:
            log.warning("span inconsistency in %s answer %d: %s", qid, mi, msg)
    return Dataset(version, tuple(articles), _extras(obj, ("version", "data")))


def dataset_to_json(ds: Dataset) -> dict[str, Any]:
    """Inverse of :func:`dataset_from_json`; SQuAD keys first, then extras."""

    def answer(a: Answer) -> dict:
        return {"text": a.text, "answer_start": a.answer_start, **a.extra}

    def qa(q: QA) -> dict:
        return {
            "id": q.id,
            "question": q.question,
            "answers": [answer(a) for a in q.answers],
            **q.extra,
        }

    def paragraph(p: Paragraph) -> dict:
        return {"context": p.context, "qas": [qa(q) for q in p.qas], **p.extra}

    return {
        "version": ds.version,
        "data": [
            {
                "title": art.title,
                "paragraphs": [paragraph(p) for p in art.paragraphs],
                **art.extra,
            }
            for art in ds.articles
        ],
        **ds.extra,
    }


def read_dataset(path: str | Path, lenient: bool = False) -> Dataset:
    """Read and validate a SQuAD v1.1 file.

    Span inconsistencies raise :class:`SpanError` listing every offending QA
    id. With ``lenient=True`` they are logged and the answers are kept with
    ``span_ok=False``.
    """
    try:
        with open(path, encoding="utf-8") as f:
            obj = json.load(f)
    except json.JSONDecodeError as e:
        raise DatasetError(f"{path}: malformed JSON: {e}") from e
    except UnicodeDecodeError as e:
        raise DatasetError(f"{path}: not valid UTF-8: {e}") from e
    return dataset_from_json(obj, lenient=lenient)


def write_dataset(ds: Dataset, path: str | Path) -> None:
    text = json.dumps(dataset_to_json(ds), ensure_ascii=False, indent=None)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
        f.write("\n")
