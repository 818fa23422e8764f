"""Translate a whole SQuAD dataset and re-anchor its answers.

Contexts are split into sentences and translated sentence by sentence; the
translations are joined with one space. Questions and answers are translated
as single lines. Sentence pairs are aligned, the alignments merged into a
context word alignment, and each answer retrieved and cleaned.

Sentence pairs are numbered across the whole dataset in (article, paragraph,
sentence) order; a Pharaoh alignment file must have one line per source
sentence in that order.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .alignment import ContextAlignment, merge_sentence_alignments
from .backends import (
    AlignerSpec,
    BackendError,
    CacheMissError,
    FileAligner,
    Translator,
    TranslatorSpec,
    align_batch,
    make_aligner,
    make_translator,
    translate_batch,
)
from .retrieval import (
    DropReason,
    Method,
    classify_error_risk,
    cleanup_answer,
    retrieve_answer,
)
from .segmentation import SegmentedContext, build_segmented_context, tokenize
from .squad import QA, Answer, Article, Dataset, Paragraph, write_dataset

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    translator: TranslatorSpec
    aligner: AlignerSpec
    emit_small_variant: bool = True
    lenient: bool = False
    worker_count: int = 1
    abbreviations: frozenset[str] | None = None

    def __post_init__(self):
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")


@dataclass(frozen=True)
class DatasetStats:
    translated_examples: int
    total_examples: int
    avg_context_len: float
    avg_question_len: float
    avg_answer_len: float


def compute_stats(ds: Dataset, total_examples: int | None = None) -> DatasetStats:
    """Example counts and average token lengths.

    One example is one (question, answer) pair; every average is taken over
    examples, so a context counts once per answer it hosts.
    """
    n = c_len = q_len = a_len = 0
    for art in ds.articles:
        for par in art.paragraphs:
            c = len(tokenize(par.context))
            for qa in par.qas:
                q = len(tokenize(qa.question))
                for ans in qa.answers:
                    n += 1
                    c_len += c
                    q_len += q
                    a_len += len(tokenize(ans.text))
    total = n if total_examples is None else total_examples
    if n == 0:
        return DatasetStats(0, total, 0.0, 0.0, 0.0)
    return DatasetStats(n, total, c_len / n, q_len / n, a_len / n)


def format_stats_table(stats: dict[str, DatasetStats]) -> str:
    names = list(stats)
    rows = [
        ("# of ex.", [f"{s.translated_examples}/{s.total_examples}" for s in stats.values()]),
        ("Avg. c len", [f"{s.avg_context_len:.2f}" for s in stats.values()]),
        ("Avg. q len", [f"{s.avg_question_len:.2f}" for s in stats.values()]),
        ("Avg. a len", [f"{s.avg_answer_len:.2f}" for s in stats.values()]),
    ]
    width = max(12, *(len(c) for _, cells in rows for c in cells), *(len(n) for n in names))
    lines = [" " * 12 + "".join(f"{n:>{width + 2}}" for n in names)]
    for label, cells in rows:
        lines.append(f"{label:<12}" + "".join(f"{c:>{width + 2}}" for c in cells))
    return "\n".join(lines) + "\n"


# -- context translation -----------------------------------------------------


@dataclass(frozen=True)
class TranslatedContext:
    src_seg: SegmentedContext
    tgt_seg: SegmentedContext
    sentences: tuple[str, ...]
    translations: tuple[str, ...]
    # (src token offset, tgt token offset) of each sentence pair
    offsets: tuple[tuple[int, int], ...]
    pairs: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]

    @property
    def text(self) -> str:
        return self.tgt_seg.text

    @property
    def sentence_mismatch(self) -> bool:
        return (
            any(not t for t in self.translations)
            or len(self.tgt_seg.sentences) != len(self.sentences)
        )


def _one_line(s: str) -> str:
    # the translator line protocol has no room for embedded newlines
    return s.replace("\r", " ").replace("\n", " ")


def _source_sentences(src_seg: SegmentedContext) -> list[str]:
    return [_one_line(src_seg.text[s.start : s.end]) for s in src_seg.sentences]


def _assemble(
    src_seg: SegmentedContext, translations: list[str], abbreviations
) -> TranslatedContext:
    translations = [t.strip() for t in translations]
    c_tran = " ".join(translations)
    tgt_seg = build_segmented_context(c_tran, abbreviations)

    src_tokens = src_seg.token_texts
    offsets, pairs = [], []
    tgt_off = 0
    for (a, b), tran in zip(src_seg.sentence_token_ranges(), translations):
        tgt_tokens = tuple(t for t, _ in tokenize(tran))
        offsets.append((a, tgt_off))
        pairs.append((tuple(src_tokens[a:b]), tgt_tokens))
        tgt_off += len(tgt_tokens)
    assert tgt_off == len(tgt_seg.tokens)
    return TranslatedContext(
        src_seg,
        tgt_seg,
        tuple(_source_sentences(src_seg)),
        tuple(translations),
        tuple(offsets),
        tuple(pairs),
    )


def sentence_translate_context(
    c_src: str,
    translator: Translator | TranslatorSpec,
    abbreviations: frozenset[str] | None = None,
) -> TranslatedContext:
    """Split, translate per sentence, and rejoin with single spaces."""
    src_seg = build_segmented_context(c_src, abbreviations)
    sentences = _source_sentences(src_seg)
    return _assemble(src_seg, translate_batch(translator, sentences), abbreviations)


# -- per-shard work ----------------------------------------------------------


@dataclass
class _ParagraphJob:
    ai: int
    pi: int
    title: str
    paragraph: Paragraph
    sentence_base: int
    src_seg: SegmentedContext | None = None


@dataclass
class _ParagraphResult:
    ai: int
    pi: int
    full: Paragraph | None
    small: Paragraph | None
    audit: list[dict[str, Any]] = field(default_factory=list)


def _where(job: _ParagraphJob, qid: str | None = None) -> str:
    out = f"article {job.ai} ({job.title!r}) paragraph {job.pi}"
    return out + (f" question {qid}" if qid else "")


def _translate_shard(jobs: list[_ParagraphJob], translator: Translator, strict: bool):
    lines: list[str] = []
    owners: list[str] = []
    for job in jobs:
        for s in _source_sentences(job.src_seg):
            lines.append(s)
            owners.append(_where(job))
        for qa in job.paragraph.qas:
            lines.append(_one_line(qa.question))
            owners.append(_where(job, qa.id))
            for ans in qa.answers:
                lines.append(_one_line(ans.text))
                owners.append(_where(job, qa.id))
    try:
        out = translate_batch(translator, lines, strict=strict)
    except CacheMissError as e:
        where = owners[lines.index(e.line)] if e.line in lines else "unknown"
        raise PipelineError(f"{where}: {e}") from e
    except (BackendError, ValueError) as e:
        first, last = jobs[0], jobs[-1]
        raise PipelineError(
            f"articles {first.ai}..{last.ai}: translation failed: {e}"
        ) from e
    return out


def _process_shard(jobs: list[_ParagraphJob], cfg: PipelineConfig) -> list[_ParagraphResult]:
    if not jobs:
        return []
    translator = make_translator(cfg.translator, strict=not cfg.lenient)
    aligner = make_aligner(cfg.aligner)
    abbreviations = cfg.abbreviations

    translated = iter(_translate_shard(jobs, translator, strict=not cfg.lenient))

    contexts, q_trans, a_trans = [], [], []
    for job in jobs:
        n_sent = len(job.src_seg.sentences)
        tran = [next(translated) for _ in range(n_sent)]
        contexts.append(_assemble(job.src_seg, tran, abbreviations))
        qs, ans = {}, {}
        for qa in job.paragraph.qas:
            qs[qa.id] = next(translated)
            ans[qa.id] = [next(translated) for _ in qa.answers]
        q_trans.append(qs)
        a_trans.append(ans)

    alignments = []
    if isinstance(aligner, FileAligner):
        for job, tctx in zip(jobs, contexts):
            try:
                alignments.append(align_batch(aligner, tctx.pairs, job.sentence_base))
            except BackendError as e:
                raise PipelineError(f"{_where(job)}: {e}") from e
    else:
        all_pairs = [p for tctx in contexts for p in tctx.pairs]
        try:
            flat = align_batch(aligner, all_pairs, jobs[0].sentence_base)
        except BackendError as e:
            raise PipelineError(
                f"articles {jobs[0].ai}..{jobs[-1].ai}: alignment failed: {e}"
            ) from e
        k = 0
        for tctx in contexts:
            alignments.append(flat[k : k + len(tctx.pairs)])
            k += len(tctx.pairs)

    results = []
    for job, tctx, al, qs, ans in zip(jobs, contexts, alignments, q_trans, a_trans):
        ca = merge_sentence_alignments(tctx.src_seg, tctx.tgt_seg, al, tctx.offsets)
        results.append(_retrieve_paragraph(job, tctx, ca, qs, ans))
    return results


def _retrieve_paragraph(
    job: _ParagraphJob,
    tctx: TranslatedContext,
    ca: ContextAlignment,
    q_trans: dict[str, str],
    a_trans: dict[str, list[str]],
) -> _ParagraphResult:
    full_qas, small_qas, audit = [], [], []
    for qa in job.paragraph.qas:
        full_ans: list[Answer] = []
        small_ans: list[Answer] = []
        for m, (ans, literal) in enumerate(zip(qa.answers, a_trans[qa.id])):
            rec = {
                "id": qa.id,
                "article": job.ai,
                "paragraph": job.pi,
                "answer": m,
                "source_text": ans.text,
                "source_start": ans.answer_start,
                "literal": literal,
            }
            if not ans.span_ok:
                rec.update(
                    method=None,
                    dropped_reason=DropReason.INCONSISTENT_SOURCE.value,
                    tags=[],
                    pre_cleanup_text=None,
                    pre_cleanup_start=None,
                    text=None,
                    answer_start=None,
                )
            else:
                pre = retrieve_answer(tctx.src_seg, tctx.tgt_seg, ca, ans, literal)
                ra = cleanup_answer(pre, tctx.tgt_seg)
                tags = []
                if not pre.dropped:
                    tags = sorted(t.value for t in classify_error_risk(ra, pre.text))
                rec.update(
                    method=ra.method.value if ra.method else None,
                    dropped_reason=ra.dropped_reason.value if ra.dropped else None,
                    tags=tags,
                    pre_cleanup_text=None if pre.dropped else pre.text,
                    pre_cleanup_start=None if pre.dropped else pre.answer_start,
                    text=None if ra.dropped else ra.text,
                    answer_start=None if ra.dropped else ra.answer_start,
                )
                if not ra.dropped:
                    new = Answer(ra.text, ra.answer_start, ans.extra)
                    key = (new.text, new.answer_start)
                    if key not in {(a.text, a.answer_start) for a in full_ans}:
                        full_ans.append(new)
                        if ra.method is Method.DIRECT_MATCH:
                            small_ans.append(new)
            rec["context_sentence_mismatch"] = tctx.sentence_mismatch
            if rec["dropped_reason"]:
                log.warning(
                    "%s answer %d dropped: %s", _where(job, qa.id), m, rec["dropped_reason"]
                )
            audit.append(rec)
        if full_ans:
            full_qas.append(QA(qa.id, q_trans[qa.id], tuple(full_ans), qa.extra))
        else:
            log.warning("%s dropped: no answer survived", _where(job, qa.id))
        if small_ans:
            small_qas.append(QA(qa.id, q_trans[qa.id], tuple(small_ans), qa.extra))

    def para(qas):
        return Paragraph(tctx.text, tuple(qas), job.paragraph.extra) if qas else None

    if not full_qas:
        log.warning("%s dropped: no question survived", _where(job))
    return _ParagraphResult(job.ai, job.pi, para(full_qas), para(small_qas), audit)


# -- driver ------------------------------------------------------------------


@dataclass
class PipelineResult:
    full: Dataset
    small: Dataset | None
    audit: list[dict[str, Any]]
    stats: dict[str, DatasetStats]


def _shards(jobs: list[_ParagraphJob], n: int) -> list[list[_ParagraphJob]]:
    size, rem = divmod(len(jobs), n)
    out, k = [], 0
    for w in range(n):
        step = size + (1 if w < rem else 0)
        out.append(jobs[k : k + step])
        k += step
    return [s for s in out if s]


def _rebuild(ds: Dataset, results: list[_ParagraphResult], attr: str) -> Dataset:
    by_article: dict[int, list[Paragraph]] = {}
    for r in results:
        p = getattr(r, attr)
        if p is not None:
            by_article.setdefault(r.ai, []).append(p)
    articles = tuple(
        Article(art.title, tuple(by_article[ai]), art.extra)
        for ai, art in enumerate(ds.articles)
        if ai in by_article
    )
    return Dataset(ds.version, articles, ds.extra)


def run_pipeline(ds: Dataset, cfg: PipelineConfig) -> PipelineResult:
    jobs = []
    base = 0
    for ai, art in enumerate(ds.articles):
        for pi, par in enumerate(art.paragraphs):
            seg = build_segmented_context(par.context, cfg.abbreviations)
            jobs.append(_ParagraphJob(ai, pi, art.title, par, base, seg))
            base += len(seg.sentences)

    shards = _shards(jobs, cfg.worker_count)
    if cfg.worker_count == 1 or len(shards) <= 1:
        per_shard = [_process_shard(s, cfg) for s in shards]
    else:
        with ProcessPoolExecutor(max_workers=min(cfg.worker_count, len(shards))) as ex:
            per_shard = list(ex.map(_process_shard, shards, [cfg] * len(shards)))
    results = [r for shard in per_shard for r in shard]

    full = _rebuild(ds, results, "full")
    small = _rebuild(ds, results, "small") if cfg.emit_small_variant else None
    audit = [rec for r in results for rec in r.audit]

    total = compute_stats(ds).translated_examples
    stats = {"full": compute_stats(full, total)}
    if small is not None:
        stats["small"] = compute_stats(small, total)
    return PipelineResult(full, small, audit, stats)


def write_outputs(result: PipelineResult, prefix: str | Path) -> list[Path]:
    """Write ``<prefix>.json``, ``-small.json``, ``.audit.jsonl``, ``.stats.json``."""
    prefix = str(prefix)
    written = [Path(prefix + ".json")]
    write_dataset(result.full, written[0])
    if result.small is not None:
        written.append(Path(prefix + "-small.json"))
        write_dataset(result.small, written[-1])
    written.append(Path(prefix + ".audit.jsonl"))
    with open(written[-1], "w", encoding="utf-8", newline="\n") as f:
        for rec in result.audit:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
    written.append(Path(prefix + ".stats.json"))
    with open(written[-1], "w", encoding="utf-8", newline="\n") as f:
        json.dump({k: asdict(v) for k, v in result.stats.items()}, f, indent=2)
        f.write("\n")
    return written
