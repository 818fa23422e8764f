"""Command line interface: ``tarsquad <command> [flags]``.

Data goes to files or stdout, logs to stderr. Exit status is 1 on any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from dataclasses import asdict

from . import __version__
from .backends import BackendError, parse_aligner, parse_translator
from .evaluation import ARTICLES, read_predictions, score
from .ibm1 import KERNEL, train_ibm1
from .pipeline import (
    PipelineConfig,
    PipelineError,
    compute_stats,
    format_stats_table,
    run_pipeline,
    write_outputs,
)
from .segmentation import load_abbreviations
from .squad import DatasetError, read_dataset

log = logging.getLogger("tarsquad")


class UsageError(Exception):
    pass


def _backend(value: str | None, cmd: str | None, what: str, parse):
    if value and cmd:
        raise UsageError(f"give either --{what} or --{what}-cmd, not both")
    if cmd:
        value = "cmd:" + cmd
    if not value:
        raise UsageError(f"--{what} or --{what}-cmd is required")
    try:
        return parse(value)
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_translate(args) -> int:
    translator = _backend(args.translator, args.translator_cmd, "translator", parse_translator)
    aligner = _backend(args.aligner, args.aligner_cmd, "aligner", parse_aligner)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    abbreviations = load_abbreviations(args.abbrev_file) if args.abbrev_file else None
    cfg = PipelineConfig(
        translator=translator,
        aligner=aligner,
        emit_small_variant=args.small,
        lenient=args.lenient,
        worker_count=args.workers,
        abbreviations=abbreviations,
    )
    ds = read_dataset(args.input, lenient=args.lenient)
    result = run_pipeline(ds, cfg)
    for path in write_outputs(result, args.output_prefix):
        log.info("wrote %s", path)
    sys.stdout.write(format_stats_table(result.stats))
    return 0


def cmd_stats(args) -> int:
    ds = read_dataset(args.input, lenient=args.lenient)
    total = args.total
    if args.source:
        total = compute_stats(read_dataset(args.source, lenient=args.lenient)).translated_examples
    stats = compute_stats(ds, total)
    if args.json:
        json.dump(asdict(stats), sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(format_stats_table({args.name: stats}))
    return 0


def cmd_audit_report(args) -> int:
    methods, reasons, tags = Counter(), Counter(), Counter()
    total = mismatched = 0
    with open(args.audit, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as e:
                raise UsageError(f"{args.audit}:{lineno}: {e}") from None
            total += 1
            methods[rec.get("method") or "none"] += 1
            if rec.get("dropped_reason"):
                reasons[rec["dropped_reason"]] += 1
            tags.update(rec.get("tags", []))
            mismatched += bool(rec.get("context_sentence_mismatch"))
    report = {
        "answers": total,
        "by_method": dict(sorted(methods.items())),
        "dropped": dict(sorted(reasons.items())),
        "tags": dict(sorted(tags.items())),
        "context_sentence_mismatch": mismatched,
    }
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def cmd_eval(args) -> int:
    gold = read_dataset(args.gold, lenient=True)
    preds = read_predictions(args.pred)
    report = score(gold, preds, args.language)
    json.dump(report.to_json(), sys.stdout)
    sys.stdout.write("\n")
    return 0


def _read_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [line.rstrip("\n") for line in f]


def cmd_align_train(args) -> int:
    if args.iters < 1:
        raise UsageError("--iters must be >= 1")
    src = _read_lines(args.src)
    tgt = _read_lines(args.tgt)
    if len(src) != len(tgt):
        raise UsageError(
            f"line count mismatch: {args.src} has {len(src)}, {args.tgt} has {len(tgt)}"
        )
    corpus = [(s.split(), t.split()) for s, t in zip(src, tgt)]
    log.info("training IBM-1 on %d pairs with the %s kernel", len(corpus), KERNEL)
    table = train_ibm1(corpus, args.iters)
    for k, ll in enumerate(table.log_likelihoods):
        log.info("iteration %d log-likelihood %.6f", k, ll)
    table.save(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tarsquad",
        description="Translate SQuAD v1.1 datasets and re-anchor answers by word alignment.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("translate", help="translate a dataset and retrieve answers")
    t.add_argument("--input", required=True, help="SQuAD v1.1 JSON to translate")
    t.add_argument(
        "--output-prefix", required=True,
        help="writes PREFIX.json, PREFIX-small.json, PREFIX.audit.jsonl, PREFIX.stats.json",
    )
    t.add_argument(
        "--translator",
        help="identity | cache:TSV | lexicon:TSV | cmd:COMMAND",
    )
    t.add_argument("--translator-cmd", help="shell command, same as --translator cmd:COMMAND")
    t.add_argument("--aligner", help="identity | file:PHARAOH | ibm1:TABLE | cmd:COMMAND")
    t.add_argument("--aligner-cmd", help="shell command, same as --aligner cmd:COMMAND")
    t.add_argument(
        "--small", action="store_true",
        help="also write the direct-match-only variant PREFIX-small.json",
    )
    t.add_argument(
        "--lenient", action="store_true",
        help="keep going on inconsistent source spans and translation cache misses",
    )
    t.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    t.add_argument("--abbrev-file", help="sentence splitter abbreviation list, one per line")
    t.set_defaults(func=cmd_translate)

    s = sub.add_parser("stats", help="example counts and average token lengths")
    s.add_argument("--input", required=True, help="SQuAD v1.1 JSON")
    s.add_argument("--source", help="original dataset; its example count is the total")
    s.add_argument("--total", type=int, help="total example count to report against")
    s.add_argument("--name", default="dataset", help="column name in the table")
    s.add_argument("--json", action="store_true", help="print JSON instead of a table")
    s.add_argument("--lenient", action="store_true", help="tolerate inconsistent spans")
    s.set_defaults(func=cmd_stats)

    a = sub.add_parser("audit-report", help="summarize an audit JSONL file")
    a.add_argument("--audit", required=True, help="PREFIX.audit.jsonl from translate")
    a.set_defaults(func=cmd_audit_report)

    e = sub.add_parser("eval", help="Exact Match / F1 of predictions against gold")
    e.add_argument("--gold", required=True, help="gold SQuAD v1.1 JSON")
    e.add_argument("--pred", required=True, help="JSON object mapping question id to answer")
    e.add_argument(
        "--language", default="es", choices=sorted(ARTICLES),
        help="normalization language (default es)",
    )
    e.set_defaults(func=cmd_eval)

    g = sub.add_parser("align-train", help="train an IBM Model 1 lexical table")
    g.add_argument("--src", required=True, help="tokenized source sentences, one per line")
    g.add_argument("--tgt", required=True, help="tokenized target sentences, line-aligned")
    g.add_argument("--iters", type=int, default=5, help="EM iterations (default 5)")
    g.add_argument("--out", required=True, help="output TSV: src<TAB>tgt<TAB>prob")
    g.set_defaults(func=cmd_align_train)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (UsageError, DatasetError, PipelineError, BackendError, OSError, ValueError) as e:
        print(f"tarsquad {args.command}: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
