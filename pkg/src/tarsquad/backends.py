"""Translator and word-aligner backends.

Backends are selected with a ``kind[:param]`` string:

* translators: ``identity``, ``cache:PATH``, ``lexicon:PATH``, ``cmd:COMMAND``
* aligners: ``identity``, ``file:PATH``, ``ibm1:PATH``, ``cmd:COMMAND``

External commands speak a line protocol: UTF-8 lines on stdin, exactly one
output line per input line on stdout. Aligner commands receive
``src tokens ||| tgt tokens`` lines and must answer with Pharaoh lines.
"""

from __future__ import annotations

import logging
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .ibm1 import LexicalTable, ibm1_align

log = logging.getLogger(__name__)

TRANSLATOR_KINDS = ("identity", "cache", "lexicon", "external-command")
ALIGNER_KINDS = ("identity", "file", "ibm1", "external-command")
_ALIASES = {"cmd": "external-command"}


class BackendError(RuntimeError):
    pass


class CacheMissError(BackendError):
    def __init__(self, line: str):
        self.line = line
        super().__init__(f"no cached translation for source line: {line!r}")


class ExternalCommandError(BackendError):
    pass


@dataclass(frozen=True)
class TranslatorSpec:
    kind: str
    param: str | None = None

    def __post_init__(self):
        _check_spec(self.kind, self.param, TRANSLATOR_KINDS, "translator")


@dataclass(frozen=True)
class AlignerSpec:
    kind: str
    param: str | None = None

    def __post_init__(self):
        _check_spec(self.kind, self.param, ALIGNER_KINDS, "aligner")


def _check_spec(kind, param, kinds, what):
    if kind not in kinds:
        raise ValueError(f"unknown {what} kind {kind!r}; expected one of {kinds}")
    if kind == "identity":
        if param:
            raise ValueError(f"identity {what} takes no parameter")
    elif not param:
        raise ValueError(f"{what} kind {kind!r} needs a parameter ({kind}:...)")


def _split_kind(text: str) -> tuple[str, str | None]:
    kind, sep, param = text.partition(":")
    kind = _ALIASES.get(kind.strip(), kind.strip())
    return kind, (param if sep else None)


def parse_translator(text: str) -> TranslatorSpec:
    return TranslatorSpec(*_split_kind(text))


def parse_aligner(text: str) -> AlignerSpec:
    return AlignerSpec(*_split_kind(text))


# -- Pharaoh -----------------------------------------------------------------


@dataclass(frozen=True)
class TokenAlignment:
    pairs: frozenset[tuple[int, int]]

    def check(self, n_src: int, n_tgt: int) -> None:
        for i, j in self.pairs:
            if not (0 <= i < n_src and 0 <= j < n_tgt):
                raise BackendError(
                    f"alignment pair {i}-{j} out of range for {n_src}x{n_tgt} tokens"
                )


def parse_pharaoh(line: str) -> TokenAlignment:
    """Parse ``"0-0 1-2 2-1"``."""
    pairs = set()
    for item in line.split():
        i, sep, j = item.partition("-")
        if not sep or not i.isdigit() or not j.isdigit():
            raise ValueError(f"malformed Pharaoh link {item!r}")
        pairs.add((int(i), int(j)))
    return TokenAlignment(frozenset(pairs))


def format_pharaoh(alignment: TokenAlignment) -> str:
    return " ".join(f"{i}-{j}" for i, j in sorted(alignment.pairs))


# -- external commands -----------------------------------------------------


def run_line_command(command: str, lines: Sequence[str]) -> list[str]:
    """Pipe ``lines`` through a shell command, one output line per input line."""
    if not lines:
        return []
    payload = "".join(line + "\n" for line in lines)
    try:
        proc = subprocess.run(
            command,
            shell=True,
            input=payload.encode("utf-8"),
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            check=False,
        )
    except OSError as e:
        raise ExternalCommandError(f"cannot run {command!r}: {e}") from e
    if proc.returncode != 0:
        err = proc.stderr.decode("utf-8", "replace").strip()
        raise ExternalCommandError(
            f"command {command!r} exited with status {proc.returncode}: {err}"
        )
    out = proc.stdout.decode("utf-8").split("\n")
    if out and out[-1] == "":
        out.pop()
    if len(out) != len(lines):
        raise ExternalCommandError(
            f"command {command!r} returned {len(out)} lines for {len(lines)} inputs"
        )
    return [line.rstrip("\r") for line in out]


# -- translators -------------------------------------------------------------


def _read_tsv_pairs(path: str | Path) -> dict[str, str]:
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            src, sep, tgt = line.partition("\t")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected source<TAB>translation")
            table.setdefault(src, tgt)
    return table


class Translator:
    def translate_batch(self, lines: Sequence[str]) -> list[str]:
        raise NotImplementedError


class IdentityTranslator(Translator):
    def translate_batch(self, lines):
        return list(lines)


class CacheTranslator(Translator):
    """Exact-string lookup in a TSV cache; first entry for a source wins."""

    def __init__(self, path: str | Path, strict: bool = True):
        self.table = _read_tsv_pairs(path)
        self.strict = strict

    def translate_batch(self, lines):
        out = []
        for line in lines:
            hit = self.table.get(line)
            if hit is None:
                if self.strict:
                    raise CacheMissError(line)
                log.warning("cache miss, passing through: %r", line)
                hit = line
            out.append(hit)
        return out


class LexiconTranslator(Translator):
    """Whitespace word-by-word substitution; unknown words pass through."""

    def __init__(self, path: str | Path):
        self.table = _read_tsv_pairs(path)

    def translate_batch(self, lines):
        return [" ".join(self.table.get(w, w) for w in line.split()) for line in lines]


class CommandTranslator(Translator):
    def __init__(self, command: str):
        self.command = command

    def translate_batch(self, lines):
        return run_line_command(self.command, lines)


def make_translator(spec: TranslatorSpec, strict: bool = True) -> Translator:
    if spec.kind == "identity":
        return IdentityTranslator()
    if spec.kind == "cache":
        return CacheTranslator(spec.param, strict=strict)
    if spec.kind == "lexicon":
        return LexiconTranslator(spec.param)
    return CommandTranslator(spec.param)


def translate_batch(
    spec: TranslatorSpec | Translator, lines: Sequence[str], strict: bool = True
) -> list[str]:
    """Translate ``lines`` in order; result has the same length."""
    for line in lines:
        if "\n" in line or "\r" in line:
            raise ValueError(f"line contains a newline: {line!r}")
    translator = spec if isinstance(spec, Translator) else make_translator(spec, strict)
    out = translator.translate_batch(lines)
    if len(out) != len(lines):
        raise BackendError(f"translator returned {len(out)} lines for {len(lines)}")
    return out


# -- aligners ----------------------------------------------------------------


class Aligner:
    """Aligns sentence pairs; ``index`` is the pair's position in the run."""

    def align_batch(
        self, pairs: Sequence[tuple[Sequence[str], Sequence[str]]], first_index: int = 0
    ) -> list[TokenAlignment]:
        raise NotImplementedError


class IdentityAligner(Aligner):
    def align_batch(self, pairs, first_index=0):
        return [
            TokenAlignment(frozenset((i, i) for i in range(min(len(s), len(t)))))
            for s, t in pairs
        ]


class FileAligner(Aligner):
    """Pharaoh file, line ``k`` holds the alignment of sentence pair ``k``."""

    def __init__(self, path: str | Path):
        self.path = path
        with open(path, encoding="utf-8") as f:
            self.lines = [line.rstrip("\n") for line in f]

    def align_batch(self, pairs, first_index=0):
        out = []
        for k in range(first_index, first_index + len(pairs)):
            if k >= len(self.lines):
                raise BackendError(f"{self.path}: no alignment line for sentence pair {k}")
            try:
                out.append(parse_pharaoh(self.lines[k]))
            except ValueError as e:
                raise BackendError(f"{self.path}:{k + 1}: {e}") from e
        return out


class Ibm1Aligner(Aligner):
    def __init__(self, table: LexicalTable | str | Path):
        self.table = table if isinstance(table, LexicalTable) else LexicalTable.load(table)

    def align_batch(self, pairs, first_index=0):
        return [TokenAlignment(ibm1_align(self.table, s, t)) for s, t in pairs]


class CommandAligner(Aligner):
    def __init__(self, command: str):
        self.command = command

    def align_batch(self, pairs, first_index=0):
        lines = [" ".join(s) + " ||| " + " ".join(t) for s, t in pairs]
        out = []
        for k, line in enumerate(run_line_command(self.command, lines)):
            try:
                out.append(parse_pharaoh(line))
            except ValueError as e:
                raise ExternalCommandError(
                    f"command {self.command!r}, output line {k + 1}: {e}"
                ) from e
        return out


def make_aligner(spec: AlignerSpec) -> Aligner:
    if spec.kind == "identity":
        return IdentityAligner()
    if spec.kind == "file":
        return FileAligner(spec.param)
    if spec.kind == "ibm1":
        return Ibm1Aligner(spec.param)
    return CommandAligner(spec.param)


def align_batch(
    aligner: Aligner,
    pairs: Sequence[tuple[Sequence[str], Sequence[str]]],
    first_index: int = 0,
) -> list[TokenAlignment]:
    """Align pairs and check every link is in range.

    Pairs with an empty side get an empty alignment without consulting the
    backend, but still consume their index.
    """
    live = [k for k, (s, t) in enumerate(pairs) if s and t]
    out = [TokenAlignment(frozenset())] * len(pairs)
    if isinstance(aligner, FileAligner):
        # file lines are addressed by absolute pair index
        for k in live:
            out[k] = aligner.align_batch([pairs[k]], first_index + k)[0]
    else:
        for k, al in zip(live, aligner.align_batch([pairs[k] for k in live])):
            out[k] = al
    for (s, t), al in zip(pairs, out):
        al.check(len(s), len(t))
    return out


def align_sentence_pair(
    spec: AlignerSpec | Aligner,
    src_tokens: Sequence[str],
    tgt_tokens: Sequence[str],
    index: int = 0,
) -> TokenAlignment:
    if not src_tokens or not tgt_tokens:
        raise ValueError("both token lists must be non-empty")
    aligner = spec if isinstance(spec, Aligner) else make_aligner(spec)
    return align_batch(aligner, [(src_tokens, tgt_tokens)], index)[0]
