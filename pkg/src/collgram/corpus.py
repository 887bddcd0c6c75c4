"""Europarl-style ingestion, length-filtered seeded sampling and doc_id alignment."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from collgram.errors import AlignmentError, CollgramError, SamplingError
from collgram.rng import SplitMix64

MARKUP_PREFIXES = ("<CHAPTER", "<SPEAKER", "<P")


@dataclass(frozen=True)
class RawDocument:
    doc_id: str
    text: str
    source_file: str = ""

    @property
    def char_count(self) -> int:
        # Code points of the stripped text, whitespace included.
        return len(self.text)


@dataclass(frozen=True)
class SamplingSpec:
    min_chars: int = 3500
    max_chars: int = 4500
    sample_size: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.min_chars > self.max_chars:
            raise CollgramError(f"min_chars {self.min_chars} exceeds max_chars {self.max_chars}")
        if self.sample_size < 1:
            raise CollgramError("sample_size must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise CollgramError("seed must be a 64-bit unsigned integer")


def _is_markup(line: str) -> bool:
    return line.lstrip().startswith(MARKUP_PREFIXES)


def parse_europarl(text: str, source: str = "doc", source_file: str | None = None) -> list[RawDocument]:
    """Split a Europarl file into one document per speaker turn.

    Markup lines are dropped, the remaining lines of a turn are joined with
    single newlines (blank lines removed).  Turns are numbered from 1 in file
    order and named ``<source>_<turn:04d>``; text before the first SPEAKER
    line is turn 0.  A file without SPEAKER lines is one document named
    ``source``.  Turns with no text are skipped.
    """
    turns: list[list[str]] = [[]]
    saw_speaker = False
    for line in text.splitlines():
        if _is_markup(line):
            if line.lstrip().startswith("<SPEAKER"):
                saw_speaker = True
                turns.append([])
            continue
        line = line.strip()
        if line:
            turns[-1].append(line)

    docs = []
    for ordinal, lines in enumerate(turns):
        body = "\n".join(lines).strip()
        if not body:
            continue
        doc_id = f"{source}_{ordinal:04d}" if saw_speaker else source
        docs.append(RawDocument(doc_id, body, source_file or source))
    return docs


def read_europarl_dir(directory: str | Path) -> list[RawDocument]:
    directory = Path(directory)
    if not directory.is_dir():
        raise CollgramError(f"{directory}: not a directory")
    docs = []
    for path in sorted(p for p in directory.iterdir() if p.is_file() and not p.name.startswith(".")):
        if path.name == "manifest.csv" or path.suffix in (".json", ".pn"):
            continue
        docs.extend(parse_europarl(path.read_text(encoding="utf-8"), path.stem, path.name))
    ids = [d.doc_id for d in docs]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise CollgramError(f"{directory}: duplicate doc_ids {', '.join(dupes)}")
    return docs


def eligible(docs: Iterable[RawDocument], spec: SamplingSpec) -> list[RawDocument]:
    return sorted((d for d in docs if spec.min_chars <= d.char_count <= spec.max_chars),
                  key=lambda d: d.doc_id)


def sample_documents(docs: Sequence[RawDocument], spec: SamplingSpec) -> list[RawDocument]:
    """Uniform sample without replacement among length-eligible documents.

    Eligible documents are put in doc_id order, then a partial Fisher-Yates
    shuffle draws ``sample_size`` of them with ``SplitMix64(seed).below``:
    step ``i`` swaps position ``i`` with ``i + below(n - i)``.  The result
    is returned in doc_id order.
    """
    pool = eligible(docs, spec)
    if len(pool) < spec.sample_size:
        raise SamplingError(
            f"only {len(pool)} eligible documents for a sample of {spec.sample_size} "
            f"({spec.min_chars}-{spec.max_chars} characters)")
    rng = SplitMix64(spec.seed)
    n = len(pool)
    for i in range(spec.sample_size):
        j = i + rng.below(n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:spec.sample_size], key=lambda d: d.doc_id)


def pair_documents(source_set: Sequence, *target_sets: Sequence) -> dict[str, tuple]:
    """Align documents (anything with a ``doc_id``) across sets.

    Returns ``doc_id -> (source_doc, target_doc, ...)`` in doc_id order.
    Extra ids in target sets are ignored.
    """
    ids = sorted({d.doc_id for d in source_set})
    lookups = []
    problems = []
    for k, target in enumerate(target_sets, 1):
        by_id = {d.doc_id: d for d in target}
        missing = [i for i in ids if i not in by_id]
        if missing:
            problems.append(f"target set {k} is missing {', '.join(missing)}")
        lookups.append(by_id)
    if problems:
        raise AlignmentError("; ".join(problems))
    source = {d.doc_id: d for d in source_set}
    return {i: (source[i], *(by_id[i] for by_id in lookups)) for i in ids}


def write_documents(docs: Iterable[RawDocument], out_dir: str | Path) -> None:
    """One ``<doc_id>.txt`` per document plus ``manifest.csv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for doc in docs:
        (out_dir / f"{doc.doc_id}.txt").write_text(doc.text + "\n", encoding="utf-8")
        rows.append((doc.doc_id, doc.char_count, doc.source_file))
    with open(out_dir / "manifest.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("doc_id", "char_count", "source_file"))
        writer.writerows(rows)
