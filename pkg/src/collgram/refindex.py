"""Reference-corpus unigram/bigram frequency index.

Words are interned to integer ids while counting; bigrams are packed into a
single int64 code ``(id1 << 32) | id2`` and tallied with ``numpy.unique``.
On finalisation ids are reassigned in code-point order of the words, which
makes the packed codes sort exactly like ``(w1, w2)`` string pairs.  That
order is what ``bigrams.tsv`` is written in, and what lookups bisect over.
"""

from __future__ import annotations

import json
import logging
from array import array
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

from collgram.errors import CollgramError, IndexFormatError
from collgram.tokenizer import ProperNounMode, TokenizerConfig, word_runs

log = logging.getLogger(__name__)

FORMAT_NAME = "collgram-index"
FORMAT_VERSION = 1

_SHIFT = np.int64(32)
_LOW = np.int64(0xFFFFFFFF)
# Compact the raw bigram buffer once it holds this many codes (~400 MB).
_COMPACT_AT = 50_000_000


class FrequencyIndex:
    """Immutable view of reference counts.

    ``words`` is sorted; ``unigrams[i]`` is the count of ``words[i]``;
    ``codes``/``counts`` hold the packed bigram keys (sorted) and their counts.
    """

    def __init__(self, words, unigrams, codes, counts, total_tokens, tokenizer_fingerprint,
                 min_bigram_count=1):
        self.words: list[str] = list(words)
        self._ids = {w: i for i, w in enumerate(self.words)}
        self.unigrams = np.asarray(unigrams, dtype=np.int64)
        self.codes = np.asarray(codes, dtype=np.int64)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.total_tokens = int(total_tokens)
        self.tokenizer_fingerprint = tokenizer_fingerprint
        self.min_bigram_count = int(min_bigram_count)
        for arr in (self.unigrams, self.codes, self.counts):
            arr.setflags(write=False)

    @classmethod
    def from_counts(cls, unigram_counts: Mapping[str, int],
                    bigram_counts: Mapping[tuple[str, str], int],
                    tokenizer_fingerprint: str, total_tokens: int | None = None,
                    min_bigram_count: int = 1) -> "FrequencyIndex":
        words = sorted(unigram_counts)
        ids = {w: i for i, w in enumerate(words)}
        try:
            pairs = sorted((ids[a], ids[b], c) for (a, b), c in bigram_counts.items())
        except KeyError as exc:
            raise CollgramError(f"bigram word {exc.args[0]!r} has no unigram count") from None
        codes = [(a << 32) | b for a, b, _ in pairs]
        counts = [c for _, _, c in pairs]
        if total_tokens is None:
            total_tokens = sum(unigram_counts.values())
        return cls(words, [unigram_counts[w] for w in words], codes, counts, total_tokens,
                   tokenizer_fingerprint, min_bigram_count)

    def __repr__(self):
        return (f"FrequencyIndex(N={self.total_tokens}, types={len(self.words)}, "
                f"bigram_types={len(self.codes)})")

    def __eq__(self, other):
        if not isinstance(other, FrequencyIndex):
            return NotImplemented
        return (
            self.total_tokens == other.total_tokens
            and self.tokenizer_fingerprint == other.tokenizer_fingerprint
            and self.min_bigram_count == other.min_bigram_count
            and self.words == other.words
            and np.array_equal(self.unigrams, other.unigrams)
            and np.array_equal(self.codes, other.codes)
            and np.array_equal(self.counts, other.counts)
        )

    __hash__ = None

    def unigram_count(self, word: str) -> int | None:
        i = self._ids.get(word)
        return None if i is None else int(self.unigrams[i])

    def lookup_bigram(self, w1: str, w2: str) -> int | None:
        i = self._ids.get(w1)
        j = self._ids.get(w2)
        if i is None or j is None:
            return None
        code = (i << 32) | j
        pos = int(np.searchsorted(self.codes, code))
        if pos < len(self.codes) and self.codes[pos] == code:
            return int(self.counts[pos])
        return None

    @property
    def unigram_counts(self) -> dict[str, int]:
        return dict(zip(self.words, self.unigrams.tolist()))

    def iter_bigrams(self) -> Iterator[tuple[str, str, int]]:
        words = self.words
        for code, count in zip(self.codes.tolist(), self.counts.tolist()):
            yield words[code >> 32], words[code & 0xFFFFFFFF], count

    @property
    def bigram_counts(self) -> dict[tuple[str, str], int]:
        return {(a, b): c for a, b, c in self.iter_bigrams()}


def lookup_bigram(index: FrequencyIndex, w1: str, w2: str) -> int | None:
    return index.lookup_bigram(w1, w2)


class _Counter:
    """Streaming counter over word runs; see module docstring."""

    def __init__(self):
        self.vocab: dict[str, int] = {}
        self.unigram = array("q")
        self.buffer = array("q")
        self.codes = np.empty(0, dtype=np.int64)
        self.counts = np.empty(0, dtype=np.int64)
        self.total = 0

    def add_run(self, run: list[str]):
        vocab = self.vocab
        unigram = self.unigram
        ids = []
        for w in run:
            i = vocab.get(w)
            if i is None:
                i = vocab[w] = len(unigram)
                unigram.append(0)
            unigram[i] += 1
            ids.append(i)
        self.total += len(ids)
        if len(ids) > 1:
            self.buffer.extend([(a << 32) | b for a, b in zip(ids, ids[1:])])
            if len(self.buffer) >= _COMPACT_AT:
                self.compact()

    def compact(self):
        if not self.buffer:
            return
        raw = np.frombuffer(self.buffer, dtype=np.int64)
        codes, counts = np.unique(raw, return_counts=True)
        self.buffer = array("q")
        self.codes, self.counts = _merge(self.codes, self.counts, codes, counts.astype(np.int64))


def _merge(codes_a, counts_a, codes_b, counts_b):
    if len(codes_a) == 0:
        return codes_b, counts_b
    codes = np.concatenate([codes_a, codes_b])
    counts = np.concatenate([counts_a, counts_b])
    order = np.argsort(codes, kind="stable")
    codes, counts = codes[order], counts[order]
    starts = np.flatnonzero(np.r_[True, codes[1:] != codes[:-1]])
    return codes[starts], np.add.reduceat(counts, starts)


def build_index(reference_docs: Iterable[str], config: TokenizerConfig | None = None,
                min_bigram_count: int = 1) -> FrequencyIndex:
    """Count word unigrams and within-sentence adjacent word bigrams.

    Proper-noun detection never applies to the reference corpus.  Bigrams
    rarer than ``min_bigram_count`` are dropped after counting; their tokens
    still count toward unigrams and N.
    """
    config = config or TokenizerConfig(proper_noun_mode=ProperNounMode.OFF)
    if min_bigram_count < 1:
        raise CollgramError("min_bigram_count must be a positive integer")
    counter = _Counter()
    for n, text in enumerate(reference_docs, 1):
        for run in word_runs(text, config):
            counter.add_run(run)
        if n % 10_000 == 0:
            log.info("counted %d documents, %d tokens", n, counter.total)
    if counter.total == 0:
        raise CollgramError("empty reference corpus")
    counter.compact()

    vocab = counter.vocab
    words = sorted(vocab)
    # old id -> rank of the word in sorted order
    remap = np.empty(len(words), dtype=np.int64)
    remap[[vocab[w] for w in words]] = np.arange(len(words), dtype=np.int64)
    unigrams = np.frombuffer(counter.unigram, dtype=np.int64)[[vocab[w] for w in words]]

    codes, counts = counter.codes, counter.counts
    keep = counts >= min_bigram_count
    codes, counts = codes[keep], counts[keep]
    codes = (remap[codes >> _SHIFT] << _SHIFT) | remap[codes & _LOW]
    order = np.argsort(codes, kind="stable")
    return FrequencyIndex(words, unigrams, codes[order], counts[order], counter.total,
                          config.fingerprint, min_bigram_count)


def save_index(index: FrequencyIndex, path: str | Path) -> None:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    meta = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "total_tokens": index.total_tokens,
        "min_bigram_count": index.min_bigram_count,
        "tokenizer_fingerprint": index.tokenizer_fingerprint,
    }
    (path / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    with open(path / "unigrams.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for word, count in zip(index.words, index.unigrams.tolist()):
            fh.write(f"{word}\t{count}\n")
    with open(path / "bigrams.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for w1, w2, count in index.iter_bigrams():
            fh.write(f"{w1}\t{w2}\t{count}\n")


def _positive_int(raw: str, where: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise IndexFormatError(f"{where}: count {raw!r} is not an integer") from None
    if value < 1:
        raise IndexFormatError(f"{where}: count must be positive, got {value}")
    return value


def load_index(path: str | Path) -> FrequencyIndex:
    path = Path(path)
    meta_path = path / "meta.json"
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise IndexFormatError(f"{meta_path}: missing; not an index directory") from None
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"{meta_path}: unsupported index format ({exc})") from None
    if not isinstance(meta, dict) or meta.get("format") != FORMAT_NAME \
            or meta.get("version") != FORMAT_VERSION:
        raise IndexFormatError(f"{meta_path}: unsupported index format")
    fingerprint = meta.get("tokenizer_fingerprint")
    if not fingerprint or not isinstance(fingerprint, str):
        raise IndexFormatError(f"{meta_path}: tokenizer_fingerprint is missing")
    for key in ("total_tokens", "min_bigram_count"):
        if not isinstance(meta.get(key), int) or meta[key] < 1:
            raise IndexFormatError(f"{meta_path}: {key} must be a positive integer")

    words, unigrams = [], []
    uni_path = path / "unigrams.tsv"
    with open(uni_path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            where = f"{uni_path}:{lineno}"
            if not line.endswith("\n"):
                raise IndexFormatError(f"{where}: truncated line {line!r}")
            fields = line[:-1].split("\t")
            if len(fields) != 2 or not fields[0]:
                raise IndexFormatError(f"{where}: malformed line {line!r}")
            if words and fields[0] <= words[-1]:
                raise IndexFormatError(f"{where}: entries not strictly sorted")
            words.append(fields[0])
            unigrams.append(_positive_int(fields[1], where))
    if sum(unigrams) != meta["total_tokens"]:
        raise IndexFormatError(
            f"{uni_path}: unigram counts sum to {sum(unigrams)}, meta says {meta['total_tokens']}")

    ids = {w: i for i, w in enumerate(words)}
    codes, counts = array("q"), array("q")
    bi_path = path / "bigrams.tsv"
    prev = -1
    with open(bi_path, encoding="utf-8", newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            where = f"{bi_path}:{lineno}"
            if not line.endswith("\n"):
                raise IndexFormatError(f"{where}: truncated line {line!r}")
            fields = line[:-1].split("\t")
            if len(fields) != 3:
                raise IndexFormatError(f"{where}: malformed line {line!r}")
            try:
                code = (ids[fields[0]] << 32) | ids[fields[1]]
            except KeyError as exc:
                raise IndexFormatError(f"{where}: word {exc.args[0]!r} missing from unigrams") \
                    from None
            if code <= prev:
                raise IndexFormatError(f"{where}: entries not strictly sorted")
            prev = code
            codes.append(code)
            counts.append(_positive_int(fields[2], where))
    return FrequencyIndex(words, unigrams, np.frombuffer(codes, dtype=np.int64),
                          np.frombuffer(counts, dtype=np.int64), meta["total_tokens"],
                          fingerprint, meta["min_bigram_count"])
