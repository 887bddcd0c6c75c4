"""MI and t-score for bigrams, collocational thresholds and document profiles."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path
from typing import Iterable

from collgram.errors import CollgramError, InconsistentFrequencies, TokenizerMismatch
from collgram.refindex import FrequencyIndex
from collgram.tokenizer import TokenizedDocument, extract_bigrams

log = logging.getLogger(__name__)

MI_THRESHOLD = 5.0
T_THRESHOLD = 6.0

PROFILE_FIELDS = (
    "doc_id", "bigrams_total", "bigrams_scored", "high_mi", "high_t",
    "pct_high_mi", "pct_high_t", "ratio",
)
NO_SCORED_BIGRAMS = "no-scored-bigrams"


@dataclass(frozen=True)
class AssociationScores:
    observed: int
    f1: int
    f2: int
    n: int
    expected: float
    mi: float
    t: float


def score_bigram(observed: int, f1: int, f2: int, n: int) -> AssociationScores:
    """Score one bigram from reference counts.

    ``mi = log2(O*N / (f1*f2))`` and ``t = (O - E) / sqrt(O)`` with
    ``E = f1*f2 / N``.  Products are formed on Python ints, so the only
    rounding is the final division; independence gives exactly 0.
    """
    for value in (observed, f1, f2, n):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise InconsistentFrequencies(
                f"inconsistent frequencies: O={observed}, f1={f1}, f2={f2}, N={n}")
    if observed > min(f1, f2) or max(f1, f2) > n:
        raise InconsistentFrequencies(
            f"inconsistent frequencies: O={observed}, f1={f1}, f2={f2}, N={n}")
    expected = f1 * f2 / n
    mi = math.log2(observed * n / (f1 * f2))
    t = (observed - expected) / math.sqrt(observed)
    return AssociationScores(observed, f1, f2, n, expected, mi, t)


def is_highly_collocational_mi(scores: AssociationScores) -> bool:
    return scores.mi >= MI_THRESHOLD


def is_highly_collocational_t(scores: AssociationScores) -> bool:
    return scores.t >= T_THRESHOLD


@dataclass(frozen=True)
class DocumentProfile:
    doc_id: str
    bigrams_total: int
    bigrams_scored: int
    high_mi: int
    high_t: int
    pct_high_mi: float | None
    pct_high_t: float | None
    ratio: float | None
    warning: str | None = None

    def index_value(self, name: str) -> float | None:
        if name not in ("pct_high_mi", "pct_high_t", "ratio"):
            raise KeyError(name)
        return getattr(self, name)


def make_profile(doc_id, bigrams_total, bigrams_scored, high_mi, high_t) -> DocumentProfile:
    if bigrams_scored == 0:
        return DocumentProfile(doc_id, bigrams_total, 0, 0, 0, None, None, None,
                               NO_SCORED_BIGRAMS)
    pct_mi = 100.0 * high_mi / bigrams_scored
    pct_t = 100.0 * high_t / bigrams_scored
    ratio = pct_t / pct_mi if pct_mi > 0 else None
    return DocumentProfile(doc_id, bigrams_total, bigrams_scored, high_mi, high_t,
                           pct_mi, pct_t, ratio)


def profile_document(doc: TokenizedDocument, index: FrequencyIndex,
                     type_level: bool = False) -> DocumentProfile:
    """Compute the three CollGram indices of one tokenized document.

    Percentages are taken over the bigrams attested in the reference index.
    Occurrences are counted with multiplicity unless ``type_level`` is set,
    in which case each distinct bigram counts once.
    """
    if doc.fingerprint != index.tokenizer_fingerprint:
        raise TokenizerMismatch(
            f"tokenizer mismatch: document {doc.doc_id!r} was tokenized with "
            f"{doc.fingerprint[:12] or '<none>'}, index expects {index.tokenizer_fingerprint[:12]}")
    bigrams = [(b.w1, b.w2) for b in extract_bigrams(doc)]
    if type_level:
        bigrams = list(dict.fromkeys(bigrams))

    n = index.total_tokens
    cache: dict[tuple[str, str], AssociationScores | None] = {}
    scored = high_mi = high_t = 0
    for pair in bigrams:
        if pair in cache:
            s = cache[pair]
        else:
            observed = index.lookup_bigram(*pair)
            s = None
            if observed is not None:
                s = score_bigram(observed, index.unigram_count(pair[0]),
                                 index.unigram_count(pair[1]), n)
            cache[pair] = s
        if s is None:
            continue
        scored += 1
        high_mi += s.mi >= MI_THRESHOLD
        high_t += s.t >= T_THRESHOLD

    profile = make_profile(doc.doc_id, len(bigrams), scored, high_mi, high_t)
    if profile.warning:
        log.warning("%s: no bigram found in the reference index", doc.doc_id)
    return profile


def format_float(value: float | None) -> str:
    """Six decimals, round-half-even on the exact binary value; None -> ''."""
    if value is None:
        return ""
    if not math.isfinite(value):
        return repr(value)
    return str(Decimal(value).quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN))


def write_profiles(profiles: Iterable[DocumentProfile], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PROFILE_FIELDS)
        for p in profiles:
            writer.writerow([
                p.doc_id, p.bigrams_total, p.bigrams_scored, p.high_mi, p.high_t,
                format_float(p.pct_high_mi), format_float(p.pct_high_t), format_float(p.ratio),
            ])


def read_profiles(path: str | Path) -> list[DocumentProfile]:
    def opt(raw):
        return float(raw) if raw != "" else None

    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != PROFILE_FIELDS:
            raise CollgramError(f"{path}: not a profile CSV (header {header!r})")
        for lineno, row in enumerate(reader, 2):
            if len(row) != len(PROFILE_FIELDS):
                raise CollgramError(f"{path}:{lineno}: expected {len(PROFILE_FIELDS)} fields")
            try:
                ints = [int(v) for v in row[1:5]]
                floats = [opt(v) for v in row[5:]]
            except ValueError as exc:
                raise CollgramError(f"{path}:{lineno}: {exc}") from None
            warning = NO_SCORED_BIGRAMS if ints[1] == 0 else None
            out.append(DocumentProfile(row[0], *ints, *floats, warning))
    return out
