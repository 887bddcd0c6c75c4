"""Rule-based tokenizer, sentence segmenter and proper-noun flagging.

Token rule: a word-like token is a maximal run of Unicode letters/digits,
optionally joined by apostrophes that have a letter on both sides
(``don't`` stays whole).  Every other non-whitespace character is a
one-character punctuation token, so hyphenated forms split at the hyphen.
Runs without any letter (``2022``) are kept as tokens but are not words.

A sentence ends after ``.``, ``!`` or ``?`` when whitespace follows and the
next token starts with an uppercase letter or a digit, and at every blank
line.  Bigrams never cross a sentence boundary or a non-word token.
"""

from __future__ import annotations

import hashlib
import json
import re
import unicodedata
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterator, NamedTuple

from collgram.errors import CollgramError

# Bump whenever a change to the rules below can alter token boundaries,
# sentence boundaries or folded forms; it feeds the config fingerprint.
RULES_VERSION = 1

_LETTER = r"[^\W\d_]"
_WORD_APOS = rf"(?:[^\W_]|(?<={_LETTER})['’](?={_LETTER}))+"
_WORD_PLAIN = r"[^\W_]+"
_TOKEN_APOS = re.compile(rf"({_WORD_APOS})|(\S)")
_TOKEN_PLAIN = re.compile(rf"({_WORD_PLAIN})|(\S)")
_HAS_LETTER = re.compile(_LETTER)
_PARAGRAPH = re.compile(r"\n[^\S\n]*\n")
_TERMINATORS = frozenset(".!?")


class ProperNounMode(str, Enum):
    HEURISTIC = "heuristic"
    TAG_FILE = "tag_file"
    OFF = "off"


@dataclass(frozen=True)
class TokenizerConfig:
    case_fold: bool = True
    keep_internal_apostrophes: bool = True
    proper_noun_mode: ProperNounMode = ProperNounMode.HEURISTIC

    def __post_init__(self):
        object.__setattr__(self, "proper_noun_mode", ProperNounMode(self.proper_noun_mode))

    @property
    def fingerprint(self) -> str:
        """Hex digest of every setting that affects folded token streams.

        ``proper_noun_mode`` is excluded: the reference index is always built
        with detection off while profiled documents normally use it.
        """
        payload = json.dumps(
            {
                "rules": RULES_VERSION,
                "case_fold": self.case_fold,
                "keep_internal_apostrophes": self.keep_internal_apostrophes,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    folded: str
    sentence_index: int
    is_word: bool
    is_proper_noun: bool = False


@dataclass(frozen=True)
class TokenizedDocument:
    doc_id: str
    tokens: tuple[Token, ...]
    sentence_count: int
    fingerprint: str = ""

    def __len__(self):
        return len(self.tokens)

    @property
    def word_count(self) -> int:
        return sum(1 for t in self.tokens if t.is_word)


class BigramOccurrence(NamedTuple):
    w1: str
    w2: str
    position: int


def _scan(text: str, keep_apostrophes: bool) -> Iterator[tuple[str, bool, int]]:
    """Yield ``(surface, is_word, sentence_index)`` for every token."""
    text = unicodedata.normalize("NFC", text)
    pattern = _TOKEN_APOS if keep_apostrophes else _TOKEN_PLAIN
    has_letter = _HAS_LETTER.search
    sentence = 0
    prev_end = -1
    prev_terminal = False
    for m in pattern.finditer(text):
        start = m.start()
        word = m.group(1)
        surface = word if word is not None else m.group(2)
        if prev_end >= 0 and start > prev_end:
            first = surface[0]
            if (prev_terminal and (first.isupper() or first.isdigit())) or _PARAGRAPH.search(
                text, prev_end, start
            ):
                sentence += 1
        yield surface, word is not None and has_letter(word) is not None, sentence
        prev_end = m.end()
        prev_terminal = word is None and surface in _TERMINATORS


def tokenize(text: str, config: TokenizerConfig | None = None, doc_id: str = "") -> TokenizedDocument:
    config = config or TokenizerConfig()
    fold = str.casefold if config.case_fold else None
    tokens = []
    last_sentence = -1
    for surface, is_word, sentence in _scan(text, config.keep_internal_apostrophes):
        folded = fold(surface) if fold else surface
        tokens.append(Token(surface, folded, sentence, is_word))
        last_sentence = sentence
    return TokenizedDocument(doc_id, tuple(tokens), last_sentence + 1, config.fingerprint)


def word_runs(text: str, config: TokenizerConfig) -> Iterator[list[str]]:
    """Yield folded forms of maximal runs of adjacent word tokens.

    A run ends at any non-word token and at every sentence boundary, so the
    bigrams of a document are exactly the consecutive pairs inside its runs.
    This is the allocation-light path used when counting reference corpora;
    it applies no proper-noun detection.
    """
    fold = config.case_fold
    run: list[str] = []
    current = 0
    for surface, is_word, sentence in _scan(text, config.keep_internal_apostrophes):
        if sentence != current or not is_word:
            if run:
                yield run
                run = []
            current = sentence
        if is_word:
            run.append(surface.casefold() if fold else surface)
    if run:
        yield run


def read_tag_file(path: str | Path) -> list[bool]:
    flags = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            value = line.rstrip("\r\n")
            if value not in ("0", "1"):
                raise CollgramError(f"{path}:{lineno}: expected '0' or '1', got {value!r}")
            flags.append(value == "1")
    return flags


def detect_proper_nouns(
    doc: TokenizedDocument,
    mode: ProperNounMode | str = ProperNounMode.HEURISTIC,
    tag_file: str | Path | None = None,
) -> TokenizedDocument:
    mode = ProperNounMode(mode)
    if mode is ProperNounMode.OFF:
        flags = [False] * len(doc.tokens)
    elif mode is ProperNounMode.TAG_FILE:
        if tag_file is None:
            raise CollgramError(f"{doc.doc_id}: tag_file mode requires a tag file")
        tags = read_tag_file(tag_file)
        if len(tags) != len(doc.tokens):
            raise CollgramError(
                f"{doc.doc_id}: tag file has {len(tags)} lines but document has "
                f"{len(doc.tokens)} tokens"
            )
        flags = [tag and tok.is_word for tag, tok in zip(tags, doc.tokens)]
    else:
        flags = _heuristic_flags(doc.tokens)
    tokens = tuple(replace(tok, is_proper_noun=flag) for tok, flag in zip(doc.tokens, flags))
    return replace(doc, tokens=tokens)


def _heuristic_flags(tokens) -> list[bool]:
    # Sentence-initial means the first word token of its sentence.
    initial = [False] * len(tokens)
    seen_sentence = -1
    for i, tok in enumerate(tokens):
        if tok.is_word and tok.sentence_index != seen_sentence:
            initial[i] = True
            seen_sentence = tok.sentence_index

    def capitalised(tok):
        return tok.is_word and tok.surface[0].isupper()

    attested = {tok.surface for i, tok in enumerate(tokens) if capitalised(tok) and not initial[i]}
    return [
        capitalised(tok) and (not initial[i] or tok.surface in attested)
        for i, tok in enumerate(tokens)
    ]


def extract_bigrams(doc: TokenizedDocument) -> list[BigramOccurrence]:
    out = []
    tokens = doc.tokens
    for i in range(len(tokens) - 1):
        a, b = tokens[i], tokens[i + 1]
        if (
            a.is_word
            and b.is_word
            and not a.is_proper_noun
            and not b.is_proper_noun
            and a.sentence_index == b.sentence_index
        ):
            out.append(BigramOccurrence(a.folded, b.folded, i))
    return out
