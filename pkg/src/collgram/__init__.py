"""CollGram phraseological profiling against a reference-corpus frequency index."""

__version__ = "0.1.0"

from collgram.errors import CollgramError
from collgram.tokenizer import TokenizerConfig, tokenize, detect_proper_nouns, extract_bigrams
from collgram.refindex import FrequencyIndex, build_index, load_index, save_index
from collgram.assoc import DocumentProfile, profile_document, score_bigram
from collgram.stats import compare_sets, paired_t_test, t_cdf

__all__ = [
    "CollgramError",
    "TokenizerConfig",
    "tokenize",
    "detect_proper_nouns",
    "extract_bigrams",
    "FrequencyIndex",
    "build_index",
    "load_index",
    "save_index",
    "DocumentProfile",
    "profile_document",
    "score_bigram",
    "compare_sets",
    "paired_t_test",
    "t_cdf",
]
