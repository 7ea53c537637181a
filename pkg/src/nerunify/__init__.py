"""Curate, unify, train and evaluate multilingual IOB2 NER corpora."""

__version__ = "0.1.0"

from .corpus import (  # noqa: E402
    Corpus,
    EntitySpan,
    EntityType,
    Sentence,
    Token,
    encode_entities,
    extract_entities,
    parse_conll,
    repair_iob2,
    serialize_conll,
    validate_iob2,
)
from .mapping import MappingSpec, NumexPolicy, annotate_numex, map_tags  # noqa: E402
from .metrics import MetricsReport, diff_report, evaluate  # noqa: E402
from .splits import SplitRecipe, compose_splits  # noqa: E402
from .tagger import TaggerModel, sweep, train, viterbi_decode  # noqa: E402
from .vocab import Vocabulary, build_language_vocab, merge_vocabs  # noqa: E402

__all__ = [
    "Corpus", "EntitySpan", "EntityType", "Sentence", "Token",
    "encode_entities", "extract_entities", "parse_conll", "repair_iob2",
    "serialize_conll", "validate_iob2",
    "MappingSpec", "NumexPolicy", "annotate_numex", "map_tags",
    "MetricsReport", "diff_report", "evaluate",
    "SplitRecipe", "compose_splits",
    "TaggerModel", "sweep", "train", "viterbi_decode",
    "Vocabulary", "build_language_vocab", "merge_vocabs",
]
