"""Per-language frequency vocabularies and their merge into a master table."""

from __future__ import annotations

import json
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .corpus import Corpus, NerUnifyError

PAD = "<PAD>"
UNK = "<UNK>"
PAD_ID = 0
UNK_ID = 1
N_SPECIALS = 2


class VocabError(NerUnifyError, ValueError):
    pass


def normalize(surface: str) -> str:
    return unicodedata.normalize("NFC", surface)


@dataclass
class Vocabulary:
    """Kept surfaces in id order; ids start at 2 after PAD (0) and UNK (1)."""

    tokens: List[str] = field(default_factory=list)
    counts: Dict[str, int] = field(default_factory=dict)
    coverage: Optional[Fraction] = Fraction(95, 100)
    per_language_sizes: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.tokens)) != len(self.tokens):
            raise VocabError("duplicate surface in vocabulary")
        self.index = {tok: i + N_SPECIALS for i, tok in enumerate(self.tokens)}

    def __len__(self) -> int:
        return len(self.tokens) + N_SPECIALS

    def __contains__(self, surface: str) -> bool:
        return normalize(surface) in self.index

    def lookup(self, surface: str) -> int:
        return self.index.get(normalize(surface), UNK_ID)

    def id_to_surface(self, idx: int) -> str:
        if idx == PAD_ID:
            return PAD
        if idx == UNK_ID:
            return UNK
        return self.tokens[idx - N_SPECIALS]

    # -- files -------------------------------------------------------------

    def to_text(self) -> str:
        return "".join(f"{s}\n" for s in [PAD, UNK, *self.tokens])

    def sidecar(self) -> dict:
        return {
            "coverage": None if self.coverage is None else str(self.coverage),
            "per_language_sizes": dict(sorted(self.per_language_sizes.items())),
            "size": len(self),
            "counts": {tok: self.counts.get(tok, 0) for tok in self.tokens},
        }

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_files(cls, text: str, sidecar: Optional[Union[str, dict]] = None) -> "Vocabulary":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if lines[:2] != [PAD, UNK]:
            raise VocabError("vocabulary file must start with <PAD> and <UNK> header lines")
        meta = json.loads(sidecar) if isinstance(sidecar, str) else (sidecar or {})
        coverage = meta.get("coverage")
        return cls(
            tokens=lines[2:],
            counts=dict(meta.get("counts", {})),
            coverage=None if coverage is None else Fraction(coverage),
            per_language_sizes=dict(meta.get("per_language_sizes", {})),
        )


def count_types(surfaces: Iterable[str]) -> Counter:
    return Counter(normalize(s) for s in surfaces)


def _rank(counts: Dict[str, int]) -> List[str]:
    return sorted(counts, key=lambda s: (-counts[s], s))


def kept_type_count(n_types: int, coverage) -> int:
    coverage = Fraction(str(coverage)) if not isinstance(coverage, Fraction) else coverage
    if not 0 < coverage <= 1:
        raise VocabError(f"coverage must be in (0, 1], got {coverage}")
    return math.ceil(coverage * n_types)


def build_language_vocab(
    corpus: Union[Corpus, Sequence],
    coverage=Fraction(95, 100),
    language: Optional[str] = None,
) -> Vocabulary:
    """Keep the most frequent ``ceil(coverage * T)`` of the T distinct word types.

    Types are ranked by descending frequency with ties broken by the
    surface string, and ids follow that ranking.
    """
    coverage = coverage if isinstance(coverage, Fraction) else Fraction(str(coverage))
    if not 0 < coverage <= 1:
        raise VocabError(f"coverage must be in (0, 1], got {coverage}")
    sentences = list(corpus)
    languages = {s.language for s in sentences}
    if language is None:
        if len(languages) > 1:
            raise VocabError(f"corpus mixes languages {sorted(languages)}; build one per language")
        language = next(iter(languages), None)
    elif languages - {language}:
        raise VocabError(f"corpus contains languages other than {language!r}")
    counts = count_types(tok.surface for s in sentences for tok in s.tokens)
    ranked = _rank(counts)[:kept_type_count(len(counts), coverage)]
    sizes = {language: len(ranked)} if language is not None else {}
    return Vocabulary(ranked, {s: counts[s] for s in ranked}, coverage, sizes)


def merge_vocabs(vocabs: Sequence[Vocabulary]) -> Vocabulary:
    """Union of the kept surfaces, re-ranked by total frequency across inputs."""
    if not vocabs:
        raise VocabError("merge_vocabs needs at least one vocabulary")
    totals: Counter = Counter()
    sizes: Dict[str, int] = {}
    for v in vocabs:
        for tok in v.tokens:
            totals[tok] += v.counts.get(tok, 0)
        sizes.update(v.per_language_sizes)
    coverages = {v.coverage for v in vocabs}
    coverage = coverages.pop() if len(coverages) == 1 else None
    ranked = _rank(totals)
    return Vocabulary(ranked, dict(totals), coverage, sizes)


def build_master_vocab(
    corpora_by_language: Dict[str, Corpus], coverage=Fraction(95, 100)
) -> Tuple[Vocabulary, Dict[str, Vocabulary]]:
    per_language = {
        lang: build_language_vocab(corpus, coverage, language=lang)
        for lang, corpus in sorted(corpora_by_language.items())
    }
    return merge_vocabs(list(per_language.values())), per_language


def split_by_language(corpus: Corpus) -> Dict[str, List]:
    groups: Dict[str, List] = {}
    for sent in corpus:
        groups.setdefault(sent.language, []).append(sent)
    return groups
