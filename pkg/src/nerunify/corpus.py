"""Corpus data model, CoNLL reading/writing and IOB2 chunk handling."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

UNIFIED = "unified"
OUTSIDE = "O"

_FIELD_SEP = re.compile(r"[ \t\r\n\f\v]+")
_TAG_RE = re.compile(r"^([BI])-(\S+)$")


class NerUnifyError(Exception):
    """Base class for data errors raised by this package."""


class ConllParseError(NerUnifyError, ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class IOB2Error(NerUnifyError, ValueError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class EntityType(str, enum.Enum):
    """The six unified entity categories, in canonical order."""

    PERSON = "PERSON"
    LOCATION = "LOCATION"
    ORGANIZATION = "ORGANIZATION"
    NUMEX = "NUMEX"
    TIMEX = "TIMEX"
    MISC = "MISC"

    def __str__(self) -> str:
        return self.value


ENTITY_TYPES: Tuple[str, ...] = tuple(t.value for t in EntityType)


def is_valid_tag(tag: str) -> bool:
    return tag == OUTSIDE or _TAG_RE.match(tag) is not None


def split_tag(tag: str) -> Tuple[Optional[str], Optional[str]]:
    """Return ``(prefix, label)`` for a chunk tag; ``(None, None)`` for ``O``."""
    if tag == OUTSIDE:
        return None, None
    m = _TAG_RE.match(tag)
    if m is None:
        raise ValueError(f"invalid chunk tag {tag!r}")
    return m.group(1), m.group(2)


@dataclass(frozen=True)
class Token:
    surface: str
    tag: str = OUTSIDE

    def __post_init__(self):
        if not self.surface or _FIELD_SEP.search(self.surface):
            raise ValueError(f"invalid token surface {self.surface!r}")
        if not is_valid_tag(self.tag):
            raise ValueError(f"invalid chunk tag {self.tag!r}")


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: Tuple[Token, ...]
    language: str = "und"
    source: str = "unknown"

    @property
    def surfaces(self) -> List[str]:
        return [t.surface for t in self.tokens]

    @property
    def tags(self) -> List[str]:
        return [t.tag for t in self.tokens]

    def __len__(self) -> int:
        return len(self.tokens)

    def with_tags(self, tags: Sequence[str]) -> "Sentence":
        if len(tags) != len(self.tokens):
            raise ValueError(
                f"sentence {self.id}: got {len(tags)} tags for {len(self.tokens)} tokens"
            )
        tokens = tuple(Token(tok.surface, tag) for tok, tag in zip(self.tokens, tags))
        return Sentence(self.id, tokens, self.language, self.source)


@dataclass(frozen=True)
class Corpus:
    sentences: Tuple[Sentence, ...] = ()
    schema: str = UNIFIED

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if self.schema == UNIFIED:
            allowed = set(ENTITY_TYPES)
            for sent in self.sentences:
                for i, tok in enumerate(sent.tokens):
                    if tok.tag != OUTSIDE and tok.tag[2:] not in allowed:
                        raise ValueError(
                            f"sentence {sent.id} token {i}: {tok.tag!r} is not a unified tag"
                        )

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)


class EntitySpan(NamedTuple):
    entity_type: str
    start: int
    end: int  # inclusive


class Violation(NamedTuple):
    index: int
    tag: str
    previous: str


TagsLike = Union[Sentence, Sequence[str]]


def _tags_of(obj: TagsLike) -> List[str]:
    if isinstance(obj, Sentence):
        return obj.tags
    return list(obj)


# ---------------------------------------------------------------------------
# CoNLL I/O
# ---------------------------------------------------------------------------


def parse_conll(
    text: Union[bytes, str],
    language: str = "und",
    source: str = "unknown",
    id_prefix: Optional[str] = None,
) -> Corpus:
    """Parse a whitespace-separated CoNLL file.

    The first column is the token surface and the last column is the tag;
    anything in between is ignored. ``-DOCSTART-`` lines and ``#`` comments
    at the start of a sentence are skipped. Sentence ids are
    ``"<id_prefix>:<ordinal>"`` with ``id_prefix`` defaulting to ``source``.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    prefix = source if id_prefix is None else id_prefix
    sentences: List[Sentence] = []
    current: List[Token] = []

    def flush():
        if current:
            sid = f"{prefix}:{len(sentences)}"
            sentences.append(Sentence(sid, tuple(current), language, source))
            current.clear()

    for lineno, line in enumerate(text.split("\n"), 1):
        fields = [f for f in _FIELD_SEP.split(line) if f]
        if not fields:
            flush()
            continue
        if not current and (fields[0] == "-DOCSTART-" or fields[0].startswith("#")):
            continue
        if len(fields) < 2:
            raise ConllParseError(f"expected at least 2 fields, got {len(fields)}", lineno)
        tag = fields[-1]
        if not is_valid_tag(tag):
            raise ConllParseError(f"invalid chunk tag {tag!r}", lineno)
        current.append(Token(fields[0], tag))
    flush()
    return Corpus(tuple(sentences), schema=source)


def serialize_conll(corpus: Union[Corpus, Iterable[Sentence]]) -> bytes:
    """Two TAB-separated columns, one blank line after every sentence."""
    parts: List[str] = []
    for sent in corpus:
        for tok in sent.tokens:
            parts.append(f"{tok.surface}\t{tok.tag}\n")
        parts.append("\n")
    return "".join(parts).encode("utf-8")


def read_conll(path, language: str = "und", source: str = "unknown",
               id_prefix: Optional[str] = None) -> Corpus:
    with open(path, "rb") as fh:
        return parse_conll(fh.read(), language, source, id_prefix)


# ---------------------------------------------------------------------------
# IOB2
# ---------------------------------------------------------------------------


def validate_iob2(sentence: TagsLike) -> List[Violation]:
    """Positions holding ``I-X`` that do not continue a ``B-X``/``I-X``."""
    tags = _tags_of(sentence)
    violations = []
    prev = OUTSIDE
    for i, tag in enumerate(tags):
        if tag.startswith("I-"):
            label = tag[2:]
            if prev != "B-" + label and prev != tag:
                violations.append(Violation(i, tag, prev if i else "<start>"))
        prev = tag
    return violations


def repair_tags(tags: Sequence[str]) -> List[str]:
    out = list(tags)
    for v in validate_iob2(out):
        out[v.index] = "B-" + out[v.index][2:]
    return out


def repair_iob2(sentence: Sentence) -> Sentence:
    """Rewrite every orphaned ``I-X`` as ``B-X``; all other tags are kept."""
    if not validate_iob2(sentence):
        return sentence
    return sentence.with_tags(repair_tags(sentence.tags))


def extract_entities(sentence: TagsLike, strict: bool = False) -> List[EntitySpan]:
    """Chunk an IOB2 tag sequence into ``(type, start, end)`` spans.

    In the default mode orphaned ``I-`` tags are repaired first; with
    ``strict=True`` they raise :class:`IOB2Error` instead.
    """
    tags = _tags_of(sentence)
    bad = validate_iob2(tags)
    if bad:
        if strict:
            v = bad[0]
            raise IOB2Error(
                f"IOB2 violation at index {v.index}: {v.tag} after {v.previous}", v.index
            )
        tags = repair_tags(tags)
    spans: List[EntitySpan] = []
    start = None
    label = None
    for i, tag in enumerate(tags):
        if tag.startswith("I-"):
            continue
        if start is not None:
            spans.append(EntitySpan(label, start, i - 1))
            start = None
        if tag != OUTSIDE:
            start, label = i, tag[2:]
    if start is not None:
        spans.append(EntitySpan(label, start, len(tags) - 1))
    return spans


def encode_entities(spans: Iterable[Tuple[str, int, int]], length: int) -> List[str]:
    tags = [OUTSIDE] * length
    for entity_type, start, end in sorted(spans, key=lambda s: (s[1], s[2])):
        if not 0 <= start <= end < length:
            raise ValueError(f"span ({entity_type}, {start}, {end}) outside [0, {length})")
        if any(t != OUTSIDE for t in tags[start:end + 1]):
            raise ValueError(f"span ({entity_type}, {start}, {end}) overlaps another span")
        tags[start] = f"B-{entity_type}"
        for i in range(start + 1, end + 1):
            tags[i] = f"I-{entity_type}"
    return tags
