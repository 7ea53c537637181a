"""Source tag schemas -> unified six-type schema, and numeric auto-annotation."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, FrozenSet, Mapping, Optional

from .corpus import (
    OUTSIDE,
    UNIFIED,
    Corpus,
    EntityType,
    NerUnifyError,
    Sentence,
    repair_tags,
)


class MappingError(NerUnifyError, ValueError):
    pass


@dataclass(frozen=True)
class MappingSpec:
    source_name: str
    rules: Mapping[str, EntityType]

    def __post_init__(self):
        rules = {}
        for label, target in dict(self.rules).items():
            if not label or any(c.isspace() for c in label):
                raise MappingError(f"{self.source_name}: invalid source label {label!r}")
            try:
                rules[label] = EntityType(target)
            except ValueError:
                raise MappingError(
                    f"{self.source_name}: {label!r} maps to unknown type {target!r}"
                ) from None
        object.__setattr__(self, "rules", rules)

    def to_json(self) -> str:
        payload = {
            "source_name": self.source_name,
            "rules": {k: v.value for k, v in self.rules.items()},
        }
        return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "MappingSpec":
        try:
            payload = json.loads(text, object_pairs_hook=_no_duplicate_keys)
        except json.JSONDecodeError as exc:
            raise MappingError(f"malformed mapping file: {exc}") from None
        if not isinstance(payload, dict) or set(payload) != {"source_name", "rules"}:
            raise MappingError("mapping file needs exactly the keys 'source_name' and 'rules'")
        if not isinstance(payload["rules"], dict):
            raise MappingError("'rules' must be an object")
        return cls(payload["source_name"], payload["rules"])


def _no_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise MappingError(f"duplicate key {key!r} in mapping file")
        seen[key] = value
    return seen


def read_shipped_mapping(name: str) -> MappingSpec:
    """Read a built-in mapping from the JSON copy shipped with the package."""
    filename = BUILTIN_FILES[name]
    text = resources.files("nerunify").joinpath("configs", filename).read_text("utf-8")
    return MappingSpec.from_json(text)


BUILTIN_FILES = {
    "HiNER": "hiner.json",
    "MahaNER": "mahaner.json",
    "B-NER": "bner.json",
}

HINER = MappingSpec("HiNER", {
    "PERSON": EntityType.PERSON,
    "LOCATION": EntityType.LOCATION,
    "ORGANIZATION": EntityType.ORGANIZATION,
    "NUMEX": EntityType.NUMEX,
    "TIMEX": EntityType.TIMEX,
    "MISC": EntityType.MISC,
    "LITERATURE": EntityType.MISC,
    "RELIGION": EntityType.MISC,
})

MAHANER = MappingSpec("MahaNER", {
    "NEP": EntityType.PERSON,
    "NEL": EntityType.LOCATION,
    "NEO": EntityType.ORGANIZATION,
    "NEM": EntityType.NUMEX,
    "NED": EntityType.TIMEX,
    "NETI": EntityType.TIMEX,
    "ED": EntityType.MISC,
})

# B-NER has no numeric tag; NUMEX comes from annotate_numex instead.
BNER = MappingSpec("B-NER", {
    "PER": EntityType.PERSON,
    "GEO": EntityType.LOCATION,
    "ORG": EntityType.ORGANIZATION,
    "TIM": EntityType.TIMEX,
    "GPE": EntityType.MISC,
    "ART": EntityType.MISC,
})

BUILTIN_SPECS: Dict[str, MappingSpec] = {s.source_name: s for s in (HINER, MAHANER, BNER)}


def builtin_spec(name: str) -> MappingSpec:
    try:
        return BUILTIN_SPECS[name]
    except KeyError:
        raise MappingError(
            f"no built-in mapping named {name!r} (have {', '.join(BUILTIN_SPECS)})"
        ) from None


def load_mapping(ref: str) -> MappingSpec:
    """Resolve ``builtin:NAME`` / a bare built-in name, or read a JSON mapping file."""
    if ref.startswith("builtin:"):
        return builtin_spec(ref[len("builtin:"):])
    if ref in BUILTIN_SPECS:
        return BUILTIN_SPECS[ref]
    with open(ref, encoding="utf-8") as fh:
        return MappingSpec.from_json(fh.read())


def map_sentence(sentence: Sentence, spec: MappingSpec) -> Sentence:
    tags = []
    for tag in sentence.tags:
        if tag == OUTSIDE:
            tags.append(OUTSIDE)
            continue
        target = spec.rules.get(tag[2:])
        tags.append(OUTSIDE if target is None else f"{tag[:2]}{target.value}")
    return sentence.with_tags(repair_tags(tags))


def map_tags(corpus: Corpus, spec: MappingSpec) -> Corpus:
    """Apply a mapping; unmapped labels become ``O`` and orphaned ``I-`` tags are repaired."""
    if corpus.schema != spec.source_name:
        raise MappingError(
            f"corpus schema {corpus.schema!r} does not match mapping for {spec.source_name!r}"
        )
    return Corpus(tuple(map_sentence(s, spec) for s in corpus), schema=UNIFIED)


# ---------------------------------------------------------------------------
# NUMEX
# ---------------------------------------------------------------------------

DIGIT_SCRIPTS = {
    "ascii": 0x0030,
    "devanagari": 0x0966,
    "bengali": 0x09E6,
}


@dataclass(frozen=True)
class NumexPolicy:
    """Which surfaces count as numbers.

    ``digit_scripts`` holds the code point of each accepted script's zero;
    the nine following code points are its other digits.
    """

    allow_sign: bool = True
    allow_decimal_point: bool = True
    allow_exponent: bool = False
    digit_scripts: FrozenSet[int] = frozenset(DIGIT_SCRIPTS.values())
    thousands_separators: str = ""
    _pattern: Optional[re.Pattern] = field(default=None, init=False, repr=False, compare=False)
    _table: Optional[dict] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "digit_scripts", frozenset(self.digit_scripts))
        table = {}
        for zero in self.digit_scripts:
            for d in range(10):
                table[zero + d] = ord("0") + d
        sign = "[+-]?" if self.allow_sign else ""
        if self.thousands_separators:
            sep = "[" + re.escape(self.thousands_separators) + "]"
            integer = rf"[0-9]+(?:{sep}[0-9]+)*"
        else:
            integer = "[0-9]+"
        frac = r"(?:\.[0-9]+)?" if self.allow_decimal_point else ""
        exp = r"(?:[eE][+-]?[0-9]+)?" if self.allow_exponent else ""
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "_pattern", re.compile(rf"{sign}{integer}{frac}{exp}"))

    def digit_value(self, char: str) -> Optional[int]:
        mapped = self._table.get(ord(char))
        return None if mapped is None else mapped - ord("0")

    def is_numeric(self, surface: str) -> bool:
        if any(ch.isascii() and ch.isdigit() and ord(ch) not in self._table for ch in surface):
            return False
        return self._pattern.fullmatch(surface.translate(self._table)) is not None

    def has_digit(self, surface: str) -> bool:
        return any(ord(ch) in self._table for ch in surface)

    def to_dict(self) -> dict:
        names = {v: k for k, v in DIGIT_SCRIPTS.items()}
        return {
            "allow_sign": self.allow_sign,
            "allow_decimal_point": self.allow_decimal_point,
            "allow_exponent": self.allow_exponent,
            "digit_scripts": sorted(names.get(z, f"U+{z:04X}") for z in self.digit_scripts),
            "thousands_separators": self.thousands_separators,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NumexPolicy":
        allowed = {"allow_sign", "allow_decimal_point", "allow_exponent",
                   "digit_scripts", "thousands_separators"}
        unknown = set(data) - allowed
        if unknown:
            raise MappingError(f"unknown numex policy keys: {sorted(unknown)}")
        kwargs = {k: v for k, v in data.items() if k != "digit_scripts"}
        for key, value in kwargs.items():
            expected = str if key == "thousands_separators" else bool
            if not isinstance(value, expected):
                raise MappingError(f"numex policy key {key!r} must be a {expected.__name__}")
        if not isinstance(data.get("digit_scripts", []), list):
            raise MappingError("numex policy key 'digit_scripts' must be a list")
        if "digit_scripts" in data:
            kwargs["digit_scripts"] = frozenset(_script_zero(s) for s in data["digit_scripts"])
        return cls(**kwargs)


def _script_zero(name: str) -> int:
    if name in DIGIT_SCRIPTS:
        return DIGIT_SCRIPTS[name]
    if name.upper().startswith("U+"):
        return int(name[2:], 16)
    raise MappingError(f"unknown digit script {name!r}")


DEFAULT_NUMEX_POLICY = NumexPolicy()


def annotate_numex_sentence(sentence: Sentence, policy: NumexPolicy = DEFAULT_NUMEX_POLICY) -> Sentence:
    tags = sentence.tags
    changed = False
    for i, tok in enumerate(sentence.tokens):
        if tok.tag == OUTSIDE and policy.is_numeric(tok.surface):
            tags[i] = "B-NUMEX"
            changed = True
    return sentence.with_tags(tags) if changed else sentence


def annotate_numex(corpus: Corpus, policy: NumexPolicy = DEFAULT_NUMEX_POLICY) -> Corpus:
    """Tag each numeric ``O`` token as its own single-token NUMEX entity."""
    if corpus.schema != UNIFIED:
        raise MappingError("annotate_numex needs a unified-schema corpus; run map_tags first")
    return Corpus(tuple(annotate_numex_sentence(s, policy) for s in corpus), schema=UNIFIED)

