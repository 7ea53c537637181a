"""Compose the master train/validation sets from per-source partitions."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

from .corpus import UNIFIED, Corpus, NerUnifyError
from .rng import MASK64, SplitMix64


class SplitError(NerUnifyError, ValueError):
    pass


def as_fraction(value: Union[int, float, str, Fraction]) -> Fraction:
    # via str so 0.3 means 3/10, not the nearest binary double
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SplitError(f"not a fraction: {value!r}")
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        raise SplitError(f"not a fraction: {value!r}") from None


@dataclass(frozen=True)
class Assignment:
    source_name: str
    source_partition: str
    fraction_to_train: Fraction
    fraction_to_validation: Fraction

    def __post_init__(self):
        ft = as_fraction(self.fraction_to_train)
        fv = as_fraction(self.fraction_to_validation)
        object.__setattr__(self, "fraction_to_train", ft)
        object.__setattr__(self, "fraction_to_validation", fv)
        for f in (ft, fv):
            if not 0 <= f <= 1:
                raise SplitError(f"{self.key}: fraction {f} outside [0, 1]")
        if ft + fv > 1:
            raise SplitError(f"{self.key}: train + validation fractions exceed 1")

    @property
    def key(self) -> Tuple[str, str]:
        return (self.source_name, self.source_partition)


def _default_assignments() -> Tuple[Assignment, ...]:
    rows = [
        ("HiNER", "train", 1, 0),
        ("MahaNER", "train", 1, 0),
        ("B-NER", "train", "0.8", "0.2"),
        ("B-NER", "test", 0, "0.3"),
        ("HiNER", "test", 0, 1),
        ("HiNER", "validation", 0, 1),
        ("MahaNER", "test", 0, 1),
        ("MahaNER", "validation", 0, 1),
    ]
    return tuple(Assignment(*row) for row in rows)


@dataclass(frozen=True)
class SplitRecipe:
    seed: int = 0
    assignments: Tuple[Assignment, ...] = field(default_factory=_default_assignments)

    def __post_init__(self):
        if not isinstance(self.seed, int) or not 0 <= self.seed <= MASK64:
            raise SplitError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "assignments", tuple(self.assignments))
        keys = [a.key for a in self.assignments]
        dupes = {k for k in keys if keys.count(k) > 1}
        if dupes:
            raise SplitError(f"duplicate assignments: {sorted(dupes)}")

    def with_seed(self, seed: int) -> "SplitRecipe":
        return SplitRecipe(seed, self.assignments)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "assignments": [
                {
                    "source_name": a.source_name,
                    "source_partition": a.source_partition,
                    "fraction_to_train": str(a.fraction_to_train),
                    "fraction_to_validation": str(a.fraction_to_validation),
                }
                for a in self.assignments
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SplitRecipe":
        if not isinstance(data, dict):
            raise SplitError("recipe must be a JSON object")
        unknown = set(data) - {"seed", "assignments"}
        if unknown:
            raise SplitError(f"unknown recipe keys: {sorted(unknown)}")
        fields_ = {"source_name", "source_partition", "fraction_to_train", "fraction_to_validation"}
        assignments = []
        for item in data.get("assignments", []):
            if set(item) != fields_:
                raise SplitError(f"assignment needs exactly {sorted(fields_)}, got {sorted(item)}")
            assignments.append(Assignment(**item))
        kwargs = {"seed": data.get("seed", 0)}
        if "assignments" in data:
            kwargs["assignments"] = tuple(assignments)
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "SplitRecipe":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SplitError(f"malformed recipe file: {exc}") from None


DEFAULT_RECIPE = SplitRecipe()


@dataclass(frozen=True)
class ManifestRow:
    source_name: str
    source_partition: str
    input: int
    to_train: int
    to_validation: int
    to_leftover: int


@dataclass(frozen=True)
class SplitResult:
    train: Corpus
    validation: Corpus
    leftover: Corpus
    manifest: Tuple[ManifestRow, ...]

    def manifest_dict(self, recipe: SplitRecipe) -> dict:
        return {
            "recipe": recipe.to_dict(),
            "generator": "splitmix64",
            "assignments": [vars(row) for row in self.manifest],
            "totals": {
                "train": len(self.train),
                "validation": len(self.validation),
                "leftover": len(self.leftover),
            },
        }


def assignment_order(recipe_seed: int, source_name: str, partition: str, n: int) -> List[int]:
    return SplitMix64.for_stream(recipe_seed, source_name, partition).permutation(n)


def compose_splits(
    inputs: Sequence[Tuple[str, str, Corpus]],
    recipe: SplitRecipe = DEFAULT_RECIPE,
) -> SplitResult:
    """Allocate each (source, partition) corpus to train/validation/leftover.

    Each assignment is shuffled with its own SplitMix64 stream keyed by
    (seed, source, partition); the first ``floor(f_train * n)`` shuffled
    sentences go to train, the next ``floor(f_val * n)`` to validation and
    the rest to leftover.
    """
    by_key: Dict[Tuple[str, str], Corpus] = {}
    seen_ids = set()
    for source, partition, corpus in inputs:
        if (source, partition) in by_key:
            raise SplitError(f"input {source}/{partition} given twice")
        if corpus.schema != UNIFIED:
            raise SplitError(f"input {source}/{partition} is not in the unified schema")
        for sent in corpus:
            if sent.id in seen_ids:
                raise SplitError(f"duplicate sentence id {sent.id!r} across inputs")
            seen_ids.add(sent.id)
        by_key[(source, partition)] = corpus

    assigned = {a.key for a in recipe.assignments}
    for a in recipe.assignments:
        if a.key not in by_key:
            raise SplitError(f"no input for assignment {a.source_name}/{a.source_partition}")
    stray = [k for k in by_key if k not in assigned]
    if stray:
        raise SplitError(f"inputs without an assignment: {', '.join('/'.join(k) for k in stray)}")

    train, validation, leftover, manifest = [], [], [], []
    for a in recipe.assignments:
        sentences = by_key[a.key].sentences
        n = len(sentences)
        n_train = math.floor(a.fraction_to_train * n)
        n_val = math.floor(a.fraction_to_validation * n)
        order = assignment_order(recipe.seed, a.source_name, a.source_partition, n)
        train.extend(sentences[i] for i in order[:n_train])
        validation.extend(sentences[i] for i in order[n_train:n_train + n_val])
        leftover.extend(sentences[i] for i in order[n_train + n_val:])
        manifest.append(ManifestRow(a.source_name, a.source_partition, n,
                                    n_train, n_val, n - n_train - n_val))
    return SplitResult(
        Corpus(tuple(train)), Corpus(tuple(validation)), Corpus(tuple(leftover)), tuple(manifest)
    )
