"""Pipeline configuration file (JSON, unknown keys rejected)."""

from __future__ import annotations

import json
import os
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from .corpus import NerUnifyError
from .mapping import BUILTIN_SPECS, MappingError, NumexPolicy
from .splits import SplitError, SplitRecipe
from .tagger import DEFAULT_HYPERPARAMS, TaggerError, grid_points

OUTPUT_DIR_ENV = "NERUNIFY_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "nerunify-out"


class ConfigError(NerUnifyError, ValueError):
    pass


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DatasetEntry(_Strict):
    source: str
    partition: str
    language: str
    path: str


class NumexSection(_Strict):
    sources: List[str] = ["B-NER"]
    policy: Optional[Dict[str, Union[bool, str, List[str]]]] = None

    def build_policy(self) -> NumexPolicy:
        return NumexPolicy.from_dict(self.policy or {})


class VocabSection(_Strict):
    coverage: Union[str, float] = "0.95"

    @field_validator("coverage")
    @classmethod
    def _coverage_range(cls, v):
        try:
            f = Fraction(str(v))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"coverage {v!r} is not a number")
        if not 0 < f <= 1:
            raise ValueError(f"coverage must be in (0, 1], got {v}")
        return v

    @property
    def fraction(self) -> Fraction:
        return Fraction(str(self.coverage))


class TaggerSection(_Strict):
    epochs: int = DEFAULT_HYPERPARAMS["epochs"]
    shuffle_seed: int = DEFAULT_HYPERPARAMS["shuffle_seed"]
    window: int = DEFAULT_HYPERPARAMS["window"]


class PipelineConfig(_Strict):
    datasets: List[DatasetEntry]
    mappings: Dict[str, str] = {}
    numex: NumexSection = NumexSection()
    recipe: Union[str, dict, None] = None
    vocab: VocabSection = VocabSection()
    tagger: Optional[TaggerSection] = None
    sweep: Optional[Dict[str, List[int]]] = None
    mode: Literal["repair", "strict"] = "repair"
    model_name: str = "baseline-perceptron"
    output_dir: Optional[str] = None

    @model_validator(mode="after")
    def _one_training_mode(self):
        if self.tagger is not None and self.sweep is not None:
            raise ValueError("give either 'tagger' or 'sweep', not both")
        return self


class ResolvedConfig:
    """A validated config with relative paths resolved against the config file."""

    def __init__(self, raw: PipelineConfig, base_dir: str, output_dir: Optional[str] = None):
        self.raw = raw
        self.base_dir = base_dir
        self.datasets = [
            d.model_copy(update={"path": self._resolve(d.path)}) for d in raw.datasets
        ]
        self.mappings = {
            source: ref if ref.startswith("builtin:") else self._resolve(ref)
            for source, ref in raw.mappings.items()
        }
        if isinstance(raw.recipe, str):
            path = self._resolve(raw.recipe)
            self._require(path, "recipe")
            with open(path, encoding="utf-8") as fh:
                self.recipe = SplitRecipe.from_json(fh.read())
        elif isinstance(raw.recipe, dict):
            self.recipe = SplitRecipe.from_dict(raw.recipe)
        else:
            self.recipe = SplitRecipe()
        self.numex_policy = raw.numex.build_policy()
        self.coverage = raw.vocab.fraction
        if raw.sweep is not None:
            grid_points(raw.sweep)
        if output_dir:
            self.output_dir = output_dir
        elif raw.output_dir:
            self.output_dir = self._resolve(raw.output_dir)
        else:
            self.output_dir = os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR
        self._check()

    def _resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.normpath(os.path.join(self.base_dir, path))

    @staticmethod
    def _require(path: str, what: str) -> None:
        if not os.path.isfile(path):
            raise ConfigError(f"{what} file not found: {path}")

    def _check(self) -> None:
        keys = set()
        for d in self.datasets:
            self._require(d.path, f"dataset {d.source}/{d.partition}")
            if (d.source, d.partition) in keys:
                raise ConfigError(f"dataset {d.source}/{d.partition} listed twice")
            keys.add((d.source, d.partition))
            if d.source not in self.mappings and d.source not in BUILTIN_SPECS:
                raise ConfigError(f"no mapping for source {d.source!r}")
        for source, ref in self.mappings.items():
            if not ref.startswith("builtin:"):
                self._require(ref, f"mapping for {source}")
            elif ref[len("builtin:"):] not in BUILTIN_SPECS:
                raise ConfigError(f"unknown built-in mapping {ref!r}")
        for a in self.recipe.assignments:
            if a.key not in keys:
                raise ConfigError(
                    f"recipe assignment {a.source_name}/{a.source_partition} has no dataset"
                )
        assigned = {a.key for a in self.recipe.assignments}
        for source, partition in sorted(keys - assigned):
            raise ConfigError(f"dataset {source}/{partition} is not used by the split recipe")

    def mapping_ref(self, source: str) -> str:
        return self.mappings.get(source, f"builtin:{source}")

    @property
    def hyperparams(self) -> Dict[str, int]:
        section = self.raw.tagger or TaggerSection()
        return section.model_dump()

    def to_dict(self) -> dict:
        data = self.raw.model_dump()
        data["datasets"] = [d.model_dump() for d in self.datasets]
        data["recipe"] = self.recipe.to_dict()
        data.pop("output_dir")
        return data


def load_config(path: str, output_dir: Optional[str] = None) -> ResolvedConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON: {exc}") from None
    try:
        raw = PipelineConfig.model_validate(data)
        return ResolvedConfig(raw, os.path.dirname(os.path.abspath(path)), output_dir)
    except ValidationError as exc:
        raise ConfigError(f"{path}: invalid config:\n{exc}") from None
    except (ConfigError, SplitError, MappingError, TaggerError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
