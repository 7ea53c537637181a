"""Entity-level exact-match scoring and token accuracy over IOB2 corpora."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Sequence, Tuple

from .corpus import ENTITY_TYPES, Corpus, EntitySpan, NerUnifyError, Sentence, extract_entities


class AlignmentError(NerUnifyError, ValueError):
    pass


def safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def f1_score(precision: float, recall: float) -> float:
    return safe_div(2 * precision * recall, precision + recall)


@dataclass
class TypeScores:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def support(self) -> int:
        return self.tp + self.fn

    @property
    def precision(self) -> float:
        return safe_div(self.tp, self.tp + self.fp)

    @property
    def recall(self) -> float:
        return safe_div(self.tp, self.tp + self.fn)

    @property
    def f1(self) -> float:
        return f1_score(self.precision, self.recall)

    def to_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "support": self.support,
        }


@dataclass
class Averages:
    precision: float
    recall: float
    f1: float


@dataclass
class MetricsReport:
    per_type: Dict[str, TypeScores] = field(default_factory=dict)
    token_correct: int = 0
    token_count: int = 0

    @property
    def micro(self) -> TypeScores:
        total = TypeScores()
        for s in self.per_type.values():
            total.tp += s.tp
            total.fp += s.fp
            total.fn += s.fn
        return total

    @property
    def weighted(self) -> Averages:
        weight = sum(s.support for s in self.per_type.values())
        if not weight:
            return Averages(0.0, 0.0, 0.0)
        rows = self.per_type.values()
        return Averages(
            sum(s.support * s.precision for s in rows) / weight,
            sum(s.support * s.recall for s in rows) / weight,
            sum(s.support * s.f1 for s in rows) / weight,
        )

    @property
    def token_accuracy(self) -> float:
        return safe_div(self.token_correct, self.token_count)

    def to_dict(self) -> dict:
        micro = self.micro.to_dict()
        micro.pop("support")
        return {
            "per_type": {t: s.to_dict() for t, s in self.per_type.items()},
            "micro": micro,
            "weighted": asdict(self.weighted),
            "token_accuracy": self.token_accuracy,
            "token_correct": self.token_correct,
            "token_count": self.token_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "MetricsReport":
        per_type = {
            t: TypeScores(int(row["tp"]), int(row["fp"]), int(row["fn"]))
            for t, row in data["per_type"].items()
        }
        return cls(per_type, int(data["token_correct"]), int(data["token_count"]))


def _type_order(label: str) -> Tuple[int, str]:
    return (ENTITY_TYPES.index(label), "") if label in ENTITY_TYPES else (len(ENTITY_TYPES), label)


def check_alignment(gold: Corpus, predicted: Corpus) -> None:
    if len(gold) != len(predicted):
        first = min(len(gold), len(predicted))
        extra = (gold.sentences[first:] or predicted.sentences[first:])[0]
        raise AlignmentError(
            f"sentence {extra.id}: present on one side only "
            f"({len(gold)} gold vs {len(predicted)} predicted sentences)"
        )
    for g, p in zip(gold, predicted):
        if g.id != p.id:
            raise AlignmentError(f"sentence {g.id}: predicted side has id {p.id!r} here")
        if len(g) != len(p):
            raise AlignmentError(
                f"sentence {g.id}: {len(g)} gold tokens vs {len(p)} predicted tokens"
            )


def sentence_spans(sentence: Sentence, strict: bool) -> List[EntitySpan]:
    try:
        return extract_entities(sentence, strict=strict)
    except NerUnifyError as exc:
        raise type(exc)(f"sentence {sentence.id}: {exc}", exc.index) from None


def evaluate(gold: Corpus, predicted: Corpus, mode: str = "repair") -> MetricsReport:
    """Score predicted spans against gold spans by exact (type, start, end) match."""
    if mode not in ("repair", "strict"):
        raise ValueError(f"mode must be 'repair' or 'strict', got {mode!r}")
    strict = mode == "strict"
    check_alignment(gold, predicted)
    counts: Dict[str, TypeScores] = {}
    correct = total = 0
    for g, p in zip(gold, predicted):
        gold_spans = Counter(sentence_spans(g, strict))
        pred_spans = Counter(sentence_spans(p, strict))
        for span in gold_spans | pred_spans:
            row = counts.setdefault(span.entity_type, TypeScores())
            hit = min(gold_spans[span], pred_spans[span])
            row.tp += hit
            row.fp += pred_spans[span] - hit
            row.fn += gold_spans[span] - hit
        total += len(g)
        correct += sum(a.tag == b.tag for a, b in zip(g.tokens, p.tokens))
    per_type = {t: counts[t] for t in sorted(counts, key=_type_order)}
    return MetricsReport(per_type, correct, total)


@dataclass(frozen=True)
class Disagreement:
    sentence_id: str
    span: EntitySpan
    kind: str  # "FP" or "FN"
    context: Tuple[str, ...]
    surfaces: Tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "span": list(self.span),
            "kind": self.kind,
            "surfaces": list(self.surfaces),
            "context": list(self.context),
        }


def diff_report(
    gold: Corpus, predicted: Corpus, limit: int = 100, mode: str = "repair", window: int = 2
) -> List[Disagreement]:
    """False positives/negatives in sentence order, then by span position."""
    strict = mode == "strict"
    check_alignment(gold, predicted)
    records: List[Disagreement] = []
    for g, p in zip(gold, predicted):
        if len(records) >= limit:
            break
        gold_spans = set(sentence_spans(g, strict))
        pred_spans = set(sentence_spans(p, strict))
        found = [(s, "FP") for s in pred_spans - gold_spans]
        found += [(s, "FN") for s in gold_spans - pred_spans]
        found.sort(key=lambda item: (item[0].start, item[0].end, item[0].entity_type, item[1]))
        surfaces = g.surfaces
        for span, kind in found:
            lo, hi = max(0, span.start - window), span.end + 1 + window
            records.append(Disagreement(
                g.id, span, kind, tuple(surfaces[lo:hi]),
                tuple(surfaces[span.start:span.end + 1]),
            ))
    return records[:limit]


def type_rows(report: MetricsReport, types: Sequence[str] = ENTITY_TYPES) -> Dict[str, TypeScores]:
    return {t: report.per_type[t] for t in types if t in report.per_type}
