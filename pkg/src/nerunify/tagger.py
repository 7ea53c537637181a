"""Averaged structured perceptron with IOB2-constrained Viterbi decoding."""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .corpus import ENTITY_TYPES, OUTSIDE, Corpus, NerUnifyError, Sentence, repair_tags
from .mapping import DEFAULT_NUMEX_POLICY, NumexPolicy
from .metrics import MetricsReport, evaluate
from .rng import SplitMix64
from .vocab import Vocabulary

log = logging.getLogger(__name__)

LABELS: Tuple[str, ...] = (OUTSIDE,) + tuple(
    f"{prefix}-{t}" for t in ENTITY_TYPES for prefix in ("B", "I")
)
LABEL_INDEX = {label: i for i, label in enumerate(LABELS)}
N_LABELS = len(LABELS)
START = "<S>"
MODEL_MAGIC = "# nerunify-tagger-model v1"


class TaggerError(NerUnifyError, ValueError):
    pass


def is_legal(prev: Optional[str], cur: str) -> bool:
    """IOB2 transition rule; ``prev=None`` means sentence start."""
    if not cur.startswith("I-"):
        return True
    return prev is not None and prev[2:] == cur[2:] and prev != OUTSIDE


# TRANSITION_MASK[p][y]: may label y follow label p
TRANSITION_MASK: Tuple[Tuple[bool, ...], ...] = tuple(
    tuple(is_legal(p, y) for y in LABELS) for p in LABELS
)
START_MASK: Tuple[bool, ...] = tuple(is_legal(None, y) for y in LABELS)
_LEGAL_NEXT = [[y for y in range(N_LABELS) if TRANSITION_MASK[p][y]] for p in range(N_LABELS)]
_LEGAL_START = [y for y in range(N_LABELS) if START_MASK[y]]


# ---------------------------------------------------------------------------
# features
# ---------------------------------------------------------------------------


def featurize(
    sentence: Sentence,
    position: int,
    vocab: Vocabulary,
    window: int = 1,
    policy: NumexPolicy = DEFAULT_NUMEX_POLICY,
) -> List[str]:
    surfaces = sentence.surfaces
    n = len(surfaces)
    if not 0 <= position < n:
        raise IndexError(f"position {position} outside sentence of length {n}")
    word = surfaces[position]
    feats = ["bias"]
    for k in range(-window, window + 1):
        j = position + k
        if j < 0:
            value = "BOS"
        elif j >= n:
            value = "EOS"
        else:
            value = str(vocab.lookup(surfaces[j]))
        feats.append(f"w[{k:+d}]={value}")
    for size in (1, 2, 3):
        feats.append(f"pre{size}={word[:size]}")
        feats.append(f"suf{size}={word[-size:]}")
    feats.append(f"digit={int(policy.has_digit(word))}")
    feats.append(f"num={int(policy.is_numeric(word))}")
    if position == 0:
        feats.append("BOS")
    if position == n - 1:
        feats.append("EOS")
    return feats


def sentence_features(sentence: Sentence, vocab: Vocabulary, window: int) -> List[List[str]]:
    return [featurize(sentence, i, vocab, window) for i in range(len(sentence))]


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------


def best_path(
    emissions: Sequence[Sequence[float]],
    transitions: Sequence[Sequence[float]],
    start: Sequence[float],
) -> List[int]:
    """Highest-scoring legal label-index sequence.

    Scores are ``start[y0] + sum(transitions[y_{t-1}][y_t]) + sum(emissions[t][y_t])``
    over IOB2-legal paths. Among equal scores the lexicographically smallest
    sequence (by label order) wins; to get that, the DP runs right to left
    and the path is read off greedily left to right.
    """
    n = len(emissions)
    if n == 0:
        return []
    # suffix[t][y]: best score of positions t..n-1 given label y at t
    suffix = [None] * n
    suffix[-1] = list(emissions[-1])
    for t in range(n - 2, -1, -1):
        nxt = suffix[t + 1]
        em = emissions[t]
        row = []
        for y in range(N_LABELS):
            tr = transitions[y]
            row.append(em[y] + max(tr[z] + nxt[z] for z in _LEGAL_NEXT[y]))
        suffix[t] = row

    def pick(candidates, score):
        best = None
        best_score = None
        for y in candidates:
            s = score(y)
            if best is None or s > best_score:
                best, best_score = y, s
        return best

    path = [pick(_LEGAL_START, lambda y: start[y] + suffix[0][y])]
    for t in range(1, n):
        prev = path[-1]
        tr = transitions[prev]
        path.append(pick(_LEGAL_NEXT[prev], lambda y: tr[y] + suffix[t][y]))
    return path


def path_score(path, emissions, transitions, start) -> float:
    score = start[path[0]] + emissions[0][path[0]]
    for t in range(1, len(path)):
        score += transitions[path[t - 1]][path[t]] + emissions[t][path[t]]
    return score


class _Weights:
    """Sparse feature -> per-label weight rows."""

    def __init__(self, rows: Optional[Dict[str, List]] = None):
        self.rows: Dict[str, List] = rows if rows is not None else {}

    def emissions(self, feats: List[List[str]]) -> List[List]:
        out = []
        for position in feats:
            acc = [0] * N_LABELS
            for f in position:
                row = self.rows.get(f)
                if row is not None:
                    for y in range(N_LABELS):
                        acc[y] += row[y]
            out.append(acc)
        return out

    def transitions(self) -> Tuple[List[List], List]:
        zero = [0] * N_LABELS
        trans = [list(self.rows.get(f"T:{p}", zero)) for p in LABELS]
        start = list(self.rows.get(f"T:{START}", zero))
        return trans, start

    def decode(self, feats: List[List[str]]) -> List[int]:
        trans, start = self.transitions()
        return best_path(self.emissions(feats), trans, start)


@dataclass
class TaggerModel:
    """A trained tagger.

    ``weights`` holds integer numerators per (feature, label); the effective
    weight is ``numerator / denominator``. Decoding only compares sums, so it
    runs on the numerators directly and stays exact.
    """

    weights: Dict[str, List[int]]
    denominator: int = 1
    vocab: Vocabulary = field(default_factory=Vocabulary)
    hyperparams: Dict[str, int] = field(default_factory=dict)
    averaged: bool = True
    label_set: Tuple[str, ...] = LABELS
    transition_mask: Tuple[Tuple[bool, ...], ...] = TRANSITION_MASK

    @property
    def window(self) -> int:
        return int(self.hyperparams.get("window", 1))

    def weight(self, feature: str, label: str) -> Fraction:
        row = self.weights.get(feature)
        return Fraction(0) if row is None else Fraction(row[LABEL_INDEX[label]], self.denominator)

    def decode_indices(self, sentence: Sentence) -> List[int]:
        return _Weights(self.weights).decode(sentence_features(sentence, self.vocab, self.window))

    def tag(self, sentence: Sentence) -> Sentence:
        return sentence.with_tags([LABELS[y] for y in self.decode_indices(sentence)])

    def tag_corpus(self, corpus: Corpus) -> Corpus:
        return Corpus(tuple(self.tag(s) for s in corpus), schema=corpus.schema)

    # -- file format -------------------------------------------------------

    def to_text(self) -> str:
        lines = [
            MODEL_MAGIC,
            f"# hyperparams {json.dumps(self.hyperparams, sort_keys=True)}",
            f"# vocab_sha256 {vocab_checksum(self.vocab)}",
            f"# denominator {self.denominator}",
            f"# averaged {str(self.averaged).lower()}",
        ]
        for feature in sorted(self.weights):
            row = self.weights[feature]
            for y, value in enumerate(row):
                if value:
                    lines.append(f"{feature}\t{LABELS[y]}\t{value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, vocab: Vocabulary) -> "TaggerModel":
        lines = text.split("\n")
        if not lines or lines[0] != MODEL_MAGIC:
            raise TaggerError("not a tagger model file")
        header = {}
        body_start = 1
        for body_start in range(1, len(lines)):
            line = lines[body_start]
            if not line.startswith("# "):
                break
            key, _, value = line[2:].partition(" ")
            header[key] = value
        else:
            body_start = len(lines)
        checksum = vocab_checksum(vocab)
        if header.get("vocab_sha256") != checksum:
            raise TaggerError("vocabulary does not match the one the model was trained with")
        weights: Dict[str, List[int]] = {}
        for lineno, line in enumerate(lines[body_start:], body_start + 1):
            if not line:
                continue
            try:
                feature, label, value = line.split("\t")
                weights.setdefault(feature, [0] * N_LABELS)[LABEL_INDEX[label]] = int(value)
            except (ValueError, KeyError):
                raise TaggerError(f"model file line {lineno}: malformed weight entry") from None
        return cls(
            weights,
            int(header.get("denominator", 1)),
            vocab,
            json.loads(header.get("hyperparams", "{}")),
            header.get("averaged", "true") == "true",
        )


def vocab_checksum(vocab: Vocabulary) -> str:
    return hashlib.sha256(vocab.to_text().encode("utf-8")).hexdigest()


def viterbi_decode(model: TaggerModel, sentence: Sentence) -> List[str]:
    return [LABELS[y] for y in model.decode_indices(sentence)]


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------

DEFAULT_HYPERPARAMS = {"epochs": 5, "shuffle_seed": 0, "window": 1}


def _path_features(feats: List[List[str]], path: Sequence[int]):
    prev = START
    for t, y in enumerate(path):
        yield f"T:{prev}", y
        for f in feats[t]:
            yield f, y
        prev = LABELS[y]


def train(
    train_corpus: Corpus,
    vocab: Vocabulary,
    epochs: int = 5,
    shuffle_seed: int = 0,
    window: int = 1,
) -> TaggerModel:
    """Train an averaged structured perceptron.

    Each epoch visits the sentences in a SplitMix64 order seeded by
    ``shuffle_seed``. On a wrong decode, features along the gold path gain 1
    and those along the predicted path lose 1 (transitions included). The
    returned weights are the mean of the weight vectors after every visited
    sentence.
    """
    if epochs < 1:
        raise TaggerError(f"epochs must be >= 1, got {epochs}")
    if window < 0:
        raise TaggerError(f"window must be >= 0, got {window}")
    sentences = list(train_corpus)
    if not sentences:
        raise TaggerError("cannot train on an empty corpus")

    data = []
    for sent in sentences:
        gold = [LABEL_INDEX[t] for t in repair_tags(sent.tags)]
        data.append((sentence_features(sent, vocab, window), gold))

    current = _Weights()
    # accumulated (step - 1) * delta per weight, for lazy averaging
    lagged: Dict[str, List[int]] = {}
    rng = SplitMix64(shuffle_seed)
    step = 0
    for epoch in range(epochs):
        order = rng.permutation(len(data))
        mistakes = 0
        for i in order:
            step += 1
            feats, gold = data[i]
            pred = current.decode(feats)
            if pred == gold:
                continue
            mistakes += 1
            delta: Dict[Tuple[str, int], int] = defaultdict(int)
            for f, y in _path_features(feats, gold):
                delta[f, y] += 1
            for f, y in _path_features(feats, pred):
                delta[f, y] -= 1
            for (f, y), d in delta.items():
                if not d:
                    continue
                current.rows.setdefault(f, [0] * N_LABELS)[y] += d
                lagged.setdefault(f, [0] * N_LABELS)[y] += (step - 1) * d
        log.debug("epoch %d: %d/%d sentences mis-decoded", epoch + 1, mistakes, len(data))

    weights = {}
    for f, row in current.rows.items():
        lag = lagged.get(f, [0] * N_LABELS)
        numer = [w * step - u for w, u in zip(row, lag)]
        if any(numer):
            weights[f] = numer
    hyper = {"epochs": epochs, "shuffle_seed": shuffle_seed, "window": window}
    return TaggerModel(weights, step, vocab, hyper, averaged=True)


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

DEFAULT_GRID: Dict[str, List[int]] = {
    "epochs": [1, 3, 5, 10],
    "shuffle_seed": [0, 1],
    "window": [1, 2],
}


def grid_points(grid: Dict[str, Sequence[int]]) -> List[Dict[str, int]]:
    unknown = set(grid) - set(DEFAULT_HYPERPARAMS)
    if unknown:
        raise TaggerError(f"unknown hyperparameters in grid: {sorted(unknown)}")
    if not grid or any(len(values) == 0 for values in grid.values()):
        raise TaggerError("sweep grid must be non-empty")
    names = list(grid)
    points = []
    for combo in itertools.product(*(grid[n] for n in names)):
        point = dict(DEFAULT_HYPERPARAMS)
        point.update(zip(names, combo))
        points.append(point)
    return points


@dataclass
class SweepResult:
    point: Dict[str, int]
    report: MetricsReport
    selected: bool = False


def sweep(
    grid: Dict[str, Sequence[int]],
    train_corpus: Corpus,
    validation_corpus: Corpus,
    vocab: Vocabulary,
    mode: str = "repair",
) -> Tuple[Dict[str, int], List[SweepResult]]:
    """Train one model per grid point and keep the best validation micro-F1.

    Ties go to fewer epochs, then to the earlier grid point.
    """
    results = []
    for point in grid_points(grid):
        try:
            model = train(train_corpus, vocab, **point)
            report = evaluate(validation_corpus, model.tag_corpus(validation_corpus), mode)
        except NerUnifyError as exc:
            raise TaggerError(f"grid point {point}: {exc}") from exc
        log.info("sweep %s -> micro F1 %.4f", point, report.micro.f1)
        results.append(SweepResult(point, report))
    best = min(
        range(len(results)),
        key=lambda i: (-results[i].report.micro.f1, results[i].point["epochs"], i),
    )
    results[best].selected = True
    return dict(results[best].point), results


def sweep_tsv(results: Iterable[SweepResult]) -> str:
    header = ["epochs", "shuffle_seed", "window", "token_accuracy",
              "micro_precision", "micro_recall", "micro_f1", "weighted_f1", "selected"]
    lines = ["\t".join(header)]
    for r in results:
        micro = r.report.micro
        lines.append("\t".join([
            str(r.point["epochs"]), str(r.point["shuffle_seed"]), str(r.point["window"]),
            f"{r.report.token_accuracy:.6f}", f"{micro.precision:.6f}",
            f"{micro.recall:.6f}", f"{micro.f1:.6f}", f"{r.report.weighted.f1:.6f}",
            "*" if r.selected else "",
        ]))
    return "\n".join(lines) + "\n"
