"""Acceptance suite: one test per criterion, each producing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
Under pytest the lines are collected in ``RESULTS`` and printed in the
terminal summary (see conftest.py); run as a script they go to stdout.
"""

from __future__ import annotations

import functools
import json
import math
import os
import random
import sys
import tempfile
import time
from collections import Counter
from fractions import Fraction
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from nerunify.cli import main  # noqa: E402
from nerunify.corpus import (  # noqa: E402
    ENTITY_TYPES,
    Corpus,
    Sentence,
    Token,
    encode_entities,
    extract_entities,
    parse_conll,
    repair_tags,
    serialize_conll,
    validate_iob2,
)
from nerunify.fileio import read_unified  # noqa: E402
from nerunify.mapping import (  # noqa: E402
    BUILTIN_SPECS,
    NumexPolicy,
    annotate_numex,
    map_tags,
    read_shipped_mapping,
)
from nerunify.metrics import evaluate  # noqa: E402
from nerunify.reports import render_markdown, render_tsv  # noqa: E402
from nerunify.splits import DEFAULT_RECIPE, compose_splits  # noqa: E402
from nerunify.tagger import LABELS, TaggerModel, featurize, viterbi_decode  # noqa: E402
from nerunify.vocab import build_language_vocab, merge_vocabs  # noqa: E402

from fixtures import all_outside, most_frequent_tag_baseline  # noqa: E402
from oracles import (  # noqa: E402
    all_tag_sequences,
    exact_prf,
    is_iob2_legal,
    legal_paths,
    numeric_by_definition,
    random_corpus,
    random_tags,
    spans_by_enumeration,
)
from test_splits import check_partition, default_inputs, ids, random_recipe  # noqa: E402

MINI = HERE.parent / "data" / "mini"
GOLDEN = HERE / "golden"


RESULTS: list = []


def _report(line: str) -> None:
    RESULTS.append(line)
    if __name__ == "__main__":
        print(line, flush=True)


def criterion(number: int, title: str, budget: float):
    """Time the wrapped check and print one PASS/FAIL line for it."""

    def wrap(fn):
        @functools.wraps(fn)
        def run():
            start = time.perf_counter()
            try:
                fn()
            except BaseException as exc:
                elapsed = time.perf_counter() - start
                _report(f"criterion {number:2d} FAIL  {title} ({elapsed:.2f} s): {exc!r}"[:400])
                raise
            elapsed = time.perf_counter() - start
            if elapsed >= budget:
                msg = f"checks held but took {elapsed:.2f} s, budget {budget:g} s"
                _report(f"criterion {number:2d} FAIL  {title}: {msg}")
                raise AssertionError(msg)
            _report(f"criterion {number:2d} PASS  {title} ({elapsed:.2f} s < {budget:g} s)")

        return run

    return wrap


def _sentence(tags, surfaces=None, sid="a:0"):
    surfaces = surfaces or [f"w{i}" for i in range(len(tags))]
    return Sentence(sid, tuple(Token(w, t) for w, t in zip(surfaces, tags)))


def _corpus(*tag_seqs):
    return Corpus(tuple(_sentence(t, sid=f"a:{k}") for k, t in enumerate(tag_seqs)))


# ---------------------------------------------------------------------------
# 1. source-label mapping goldens
# ---------------------------------------------------------------------------

# Transcribed from the published mapping table, keyed target -> source labels.
PUBLISHED_TABLE = {
    "PERSON": {"HiNER": ["PERSON"], "MahaNER": ["NEP"], "B-NER": ["PER"]},
    "LOCATION": {"HiNER": ["LOCATION"], "MahaNER": ["NEL"], "B-NER": ["GEO"]},
    "ORGANIZATION": {"HiNER": ["ORGANIZATION"], "MahaNER": ["NEO"], "B-NER": ["ORG"]},
    "NUMEX": {"HiNER": ["NUMEX"], "MahaNER": ["NEM"], "B-NER": []},  # automatically annotated
    "TIMEX": {"HiNER": ["TIMEX"], "MahaNER": ["NED", "NETI"], "B-NER": ["TIM"]},
    "MISC": {"HiNER": ["MISC", "LITERATURE", "RELIGION"], "MahaNER": ["ED"], "B-NER": ["GPE", "ART"]},
}


@criterion(1, "source-label mapping goldens", 1.0)
def test_criterion_01_mapping_goldens():
    expected = {}
    for target, by_source in PUBLISHED_TABLE.items():
        for source, labels in by_source.items():
            for label in labels:
                expected[source, label] = target
    per_source = Counter(source for source, _ in expected)
    assert per_source == {"HiNER": 8, "MahaNER": 7, "B-NER": 6}
    assert len(expected) == 21

    for source, spec in BUILTIN_SPECS.items():
        got = {(source, label): str(t.value) for label, t in spec.rules.items()}
        assert got == {k: v for k, v in expected.items() if k[0] == source}, source
        assert read_shipped_mapping(source) == spec

    for (source, label), target in expected.items():
        src = Corpus((_sentence([f"B-{label}", f"I-{label}", "O", f"B-{label}"]),), schema=source)
        out = map_tags(src, BUILTIN_SPECS[source]).sentences[0].tags
        assert out == [f"B-{target}", f"I-{target}", "O", f"B-{target}"], (source, label)

    unmapped = {"HiNER": "GAME", "MahaNER": "NEB", "B-NER": "EVE"}
    for source, label in unmapped.items():
        some = next(l for s, l in expected if s == source)
        tgt = expected[source, some]
        src = Corpus((_sentence([f"B-{label}", f"I-{some}", f"I-{label}", "O"]),), schema=source)
        out = map_tags(src, BUILTIN_SPECS[source]).sentences[0].tags
        assert out == ["O", f"B-{tgt}", "O", "O"], source
        assert validate_iob2(out) == []


# ---------------------------------------------------------------------------
# 2. evaluation oracle equivalence
# ---------------------------------------------------------------------------


def _oracle_counts(gold_spans, pred_spans):
    out = {}
    for span in gold_spans | pred_spans:
        row = out.setdefault(span[0], [0, 0, 0])
        if span in gold_spans and span in pred_spans:
            row[0] += 1
        elif span in pred_spans:
            row[1] += 1
        else:
            row[2] += 1
    return out


@functools.lru_cache(maxsize=None)
def _prf(tp, fp, fn):
    return tuple(float(x) for x in exact_prf(tp, fp, fn))


@functools.lru_cache(maxsize=None)
def _expected_ratios(counts):
    """Per-type, micro and weighted ratios for a sorted tuple of (type, tp, fp, fn)."""
    per_type = {t: _prf(tp, fp, fn) for t, tp, fp, fn in counts}
    tp, fp, fn = (sum(row[k] for row in counts) for k in (1, 2, 3))
    support = tp + fn
    weighted = (float(sum(Fraction(r[1] + r[3]) * exact_prf(*r[1:])[2] for r in counts) / support)
                if support else 0.0)
    return per_type, _prf(tp, fp, fn), weighted


def _close(a, b):
    return all(abs(x - y) <= 1e-12 for x, y in zip(a, b))


def _check_pair(report, gold_spans, pred_spans):
    expected = _oracle_counts(gold_spans, pred_spans)
    got = report.per_type
    if {t: [s.tp, s.fp, s.fn] for t, s in got.items()} != expected:
        raise AssertionError(f"counts {got} != {expected}")
    per_type, micro, weighted = _expected_ratios(
        tuple(sorted((t, *v) for t, v in expected.items())))
    for t, ratios in per_type.items():
        row = got[t]
        if not _close((row.precision, row.recall, row.f1), ratios):
            raise AssertionError(f"ratios for {t}")
    m = report.micro
    if not _close((m.precision, m.recall, m.f1), micro):
        raise AssertionError("micro ratios")
    if abs(report.weighted.f1 - weighted) > 1e-12:
        raise AssertionError("weighted f1")


@criterion(2, "evaluation oracle equivalence", 30.0)
def test_criterion_02_evaluation_oracle():
    pairs = 0
    for n in range(1, 6):
        seqs = [list(s) for s in all_tag_sequences(n, ("PERSON", "MISC"))]
        sentences = [Corpus((_sentence(s),)) for s in seqs]
        spans = [set(spans_by_enumeration(s)) for s in seqs]
        for gi, g in enumerate(sentences):
            for pi, p in enumerate(sentences):
                _check_pair(evaluate(g, p), spans[gi], spans[pi])
                pairs += 1
    assert pairs == sum(25 ** n for n in range(1, 6))
    rng = random.Random(2024)
    for _ in range(1000):
        n = rng.randint(1, 12)
        g, p = random_tags(rng, n), random_tags(rng, n)
        _check_pair(evaluate(_corpus(g), _corpus(p)),
                    set(spans_by_enumeration(g)), set(spans_by_enumeration(p)))


# ---------------------------------------------------------------------------
# 3. worked metric values
# ---------------------------------------------------------------------------

WORKED_GOLD = (["B-PERSON", "O", "B-LOCATION"], ["B-PERSON", "I-PERSON"])
WORKED_PRED = (["B-PERSON", "O", "O"], ["B-PERSON", "I-PERSON"])


@criterion(3, "worked metric values", 5.0)
def test_criterion_03_worked_metrics():
    g = _corpus(["B-PERSON", "I-PERSON", "O", "B-NUMEX"], ["O", "B-MISC"])
    r = evaluate(g, g)
    for v in (r.micro.precision, r.micro.recall, r.micro.f1):
        assert abs(v - 1.0) <= 1e-12

    r = evaluate(_corpus(["B-PERSON", "I-PERSON", "O"]), _corpus(["B-PERSON", "O", "O"]))
    for v in (r.micro.precision, r.micro.recall, r.micro.f1):
        assert abs(v) <= 1e-12
    assert abs(r.token_accuracy - 2 / 3) <= 1e-12

    r = evaluate(_corpus(*WORKED_GOLD), _corpus(*WORKED_PRED))
    assert abs(r.weighted.f1 - 2 / 3) <= 1e-12
    assert abs(r.micro.f1 - 0.8) <= 1e-12


# ---------------------------------------------------------------------------
# 4. split recipe
# ---------------------------------------------------------------------------


@criterion(4, "split recipe counts and properties", 10.0)
def test_criterion_04_split_recipe():
    inputs = default_inputs(1000, 500)
    result = compose_splits(inputs, DEFAULT_RECIPE)
    rows = {(r.source_name, r.source_partition): r for r in result.manifest}
    train_row, test_row = rows["B-NER", "train"], rows["B-NER", "test"]
    assert (train_row.to_train, train_row.to_validation, train_row.to_leftover) == (800, 200, 0)
    assert (test_row.to_train, test_row.to_validation, test_row.to_leftover) == (0, 150, 350)
    assert len(result.leftover) == 350
    check_partition(inputs, result, DEFAULT_RECIPE)

    rng = random.Random(4)
    for trial in range(100):
        recipe, inputs = random_recipe(rng, trial)
        result = compose_splits(inputs, recipe)
        check_partition(inputs, result, recipe)
        again = compose_splits(inputs, recipe)
        for a, b in ((again.train, result.train), (again.validation, result.validation),
                     (again.leftover, result.leftover)):
            assert ids(a) == ids(b)


# ---------------------------------------------------------------------------
# 5. NUMEX rule
# ---------------------------------------------------------------------------

DIGIT_FIXTURES = [
    ("১৯৯৮ সালে ৩.৫ কোটি টাকা -১২ ১২.৩.৪ ১e৫ ১,০০০", "bn"),
    ("२०२४ में १२.५ लाख +७ रुपये २-३ ४२ ०", "hi"),
    ("४५ वर्षे १.५ ४२abc .५ ५. ٣", "mr"),
]


@criterion(5, "NUMEX idempotence, non-overwrite and digit fixtures", 10.0)
def test_criterion_05_numex():
    rng = random.Random(5)
    for _ in range(1000):
        corpus = random_corpus(rng)
        once = annotate_numex(corpus)
        assert annotate_numex(once) == once
        for a, b in zip(corpus, once):
            assert a.surfaces == b.surfaces
            for ta, tb in zip(a.tags, b.tags):
                assert tb == ta if ta != "O" else tb in ("O", "B-NUMEX")

    for text, lang in DIGIT_FIXTURES:
        words = text.split()
        c = Corpus((Sentence("n:0", tuple(Token(w) for w in words), language=lang),))
        tags = annotate_numex(c, NumexPolicy()).sentences[0].tags
        expected = ["B-NUMEX" if numeric_by_definition(w) else "O" for w in words]
        assert tags == expected, (words, tags)
        assert "B-NUMEX" in tags and "O" in tags


# ---------------------------------------------------------------------------
# 6. IOB2 round trips
# ---------------------------------------------------------------------------


@criterion(6, "IOB2 round trips and repair validity", 10.0)
def test_criterion_06_iob2_round_trips():
    rng = random.Random(6)
    for k in range(1000):
        corpus = random_corpus(rng, n_sentences=rng.randint(0, 6), prefix="p")
        text = serialize_conll(corpus)
        back = parse_conll(text, id_prefix="p")
        assert [(s.id, s.surfaces, s.tags) for s in back] == \
               [(s.id, s.surfaces, s.tags) for s in corpus]
        assert serialize_conll(back) == text

    for _ in range(1000):
        n = rng.randint(1, 15)
        tags = repair_tags(random_tags(rng, n))
        assert validate_iob2(tags) == []
        spans = extract_entities(tags)
        assert encode_entities(spans, n) == tags
        # and from the span side: random non-overlapping spans survive encode -> extract
        cuts, pos = [], 0
        while pos < n:
            length = rng.randint(1, 3)
            if rng.random() < 0.5:
                cuts.append((rng.choice(ENTITY_TYPES), pos, min(n, pos + length) - 1))
            pos += length
        assert [tuple(s) for s in extract_entities(encode_entities(cuts, n))] == cuts

    for _ in range(1000):
        tags = random_tags(rng, rng.randint(0, 15))
        fixed = repair_tags(tags)
        assert validate_iob2(fixed) == [] and is_iob2_legal(fixed)


# ---------------------------------------------------------------------------
# 7. vocabulary
# ---------------------------------------------------------------------------


def _freq_corpus(n_types, language):
    words = [f"t{i:03d}" for i in range(n_types) for _ in range(n_types - i)]
    return Corpus((Sentence("v:0", tuple(Token(w) for w in words), language=language),))


@criterion(7, "vocabulary coverage, merge and stable files", 5.0)
def test_criterion_07_vocabulary():
    for t in (20, 100):
        c = _freq_corpus(t, "hi")
        kept = build_language_vocab(c, "0.95").tokens
        assert len(kept) == math.ceil(Fraction(95, 100) * t)
        assert kept == [f"t{i:03d}" for i in range(len(kept))]
        assert len(build_language_vocab(c, 1).tokens) == t

    parts = [build_language_vocab(_freq_corpus(20, "hi"), "0.95"),
             build_language_vocab(_freq_corpus(30, "mr"), "0.95"),
             build_language_vocab(_freq_corpus(7, "bn"), "0.95")]
    merged = merge_vocabs(parts)
    for v in parts:
        assert set(v.tokens) <= set(merged.tokens)

    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for lang, n in (("hi", 20), ("bn", 100)):
            p = os.path.join(tmp, f"{lang}.conll")
            with open(p, "wb") as fh:
                fh.write(serialize_conll(_freq_corpus(n, lang)))
            paths.append(f"{lang}={p}")
        outs = []
        for run in ("one", "two"):
            out = os.path.join(tmp, run)
            assert main(["vocab", *paths, "--coverage", "0.95", "--out-dir", out]) == 0
            outs.append({name: Path(out, name).read_bytes() for name in sorted(os.listdir(out))})
        assert outs[0] == outs[1]
        assert set(outs[0]) == {"vocab.txt", "vocab.json", "vocab.hi.txt", "vocab.bn.txt"}


# ---------------------------------------------------------------------------
# 8. Viterbi oracle
# ---------------------------------------------------------------------------


def _oracle_decode(weights, feats, paths):
    """Best legal path by enumeration; ties go to the lexicographically first."""
    n = len(feats)
    em = [[sum(weights.get(f, [0] * 13)[y] for f in feats[t]) for y in range(13)] for t in range(n)]
    start = weights.get("T:<S>", [0] * 13)
    trans = [weights.get(f"T:{label}", [0] * 13) for label in LABELS]
    best, best_score = None, None
    for path in paths:
        score = start[path[0]] + em[0][path[0]]
        for t in range(1, n):
            score += trans[path[t - 1]][path[t]] + em[t][path[t]]
        if best is None or score > best_score:
            best, best_score = path, score
    return [LABELS[y] for y in best]


@criterion(8, "Viterbi equals exhaustive legal-path search", 30.0)
def test_criterion_08_viterbi_oracle():
    vocab = build_language_vocab(Corpus((_sentence(["O"] * 3, ["ka", "kha", "42"]),)), 1)
    sentences = [_sentence(["O"] * n, ["ka", "zz", "42", "kha"][:n]) for n in range(1, 5)]
    paths = {n: legal_paths(n, LABELS) for n in range(1, 5)}
    rng = random.Random(8)
    for draw in range(200):
        window = draw % 2
        feats = {n: [featurize(s, i, vocab, window) for i in range(n)]
                 for n, s in zip(range(1, 5), sentences)}
        names = sorted({f for fs in feats.values() for pos in fs for f in pos})
        names += [f"T:{label}" for label in LABELS] + ["T:<S>"]
        weights = {f: [rng.randint(-5, 5) for _ in range(13)] for f in names}
        model = TaggerModel(weights, rng.randint(1, 9), vocab, {"window": window})
        for n, s in zip(range(1, 5), sentences):
            got = viterbi_decode(model, s)
            assert got == _oracle_decode(weights, feats[n], paths[n]), (draw, n)
            assert validate_iob2(got) == []

    for draw in range(100):
        weights = {f: [rng.randint(-5, 5) for _ in range(13)] for f in names}
        model = TaggerModel(weights, 3, vocab, {"window": 1})
        c = rng.randint(2, 10 ** 6)
        scaled = TaggerModel({f: [w * c for w in row] for f, row in weights.items()},
                             3, vocab, {"window": 1})
        for s in sentences:
            assert viterbi_decode(scaled, s) == viterbi_decode(model, s)


# ---------------------------------------------------------------------------
# 9. end-to-end pipeline
# ---------------------------------------------------------------------------


def _tree(root):
    return {str(p.relative_to(root)): p.read_bytes()
            for p in sorted(Path(root).rglob("*")) if p.is_file()}


@criterion(9, "end-to-end pipeline on the mini corpus", 60.0)
def test_criterion_09_end_to_end():
    with tempfile.TemporaryDirectory() as tmp:
        trees = []
        for run in ("a", "b"):
            out = os.path.join(tmp, run)
            assert main(["pipeline", "--config", str(MINI / "pipeline.json"), "--out-dir", out]) == 0
            trees.append(_tree(out))
        a, b = trees
        ma, mb = json.loads(a.pop("run_manifest.json")), json.loads(b.pop("run_manifest.json"))
        ma.pop("created"), mb.pop("created")
        assert a == b and ma == mb
        assert set(ma["files"]) == set(a)

        out = Path(tmp, "a")
        train = read_unified(str(out / "train.conll"))
        validation = read_unified(str(out / "validation.conll"))
        assert 250 <= len(train) + len(validation) + len(read_unified(str(out / "leftover.conll"))) <= 350
        seen = {span[0] for s in train for span in extract_entities(s)}
        assert seen == set(ENTITY_TYPES)

        metrics = json.loads((out / "metrics.json").read_text(encoding="utf-8"))
        predicted = read_unified(str(out / "validation.pred.conll"))
        ours = evaluate(validation, predicted).micro.f1
        assert abs(ours - metrics["micro"]["f1"]) <= 1e-12
        outside = evaluate(validation, all_outside(validation)).micro.f1
        frequent = evaluate(validation, most_frequent_tag_baseline(train, validation)).micro.f1
        assert outside == 0.0
        assert ours > outside and ours > frequent, (ours, frequent)


# ---------------------------------------------------------------------------
# 10. report rendering
# ---------------------------------------------------------------------------


@criterion(10, "report rendering goldens", 5.0)
def test_criterion_10_report_goldens():
    with tempfile.TemporaryDirectory() as tmp:
        gold = Path(tmp, "gold.conll")
        pred = Path(tmp, "pred.conll")
        gold.write_bytes(serialize_conll(_corpus(*WORKED_GOLD)))
        pred.write_bytes(serialize_conll(_corpus(*WORKED_PRED)))
        metrics = Path(tmp, "worked.json")
        assert main(["eval", "--gold", str(gold), "--pred", str(pred), "-o", str(metrics)]) == 0
        for fmt in ("md", "tsv"):
            out = Path(tmp, f"report.{fmt}")
            assert main(["report", str(metrics), "--names", "worked", "--format", fmt,
                         "-o", str(out)]) == 0
            assert out.read_bytes() == (GOLDEN / f"worked_report.{fmt}").read_bytes(), fmt

        tsv = (GOLDEN / "worked_report.tsv").read_text(encoding="utf-8")
        blocks = {b.splitlines()[0]: b.splitlines()[1:] for b in tsv.strip().split("\n\n")}
        micro = dict(l.split("\t") for l in blocks["# Overall performance (micro average)"][1:])
        weighted = dict(l.split("\t") for l in blocks["# Overall performance (weighted average)"][1:])
        assert micro["F1"] == "80.00" and weighted["F1"] == "66.67"

        perfect = evaluate(_corpus(["B-PERSON"]), _corpus(["B-PERSON"]))
        names = ["custom", "mbert", "muril", "xlmr"]
        text = render_tsv(names, [perfect] * 4)
        blocks = [b.splitlines() for b in text.strip().split("\n\n")]
        overall, _, by_type = blocks
        assert overall[1].split("\t") == ["Metric", *names]
        assert [l.split("\t")[0] for l in overall[2:]] == ["Accuracy", "Precision", "Recall", "F1"]
        assert all(l.split("\t")[1:] == ["100.00"] * 4 for l in overall[2:])
        assert [l.split("\t")[0] for l in by_type[2:]] == list(ENTITY_TYPES)
        assert all(len(l.split("\t")) == 5 for l in by_type[1:])
        assert "| F1 | 100.00 | 100.00 | 100.00 | 100.00 |" in render_markdown(names, [perfect] * 4)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except BaseException:
                failed += 1
    sys.exit(1 if failed else 0)
