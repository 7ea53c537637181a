"""End-to-end run: map -> numex -> split -> vocab -> train/sweep -> tag -> eval -> report."""

from __future__ import annotations

import datetime
import json
import logging
import os
import platform
from typing import Dict, List

from . import __version__
from .config import ResolvedConfig
from .corpus import read_conll, serialize_conll
from .fileio import atomic_write, sha256_file
from .mapping import annotate_numex, load_mapping, map_tags
from .metrics import diff_report, evaluate
from .reports import render_markdown, render_tsv
from .splits import compose_splits
from .synth import DIRS
from .tagger import DEFAULT_GRID, sweep, sweep_tsv, train
from .vocab import build_master_vocab, split_by_language

log = logging.getLogger(__name__)

MANIFEST_NAME = "run_manifest.json"


def _json(data) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2) + "\n"


def run_pipeline(cfg: ResolvedConfig) -> Dict[str, str]:
    """Run every stage and write artifacts under ``cfg.output_dir``.

    Returns produced file names (relative to the output dir) mapped to
    their SHA-256.
    """
    out = cfg.output_dir
    produced: List[str] = []

    def emit(name: str, data) -> None:
        atomic_write(os.path.join(out, name), data)
        produced.append(name)

    inputs = []
    for d in cfg.datasets:
        corpus = read_conll(d.path, d.language, d.source, id_prefix=f"{d.source}/{d.partition}")
        unified = map_tags(corpus, load_mapping(cfg.mapping_ref(d.source)))
        if d.source in cfg.raw.numex.sources:
            unified = annotate_numex(unified, cfg.numex_policy)
        stem = DIRS.get(d.source, d.source.lower())
        emit(f"mapped/{stem}.{d.partition}.conll", serialize_conll(unified))
        inputs.append((d.source, d.partition, unified))
        log.info("mapped %s/%s: %d sentences", d.source, d.partition, len(unified))

    split = compose_splits(inputs, cfg.recipe)
    emit("train.conll", serialize_conll(split.train))
    emit("validation.conll", serialize_conll(split.validation))
    emit("leftover.conll", serialize_conll(split.leftover))
    emit("split_manifest.json", _json(split.manifest_dict(cfg.recipe)))

    vocab, per_language = build_master_vocab(split_by_language(split.train), cfg.coverage)
    emit("vocab.txt", vocab.to_text())
    emit("vocab.json", vocab.sidecar_json())
    for lang, v in per_language.items():
        emit(f"vocab.{lang}.txt", v.to_text())

    if cfg.raw.tagger is None:
        grid = cfg.raw.sweep if cfg.raw.sweep is not None else DEFAULT_GRID
        best, results = sweep(grid, split.train, split.validation, vocab, cfg.raw.mode)
        emit("sweep.tsv", sweep_tsv(results))
    else:
        best = cfg.hyperparams
    model = train(split.train, vocab, **best)
    emit("model.txt", model.to_text())

    predicted = model.tag_corpus(split.validation)
    emit("validation.pred.conll", serialize_conll(predicted))
    report = evaluate(split.validation, predicted, cfg.raw.mode)
    emit("metrics.json", report.to_json())
    diffs = diff_report(split.validation, predicted, limit=100, mode=cfg.raw.mode)
    emit("diff.json", _json([d.to_dict() for d in diffs]))
    names = [cfg.raw.model_name]
    emit("report.md", render_markdown(names, [report]))
    emit("report.tsv", render_tsv(names, [report]))

    files = {name: sha256_file(os.path.join(out, name)) for name in sorted(produced)}
    manifest = {
        "tool": "nerunify",
        "version": __version__,
        "python": platform.python_version(),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "config": cfg.to_dict(),
        "seeds": {"split": cfg.recipe.seed, "shuffle": best["shuffle_seed"]},
        "selected_hyperparams": best,
        "inputs": {d.path: sha256_file(d.path) for d in cfg.datasets},
        "files": files,
    }
    atomic_write(os.path.join(out, MANIFEST_NAME), _json(manifest))
    return files


def verify_manifest(path: str) -> List[str]:
    """Names of files whose checksum no longer matches (or that are missing)."""
    with open(path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    base = os.path.dirname(os.path.abspath(path))
    bad = []
    for name, digest in manifest["files"].items():
        full = os.path.join(base, name)
        if not os.path.isfile(full) or sha256_file(full) != digest:
            bad.append(name)
    for name, digest in manifest.get("inputs", {}).items():
        if not os.path.isfile(name) or sha256_file(name) != digest:
            bad.append(name)
    return bad
