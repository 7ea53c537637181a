"""``nerunify`` command line: one subcommand per pipeline stage plus ``pipeline``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from . import __version__
from .config import DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV, load_config
from .corpus import NerUnifyError, parse_conll, serialize_conll
from .fileio import atomic_write, read_bytes, read_unified
from .mapping import MappingError, NumexPolicy, annotate_numex, load_mapping, map_tags
from .metrics import MetricsReport, diff_report, evaluate
from .pipeline import MANIFEST_NAME, run_pipeline, verify_manifest
from .reports import render_markdown, render_tsv
from .splits import DEFAULT_RECIPE, SplitRecipe, compose_splits
from .tagger import DEFAULT_GRID, TaggerModel, sweep, sweep_tsv, train
from .vocab import Vocabulary, build_language_vocab, merge_vocabs
from . import synth

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _out_dir(arg: Optional[str]) -> str:
    return arg or os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR


def _write_or_print(path: Optional[str], data) -> None:
    if path and path != "-":
        atomic_write(path, data)
    else:
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        else:
            sys.stdout.write(data)


def _pairs(items: List[str], what: str):
    out = []
    for item in items:
        key, sep, path = item.partition("=")
        if not sep or not key or not path:
            raise UsageError(f"expected {what}=PATH, got {item!r}")
        out.append((key, path))
    return out


def _load_vocab(path: str) -> Vocabulary:
    sidecar = os.path.splitext(path)[0] + ".json"
    meta = read_bytes(sidecar).decode("utf-8") if os.path.isfile(sidecar) else None
    return Vocabulary.from_files(read_bytes(path).decode("utf-8"), meta)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_map(args) -> int:
    spec = load_mapping(args.mapping or f"builtin:{args.source}")
    if spec.source_name != args.source:
        raise MappingError(f"mapping is for {spec.source_name!r}, not {args.source!r}")
    corpus = parse_conll(read_bytes(args.input), source=args.source)
    _write_or_print(args.output, serialize_conll(map_tags(corpus, spec)))
    return EXIT_OK


def cmd_numex(args) -> int:
    policy = NumexPolicy()
    if args.policy:
        with open(args.policy, encoding="utf-8") as fh:
            policy = NumexPolicy.from_dict(json.load(fh))
    corpus = read_unified(args.input)
    _write_or_print(args.output, serialize_conll(annotate_numex(corpus, policy)))
    return EXIT_OK


def cmd_split(args) -> int:
    if args.recipe:
        with open(args.recipe, encoding="utf-8") as fh:
            recipe = SplitRecipe.from_json(fh.read())
    else:
        recipe = DEFAULT_RECIPE
    if args.seed is not None:
        recipe = recipe.with_seed(args.seed)
    inputs = []
    for key, path in _pairs(args.inputs, "SOURCE/PARTITION"):
        source, sep, partition = key.rpartition("/")
        if not sep or not source or not partition:
            raise UsageError(f"expected SOURCE/PARTITION=PATH, got {key!r}")
        inputs.append((source, partition, read_unified(path, id_prefix=key)))
    result = compose_splits(inputs, recipe)
    out = _out_dir(args.out_dir)
    for name, corpus in (("train", result.train), ("validation", result.validation),
                         ("leftover", result.leftover)):
        atomic_write(os.path.join(out, f"{name}.conll"), serialize_conll(corpus))
    manifest = json.dumps(result.manifest_dict(recipe), ensure_ascii=False, indent=2) + "\n"
    atomic_write(os.path.join(out, "manifest.json"), manifest)
    return EXIT_OK


def cmd_vocab(args) -> int:
    vocabs = []
    for lang, path in _pairs(args.inputs, "LANG"):
        corpus = parse_conll(read_bytes(path), language=lang, source="input")
        vocabs.append(build_language_vocab(corpus, args.coverage, language=lang))
    merged = merge_vocabs(vocabs)
    out = _out_dir(args.out_dir)
    atomic_write(os.path.join(out, "vocab.txt"), merged.to_text())
    atomic_write(os.path.join(out, "vocab.json"), merged.sidecar_json())
    for v in vocabs:
        (lang,) = v.per_language_sizes or {"und": 0}
        atomic_write(os.path.join(out, f"vocab.{lang}.txt"), v.to_text())
    return EXIT_OK


def cmd_train(args) -> int:
    vocab = _load_vocab(args.vocab)
    model = train(read_unified(args.train), vocab, args.epochs, args.shuffle_seed, args.window)
    _write_or_print(args.output, model.to_text())
    return EXIT_OK


def cmd_tag(args) -> int:
    vocab = _load_vocab(args.vocab)
    model = TaggerModel.from_text(read_bytes(args.model).decode("utf-8"), vocab)
    corpus = parse_conll(read_bytes(args.input), source="input")
    _write_or_print(args.output, serialize_conll(model.tag_corpus(corpus)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = DEFAULT_GRID
    if args.grid:
        text = read_bytes(args.grid).decode("utf-8") if os.path.isfile(args.grid) else args.grid
        grid = json.loads(text)
    vocab = _load_vocab(args.vocab)
    best, results = sweep(grid, read_unified(args.train), read_unified(args.validation),
                          vocab, args.mode)
    _write_or_print(args.output, sweep_tsv(results))
    if args.model_out:
        atomic_write(args.model_out, train(read_unified(args.train), vocab, **best).to_text())
    print(json.dumps(best), file=sys.stderr)
    return EXIT_OK


def cmd_eval(args) -> int:
    gold = read_unified(args.gold)
    pred = read_unified(args.pred)
    report = evaluate(gold, pred, args.mode)
    _write_or_print(args.output, report.to_json())
    if args.tables:
        name = [args.name]
        atomic_write(args.tables + ".md", render_markdown(name, [report]))
        atomic_write(args.tables + ".tsv", render_tsv(name, [report]))
    if args.diff:
        diffs = [d.to_dict() for d in diff_report(gold, pred, args.diff, args.mode)]
        atomic_write(args.diff_output, json.dumps(diffs, ensure_ascii=False, indent=2) + "\n")
    return EXIT_OK


def cmd_report(args) -> int:
    reports = []
    for path in args.metrics:
        try:
            with open(path, encoding="utf-8") as fh:
                reports.append(MetricsReport.from_dict(json.load(fh)))
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise NerUnifyError(f"{path}: malformed metrics file ({exc})") from None
    names = args.names.split(",") if args.names else [
        os.path.splitext(os.path.basename(p))[0] for p in args.metrics
    ]
    if len(names) != len(reports):
        raise UsageError("--names must give one name per metrics file")
    render = render_tsv if args.format == "tsv" else render_markdown
    _write_or_print(args.output, render(names, reports))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = load_config(args.config, args.out_dir)
    files = run_pipeline(cfg)
    print(f"wrote {len(files)} files and {MANIFEST_NAME} to {cfg.output_dir}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    bad = verify_manifest(args.manifest)
    for name in bad:
        print(f"MISMATCH {name}", file=sys.stderr)
    return EXIT_DATA if bad else EXIT_OK


def cmd_synth(args) -> int:
    for path in synth.write(args.out_dir, args.seed):
        print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nerunify", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("map", help="map source tags to the unified schema")
    s.add_argument("input")
    s.add_argument("--source", required=True)
    s.add_argument("--mapping", help="mapping JSON file or builtin:NAME (default: built-in for --source)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_map)

    s = sub.add_parser("numex", help="auto-annotate numeric tokens as NUMEX")
    s.add_argument("input")
    s.add_argument("--policy", help="numex policy JSON")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_numex)

    s = sub.add_parser("split", help="compose train/validation/leftover splits")
    s.add_argument("inputs", nargs="+", metavar="SOURCE/PARTITION=PATH")
    s.add_argument("--recipe", help="recipe JSON (default: built-in recipe)")
    s.add_argument("--seed", type=int)
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("vocab", help="build per-language and merged vocabularies")
    s.add_argument("inputs", nargs="+", metavar="LANG=PATH")
    s.add_argument("--coverage", default="0.95")
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_vocab)

    s = sub.add_parser("train", help="train the perceptron tagger")
    s.add_argument("--train", required=True)
    s.add_argument("--vocab", required=True)
    s.add_argument("--epochs", type=int, default=5)
    s.add_argument("--shuffle-seed", type=int, default=0)
    s.add_argument("--window", type=int, default=1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("tag", help="tag a CoNLL file with a trained model")
    s.add_argument("input")
    s.add_argument("--model", required=True)
    s.add_argument("--vocab", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_tag)

    s = sub.add_parser("sweep", help="grid-search tagger hyperparameters")
    s.add_argument("--train", required=True)
    s.add_argument("--validation", required=True)
    s.add_argument("--vocab", required=True)
    s.add_argument("--grid", help="grid JSON file or inline JSON")
    s.add_argument("--mode", choices=["repair", "strict"], default="repair")
    s.add_argument("--model-out")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("eval", help="entity-level evaluation")
    s.add_argument("--gold", required=True)
    s.add_argument("--pred", required=True)
    s.add_argument("--mode", choices=["repair", "strict"], default="repair")
    s.add_argument("-o", "--output")
    s.add_argument("--tables", metavar="PREFIX", help="also write PREFIX.md and PREFIX.tsv")
    s.add_argument("--name", default="model")
    s.add_argument("--diff", type=int, default=0, metavar="LIMIT")
    s.add_argument("--diff-output", default="diff.json")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("report", help="render metrics files as tables")
    s.add_argument("metrics", nargs="+")
    s.add_argument("--names", help="comma-separated column names")
    s.add_argument("--format", choices=["md", "tsv"], default="md")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("pipeline", help="run every stage from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("verify", help="re-check a run manifest's checksums")
    s.add_argument("manifest")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("synth", help="write the synthetic mini-corpus and its config")
    s.add_argument("out_dir")
    s.add_argument("--seed", type=int, default=synth.DEFAULT_SEED)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nerunify {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NerUnifyError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"nerunify {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
