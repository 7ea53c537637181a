"""Seeded generator for a small tri-lingual corpus in the three source schemas.

The output imitates the three source datasets closely enough to drive the
whole pipeline: HiNER-style labels for Hindi, MahaNER-style labels (with an
extra POS column) for Marathi, and B-NER-style labels for Bengali with
untagged numerals. Names are assembled from syllables, so held-out
partitions contain many surfaces never seen in training.
"""

from __future__ import annotations

import json
import os
from typing import Dict, List, Tuple

from .rng import SplitMix64

DEFAULT_SEED = 13

# sentences per (source, partition); ~300 in total
SIZES = {
    ("HiNER", "train"): 60, ("HiNER", "validation"): 15, ("HiNER", "test"): 15,
    ("MahaNER", "train"): 60, ("MahaNER", "validation"): 15, ("MahaNER", "test"): 15,
    ("B-NER", "train"): 90, ("B-NER", "test"): 30,
}

DIRS = {"HiNER": "hiner", "MahaNER": "mahaner", "B-NER": "bner"}
LANGS = {"HiNER": "hi", "MahaNER": "mr", "B-NER": "bn"}

# label used for each slot kind; None means the source leaves it untagged
LABELS = {
    "HiNER": {"PER": "PERSON", "LOC": "LOCATION", "ORG": "ORGANIZATION", "NUM": "NUMEX",
              "TIME": "TIMEX", "MISC": ["MISC", "LITERATURE", "RELIGION"], "DROP": "GAME"},
    "MahaNER": {"PER": "NEP", "LOC": "NEL", "ORG": "NEO", "NUM": "NEM",
                "TIME": ["NED", "NETI"], "MISC": "ED", "DROP": None},
    "B-NER": {"PER": "PER", "LOC": "GEO", "ORG": "ORG", "NUM": None,
              "TIME": "TIM", "MISC": ["GPE", "ART"], "DROP": "EVE"},
}

_DEVANAGARI = ["रा", "म", "सी", "ता", "मो", "हन", "कु", "मा", "वि", "जय", "नि", "ल",
               "दे", "व", "प्र", "का", "श", "सु", "रे", "खा", "अ", "नु", "गो", "पा"]
_BENGALI = ["রা", "ম", "সু", "মি", "তা", "কা", "জল", "নি", "ল", "দে", "ব", "প্র",
            "শ", "হা", "সান", "রু", "পা", "গো", "অ", "নু", "তি", "কে", "শো", "ভা"]

LEXICON = {
    "hi": {
        "syllables": _DEVANAGARI,
        "digits": "०१२३४५६७८९",
        "title": ["श्री", "श्रीमती", "डॉ."],
        "loc_suffix": ["पुर", "नगर", "गढ़", "बाद"],
        "org_suffix": ["निगम", "समिति", "बैंक", "विद्यालय"],
        "months": ["जनवरी", "मार्च", "मई", "अगस्त", "दिसंबर"],
        "misc": ["दिवाली", "रामायण", "हिंदू", "होली", "गीता"],
        "drop": ["क्रिकेट", "कबड्डी"],
        "fill": ["और", "का", "की", "है", "था", "गया", "आज", "कल", "यह", "वह", "बहुत",
                 "लोग", "काम", "बात", "साथ", "पर", "से", "को"],
        "loc_post": ["में", "से"],
        "per_post": ["ने", "को"],
        "num_post": ["रुपये", "लोग", "किलो"],
        "end": "।",
    },
    "mr": {
        "syllables": _DEVANAGARI,
        "digits": "०१२३४५६७८९",
        "title": ["श्री", "सौ.", "डॉ."],
        "loc_suffix": ["पूर", "नगर", "वाडी", "गाव"],
        "org_suffix": ["मंडळ", "संस्था", "बँक", "कंपनी"],
        "months": ["जानेवारी", "मार्च", "मे", "ऑगस्ट", "डिसेंबर"],
        "misc": ["अध्यक्ष", "मंत्री", "सचिव"],
        "drop": [],
        "fill": ["आणि", "चा", "ची", "आहे", "होता", "गेला", "आज", "उद्या", "हा", "तो",
                 "खूप", "लोक", "काम", "गोष्ट", "सोबत", "वर", "ला"],
        "loc_post": ["मध्ये", "येथे"],
        "per_post": ["यांनी", "यांना"],
        "num_post": ["रुपये", "लोक", "किलो"],
        "end": "।",
    },
    "bn": {
        "syllables": _BENGALI,
        "digits": "০১২৩৪৫৬৭৮৯",
        "title": ["শ্রী", "শ্রীমতী", "ড."],
        "loc_suffix": ["পুর", "নগর", "গঞ্জ", "বাদ"],
        "org_suffix": ["ব্যাংক", "সমিতি", "নিগম", "বিদ্যালয়"],
        "months": ["জানুয়ারি", "মার্চ", "মে", "আগস্ট", "ডিসেম্বর"],
        "misc": ["বাংলাদেশী", "গীতাঞ্জলি", "ভারতীয়"],
        "drop": ["বিজয়দিবস"],
        "fill": ["এবং", "এর", "আছে", "ছিল", "গেল", "আজ", "কাল", "এই", "সেই", "খুব",
                 "লোক", "কাজ", "কথা", "সাথে", "থেকে", "কে"],
        "loc_post": ["এ", "থেকে"],
        "per_post": ["বললেন", "কে"],
        "num_post": ["টাকা", "জন", "কেজি"],
        "end": "।",
    },
}

TEMPLATES = [
    ["PER", "FILL", "LOC", "FILL", "FILL"],
    ["TIME", "FILL", "ORG", "FILL", "NUM", "FILL"],
    ["FILL", "PER", "FILL", "ORG", "FILL"],
    ["LOC", "FILL", "MISC", "FILL", "TIME", "FILL"],
    ["PER", "FILL", "NUM", "FILL", "LOC", "FILL"],
    ["ORG", "FILL", "PER", "FILL", "DROP", "FILL"],
    ["FILL", "MISC", "FILL", "PER", "FILL", "NUM"],
    ["LOC", "FILL", "ORG", "FILL", "TIME"],
]
RESTRICTED_TEMPLATES = [  # B-NER test carries only PER/LOC/ORG
    ["PER", "FILL", "LOC", "FILL", "FILL"],
    ["FILL", "PER", "FILL", "ORG", "FILL"],
    ["ORG", "FILL", "LOC", "FILL", "PER", "FILL"],
]


class _Gen:
    def __init__(self, rng: SplitMix64, lang: str, source: str):
        self.rng = rng
        self.lex = LEXICON[lang]
        self.labels = LABELS[source]
        # a shared pool of recurring names, plus fresh ones drawn on the fly
        self.people = [self._name(2) for _ in range(12)]
        self.places = [self._name(1) + self.choice(self.lex["loc_suffix"]) for _ in range(10)]
        self.orgs = [self._name(2) for _ in range(8)]

    def choice(self, seq):
        return seq[self.rng.below(len(seq))]

    def chance(self, num: int, den: int) -> bool:
        return self.rng.below(den) < num

    def _name(self, min_syllables: int) -> str:
        k = min_syllables + self.rng.below(2)
        return "".join(self.choice(self.lex["syllables"]) for _ in range(k))

    def _label(self, kind):
        label = self.labels[kind]
        return self.choice(label) if isinstance(label, list) else label

    def _entity(self, label, surfaces) -> List[Tuple[str, str]]:
        if label is None:
            return [(s, "O") for s in surfaces]
        return [(s, ("B-" if i == 0 else "I-") + label) for i, s in enumerate(surfaces)]

    def _number(self) -> str:
        value = str(self.rng.below(5000) + 1)
        if self.chance(1, 4):
            value += "." + str(self.rng.below(10))
        if self.chance(1, 2):
            value = "".join(self.lex["digits"][int(c)] if c.isdigit() else c for c in value)
        return value

    def slot(self, kind: str) -> List[Tuple[str, str]]:
        lex = self.lex
        if kind == "FILL":
            return [(self.choice(lex["fill"]), "O")]
        if kind == "PER":
            out = [(self.choice(lex["title"]), "O")] if self.chance(2, 3) else []
            first = self._name(2) if self.chance(2, 5) else self.choice(self.people)
            names = [first] + ([self.choice(self.people)] if self.chance(1, 2) else [])
            out += self._entity(self._label("PER"), names)
            return out + [(self.choice(lex["per_post"]), "O")]
        if kind == "LOC":
            place = (self._name(1) + self.choice(lex["loc_suffix"])
                     if self.chance(2, 5) else self.choice(self.places))
            return self._entity(self._label("LOC"), [place]) + [(self.choice(lex["loc_post"]), "O")]
        if kind == "ORG":
            head = self._name(2) if self.chance(2, 5) else self.choice(self.orgs)
            return self._entity(self._label("ORG"), [head, self.choice(lex["org_suffix"])])
        if kind == "NUM":
            return self._entity(self._label("NUM"), [self._number()]) + \
                [(self.choice(lex["num_post"]), "O")]
        if kind == "TIME":
            parts = [self.choice(lex["months"])]
            if self.chance(1, 2):
                parts.append(str(1950 + self.rng.below(75)))
            return self._entity(self._label("TIME"), parts)
        if kind == "MISC":
            return self._entity(self._label("MISC"), [self.choice(lex["misc"])])
        if kind == "DROP":
            if not lex["drop"]:
                return [(self.choice(lex["fill"]), "O")]
            return self._entity(self._label("DROP"), [self.choice(lex["drop"])])
        raise ValueError(kind)

    def sentence(self, templates) -> List[Tuple[str, str]]:
        out = []
        for kind in self.choice(templates):
            out.extend(self.slot(kind))
        out.append((self.lex["end"], "O"))
        return out


def _render(source: str, sentences: List[List[Tuple[str, str]]], docstart: bool) -> str:
    lines = ["-DOCSTART-\tO", ""] if docstart else []
    for sent in sentences:
        for surface, tag in sent:
            if source == "MahaNER":
                lines.append(f"{surface}\tX\t{tag}")  # dummy POS column
            else:
                lines.append(f"{surface}\t{tag}")
        lines.append("")
    return "\n".join(lines) + "\n"


def generate(seed: int = DEFAULT_SEED) -> Dict[Tuple[str, str], str]:
    """CoNLL text per (source, partition)."""
    out = {}
    for source in ("HiNER", "MahaNER", "B-NER"):
        gen = _Gen(SplitMix64.for_stream(seed, "synth", source), LANGS[source], source)
        for (src, partition), n in SIZES.items():
            if src != source:
                continue
            templates = RESTRICTED_TEMPLATES if (source, partition) == ("B-NER", "test") else TEMPLATES
            sentences = [gen.sentence(templates) for _ in range(n)]
            out[source, partition] = _render(source, sentences, docstart=source == "HiNER")
    return out


def pipeline_config(data_dir: str = ".", output_dir: str = "run") -> dict:
    datasets = [
        {"source": source, "partition": partition, "language": LANGS[source],
         "path": os.path.join(data_dir, DIRS[source], f"{partition}.conll")}
        for source, partition in SIZES
    ]
    return {
        "datasets": datasets,
        "mappings": {"HiNER": "builtin:HiNER", "MahaNER": "builtin:MahaNER", "B-NER": "builtin:B-NER"},
        "numex": {"sources": ["B-NER"]},
        "recipe": {"seed": 7},
        "vocab": {"coverage": "0.95"},
        "sweep": {"epochs": [1, 5], "window": [1]},
        "output_dir": output_dir,
    }


def write(directory: str, seed: int = DEFAULT_SEED) -> List[str]:
    written = []
    for (source, partition), text in generate(seed).items():
        path = os.path.join(directory, DIRS[source], f"{partition}.conll")
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        written.append(path)
    config_path = os.path.join(directory, "pipeline.json")
    with open(config_path, "w", encoding="utf-8") as fh:
        json.dump(pipeline_config(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    written.append(config_path)
    return written
