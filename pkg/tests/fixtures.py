"""Small corpora shared by the tagger, CLI and acceptance tests."""

from __future__ import annotations

import random
from collections import Counter, defaultdict

from nerunify.corpus import ENTITY_TYPES, Corpus, Sentence, Token


def separable_fixture(n=30, seed=3):
    """Entities are keyed by unique random surfaces; fillers are always O.

    Surfaces share no prefixes or suffixes with their type names, so the
    tagger has to learn each surface's label from its id feature. With
    seed 3 one epoch is not enough to fit it.
    """
    rng = random.Random(seed)
    alphabet = "bcdfghjklmnpqrstvwxz"
    words = set()

    def fresh():
        while True:
            w = "".join(rng.choice(alphabet) for _ in range(5))
            if w not in words:
                words.add(w)
                return w

    lexicon = {t: [fresh() for _ in range(3)] for t in ENTITY_TYPES}
    fillers = [fresh() for _ in range(6)]
    sentences = []
    for k in range(n):
        tokens = []
        for _ in range(3):
            tokens.append(Token(rng.choice(fillers)))
            t = rng.choice(ENTITY_TYPES)
            tokens.append(Token(rng.choice(lexicon[t]), f"B-{t}"))
        sentences.append(Sentence(f"fx:{k}", tuple(tokens)))
    return Corpus(tuple(sentences))


def most_frequent_tag_baseline(train: Corpus, target: Corpus) -> Corpus:
    """Tag each token with its most frequent training tag; unseen surfaces get O."""
    counts = defaultdict(Counter)
    for s in train:
        for tok in s.tokens:
            counts[tok.surface][tok.tag] += 1
    best = {w: min(c.items(), key=lambda kv: (-kv[1], kv[0]))[0] for w, c in counts.items()}
    return Corpus(tuple(s.with_tags([best.get(w, "O") for w in s.surfaces]) for s in target))


def all_outside(target: Corpus) -> Corpus:
    return Corpus(tuple(s.with_tags(["O"] * len(s)) for s in target))
