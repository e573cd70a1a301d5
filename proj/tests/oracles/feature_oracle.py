"""Reference values for the feature fixtures.

Works from the hand annotations only (tokens, punctuation counts, prefix
judgements); never calls into the C++ code. Output is frozen into
tests/data/feature_oracle.tsv.

    python3 tests/oracles/feature_oracle.py > tests/data/feature_oracle.tsv
"""

import itertools
import json
import math
import pathlib
import sys
from collections import Counter

from lexicalrichness import LexicalRichness
from scipy.stats import entropy

HERE = pathlib.Path(__file__).resolve().parent
FIXTURES = HERE.parent / "data" / "feature_fixtures.json"

MARKERS = {"who", "whom", "whose", "which", "that", "where", "when", "why"}

MASK = (1 << 64) - 1
SEED = 0x5354594C4F454D42  # "STYLOEMB"
DIM = 256


def token_hash(token):
    h = 0xCBF29CE484222325 ^ SEED
    for b in token.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & MASK
    h ^= h >> 30
    h = (h * 0xBF58476D1CE4E5B9) & MASK
    h ^= h >> 27
    h = (h * 0x94D049BB133111EB) & MASK
    h ^= h >> 31
    return h


def embed(tokens):
    v = [0.0] * DIM
    for t in tokens:
        v[token_hash(t) % DIM] += 1.0
    norm = math.sqrt(sum(x * x for x in v))
    return [x / norm for x in v]


def cos(a, b):
    return sum(x * y for x, y in zip(a, b))


def letters(token):
    return sum(ch.isalnum() for ch in token)


def mtld(tokens):
    lex = LexicalRichness("x")
    lex.wordlist = list(tokens)
    lex.words = len(tokens)
    lex.terms = len(set(tokens))
    return lex.mtld(threshold=0.72)


def features(doc):
    ann = doc["annotation"]
    paragraphs = ann["paragraphs"]
    sentences = [s for p in paragraphs for s in p]
    tokens = [t for s in sentences for t in s["tokens"]]
    n = len(tokens)
    prefixed = set(ann["prefixed"])

    title = embed(ann["title_tokens"])
    para_vecs = [embed([t for s in p for t in s["tokens"]]) for p in paragraphs]
    title_sim = sum(cos(v, title) for v in para_vecs) / len(para_vecs)
    pairs = list(itertools.combinations(para_vecs, 2))
    para_sim = sum(cos(a, b) for a, b in pairs) / len(pairs) if pairs else None

    return [
        ("paragraph_size", len(sentences) / len(paragraphs)),
        ("sentence_length", n / len(sentences)),
        ("word_size", sum(letters(t) for t in tokens) / n),
        ("pct_long_words", sum(letters(t) > 5 for t in tokens) / n),
        ("punct_per_sentence", sum(s["punct"] for s in sentences) / len(sentences)),
        ("entropy_nats", float(entropy(list(Counter(tokens).values())))),
        ("prefix_ratio", sum(t in prefixed for t in tokens) / n),
        ("relative_clause_ratio", sum(t in MARKERS for t in tokens) / n),
        ("mtld", mtld(tokens)),
        ("title_similarity", title_sim),
        ("paragraph_similarity", para_sim),
    ]


def main():
    docs = json.loads(FIXTURES.read_text())["documents"]
    out = sys.stdout
    out.write("# frozen oracle values for feature_fixtures.json\n")
    out.write("id\tfeature\tvalue\n")
    for doc in docs:
        for name, value in features(doc):
            text = "" if value is None else repr(float(value))
            out.write(f"{doc['id']}\t{name}\t{text}\n")


if __name__ == "__main__":
    main()
