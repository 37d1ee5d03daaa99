"""Distributional word vectors from a tiny corpus.

Counts co-occurrences within a window, normalizes the rows and prints
pairwise cosine similarities. Sharded counting gives the same result.

    python demos/corpus.py
"""
from __future__ import annotations

import numpy as np

from wirelogic.distsem import ContextConfig, ingest_corpus, meaning_vector, similarity, tokenize

TEXT = """The cat sat on the mat, and the dog sat on the rug.
A cat and a dog ate the food while the cat slept near the dog.
Dog food!
"""


def main() -> None:
    config = ContextConfig(("the", "sat", "dog"), 2)
    segments = tokenize(TEXT)
    model = ingest_corpus(segments, config)
    sharded = ingest_corpus(segments, config, shards=4, workers=2)
    same = all(np.array_equal(model.vector(w), sharded.vector(w)) for w in model.counts)
    print(f"{model.token_count} tokens, sharded counts identical: {same}")

    words = ["cat", "dog", "mat", "rug", "food"]
    for w in words:
        print(f"  {w:5s} {model.vector(w).astype(int).tolist()}")
    vecs = {w: meaning_vector(model, w) for w in words}
    print("similarities:")
    for i, a in enumerate(words):
        for b in words[i + 1 :]:
            print(f"  {a:5s} {b:5s} {similarity(vecs[a], vecs[b]):.3f}")


if __name__ == "__main__":
    main()
