"""Meaning of an affirmative and a negated sentence.

The grammar reduction of each sentence becomes a wiring of caps, and the
word tensors are contracted along it.

    python demos/negation.py
"""
from __future__ import annotations

from importlib.resources import files

import numpy as np

from wirelogic.distsem import lexicon_from_json, sentence_meaning
from wirelogic.io import model_from_json
from wirelogic.pregroup import SimpleType, format_type, reduce_to

DATA = files("wirelogic") / "data"


def main() -> None:
    lexicon = lexicon_from_json(DATA / "lexicon.json")
    model = model_from_json(DATA / "sentence_model.json")
    for sentence in ("alice likes bob", "alice does like bob", "alice does not like bob"):
        words = sentence.split()
        types = lexicon.types_of(words)
        r = reduce_to(types, SimpleType("s"))
        value = sentence_meaning(sentence, lexicon, model).data
        print(f"{sentence!r}")
        print(f"  types:  {format_type(types)}")
        print(f"  pairs:  {r.pairs}")
        print(f"  value:  {np.real(value).tolist()}")
    not_map = model.tensor(model.signature(), "not")
    print(f"not-map: {np.real(not_map).tolist()}")


if __name__ == "__main__":
    main()
