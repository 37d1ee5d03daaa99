"""Distributional word meaning and sentence meaning through grammar diagrams.

Word vectors come from co-occurrence counts against a fixed list of context
words.  Sentence meaning puts the word states side by side, plugs them into
the caps of the pregroup reduction, and contracts in a tensor model.
"""
from __future__ import annotations

import json
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .diagram import Diagram, Signature, cup, generator, identity, par, seq
from .pregroup import STANDARD, GrammarError, PregroupType, SimpleType, parse_type, reduce_to, reduction_to_diagram
from .tensor import Model, TensorValue, interpret

NOUN = "n"
SENTENCE = "s"
NOT_BOX = "not"
BUILTINS = ("does", "not")


class DistSemError(ValueError):
    pass


# -- corpus -----------------------------------------------------------------------

_PUNCT = re.compile(r"[^\w\s]", re.UNICODE)


def tokenize(text: str) -> list[list[str]]:
    """Lowercase, drop punctuation, split on whitespace; one segment per line."""
    segments = []
    for line in text.splitlines():
        toks = _PUNCT.sub("", line.lower()).split()
        if toks:
            segments.append(toks)
    return segments


@dataclass(frozen=True)
class ContextConfig:
    context: tuple[str, ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DistSemError("window scope k must be >= 1")
        if len(set(self.context)) != len(self.context):
            raise DistSemError("context words must be distinct")

    @property
    def n(self) -> int:
        return len(self.context)


def load_context_config(path: str | Path) -> ContextConfig:
    """One context word per line plus a ``window = k`` line; ``#`` starts a comment."""
    words, k = [], None
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"window\s*=\s*(\d+)", line)
        if m:
            k = int(m.group(1))
        else:
            words.append(line.lower())
    if k is None:
        raise DistSemError(f"{path}: missing 'window = k' line")
    return ContextConfig(tuple(words), k)


@dataclass
class CooccurrenceModel:
    config: ContextConfig
    counts: dict[str, np.ndarray] = field(default_factory=dict)
    token_count: int = 0

    @property
    def empty(self) -> bool:
        return self.token_count == 0

    def vector(self, word: str) -> np.ndarray:
        try:
            return self.counts[word]
        except KeyError:
            raise DistSemError(f"word {word!r} does not occur in the corpus") from None

    def merge(self, other: "CooccurrenceModel") -> "CooccurrenceModel":
        if other.config != self.config:
            raise DistSemError("cannot merge counts made with different configurations")
        counts = {w: v.copy() for w, v in self.counts.items()}
        for w, v in other.counts.items():
            counts[w] = counts[w] + v if w in counts else v.copy()
        return CooccurrenceModel(self.config, counts, self.token_count + other.token_count)


# A flat token stream uses None as the segment separator.
Stream = Sequence["str | None"]


def _flatten(segments: Iterable[Sequence[str]] | Sequence[str]) -> list[str | None]:
    segments = list(segments)
    if segments and all(isinstance(s, str) or s is None for s in segments):
        return list(segments)
    out: list[str | None] = []
    for seg in segments:
        if out:
            out.append(None)
        out.extend(seg)
    return out


def _count_range(stream: Stream, lo: int, hi: int, config: ContextConfig) -> CooccurrenceModel:
    index = {x: i for i, x in enumerate(config.context)}
    counts: dict[str, np.ndarray] = {}
    tokens = 0
    k = config.k
    for i in range(lo, hi):
        a = stream[i]
        if a is None:
            continue
        tokens += 1
        seen = set()
        for step in (-1, 1):
            j = i + step
            while 0 <= j < len(stream) and abs(j - i) <= k and stream[j] is not None:
                x = stream[j]
                if x in index:
                    seen.add(index[x])
                j += step
        vec = counts.get(a)
        if vec is None:
            vec = counts[a] = np.zeros(config.n, dtype=np.int64)
        for c in seen:
            vec[c] += 1
    return CooccurrenceModel(config, counts, tokens)


@dataclass(frozen=True)
class Shard:
    tokens: tuple
    lo: int  # centre positions lo..hi-1 are counted in this shard
    hi: int


def make_shards(stream: Stream, cuts: Sequence[int], k: int) -> list[Shard]:
    """Split at ``cuts``; each shard keeps ``k`` extra tokens on both sides."""
    bounds = [0] + sorted(cuts) + [len(stream)]
    shards = []
    for a, b in zip(bounds, bounds[1:]):
        start, stop = max(0, a - k), min(len(stream), b + k)
        shards.append(Shard(tuple(stream[start:stop]), a - start, b - start))
    return shards


def count_shard(shard: Shard, config: ContextConfig) -> CooccurrenceModel:
    return _count_range(shard.tokens, shard.lo, shard.hi, config)


def ingest_corpus(
    tokens: Iterable[Sequence[str]] | Sequence[str],
    config: ContextConfig,
    shards: int = 1,
    workers: int = 1,
) -> CooccurrenceModel:
    """Count ``N_x(a)``: positions holding ``a`` with some ``x`` at distance 1..k.

    ``tokens`` is a flat token list or a list of segments (windows never cross
    segments).  With ``shards > 1`` the stream is cut into overlapping pieces
    that are counted independently and summed; the result is identical.
    """
    stream = _flatten(tokens)
    if shards <= 1 or len(stream) < 2:
        return _count_range(stream, 0, len(stream), config)
    step = max(1, len(stream) // shards)
    cuts = list(range(step, len(stream), step))[: shards - 1]
    pieces = make_shards(stream, cuts, config.k)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda s: count_shard(s, config), pieces))
    else:
        parts = [count_shard(s, config) for s in pieces]
    out = CooccurrenceModel(config)
    for p in parts:
        out = out.merge(p)
    return out


# -- meaning vectors ----------------------------------------------------------------


@dataclass(frozen=True)
class MeaningVector:
    word: str
    vector: np.ndarray
    zero: bool = False

    def __post_init__(self):
        object.__setattr__(self, "vector", np.asarray(self.vector, dtype=float))


def normalize_vector(word: str, counts) -> MeaningVector:
    v = np.asarray(counts, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return MeaningVector(word, np.zeros_like(v), zero=True)
    return MeaningVector(word, v / norm)


def meaning_vector(model: CooccurrenceModel, word: str) -> MeaningVector:
    return normalize_vector(word, model.vector(word))


def similarity(u: MeaningVector, v: MeaningVector) -> float:
    if u.vector.shape != v.vector.shape:
        raise DistSemError(f"dimension mismatch: {u.vector.shape} vs {v.vector.shape}")
    return float(np.dot(u.vector, v.vector))


def save_vectors(vectors: Mapping[str, MeaningVector], path: str | Path) -> None:
    obj = {w: [float(x) for x in mv.vector] for w, mv in sorted(vectors.items())}
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def load_vectors(path: str | Path) -> dict[str, MeaningVector]:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return {w: MeaningVector(w, v, zero=not np.any(v)) for w, v in obj.items()}


# -- lexicon ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    type: PregroupType
    tensor: np.ndarray | None = None
    builtin: str | None = None

    def __post_init__(self):
        if (self.tensor is None) == (self.builtin is None):
            raise DistSemError(f"entry {self.word!r} needs exactly one of tensor and builtin")
        if self.builtin is not None and self.builtin not in BUILTINS:
            raise DistSemError(f"entry {self.word!r}: unknown builtin {self.builtin!r}")

    @property
    def atoms(self) -> tuple[str, ...]:
        return tuple(t.atom for t in self.type)


@dataclass
class Lexicon:
    entries: dict[str, LexiconEntry]
    convention: str = STANDARD

    def __getitem__(self, word: str) -> LexiconEntry:
        try:
            return self.entries[word.lower()]
        except KeyError:
            raise DistSemError(f"word {word!r} is not in the lexicon") from None

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def types_of(self, words: Sequence[str]) -> PregroupType:
        return tuple(t for w in words for t in self[w].type)

    def scaled(self, word: str, factor: float) -> "Lexicon":
        e = self[word]
        entries = dict(self.entries)
        entries[e.word] = LexiconEntry(e.word, e.type, e.tensor * factor)
        return Lexicon(entries, self.convention)

    def replaced(self, word: str, tensor) -> "Lexicon":
        e = self[word]
        entries = dict(self.entries)
        entries[e.word] = LexiconEntry(e.word, e.type, np.asarray(tensor))
        return Lexicon(entries, self.convention)


def lexicon_from_json(obj: dict | str | Path) -> Lexicon:
    """``{word: {"type": "n^l s n^r", "tensor": {"shape": [...], "data": [...]}}}``.

    ``"builtin": "does" | "not"`` selects a wired functional word instead of a
    tensor.  The optional key ``"_convention"`` (``"standard"`` or ``"lambek"``)
    says how ``^l``/``^r`` are to be read.
    """
    if not isinstance(obj, dict):
        obj = json.loads(Path(obj).read_text(encoding="utf-8"))
    convention = obj.get("_convention", STANDARD)
    entries = {}
    for word, e in obj.items():
        if word.startswith("_"):
            continue
        try:
            ty = parse_type(e["type"], convention)
            tensor = None
            if "tensor" in e:
                t = e["tensor"]
                if isinstance(t, dict):
                    tensor = np.asarray(t["data"], dtype=float).reshape(t.get("shape", [-1]))
                else:
                    tensor = np.asarray(t, dtype=float)
            entries[word.lower()] = LexiconEntry(word.lower(), ty, tensor, e.get("builtin"))
        except (KeyError, TypeError, ValueError) as err:
            if isinstance(err, (GrammarError, DistSemError)):
                raise DistSemError(f"lexicon entry {word!r}: {err}") from None
            raise DistSemError(f"lexicon entry {word!r} is malformed: {err!r}") from None
    return Lexicon(entries, convention)


def _word_gen(word: str) -> str:
    return f"word.{word}"


def functional_word_diagram(
    kind: str, sig: Signature, noun: str = NOUN, sentence: str = SENTENCE
) -> Diagram:
    """State on ``noun, sentence, sentence, noun`` for a word typed ``n^l s s^r n``.

    The outer cup hands the subject through to the verb phrase; the inner cup
    carries the verb phrase's sentence wire to the output, through the
    not-box for ``"not"``.
    """
    if kind not in BUILTINS:
        raise DistSemError(f"unknown functional word {kind!r}")
    inner = cup(sig, sentence)
    if kind == "not":
        inner = inner >> (generator(sig, NOT_BOX) @ identity(sig, sentence))
    return cup(sig, noun) >> (identity(sig, noun) @ inner @ identity(sig, noun))


def _word_state(entry: LexiconEntry, sig: Signature) -> Diagram:
    if entry.builtin is not None:
        if [t.z for t in entry.type] != [-1, 0, 1, 0] or entry.atoms[0] != entry.atoms[3] or entry.atoms[1] != entry.atoms[2]:
            raise DistSemError(f"functional word {entry.word!r} must be typed like 'n^l s s^r n'")
        return functional_word_diagram(entry.builtin, sig, entry.atoms[0], entry.atoms[1])
    return generator(sig, _word_gen(entry.word))


def _extend(model: Model, lexicon: Lexicon, words: Sequence[str]) -> Model:
    sig = model.signature().copy()
    tensors = dict(model.tensors)
    for w in dict.fromkeys(x.lower() for x in words):
        e = lexicon[w]
        for a in e.atoms:
            if a not in model.dims:
                raise DistSemError(f"model has no dimension for atom {a!r}")
        if e.tensor is None:
            if NOT_BOX not in sig and e.builtin == "not":
                raise DistSemError("model does not define the not-box")
            continue
        shape = tuple(model.dim(a) for a in e.atoms)
        if e.tensor.shape != shape:
            raise DistSemError(f"tensor of {w!r} has shape {e.tensor.shape}, expected {shape}")
        name = _word_gen(w)
        if name not in sig:
            sig.add_generator(name, (), e.atoms)
        tensors[name] = e.tensor
    return Model(model.semiring, model.dims, tensors, model.bases, sig, model.conjugate_dagger, model.name)


def sentence_diagram(words: Sequence[str], lexicon: Lexicon, sig: Signature, target: str = SENTENCE):
    """(diagram, reduction) for ``words``; raises :class:`GrammarError` if ungrammatical."""
    if not words:
        raise GrammarError("empty sentence")
    types = lexicon.types_of(words)
    r = reduce_to(types, SimpleType(target))
    if r is None:
        raise GrammarError(f"'{' '.join(words)}' does not reduce to {target}")
    states = par(*[_word_state(lexicon[w], sig) for w in words])
    return states >> reduction_to_diagram(r, sig), r


def sentence_meaning(
    words: Sequence[str] | str,
    lexicon: Lexicon,
    model: Model,
    target: str = SENTENCE,
) -> TensorValue:
    """Meaning of a sentence as a vector in the sentence space of ``model``."""
    if isinstance(words, str):
        words = words.lower().split()
    m = _extend(model, lexicon, words)
    d, _ = sentence_diagram(words, lexicon, m.signature(), target)
    return interpret(d, m)


def transitive_as_function(subject: str, verb: str, obj: str, lexicon: Lexicon, model: Model) -> TensorValue:
    """Apply the verb, bent into a map ``n n -> s``, to subject and object states.

    This is the same sentence computed without any caps: the verb tensor is
    reindexed once into a process and composed with the nouns.
    """
    e = lexicon[verb]
    if [t.z for t in e.type] != [-1, 0, 1] or e.tensor is None:
        raise DistSemError(f"{verb!r} is not a transitive verb with a tensor")
    m = _extend(model, lexicon, [subject, obj])
    sig = m.signature().copy()
    n, s = e.atoms[0], e.atoms[1]
    fname = f"fn.{e.word}"
    sig.add_generator(fname, (n, n), (s,))
    fn = np.transpose(e.tensor, (1, 0, 2))  # [s, subject, object]
    m = Model(m.semiring, m.dims, {**m.tensors, fname: fn}, m.bases, sig, m.conjugate_dagger, m.name)
    d = seq(generator(sig, _word_gen(subject.lower())) @ generator(sig, _word_gen(obj.lower())), generator(sig, fname))
    return interpret(d, m)


def build_verb_tensor(
    pairs: Iterable[tuple[str, str]],
    vectors: Mapping[str, MeaningVector],
    sentence_vector: Sequence[float],
) -> np.ndarray:
    """``sum over (subject, object) of subject ⊗ s ⊗ object`` for a fixed unit ``s``."""
    s = np.asarray(sentence_vector, dtype=float)
    if not np.isclose(np.linalg.norm(s), 1.0):
        raise DistSemError("sentence vector must have unit length")
    out = None
    for subj, obj in pairs:
        term = np.einsum("i,s,j->isj", vectors[subj].vector, s, vectors[obj].vector)
        out = term if out is None else out + term
    if out is None:
        raise DistSemError("no (subject, object) pairs given")
    return out


def count_words(segments: Iterable[Sequence[str]]) -> Counter:
    return Counter(t for seg in segments for t in seg)
