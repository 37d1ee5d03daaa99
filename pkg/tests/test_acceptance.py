"""Acceptance checks, one per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` or directly as a script:
``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import itertools
import math
import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from gen import random_dom, random_signature, random_term, small_term  # noqa: E402
from wirelogic.canon import canonical_form  # noqa: E402
from wirelogic.cli import main as cli_main  # noqa: E402
from wirelogic.diagram import (  # noqa: E402
    DARK,
    LIGHT,
    Signature,
    canonical_equal,
    dagger,
    identity,
    spider,
)
from wirelogic.distsem import (  # noqa: E402
    ContextConfig,
    ingest_corpus,
    lexicon_from_json,
    meaning_vector,
    sentence_meaning,
    similarity,
    tokenize,
)
from wirelogic.dsl import (  # noqa: E402
    Cap,
    Cup,
    Dagger,
    Gen,
    Id,
    Par,
    Seq,
    SpiderExpr,
    Swap,
    Transpose,
    elaborate,
    load_program,
)
from wirelogic.harness import soundness_harness  # noqa: E402
from wirelogic.io import model_from_json  # noqa: E402
from wirelogic.pregroup import SimpleType, brute_force_reduce, parse_type, reduces  # noqa: E402
from wirelogic.protocols import bayes_invert, swapping_demo, teleportation_demo  # noqa: E402
from wirelogic.rewrite import ComplementarityHopf, SpiderFuse, normalize  # noqa: E402
from wirelogic.tensor import UP_TO_SCALAR, Model, equal_tensors, hadamard_basis, interpret  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "wirelogic" / "data"


def report(number: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}" + (f" ({detail})" if detail else "")
    print(line, flush=True)


def orthogonal(k: int, rng: np.random.Generator) -> np.ndarray:
    if k == 2:
        return hadamard_basis()
    q, _ = np.linalg.qr(rng.normal(size=(k, k)))
    return q.T


# -- 1 ------------------------------------------------------------------------------


def criterion_1():
    code = cli_main(["check-eq", str(DATA / "snake.dg"), str(DATA / "id_q.dg")])
    snake = load_program(DATA / "snake.dg").diagram()
    exact = []
    for k in (2, 3, 4):
        m = Model("complex", {"Q": k})
        a = interpret(snake, m).data
        b = interpret(identity(snake.sig, "Q"), m).data
        integral = np.array_equal(a, np.round(a.real))
        exact.append(bool(np.array_equal(a, b) and integral))
    return code == 0 and all(exact), f"cli exit {code}, exact in dims 2/3/4: {exact}"


# -- 2, 3 ------------------------------------------------------------------------------


def _diagram(rng, sig, dom=None):
    dom = random_dom(sig, rng) if dom is None else dom
    term, _ = random_term(sig, rng, dom, spiders="both")
    return elaborate(term, sig)


def criterion_2():
    bad = 0
    for seed in range(100):
        rng = random.Random(1000 + seed)
        sig = random_signature(rng)
        f = _diagram(rng, sig)
        g = _diagram(rng, sig, list(f.cod))
        h = _diagram(rng, sig)
        k = _diagram(rng, sig, list(h.cod))
        if canonical_form((f @ h) >> (g @ k)).key != canonical_form((f >> g) @ (h >> k)).key:
            bad += 1
    return bad == 0, f"{100 - bad}/100 byte-equal"


def criterion_3():
    bad = 0
    for seed in range(100):
        rng = random.Random(2000 + seed)
        sig = random_signature(rng)
        f = _diagram(rng, sig)
        g = _diagram(rng, sig, list(f.cod))
        h = _diagram(rng, sig)
        ok = dagger(dagger(f)) == f and dagger(f >> g) == dagger(g) >> dagger(f) and dagger(f @ h) == dagger(f) @ dagger(h)
        bad += not ok
    return bad == 0, f"{100 - bad}/100"


# -- 4, 5, 6 ------------------------------------------------------------------------------


def criterion_4():
    rng = random.Random(4)
    nrng = np.random.default_rng(4)
    rule = SpiderFuse()
    structural = tensor = 0
    total = 0
    for dim in (2, 3):
        sig = Signature(["Q"])
        m = Model("complex", {"Q": dim}, bases={"dark": {"Q": orthogonal(dim, nrng)}})
        for _ in range(100):
            color = rng.choice([LIGHT, DARK])
            (lhs, rhs), = rule.instances(sig, rng, colors=(color,), count=1, max_legs=6)
            total += 1
            out, _ = normalize(lhs, [rule])
            n_in, n_out = len(lhs.dom), len(lhs.cod)
            structural += canonical_equal(out, spider(sig, color, "Q", n_in, n_out)) and canonical_equal(out, rhs)
            tensor += equal_tensors(interpret(lhs, m), interpret(rhs, m), tol=1e-9)
    ok = structural == tensor == total == 200
    return ok, f"structural {structural}/{total}, tensor {tensor}/{total}"


def brute_spider(basis: np.ndarray, n: int, m: int) -> np.ndarray:
    k = basis.shape[0]
    out = np.zeros((k,) * (n + m), dtype=complex)
    for idx in itertools.product(range(k), repeat=n + m):
        total = 0
        for i in range(k):
            v = 1
            for j in idx[:m]:
                v *= basis[i, j]
            for j in idx[m:]:
                v *= np.conj(basis[i, j])
            total += v
        out[idx] = total
    return out


def criterion_5():
    nrng = np.random.default_rng(5)
    sig = Signature(["Q"])
    checked = light_ok = dark_ok = 0
    for dim in (2, 3, 4):
        dark = orthogonal(dim, nrng)
        model = Model("complex", {"Q": dim}, bases={"dark": {"Q": dark}})
        for legs in range(7):
            for n in range(legs + 1):
                m = legs - n
                checked += 1
                got = interpret(spider(sig, LIGHT, "Q", n, m), model).data
                light_ok += bool(np.array_equal(got, brute_spider(np.eye(dim), n, m)))
                got = interpret(spider(sig, DARK, "Q", n, m), model).data
                dark_ok += bool(np.allclose(got, brute_spider(dark, n, m), atol=1e-12))
    ok = light_ok == dark_ok == checked
    return ok, f"{checked} shapes; light exact {light_ok}, dark (1e-12) {dark_ok}"


def criterion_6():
    rng = random.Random(6)
    rule = ComplementarityHopf()
    sig = Signature(["Q"])
    model = Model("complex", {"Q": 2})
    good = applied = 0
    for _ in range(50):
        (lhs, rhs), = rule.instances(sig, rng, count=1, max_legs=6)
        out, _ = normalize(lhs, [rule])
        applied += canonical_equal(out, rhs)
        good += equal_tensors(interpret(lhs, model), interpret(rhs, model), UP_TO_SCALAR, 1e-9)
    return good == applied == 50, f"sound {good}/50, rewrite applied {applied}/50"


# -- 7 --------------------------------------------------------------------------------


def criterion_7():
    qubit = model_from_json(DATA / "qubit_model.json")
    qutrit = model_from_json(DATA / "qutrit_model.json")
    passed = []
    for model, gates in ((qubit, "I X H S"), (qutrit, "I X Z F")):
        for f in gates.split():
            for demo in (teleportation_demo, swapping_demo):
                r = demo(model, f)
                passed.append(r.rewrite_ok and r.tensor_ok and len(r.trace.steps) <= 50)
    controls = [not swapping_demo(qubit, f, misroute=True).ok for f in "XHS"]
    ok = all(passed) and all(controls)
    return ok, f"{sum(passed)}/{len(passed)} demos pass, {sum(controls)}/3 misrouted controls fail"


# -- 8 --------------------------------------------------------------------------------


def criterion_8():
    s = SimpleType("s")
    sentence = reduces(parse_type("n n^l s n^r n"), s)
    rng = random.Random(8)
    agree = 0
    for _ in range(2000):
        ts = tuple(SimpleType(rng.choice("ns"), rng.choice((-1, 0, 1))) for _ in range(rng.randint(0, 8)))
        agree += reduces(ts, s) == brute_force_reduce(ts, s)
    return sentence and agree == 2000, f"transitive sentence reduces: {sentence}; agreement {agree}/2000"


# -- 9 --------------------------------------------------------------------------------


def criterion_9():
    lex = lexicon_from_json(DATA / "lexicon.json")
    model = model_from_json(DATA / "sentence_model.json")
    likes = sentence_meaning("alice likes bob", lex, model).data
    neg = sentence_meaning("alice does not like bob", lex, model).data
    aux = sentence_meaning("alice does like bob", lex, model).data
    not_map = model.tensor(model.signature(), "not")
    a = bool(np.array_equal(neg, not_map @ likes))
    b = bool(np.array_equal(aux, likes))
    return a and b, f"likes={likes.tolist()}, not={neg.tolist()}"


# -- 10 -------------------------------------------------------------------------------

TOY = """The cat sat on the mat, and the dog sat on the rug.
A cat and a dog ate the food while the cat slept near the dog.
Dog food!
"""
TOY_CONFIG = ContextConfig(("the", "sat", "dog"), 2)
TOY_COUNTS = {  # counted by hand against (the, sat, dog)
    "cat": (2, 1, 0),
    "dog": (3, 1, 0),
    "mat": (1, 0, 0),
    "food": (1, 0, 1),
    "the": (0, 4, 3),
    "sat": (2, 0, 1),
    "rug": (1, 0, 0),
}


def criterion_10():
    segs = tokenize(TOY)
    model = ingest_corpus(segs, TOY_CONFIG)
    counts_ok = model.token_count == 30 and all(
        tuple(int(x) for x in model.vector(w)) == row for w, row in TOY_COUNTS.items()
    )
    vecs = [meaning_vector(model, w) for w in sorted(model.counts)]
    unit = all(v.zero or abs(np.linalg.norm(v.vector) - 1) < 1e-12 for v in vecs)
    sims = [(similarity(u, v), similarity(v, u)) for u in vecs for v in vecs]
    sim_ok = all(a == b and 0.0 <= a <= 1.0 + 1e-12 for a, b in sims)
    shard_ok = True
    for shards in (2, 3, 5, 8):
        other = ingest_corpus(segs, TOY_CONFIG, shards=shards, workers=2)
        shard_ok &= other.token_count == model.token_count and all(
            np.array_equal(other.vector(w), model.vector(w)) for w in model.counts
        )
    ok = counts_ok and unit and sim_ok and shard_ok
    return ok, f"counts {counts_ok}, unit {unit}, similarity {sim_ok}, shards {shard_ok}"


# -- 11 -------------------------------------------------------------------------------


def bayes_oracle(p, M):
    joint = p[:, None] * M
    q = joint.sum(axis=0)
    out = np.zeros((M.shape[1], M.shape[0]))
    for y in range(M.shape[1]):
        if q[y] > 1e-12:
            out[y] = joint[:, y] / q[y]
    return out


def criterion_11():
    rng = np.random.default_rng(11)
    worst = worst_double = 0.0
    full_cases = 0
    for case in range(100):
        nx, ny = int(rng.integers(1, 8)), int(rng.integers(1, 10))
        p = rng.dirichlet(np.ones(nx))
        M = rng.dirichlet(np.ones(ny), size=nx)
        if case % 4 == 3 and ny > 1:
            M[:, rng.integers(ny)] = 0.0  # unsupported evidence
            M /= M.sum(axis=1, keepdims=True)
        inv = bayes_invert(p, M)
        worst = max(worst, float(np.max(np.abs(inv.matrix - bayes_oracle(p, M)))))
        if not inv.unsupported:
            full_cases += 1
            back = bayes_invert(inv.marginal / inv.marginal.sum(), inv.matrix)
            worst_double = max(worst_double, float(np.max(np.abs(back.matrix - M))))
    ok = worst <= 1e-12 and worst_double <= 1e-10
    return ok, f"max dev {worst:.2e}; double inversion {worst_double:.2e} over {full_cases} full-support cases"


# -- 12 -------------------------------------------------------------------------------


class Relations:
    """Set-of-pairs semantics of DSL terms, written without tensors."""

    def __init__(self, sig: Signature, dims: dict[str, int], base: dict[str, np.ndarray]):
        self.sig, self.dims, self.base = sig, dims, base

    def tuples(self, types):
        return list(itertools.product(*(range(self.dims[t]) for t in types)))

    def gen(self, name):
        g = self.sig[name]
        if name not in self.base:
            return {(o, i) for i, o in self.gen(g.dagger)}
        arr = self.base[name]
        nc = len(g.cod)
        rel = set()
        for idx in zip(*np.nonzero(arr)):
            idx = tuple(int(x) for x in idx)
            rel.add((idx[nc:], idx[:nc]))
        return rel

    def __call__(self, e):
        if isinstance(e, Id):
            return {(t, t) for t in self.tuples(e.types)}
        if isinstance(e, Gen):
            return self.gen(e.name)
        if isinstance(e, Cup):
            return {((), (a, a)) for a in range(self.dims[e.type])}
        if isinstance(e, Cap):
            return {((a, a), ()) for a in range(self.dims[e.type])}
        if isinstance(e, Swap):
            return {((a, b), (b, a)) for a in range(self.dims[e.left]) for b in range(self.dims[e.right])}
        if isinstance(e, SpiderExpr):
            assert e.color == LIGHT
            return {((a,) * e.n_in, (a,) * e.n_out) for a in range(self.dims[e.type])}
        if isinstance(e, Dagger):
            return {(o, i) for i, o in self(e.body)}
        if isinstance(e, Transpose):
            return {(o[::-1], i[::-1]) for i, o in self(e.body)}
        if isinstance(e, Par):
            return {(i1 + i2, o1 + o2) for i1, o1 in self(e.left) for i2, o2 in self(e.right)}
        if isinstance(e, Seq):
            right: dict = {}
            for mid, o in self(e.right):
                right.setdefault(mid, set()).add(o)
            return {(i, o) for i, mid in self(e.left) for o in right.get(mid, ())}
        raise TypeError(e)


def criterion_12():
    rng = random.Random(12)
    nrng = np.random.default_rng(12)
    agree = 0
    for _ in range(100):
        sig = random_signature(rng)
        dims = {"A": rng.randint(1, 4), "B": rng.randint(1, 4)}
        base = {}
        for name, g in sorted(sig.generators.items()):
            if g.dagger not in base:
                shape = tuple(dims[t] for t in g.port_types)
                base[name] = nrng.random(shape) < 0.5
        model = Model("boolean", dims, base, sig=sig)
        term, cod = small_term(sig, rng, max_open=6)
        dom = elaborate(term, sig).dom
        got = interpret(elaborate(term, sig), model).data
        rel = Relations(sig, dims, base)(term)
        want = np.zeros(got.shape, dtype=bool)
        for i, o in rel:
            want[o + i] = True
        agree += bool(np.array_equal(got, want)) and len(dom) + len(cod) == got.ndim
    return agree == 100, f"{agree}/100 diagrams agree"


# -- 13 -------------------------------------------------------------------------------

SHIPPED = ["qubit_model.json", "qutrit_model.json", "relations_model.json", "sentence_model.json"]


def criterion_13():
    failures = {}
    for name in SHIPPED:
        m = model_from_json(DATA / name)
        failures[m.name] = len(soundness_harness(None, m, cases=50, seed=13).failures)
    qubit = model_from_json(DATA / "qubit_model.json")
    mutant = Model(qubit.semiring, qubit.dims, qubit.tensors, qubit.bases, None, False, "mutant")
    mutant.sig = qubit.sig
    caught = len(soundness_harness(None, mutant, cases=50, seed=13).failures)
    ok = not any(failures.values()) and caught >= 1
    return ok, f"shipped failures {failures}; mutant failures {caught}"


CRITERIA = {
    1: ("snake equation", criterion_1),
    2: ("bifunctoriality", criterion_2),
    3: ("dagger laws", criterion_3),
    4: ("spider fusion", criterion_4),
    5: ("spider basis semantics", criterion_5),
    6: ("complementarity", criterion_6),
    7: ("teleportation and swapping", criterion_7),
    8: ("pregroup reduction", criterion_8),
    9: ("negation", criterion_9),
    10: ("distributional pipeline", criterion_10),
    11: ("Bayesian inversion", criterion_11),
    12: ("relational model", criterion_12),
    13: ("soundness harness", criterion_13),
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    title, fn = CRITERIA[number]
    ok, detail = fn()
    with capsys.disabled():
        print()
        report(number, title, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    start = time.perf_counter()
    results = []
    for number, (title, fn) in sorted(CRITERIA.items()):
        ok, detail = fn()
        report(number, title, ok, detail)
        results.append(ok)
    print(f"{sum(results)}/{len(results)} criteria pass in {time.perf_counter() - start:.1f} s")
    sys.exit(0 if all(results) else 1)
