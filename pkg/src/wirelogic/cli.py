"""Command-line entry point: ``wirelogic <command> ...``.

Exit status is 0 on success, 1 when a check fails (diagrams not shown
equal, sentence not grammatical, protocol verdict negative) and 2 for usage
or input errors.  Diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import distsem, protocols
from .canon import canonical_hash
from .diagram import DiagramError, Signature
from .dsl import DSLError, Program, load_program, parse_program, pretty_program
from .harness import soundness_harness
from .io import FormatError, diagram_from_json, diagram_to_json, model_from_json, ruleset_from_json, tensor_to_json
from .pregroup import LAMBEK, STANDARD, GrammarError, format_type, parse_type, reduce_to
from .render import to_dot, to_svg
from .rewrite import EQUAL_EXACT, EQUAL_UP_TO_SCALAR, RewriteError, check_equal_by_rewriting, normalize
from .tensor import DEFAULT_TOL, EXACT, UP_TO_SCALAR, ModelError, equal_tensors, interpret, scalar_between

DATA = Path(__file__).parent / "data"

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False))


def _shipped(name: str) -> Path:
    return DATA / name


def _load_model(path: str | None, default: str | None = None):
    if path is None:
        if default is None:
            return None
        path = str(_shipped(default))
    return model_from_json(path)


def _load_source(src: str, sig: Signature | None):
    """Diagram from a ``.json`` file, a program file, or program text."""
    p = Path(src)
    if p.suffix == ".json":
        d = diagram_from_json(p, sig)
        return d, None
    prog: Program = load_program(p, sig) if p.exists() else parse_program(src, sig)
    return prog.diagram(), prog


def _rules(path: str | None, sig: Signature | None):
    if path is None:
        return None
    rules, _ = ruleset_from_json(path, sig)
    return rules


def _fmt_entry(z) -> str:
    z = complex(z)
    if abs(z.imag) < 1e-12:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}j"


def _format_tensor(value) -> str:
    arr = value.data
    lines = [f"shape {list(arr.shape)} ({value.n_outputs} outputs, {value.n_inputs} inputs), {value.semiring.name}"]
    if arr.ndim == 0:
        lines.append(_fmt_entry(arr) if arr.dtype != bool else str(bool(arr)))
        return "\n".join(lines)
    for idx in np.ndindex(*arr.shape):
        v = arr[idx]
        if v:
            shown = "1" if arr.dtype == bool else _fmt_entry(v)
            lines.append(f"  {list(idx)}  {shown}")
    return "\n".join(lines)


# -- commands --------------------------------------------------------------------------


def cmd_parse(a) -> int:
    d, prog = _load_source(a.source, None)
    if a.json:
        _emit({"diagram": diagram_to_json(d), "hash": canonical_hash(d)})
    else:
        if prog is not None:
            print(pretty_program(prog), end="")
        print(f"# {' '.join(d.dom) or '1'} -> {' '.join(d.cod) or '1'}; {len(d.boxes())} boxes, "
              f"{len(d.spiders())} spiders, {len(d.edges)} wires")
    return OK


def cmd_normalize(a) -> int:
    d, _ = _load_source(a.source, None)
    final, trace = normalize(d, _rules(a.rules, d.sig), a.max_steps)
    if a.trace:
        Path(a.trace).write_text(json.dumps(trace.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if a.json:
        _emit({"final": diagram_to_json(final), "trace": trace.to_json()})
    else:
        for i, s in enumerate(trace.steps):
            print(f"{i:3d}  {s.rule:22s} nodes {list(s.nodes)}  size {s.size_before} -> {s.size_after}")
        print(f"normal form: {final!r}" + ("  (step budget exhausted)" if trace.exhausted else ""))
        if trace.scalars:
            print("dropped scalars: " + ", ".join(f"{k} x{v}" for k, v in sorted(trace.scalars.items())))
        print(f"hash {canonical_hash(final)}")
    return OK


def cmd_eval(a) -> int:
    model = _load_model(a.model, "qubit_model.json")
    d, _ = _load_source(a.source, model.signature())
    value = interpret(d, model)
    if a.json:
        _emit(tensor_to_json(value))
    else:
        print(_format_tensor(value))
    return OK


def cmd_check_eq(a) -> int:
    model = _load_model(a.model)
    sig = model.signature() if model else None
    left, prog = _load_source(a.left, sig)
    right, _ = _load_source(a.right, left.sig if sig is None else sig)
    if left.dom != right.dom or left.cod != right.cod:
        raise UsageError(
            f"boundaries differ: {list(left.dom)} -> {list(left.cod)} vs {list(right.dom)} -> {list(right.cod)}"
        )
    verdict = check_equal_by_rewriting(left, right, _rules(a.rules, left.sig), a.max_steps)
    accept = {EQUAL_EXACT} | ({EQUAL_UP_TO_SCALAR} if a.up_to_scalar else set())
    ok = verdict in accept
    result = {"rewrite": verdict}
    if model is not None:
        mode = UP_TO_SCALAR if a.up_to_scalar else EXACT
        x, y = interpret(left, model), interpret(right, model)
        same = equal_tensors(x, y, mode, a.tol)
        result["tensor"] = {"mode": mode, "equal": same}
        if same and mode == UP_TO_SCALAR and x.semiring.name != "boolean":
            s = scalar_between(x.data, y.data)
            result["tensor"]["scalar"] = None if s is None else _fmt_entry(s)
        ok = ok and same
    result["ok"] = ok
    if a.json:
        _emit(result)
    else:
        print(f"rewriting: {verdict}")
        if "tensor" in result:
            print(f"tensors ({result['tensor']['mode']}): {'equal' if result['tensor']['equal'] else 'different'}")
        print("equal" if ok else "not shown equal")
    return OK if ok else FAIL


def cmd_render(a) -> int:
    d, _ = _load_source(a.source, None)
    text = to_dot(d) if a.format == "dot" else to_svg(d)
    if a.output:
        Path(a.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return OK


def cmd_grammar(a) -> int:
    conv = a.convention
    ts = parse_type(a.types, conv)
    target = parse_type(a.target, conv)
    if len(target) != 1:
        raise UsageError("target must be a single simple type")
    r = reduce_to(ts, target[0])
    if a.json:
        _emit({"types": format_type(ts), "target": format_type(target), "reduces": r is not None,
               "pairs": [list(p) for p in r.pairs] if r else None,
               "survivors": list(r.survivors) if r else None})
    elif r is None:
        print(f"'{format_type(ts)}' does not reduce to {format_type(target)}")
    else:
        print(f"'{format_type(ts)}' reduces to {format_type(target)}")
        print(f"  contractions: {', '.join(f'{p}-{q}' for p, q in r.pairs) or 'none'}")
    return OK if r is not None else FAIL


def cmd_sentence(a) -> int:
    lex = distsem.lexicon_from_json(a.lexicon or _shipped("lexicon.json"))
    model = _load_model(a.model, "sentence_model.json")
    words = a.sentence.lower().split()
    try:
        value = distsem.sentence_meaning(words, lex, model)
    except GrammarError as e:
        print(f"grammar error: {e}", file=sys.stderr)
        return FAIL
    vec = [float(np.real(v)) for v in value.data.reshape(-1)]
    if a.json:
        _emit({"sentence": " ".join(words), "meaning": vec})
    else:
        print(" ".join(f"{v:.6g}" for v in vec))
    return OK


def cmd_corpus(a) -> int:
    config = distsem.load_context_config(a.context)
    text = Path(a.corpus).read_text(encoding="utf-8")
    segments = distsem.tokenize(text)
    model = distsem.ingest_corpus(segments, config, shards=a.shards, workers=a.workers)
    if model.empty:
        print("warning: corpus is empty", file=sys.stderr)
    words = a.words.split(",") if a.words else sorted(model.counts)
    vectors = {w: distsem.meaning_vector(model, w) for w in words}
    if a.out:
        distsem.save_vectors(vectors, a.out)
    if a.json or not a.out:
        obj = {"context": list(config.context), "window": config.k, "tokens": model.token_count}
        if a.counts:
            obj["counts"] = {w: [int(x) for x in model.counts[w]] for w in words}
        obj["vectors"] = {w: [float(x) for x in v.vector] for w, v in vectors.items()}
        _emit(obj)
    return OK


def cmd_similarity(a) -> int:
    vectors = distsem.load_vectors(a.vectors)
    try:
        u, v = vectors[a.first], vectors[a.second]
    except KeyError as e:
        raise UsageError(f"no vector for {e.args[0]!r}") from None
    s = distsem.similarity(u, v)
    if a.json:
        _emit({"words": [a.first, a.second], "similarity": s})
    else:
        print(f"{s:.6g}")
    return OK


def cmd_demo(a) -> int:
    if a.protocol == "bayes":
        if not (a.prior and a.channel):
            raise UsageError("demo bayes needs --prior and --channel")
        p = json.loads(Path(a.prior).read_text(encoding="utf-8"))
        M = json.loads(Path(a.channel).read_text(encoding="utf-8"))
        report = protocols.bayes_demo(p, M)
    else:
        model = _load_model(a.model, "qubit_model.json")
        if a.protocol == "teleportation":
            report = protocols.teleportation_demo(model, a.unitary, a.tol)
        else:
            report = protocols.swapping_demo(model, a.unitary, a.misroute, a.tol)
    if a.json:
        _emit(report.to_json())
    else:
        print(report.text())
    return OK if report.ok else FAIL


def cmd_soundness(a) -> int:
    model = _load_model(a.model, "qubit_model.json")
    rules = _rules(a.rules, model.signature())
    report = soundness_harness(rules, model, cases=a.cases, seed=a.seed, workers=a.workers)
    if a.json:
        _emit({"model": report.model, "cases": report.cases, "skipped": report.skipped,
               "failures": [{"rule": f.rule, "case": f.case, "deviation": f.deviation} for f in report.failures]})
    else:
        print(report.summary())
    return OK if report.ok else FAIL


# -- argument parsing ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wirelogic", description="String diagrams: rewrite, evaluate, parse sentences.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    src_help = "diagram: a .json file, a program file, or program text"
    p = add("parse", cmd_parse, "parse and pretty-print a diagram program")
    p.add_argument("source", help=src_help)

    p = add("normalize", cmd_normalize, "rewrite a diagram to normal form")
    p.add_argument("source", help=src_help)
    p.add_argument("--rules", help="ruleset JSON (default: shipped rules)")
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--trace", help="write the rewrite trace JSON here")

    p = add("eval", cmd_eval, "evaluate a diagram in a tensor model")
    p.add_argument("source", help=src_help)
    p.add_argument("--model", help="model JSON (default: shipped qubit model)")

    p = add("check-eq", cmd_check_eq, "decide equality by rewriting (and tensors with --model)")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--rules")
    p.add_argument("--model")
    p.add_argument("--up-to-scalar", action="store_true", help="accept equality up to a non-zero scalar")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-steps", type=int, default=1000)

    p = add("render", cmd_render, "emit DOT or SVG")
    p.add_argument("source", help=src_help)
    p.add_argument("-f", "--format", choices=["dot", "svg"], default="dot")
    p.add_argument("-o", "--output")

    p = sub.add_parser("grammar", help="pregroup grammar tools")
    gsub = p.add_subparsers(dest="action", required=True)
    g = gsub.add_parser("check", help="does a type string reduce to the target?")
    g.set_defaults(func=cmd_grammar)
    g.add_argument("types", help='e.g. "n n^l s n^r n"')
    g.add_argument("--target", default="s")
    g.add_argument("--convention", choices=[STANDARD, LAMBEK], default=STANDARD)
    g.add_argument("--json", action="store_true")

    p = add("sentence", cmd_sentence, "meaning vector of a sentence")
    p.add_argument("sentence")
    p.add_argument("--lexicon", help="lexicon JSON (default: shipped 2-dim lexicon)")
    p.add_argument("--model", help="model JSON with n, s and the not-box (default: shipped)")

    p = sub.add_parser("corpus", help="distributional vectors from text")
    csub = p.add_subparsers(dest="action", required=True)
    c = csub.add_parser("build", help="count co-occurrences and write meaning vectors")
    c.set_defaults(func=cmd_corpus)
    c.add_argument("corpus")
    c.add_argument("--context", required=True, help="context words, one per line, plus 'window = k'")
    c.add_argument("--out", help="vector store JSON to write")
    c.add_argument("--words", help="comma-separated target words (default: all)")
    c.add_argument("--counts", action="store_true", help="include raw counts in JSON output")
    c.add_argument("--shards", type=int, default=1)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--json", action="store_true")

    p = add("similarity", cmd_similarity, "inner product of two stored meaning vectors")
    p.add_argument("vectors")
    p.add_argument("first")
    p.add_argument("second")

    p = add("demo", cmd_demo, "run a protocol demo")
    p.add_argument("protocol", choices=["teleportation", "swap", "bayes"])
    p.add_argument("--model")
    p.add_argument("--unitary", default="I")
    p.add_argument("--misroute", action="store_true", help="swap: close the wrong pair (negative control)")
    p.add_argument("--prior")
    p.add_argument("--channel")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = add("soundness", cmd_soundness, "check the rules against a model")
    p.add_argument("--model")
    p.add_argument("--rules")
    p.add_argument("--cases", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    return ap


INPUT_ERRORS = (
    UsageError,
    FormatError,
    DSLError,
    DiagramError,
    ModelError,
    RewriteError,
    distsem.DistSemError,
    protocols.ProtocolError,
    OSError,
    json.JSONDecodeError,
)


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except GrammarError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
