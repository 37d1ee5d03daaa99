"""Random terms for property tests.

Terms are DSL syntax trees, so one term can be elaborated into a diagram
and, independently, evaluated by a reference semantics.
"""
from __future__ import annotations

import random

from wirelogic.diagram import Signature
from wirelogic.dsl import Cap, Cup, Dagger, Gen, Id, Par, Seq, SpiderExpr, Swap, Transpose


def random_signature(rng: random.Random, types=("A", "B"), n_gens: int = 4, max_arity: int = 2) -> Signature:
    sig = Signature(types)
    for k in range(n_gens):
        dom = [rng.choice(types) for _ in range(rng.randint(0, max_arity))]
        cod = [rng.choice(types) for _ in range(rng.randint(0 if dom else 1, max_arity))]
        sig.add_generator(f"g{k}", dom, cod)
    return sig


def _join(pieces, op):
    out = pieces[0]
    for p in pieces[1:]:
        out = op(out, p)
    return out


def _boxes(sig: Signature, transposes: bool):
    out = []
    for name in sorted(sig.generators):
        g = sig[name]
        out.append((Gen(name), list(g.dom), list(g.cod)))
        out.append((Dagger(Gen(g.dagger)), list(g.dom), list(g.cod)))
        if transposes:
            out.append((Transpose(Gen(name)), list(reversed(g.cod)), list(reversed(g.dom))))
    return out


def _layer(sig, rng, wires, spiders, bends, transposes):
    boxes = _boxes(sig, transposes)
    pieces, cod = [], []
    i = 0
    while i < len(wires) or (not pieces and rng.random() < 0.8):
        roll = rng.random()
        rest = wires[i:]
        fitting = [b for b in boxes if b[1] == rest[: len(b[1])] and (b[1] or roll < 0.15)]
        if fitting and roll < 0.45:
            expr, dom, out = rng.choice(fitting)
            pieces.append(expr)
            cod += out
            i += len(dom)
        elif spiders and rest and roll < 0.6:
            t = rest[0]
            n = 1 + (len(rest) > 1 and rest[1] == t and rng.random() < 0.5)
            m = rng.randint(0, 2)
            pieces.append(SpiderExpr(rng.choice(["light", "dark"]) if spiders == "both" else "light", t, n, m))
            cod += [t] * m
            i += n
        elif bends and len(rest) >= 2 and rest[0] == rest[1] and roll < 0.7:
            pieces.append(Cap(rest[0]))
            i += 2
        elif len(rest) >= 2 and roll < 0.8:
            pieces.append(Swap(rest[0], rest[1]))
            cod += [rest[1], rest[0]]
            i += 2
        elif bends and roll < 0.85:
            t = rng.choice(sorted(sig.types))
            pieces.append(Cup(t))
            cod += [t, t]
        elif rest:
            pieces.append(Id((rest[0],)))
            cod.append(rest[0])
            i += 1
        else:
            break
    if not pieces:
        return Id(()), []
    return _join(pieces, Par), cod


def random_term(
    sig: Signature,
    rng: random.Random,
    dom: list[str],
    layers: int = 3,
    spiders: bool | str = True,
    bends: bool = True,
    transposes: bool = True,
):
    """A random term with domain ``dom``; returns ``(term, cod)``."""
    wires = list(dom)
    term = Id(tuple(wires))
    for _ in range(layers):
        layer, wires = _layer(sig, rng, wires, spiders, bends, transposes)
        term = Seq(term, layer)
    return term, wires


def random_dom(sig: Signature, rng: random.Random, max_len: int = 3, min_len: int = 1) -> list[str]:
    return [rng.choice(sorted(sig.types)) for _ in range(rng.randint(min_len, max_len))]


def small_term(sig: Signature, rng: random.Random, dom: list[str] | None = None, max_open: int = 8, **kw):
    """Like :func:`random_term` but redrawn until the result has at most ``max_open`` boundary wires."""
    while True:
        d = list(dom) if dom is not None else random_dom(sig, rng)
        term, cod = random_term(sig, rng, d, **kw)
        if len(d) + len(cod) <= max_open:
            return term, cod
