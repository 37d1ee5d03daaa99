"""Pregroup types and contraction-only reduction.

A simple type is an atom with an adjoint order ``z``: ``x^l`` (z = -1),
``x`` (z = 0) or ``x^r`` (z = +1).  Two neighbours cancel when they read
``x x^l`` or ``x^r x``.  Reduction is decided by an interval dynamic program
over non-crossing matchings; the result can be turned into a diagram whose
caps are the matched pairs.

Lexicons written in the mirrored convention (``x^l x`` and ``x x^r`` cancel)
can be read with ``convention="lambek"``, which swaps the two suffixes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .diagram import IN, OUT, Boundary, Builder, Diagram, Signature

STANDARD = "standard"
LAMBEK = "lambek"


class GrammarError(ValueError):
    """Type syntax error or a string that does not reduce."""


@dataclass(frozen=True, order=True)
class SimpleType:
    atom: str
    z: int = 0

    def __post_init__(self):
        if self.z not in (-1, 0, 1):
            raise GrammarError(f"adjoint order must be -1, 0 or +1, got {self.z}")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", self.atom):
            raise GrammarError(f"bad atom {self.atom!r}")

    def __str__(self) -> str:
        return self.atom + {-1: "^l", 0: "", 1: "^r"}[self.z]


PregroupType = tuple[SimpleType, ...]

_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(\^[lr])?$")


def parse_type(text: str, convention: str = STANDARD) -> PregroupType:
    """Parse whitespace-separated simple types such as ``"n^l s n^r"``."""
    if convention not in (STANDARD, LAMBEK):
        raise GrammarError(f"unknown convention {convention!r}")
    out = []
    for k, tok in enumerate(text.split()):
        m = _TOKEN.match(tok)
        if not m:
            raise GrammarError(f"bad simple type {tok!r} at item {k}")
        z = {None: 0, "^l": -1, "^r": 1}[m.group(2)]
        if convention == LAMBEK:
            z = -z
        out.append(SimpleType(m.group(1), z))
    return tuple(out)


def format_type(ts: Sequence[SimpleType]) -> str:
    return " ".join(str(t) for t in ts) if ts else "1"


def contract_ok(a: SimpleType, b: SimpleType) -> bool:
    """True when ``a b`` cancels: ``x x^l`` or ``x^r x``."""
    return a.atom == b.atom and (a.z, b.z) in ((0, -1), (1, 0))


@dataclass(frozen=True)
class Reduction:
    types: PregroupType
    pairs: tuple[tuple[int, int], ...]
    survivors: tuple[int, ...]

    @property
    def result(self) -> PregroupType:
        return tuple(self.types[i] for i in self.survivors)

    def validate(self) -> None:
        used = [i for p in self.pairs for i in p] + list(self.survivors)
        if sorted(used) != list(range(len(self.types))):
            raise GrammarError("pairs and survivors must partition the positions")
        for p, q in self.pairs:
            if not p < q or not contract_ok(self.types[p], self.types[q]):
                raise GrammarError(f"pair ({p}, {q}) does not contract")
        for p, q in self.pairs:
            for p2, q2 in self.pairs:
                if p < p2 < q < q2:
                    raise GrammarError(f"pairs ({p}, {q}) and ({p2}, {q2}) cross")
            if any(p < s < q for s in self.survivors):
                raise GrammarError(f"pair ({p}, {q}) encloses a surviving type")


def _tables(ts: PregroupType):
    n = len(ts)

    @lru_cache(maxsize=None)
    def best(i: int, j: int):
        """Lexicographically least perfect matching of ts[i..j), or None."""
        if i == j:
            return ()
        if (j - i) % 2:
            return None
        for m in range(i + 1, j, 2):
            if not contract_ok(ts[i], ts[m]):
                continue
            inner = best(i + 1, m)
            if inner is None:
                continue
            outer = best(m + 1, j)
            if outer is None:
                continue
            # the smallest partner of i wins; inner and outer are then fixed
            return ((i, m),) + inner + outer
        return None

    return n, best


def reduce_to(ts: Sequence[SimpleType], target: SimpleType | None) -> Reduction | None:
    """Reduce ``ts`` to the single type ``target`` (``None`` means the unit 1).

    Returns the witness whose sorted pair list is lexicographically least,
    or ``None`` when no contraction-only reduction exists.  Cubic time.
    """
    ts = tuple(ts)
    n, best = _tables(ts)
    if target is None:
        pairs = best(0, n)
        return None if pairs is None else Reduction(ts, pairs, ())
    found = None
    for t in range(n):
        if ts[t] != target:
            continue
        left = best(0, t)
        if left is None:
            continue
        right = best(t + 1, n)
        if right is None:
            continue
        pairs = tuple(sorted(left + right))
        if found is None or pairs < found.pairs:
            found = Reduction(ts, pairs, (t,))
    return found


def reduces(ts: Sequence[SimpleType], target: SimpleType | None) -> bool:
    return reduce_to(ts, target) is not None


BRUTE_FORCE_LIMIT = 12


def all_reductions(ts: Sequence[SimpleType]) -> Iterator[Reduction]:
    """Every non-crossing pairing with contracting pairs and no enclosed survivor."""
    ts = tuple(ts)
    n = len(ts)
    if n > BRUTE_FORCE_LIMIT:
        raise GrammarError(f"brute force is limited to {BRUTE_FORCE_LIMIT} types, got {n}")

    def rec(i: int, stack: list[int], pairs: list, survivors: list):
        if i == n:
            if not stack:
                yield Reduction(ts, tuple(sorted(pairs)), tuple(survivors))
            return
        # i opens a pair (pushed), closes the innermost open one, or survives;
        # a survivor may not sit inside an open pair
        stack.append(i)
        yield from rec(i + 1, stack, pairs, survivors)
        stack.pop()
        if stack and contract_ok(ts[stack[-1]], ts[i]):
            p = stack.pop()
            pairs.append((p, i))
            yield from rec(i + 1, stack, pairs, survivors)
            pairs.pop()
            stack.append(p)
        if not stack:
            survivors.append(i)
            yield from rec(i + 1, stack, pairs, survivors)
            survivors.pop()

    yield from rec(0, [], [], [])


def brute_force_reduce(ts: Sequence[SimpleType], target: SimpleType | None) -> bool:
    want = () if target is None else (target,)
    return any(r.result == want for r in all_reductions(ts))


def reduction_to_diagram(r: Reduction, sig: Signature | None = None) -> Diagram:
    """Input wires for every simple type, a cap per pair, survivors to outputs.

    Wires are typed by atom, so ``n``, ``n^l`` and ``n^r`` all travel on ``n``.
    """
    atoms = sorted({t.atom for t in r.types})
    if sig is None:
        sig = Signature(atoms)
    else:
        sig.check_types(atoms)
    b = Builder(sig)
    ins = [b.add(Boundary(IN, k, t.atom)) for k, t in enumerate(r.types)]
    for p, q in r.pairs:
        b.link((ins[p], 0), (ins[q], 0))
    for k, s in enumerate(r.survivors):
        o = b.add(Boundary(OUT, k, r.types[s].atom))
        b.link((ins[s], 0), (o, 0))
    return b.freeze()
