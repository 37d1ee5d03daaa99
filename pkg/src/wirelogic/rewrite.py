"""Rule-based rewriting of diagrams with replayable traces.

The shipped rules, in priority order:

``spider_identity``
    a spider with one input and one output (any degree-2 spider) is a wire.
``spider_loop``
    self-loops on a spider are deleted.
``spider_fuse``
    two same-coloured spiders joined by k >= 1 wires become one spider; the
    k joining wires disappear.
``unitarity``
    ``dag(f)`` after ``f`` (and ``f`` after ``dag(f)``) is the identity, for
    generators declared unitary.
``complementarity_hopf``
    a light and a dark spider of the same type joined by exactly two wires
    lose both wires.  Holds only up to a scalar.

User rules are :class:`PatternRule` instances, usually loaded from a ruleset
file with :func:`wirelogic.io.ruleset_from_json`.  Every shipped rule strictly
decreases ``(node count, edge count)``, so normalization terminates.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .canon import canonical_form
from .diagram import (
    DARK,
    IN,
    LIGHT,
    OUT,
    Boundary,
    Box,
    Builder,
    Diagram,
    DiagramError,
    Signature,
    Spider,
    _Joint,
    canonical_equal,
    generator,
    identity,
)

EXACT = "exact"
UP_TO_SCALAR = "up-to-scalar"

EQUAL_EXACT = "equal-exact"
EQUAL_UP_TO_SCALAR = "equal-up-to-scalar"
UNKNOWN = "unknown"


class RewriteError(Exception):
    pass


class StaleMatch(RewriteError):
    """The match was found on a different diagram than the one given."""


@dataclass(frozen=True)
class Match:
    rule: str
    nodes: tuple[int, ...]
    fingerprint: str
    detail: tuple = ()


def _builder_from(d: Diagram) -> Builder:
    b = Builder(d.sig)
    b.nodes = dict(d.nodes)
    b.mates = dict(d._mates)
    b.loops = Counter(d.loops)
    b._next = max(d.nodes, default=-1) + 1
    return b


def _respider(b: Builder, olds: Sequence[int], color: str, type_: str, extra: int = 0) -> int:
    """Replace spiders ``olds`` by one spider carrying all their wired legs.

    Legs of the old spiders that were unlinked beforehand are dropped.
    ``extra`` reserves unwired legs at the end for the caller to link.
    """
    legs = [(s, k) for s in olds for k in range(b.arity(s)) if (s, k) in b.mates]
    new = b.add(Spider(color, type_, len(legs) + extra))
    idx = {p: (new, i) for i, p in enumerate(legs)}
    pairs = []
    for p in legs:
        q = b.mates[p]
        if q in idx and q < p:
            continue
        pairs.append((p, q))
    for p, _ in pairs:
        b.unlink(p)
    for p, q in pairs:
        b.link(idx[p], idx.get(q, q))
    for s in olds:
        del b.nodes[s]
    return new


class Rule:
    """Base class for rewrite rules.

    Subclasses provide :meth:`find_matches`, :meth:`_rewrite` and
    :meth:`instances`.  ``lhs``/``rhs`` give one representative instance.
    """

    name: str = "rule"
    soundness: str = EXACT
    leg_polymorphic: bool = False
    randomized: bool = False  # instances() draws random shapes

    def find_matches(self, d: Diagram) -> list[Match]:
        raise NotImplementedError

    def apply(self, d: Diagram, match: Match) -> Diagram:
        if match.fingerprint != d.fingerprint or match.rule != self.name:
            raise StaleMatch(f"match for {match.rule!r} does not belong to this diagram")
        return self._rewrite(d, match)

    def _rewrite(self, d: Diagram, match: Match) -> Diagram:
        raise NotImplementedError

    def instances(self, sig: Signature, rng: random.Random, **kw) -> list[tuple[Diagram, Diagram]]:
        """Random (lhs, rhs) pairs for soundness testing."""
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


# -- shipped spider rules ------------------------------------------------------


def _self_loop_ports(d: Diagram, s: int) -> list:
    return [p for p in d.ports(s) if d.mate(p)[0] == s and p < d.mate(p)]


def _random_legs(rng: random.Random, total: int) -> tuple[int, int]:
    n_in = rng.randint(0, total)
    return n_in, total - n_in


def _spider_with_loops(sig, color, t, n_in, n_out, loops) -> Diagram:
    b = Builder(sig)
    s = b.add(Spider(color, t, n_in + n_out + 2 * loops))
    for k in range(n_in):
        b.link((s, k), (b.add(Boundary(IN, k, t)), 0))
    for k in range(n_out):
        b.link((s, n_in + k), (b.add(Boundary(OUT, k, t)), 0))
    base = n_in + n_out
    for k in range(loops):
        b.link((s, base + 2 * k), (s, base + 2 * k + 1))
    return b.freeze()


def two_spiders(
    sig: Signature,
    colors: tuple[str, str],
    t: str,
    first: tuple[int, int],
    second: tuple[int, int],
    k: int,
) -> Diagram:
    """Spider ``first`` feeding ``k`` of its outputs into spider ``second``.

    ``first = (n, m)`` and ``second = (n', m')`` are (inputs, outputs) of
    each spider before wiring; the result has ``n + n' - k`` inputs and
    ``m + m' - k`` outputs, with the first spider's free wires first.
    """
    (n1, m1), (n2, m2) = first, second
    if not 0 <= k <= min(m1, n2):
        raise DiagramError("k must not exceed the legs available")
    b = Builder(sig)
    a = b.add(Spider(colors[0], t, n1 + m1))
    c = b.add(Spider(colors[1], t, n2 + m2))
    ins = outs = 0
    for i in range(n1):
        b.link((a, i), (b.add(Boundary(IN, ins, t)), 0))
        ins += 1
    for i in range(n2 - k):
        b.link((c, k + i), (b.add(Boundary(IN, ins, t)), 0))
        ins += 1
    for i in range(m1 - k):
        b.link((a, n1 + k + i), (b.add(Boundary(OUT, outs, t)), 0))
        outs += 1
    for i in range(m2):
        b.link((c, n2 + i), (b.add(Boundary(OUT, outs, t)), 0))
        outs += 1
    for i in range(k):
        b.link((a, n1 + i), (c, i))
    return b.freeze()


class SpiderIdentity(Rule):
    name = "spider_identity"

    def find_matches(self, d):
        return [
            Match(self.name, (s,), d.fingerprint)
            for s in d.spiders()
            if d.nodes[s].legs == 2
        ]

    def _rewrite(self, d, match):
        b = _builder_from(d)
        (s,) = match.nodes
        b.nodes[s] = _Joint(d.nodes[s].type)
        return b.freeze()

    def example(self, sig, t="Q", color=LIGHT):
        from .diagram import spider

        return spider(sig, color, t, 1, 1), identity(sig, t)

    def instances(self, sig, rng, types=("Q",), colors=(LIGHT,), count=1, **kw):
        out = []
        for t in types:
            for c in colors:
                out.append(self.example(sig, t, c))
        return out


class SpiderLoop(Rule):
    name = "spider_loop"
    randomized = True
    leg_polymorphic = True

    def find_matches(self, d):
        return [
            Match(self.name, (s,), d.fingerprint)
            for s in d.spiders()
            if _self_loop_ports(d, s)
        ]

    def _rewrite(self, d, match):
        b = _builder_from(d)
        (s,) = match.nodes
        for p in _self_loop_ports(d, s):
            b.unlink(p)
        n = d.nodes[s]
        _respider(b, [s], n.color, n.type)
        return b.freeze()

    def instances(self, sig, rng, types=("Q",), colors=(LIGHT,), count=20, max_legs=6, **kw):
        out = []
        for _ in range(count):
            t, c = rng.choice(types), rng.choice(colors)
            loops = rng.randint(1, max(1, max_legs // 2))
            n, m = _random_legs(rng, rng.randint(0, max_legs - 2 * loops))
            out.append(
                (_spider_with_loops(sig, c, t, n, m, loops), _spider_with_loops(sig, c, t, n, m, 0))
            )
        return out


class SpiderFuse(Rule):
    name = "spider_fuse"
    randomized = True
    leg_polymorphic = True

    def find_matches(self, d):
        out = []
        for s in d.spiders():
            a = d.nodes[s]
            for t in sorted(set(d.neighbours(s))):
                if t <= s:
                    continue
                b_ = d.nodes[t]
                if isinstance(b_, Spider) and b_.color == a.color and b_.type == a.type:
                    out.append(Match(self.name, (s, t), d.fingerprint))
        return out

    def _rewrite(self, d, match):
        b = _builder_from(d)
        s, t = match.nodes
        for p in d.ports(s):
            if d.mate(p)[0] == t and p in b.mates:
                b.unlink(p)
        n = d.nodes[s]
        _respider(b, [s, t], n.color, n.type)
        return b.freeze()

    def example(self, sig, t="Q", color=LIGHT, first=(1, 2), second=(2, 1), k=1):
        from .diagram import spider

        n1, m1 = first
        n2, m2 = second
        return (
            two_spiders(sig, (color, color), t, first, second, k),
            spider(sig, color, t, n1 + n2 - k, m1 + m2 - k),
        )

    def instances(self, sig, rng, types=("Q",), colors=(LIGHT,), count=20, max_legs=6, **kw):
        out = []
        for _ in range(count):
            t, c = rng.choice(types), rng.choice(colors)
            d1 = rng.randint(1, max_legs)
            d2 = rng.randint(1, max_legs)
            m1 = rng.randint(1, d1)
            n2 = rng.randint(1, d2)
            k = rng.randint(1, min(m1, n2))
            out.append(self.example(sig, t, c, (d1 - m1, m1), (n2, d2 - n2), k))
        return out


class ComplementarityHopf(Rule):
    name = "complementarity_hopf"
    randomized = True
    soundness = UP_TO_SCALAR
    leg_polymorphic = True
    wires = 2

    def find_matches(self, d):
        out = []
        for s in d.spiders():
            a = d.nodes[s]
            if a.color != LIGHT:
                continue
            links = Counter(d.neighbours(s))
            for t in sorted(links):
                b_ = d.nodes[t]
                if (
                    isinstance(b_, Spider)
                    and b_.color == DARK
                    and b_.type == a.type
                    and links[t] == self.wires
                ):
                    out.append(Match(self.name, (s, t), d.fingerprint))
        return out

    def _rewrite(self, d, match):
        b = _builder_from(d)
        s, t = match.nodes
        for p in d.ports(s):
            if d.mate(p)[0] == t:
                b.unlink(p)
        for nid in (s, t):
            n = d.nodes[nid]
            _respider(b, [nid], n.color, n.type)
        return b.freeze()

    def example(self, sig, t="Q", first=(1, 2), second=(2, 1)):
        from .diagram import compose_par, spider

        (n1, m1), (n2, m2) = first, second
        k = self.wires
        lhs = two_spiders(sig, (LIGHT, DARK), t, first, second, k)
        # boundary order of two_spiders: first spider's wires, then the second's
        rhs = compose_par(spider(sig, LIGHT, t, n1, m1 - k), spider(sig, DARK, t, n2 - k, m2))
        return lhs, rhs

    def instances(self, sig, rng, types=("Q",), count=20, max_legs=6, **kw):
        out = []
        for _ in range(count):
            t = rng.choice(types)
            d1 = rng.randint(2, max_legs)
            d2 = rng.randint(2, max_legs)
            m1 = rng.randint(2, d1)
            n2 = rng.randint(2, d2)
            out.append(self.example(sig, t, (d1 - m1, m1), (n2, d2 - n2)))
        return out


# -- pattern rules ---------------------------------------------------------------


def _pair_counts(d: Diagram, u: int, v: int) -> Counter:
    """Multiset of (port label at u, port label at v) over edges u-v."""
    cnt: Counter = Counter()
    for p in d.ports(u):
        q = d.mate(p)
        if q[0] != v:
            continue
        if u == v and q < p:
            continue
        pl = p[1] if isinstance(d.nodes[u], Box) else -1
        ql = q[1] if isinstance(d.nodes[v], Box) else -1
        cnt[(pl, ql)] += 1
    return cnt


class PatternRule(Rule):
    """A rule given by two diagrams with matching boundaries.

    Matching is an injective map of the lhs interior nodes into the host that
    keeps labels and reproduces exactly the lhs wiring among the matched
    nodes.  Wires from the lhs boundary may end anywhere outside the match.

    With ``leg_polymorphic`` a lhs spider may match a host spider with more
    legs; the surplus legs move to the rhs spider named in ``carry`` (by
    default the rhs spider of the same colour and type).

    ``boundary_map`` sends ``(role, pos)`` of the lhs boundary to the
    corresponding rhs boundary point; the default is the identity.
    """

    def __init__(
        self,
        name: str,
        lhs: Diagram,
        rhs: Diagram,
        soundness: str = EXACT,
        leg_polymorphic: bool = False,
        carry: Mapping[int, int] | None = None,
        boundary_map: Mapping[tuple[str, int], tuple[str, int]] | None = None,
    ):
        if soundness not in (EXACT, UP_TO_SCALAR):
            raise RewriteError(f"unknown soundness flag {soundness!r}")
        self.name = name
        self.lhs = lhs
        self.rhs = rhs
        self.soundness = soundness
        self.leg_polymorphic = leg_polymorphic
        self.boundary_map = self._check_boundaries(boundary_map)
        self.carry = self._infer_carry(carry) if leg_polymorphic else {}
        self._order = self._search_order()

    def _check_boundaries(self, bmap):
        lb = {(n.role, n.pos): n.type for n in self.lhs.nodes.values() if isinstance(n, Boundary)}
        rb = {(n.role, n.pos): n.type for n in self.rhs.nodes.values() if isinstance(n, Boundary)}
        bmap = dict(bmap) if bmap else {k: k for k in lb}
        if sorted(bmap) != sorted(lb) or sorted(bmap.values()) != sorted(rb):
            raise RewriteError(f"rule {self.name!r}: boundary correspondence is not a bijection")
        for k, v in bmap.items():
            if lb[k] != rb[v]:
                raise RewriteError(f"rule {self.name!r}: boundary {k} has type {lb[k]!r} vs {rb[v]!r}")
        for nid in self.lhs.inputs + self.lhs.outputs:
            if isinstance(self.lhs.nodes[self.lhs.mate((nid, 0))[0]], Boundary):
                raise RewriteError(f"rule {self.name!r}: lhs boundary wires must end on a node")
        if not self.lhs.interior():
            raise RewriteError(f"rule {self.name!r}: lhs has no nodes")
        if not _connected(self.lhs, self.lhs.interior()):
            raise RewriteError(f"rule {self.name!r}: lhs must be connected")
        return bmap

    def _infer_carry(self, carry):
        rspiders = [i for i in self.rhs.spiders()]
        out = {}
        for u in self.lhs.spiders():
            if carry and u in carry:
                out[u] = carry[u]
                continue
            ln = self.lhs.nodes[u]
            same = [r for r in rspiders if self.rhs.nodes[r].color == ln.color and self.rhs.nodes[r].type == ln.type]
            if not same:
                raise RewriteError(f"rule {self.name!r}: no rhs spider to carry extra legs of lhs node {u}")
            out[u] = same[0]
        for u, r in out.items():
            rn = self.rhs.nodes.get(r)
            if not isinstance(rn, Spider) or rn.type != self.lhs.nodes[u].type:
                raise RewriteError(f"rule {self.name!r}: carry target {r} is not a spider of the right type")
        return out

    def _search_order(self) -> list[int]:
        nodes = self.lhs.interior()
        order = [nodes[0]]
        seen = {nodes[0]}
        i = 0
        while i < len(order):
            for v in sorted(set(self.lhs.neighbours(order[i]))):
                if v not in seen and not isinstance(self.lhs.nodes[v], Boundary):
                    seen.add(v)
                    order.append(v)
            i += 1
        return order

    def _compatible(self, ln, hn) -> bool:
        if isinstance(ln, Box):
            return isinstance(hn, Box) and hn.name == ln.name
        if isinstance(ln, Spider):
            if not (isinstance(hn, Spider) and hn.color == ln.color and hn.type == ln.type):
                return False
            return hn.legs >= ln.legs if self.leg_polymorphic else hn.legs == ln.legs
        return False

    def find_matches(self, d: Diagram) -> list[Match]:
        lhs = self.lhs
        order = self._order
        cands = {u: [h for h in sorted(d.nodes) if self._compatible(lhs.nodes[u], d.nodes[h])] for u in order}
        found = []
        assign: dict[int, int] = {}
        used: set[int] = set()

        def ok(u, h):
            for v, hv in list(assign.items()) + [(u, h)]:
                if _pair_counts(lhs, u, v) != _pair_counts(d, h, hv):
                    return False
            return True

        def rec(i):
            if i == len(order):
                found.append(dict(assign))
                return
            u = order[i]
            for h in cands[u]:
                if h in used or not ok(u, h):
                    continue
                assign[u] = h
                used.add(h)
                rec(i + 1)
                del assign[u]
                used.discard(h)

        rec(0)
        out = []
        for a in found:
            out.append(
                Match(self.name, tuple(a[u] for u in order), d.fingerprint, tuple(sorted(a.items())))
            )
        return out

    def _rewrite(self, d, match):
        lhs, rhs = self.lhs, self.rhs
        assign = dict(match.detail)
        image = set(assign.values())
        b = _builder_from(d)
        joints = {}
        carried: dict[int, list] = {}
        # lhs ports that face the lhs boundary, per lhs node
        facing: dict[int, list] = {}
        for nid in lhs.inputs + lhs.outputs:
            p = lhs.mate((nid, 0))
            facing.setdefault(p[0], []).append((p, lhs.nodes[nid]))
        for u, h in sorted(assign.items()):
            ln = lhs.nodes[u]
            if isinstance(ln, Box):
                for p, bn in facing.get(u, []):
                    joints[(bn.role, bn.pos)] = (bn.type, (h, p[1]))
            else:
                free = [p for p in d.ports(h) if d.mate(p)[0] not in image]
                bnds = facing.get(u, [])
                for (p, bn), hp in zip(bnds, free):
                    joints[(bn.role, bn.pos)] = (bn.type, hp)
                carried[u] = free[len(bnds):]
        port_of = {}
        for key, (t, hp) in joints.items():
            j = b.joint(t)
            ext = b.unlink(hp)
            b.link((j, 0), ext)
            port_of[key] = (j, 1)
        carry_ext = {}
        for u, ports in carried.items():
            carry_ext[u] = [b.unlink(hp) for hp in ports]
        for h in image:
            b.remove(h)
        inv = {v: k for k, v in self.boundary_map.items()}
        pmap = {}
        for nid in rhs.inputs + rhs.outputs:
            n = rhs.nodes[nid]
            pmap[nid] = port_of[inv[(n.role, n.pos)]]
        ids = b.copy_in(rhs, pmap)
        for u, exts in carry_ext.items():
            if not exts:
                continue
            r = ids[self.carry[u]]
            n = b.nodes[r]
            base = n.legs
            b.nodes[r] = Spider(n.color, n.type, n.legs + len(exts))
            for i, q in enumerate(exts):
                b.link((r, base + i), q)
        return b.freeze()

    def instances(self, sig, rng, **kw):
        return [(self.lhs, self.rhs)]


def _connected(d: Diagram, nodes: list[int]) -> bool:
    if not nodes:
        return True
    nodes_set = set(nodes)
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        u = stack.pop()
        for v in d.neighbours(u):
            if v in nodes_set and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen == nodes_set


class Unitarity(Rule):
    """``dag(f) . f`` and ``f . dag(f)`` reduce to identities for unitary ``f``."""

    name = "unitarity"

    def __init__(self):
        self._cache: dict[tuple, list[PatternRule]] = {}

    def patterns(self, sig: Signature) -> list[PatternRule]:
        unitary = tuple(sorted(n for n, g in sig.generators.items() if g.unitary))
        key = tuple(sig[n] for n in unitary)
        if key not in self._cache:
            rules = []
            keys = set()
            for name in unitary:
                g = sig[name]
                f, fd = generator(sig, name), generator(sig, g.dagger)
                lhs = f >> fd
                k = canonical_form(lhs).key
                if k in keys:
                    continue
                keys.add(k)
                rules.append(PatternRule(self.name, lhs, identity(sig, g.dom)))
            self._cache[key] = rules
        return self._cache[key]

    def find_matches(self, d):
        out = []
        for i, r in enumerate(self.patterns(d.sig)):
            for m in r.find_matches(d):
                out.append(Match(self.name, m.nodes, m.fingerprint, (i,) + m.detail))
        return out

    def _rewrite(self, d, match):
        r = self.patterns(d.sig)[match.detail[0]]
        inner = Match(r.name, match.nodes, match.fingerprint, match.detail[1:])
        return r._rewrite(d, inner)

    def instances(self, sig, rng, **kw):
        return [(r.lhs, r.rhs) for r in self.patterns(sig)]


def default_ruleset() -> list[Rule]:
    return [SpiderIdentity(), SpiderLoop(), SpiderFuse(), Unitarity(), ComplementarityHopf()]


# -- normalization and traces -----------------------------------------------------


@dataclass(frozen=True)
class Step:
    rule: str
    nodes: tuple[int, ...]
    hash: str
    size_before: tuple[int, int]
    size_after: tuple[int, int]


@dataclass
class RewriteTrace:
    initial: Diagram
    steps: list[Step] = field(default_factory=list)
    final: Diagram | None = None
    exhausted: bool = False
    scalars: Counter = field(default_factory=Counter)
    notes: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return not self.scalars

    def to_json(self) -> dict:
        from .io import diagram_to_json

        return {
            "initial": diagram_to_json(self.initial),
            "initial_hash": canonical_form(self.initial).hash,
            "steps": [
                {
                    "rule": s.rule,
                    "nodes": list(s.nodes),
                    "hash": s.hash,
                    "size_before": list(s.size_before),
                    "size_after": list(s.size_after),
                }
                for s in self.steps
            ],
            "final_hash": canonical_form(self.final).hash if self.final is not None else None,
            "exhausted": self.exhausted,
            "scalars": dict(sorted(self.scalars.items())),
            "notes": list(self.notes),
        }


def _ordered(d: Diagram, matches: list[Match]) -> list[tuple[tuple[int, ...], Match]]:
    lab = canonical_form(d).labelling
    keyed = [(tuple(lab[n] for n in m.nodes), m) for m in matches]
    keyed.sort(key=lambda x: (sorted(x[0]), x[0]))
    return keyed


def _marker(rule: Rule, d: Diagram, m: Match) -> str:
    types = sorted({d.nodes[n].type for n in m.nodes if isinstance(d.nodes[n], Spider)})
    return f"{rule.name}[{','.join(types)}]"


def normalize(
    d: Diagram,
    rules: Sequence[Rule] | None = None,
    max_steps: int = 1000,
    rng: random.Random | None = None,
) -> tuple[Diagram, RewriteTrace]:
    """Rewrite until no rule applies or ``max_steps`` steps were taken.

    Rules are tried in list order; within a rule the match whose nodes have the
    lowest canonical indices is applied, unless ``rng`` is given, in which
    case a random match is picked (useful to probe confluence).
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    rules = default_ruleset() if rules is None else list(rules)
    trace = RewriteTrace(initial=d)
    trace.notes.append("wire bends spliced at construction; no explicit yanking steps needed")
    cur = d
    while True:
        pick = None
        for rule in rules:
            ms = rule.find_matches(cur)
            if ms:
                keyed = _ordered(cur, ms)
                pick = (rule, rng.choice(keyed) if rng is not None else keyed[0])
                break
        if pick is None:
            break
        if len(trace.steps) >= max_steps:
            trace.exhausted = True
            break
        rule, (ranks, m) = pick
        new = rule.apply(cur, m)
        if rule.soundness == UP_TO_SCALAR:
            trace.scalars[_marker(rule, cur, m)] += 1
        trace.steps.append(Step(rule.name, ranks, canonical_form(new).hash, cur.size, new.size))
        cur = new
    trace.final = cur
    return cur, trace


def replay(trace: RewriteTrace, rules: Sequence[Rule] | None = None) -> Diagram:
    """Re-run the steps of ``trace``; raises if any recorded hash differs."""
    rules = default_ruleset() if rules is None else list(rules)
    by_name = {r.name: r for r in rules}
    cur = trace.initial
    for i, step in enumerate(trace.steps):
        rule = by_name.get(step.rule)
        if rule is None:
            raise RewriteError(f"step {i}: unknown rule {step.rule!r}")
        chosen = None
        for ranks, m in _ordered(cur, rule.find_matches(cur)):
            if ranks == step.nodes:
                chosen = m
                break
        if chosen is None:
            raise RewriteError(f"step {i}: no {step.rule} match on nodes {step.nodes}")
        cur = rule.apply(cur, chosen)
        if canonical_form(cur).hash != step.hash:
            raise RewriteError(f"step {i}: hash mismatch")
    return cur


def _strip_scalars(d: Diagram) -> Diagram:
    # free loops and lone 0-leg spiders evaluate to the (non-zero) dimension
    b = _builder_from(d)
    b.loops.clear()
    for nid, n in list(b.nodes.items()):
        if isinstance(n, Spider) and n.legs == 0:
            del b.nodes[nid]
    return b.freeze()


def check_equal_by_rewriting(
    a: Diagram,
    b: Diagram,
    rules: Sequence[Rule] | None = None,
    budget: int = 1000,
) -> str:
    if a.dom != b.dom or a.cod != b.cod:
        raise DiagramError(
            f"boundary mismatch: {list(a.dom)} -> {list(a.cod)} vs {list(b.dom)} -> {list(b.cod)}"
        )
    na, ta = normalize(a, rules, budget)
    nb, tb = normalize(b, rules, budget)
    if canonical_equal(na, nb):
        return EQUAL_EXACT if ta.exact and tb.exact else EQUAL_UP_TO_SCALAR
    if canonical_equal(_strip_scalars(na), _strip_scalars(nb)):
        return EQUAL_UP_TO_SCALAR
    return UNKNOWN
