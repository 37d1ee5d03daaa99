"""Typed string diagrams stored as open graphs.

A diagram is a set of nodes (boxes, spiders and boundary points) whose ports
are joined pairwise by undirected edges.  Nothing records how a wire is drawn,
so bending a wire or sliding a box along it does not change the data: two
diagrams that differ by such a deformation are literally the same graph once
the boundary points glued during composition have been spliced away.

Ports are addressed as ``(node_id, index)``.  A box with generator
``f: A -> B`` has ``len(B) + len(A)`` ports, outputs first and inputs after,
which is also the axis order of the tensors that models assign to boxes.
Spider legs are numbered but carry no meaning beyond being distinct.
"""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

LIGHT = "light"
DARK = "dark"
COLORS = (LIGHT, DARK)

IN = "in"
OUT = "out"

Port = tuple[int, int]


class DiagramError(Exception):
    """Raised for ill-typed or malformed diagrams."""


class SignatureError(DiagramError):
    pass


class CompositionError(DiagramError):
    """Boundary types of a sequential composite do not line up.

    ``position`` is the index of the first offending wire.
    """

    def __init__(self, message: str, position: int):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class Generator:
    name: str
    dom: tuple[str, ...]
    cod: tuple[str, ...]
    dagger: str
    unitary: bool = False

    @property
    def port_types(self) -> tuple[str, ...]:
        return self.cod + self.dom

    @property
    def self_adjoint(self) -> bool:
        return self.dagger == self.name


class Signature:
    """Wire types and generators available to a family of diagrams.

    Every generator has a dagger partner with input and output exchanged.
    When no partner name is given one is created as ``name + "†"``;
    passing ``dagger=name`` declares a self-adjoint generator.
    """

    def __init__(self, types: Iterable[str] = (), generators: Iterable[Generator] = ()):
        self._types: set[str] = set()
        self._gens: dict[str, Generator] = {}
        self.add_types(*types)
        for g in generators:
            self._insert(g)

    def __repr__(self) -> str:
        return f"Signature(types={sorted(self._types)}, generators={sorted(self._gens)})"

    @property
    def types(self) -> frozenset[str]:
        return frozenset(self._types)

    @property
    def generators(self) -> Mapping[str, Generator]:
        return dict(self._gens)

    def add_types(self, *names: str) -> "Signature":
        for name in names:
            if not isinstance(name, str) or not name:
                raise SignatureError(f"bad wire type name {name!r}")
            self._types.add(name)
        return self

    def has_type(self, name: str) -> bool:
        return name in self._types

    def check_types(self, types: Iterable[str]) -> None:
        for t in types:
            if t not in self._types:
                raise SignatureError(f"unknown wire type {t!r}")

    def __contains__(self, name: str) -> bool:
        return name in self._gens

    def __getitem__(self, name: str) -> Generator:
        try:
            return self._gens[name]
        except KeyError:
            raise SignatureError(f"unknown generator {name!r}") from None

    def add_generator(
        self,
        name: str,
        dom: Sequence[str],
        cod: Sequence[str],
        dagger: str | None = None,
        unitary: bool = False,
    ) -> Generator:
        dom, cod = tuple(dom), tuple(cod)
        self.check_types(dom + cod)
        partner = dagger if dagger is not None else name + "†"
        if partner == name and dom != cod:
            raise SignatureError(f"self-adjoint generator {name!r} needs equal input and output types")
        g = Generator(name, dom, cod, partner, unitary)
        self._insert(g)
        if partner != name and partner not in self._gens:
            self._insert(Generator(partner, cod, dom, name, unitary))
        self._check_partner(g)
        return g

    def _insert(self, g: Generator) -> None:
        old = self._gens.get(g.name)
        if old is not None and old != g:
            raise SignatureError(f"conflicting definitions for generator {g.name!r}")
        self.check_types(g.dom + g.cod)
        self._gens[g.name] = g

    def _check_partner(self, g: Generator) -> None:
        p = self._gens.get(g.dagger)
        if p is None:
            return
        if p.dagger != g.name or p.dom != g.cod or p.cod != g.dom or p.unitary != g.unitary:
            raise SignatureError(f"generators {g.name!r} and {p.name!r} are not dagger partners")

    def validate(self) -> None:
        for g in self._gens.values():
            if g.dagger not in self._gens:
                raise SignatureError(f"generator {g.name!r} has no dagger partner {g.dagger!r}")
            self._check_partner(g)

    def merged(self, other: "Signature") -> "Signature":
        if other is self:
            return self
        out = Signature(self._types | other._types)
        for g in list(self._gens.values()) + list(other._gens.values()):
            out._insert(g)
        return out

    def copy(self) -> "Signature":
        return Signature(self._types, self._gens.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Signature):
            return NotImplemented
        return self._types == other._types and self._gens == other._gens

    __hash__ = None  # mutable


@dataclass(frozen=True)
class Box:
    name: str


@dataclass(frozen=True)
class Spider:
    color: str
    type: str
    legs: int


@dataclass(frozen=True)
class Boundary:
    role: str
    pos: int
    type: str


@dataclass(frozen=True)
class _Joint:
    # Temporary degree-2 node; dissolved before a diagram is frozen.
    type: str


Node = Union[Box, Spider, Boundary]


class Diagram:
    """An immutable open graph with ordered input and output boundaries.

    Build diagrams with the constructors in this module (:func:`identity`,
    :func:`generator`, :func:`cup`, ...) and combine them with
    :func:`compose_seq`, :func:`compose_par`, :func:`dagger` and
    :func:`transpose`, or with the operators ``>>`` (sequential, left
    first), ``@`` (parallel).

    ``loops`` counts closed wire circles per type; together with closed
    components they form the scalar part of the diagram.
    """

    def __init__(
        self,
        sig: Signature,
        nodes: Mapping[int, Node],
        mates: Mapping[Port, Port],
        loops: Mapping[str, int] | None = None,
        check: bool = True,
    ):
        self.sig = sig
        self._nodes = dict(nodes)
        self._mates = dict(mates)
        self._loops = Counter({t: c for t, c in (loops or {}).items() if c})
        if check:
            self.validate()

    # -- structure ---------------------------------------------------------

    @property
    def nodes(self) -> Mapping[int, Node]:
        return self._nodes

    @property
    def loops(self) -> Mapping[str, int]:
        return dict(self._loops)

    def mate(self, port: Port) -> Port:
        return self._mates[port]

    def node(self, nid: int) -> Node:
        return self._nodes[nid]

    @cached_property
    def edges(self) -> tuple[tuple[Port, Port], ...]:
        seen = []
        for p, q in self._mates.items():
            if p <= q:
                seen.append((p, q))
        return tuple(sorted(seen))

    def arity(self, nid: int) -> int:
        n = self._nodes[nid]
        if isinstance(n, Box):
            return len(self.sig[n.name].port_types)
        if isinstance(n, Spider):
            return n.legs
        return 1

    def ports(self, nid: int) -> list[Port]:
        return [(nid, k) for k in range(self.arity(nid))]

    def port_type(self, port: Port) -> str:
        n = self._nodes[port[0]]
        if isinstance(n, Box):
            return self.sig[n.name].port_types[port[1]]
        return n.type

    def neighbours(self, nid: int) -> list[int]:
        return [self._mates[p][0] for p in self.ports(nid)]

    @cached_property
    def inputs(self) -> tuple[int, ...]:
        return self._boundary(IN)

    @cached_property
    def outputs(self) -> tuple[int, ...]:
        return self._boundary(OUT)

    def _boundary(self, role: str) -> tuple[int, ...]:
        found = {n.pos: i for i, n in self._nodes.items() if isinstance(n, Boundary) and n.role == role}
        return tuple(found[k] for k in range(len(found)))

    @property
    def dom(self) -> tuple[str, ...]:
        return tuple(self._nodes[i].type for i in self.inputs)

    @property
    def cod(self) -> tuple[str, ...]:
        return tuple(self._nodes[i].type for i in self.outputs)

    def interior(self) -> list[int]:
        return sorted(i for i, n in self._nodes.items() if not isinstance(n, Boundary))

    def boxes(self) -> list[int]:
        return sorted(i for i, n in self._nodes.items() if isinstance(n, Box))

    def spiders(self) -> list[int]:
        return sorted(i for i, n in self._nodes.items() if isinstance(n, Spider))

    @property
    def size(self) -> tuple[int, int]:
        """(node count, edge count), the measure every shipped rule decreases."""
        return len(self._nodes), len(self._mates) // 2

    def validate(self) -> None:
        positions: dict[str, list[int]] = {IN: [], OUT: []}
        for nid, n in self._nodes.items():
            if isinstance(n, _Joint):
                raise DiagramError("unspliced joint left in diagram")
            if isinstance(n, Boundary):
                if n.role not in positions:
                    raise DiagramError(f"bad boundary role {n.role!r}")
                positions[n.role].append(n.pos)
                self.sig.check_types([n.type])
            elif isinstance(n, Spider):
                if n.color not in COLORS:
                    raise DiagramError(f"bad spider color {n.color!r}")
                if n.legs < 0:
                    raise DiagramError("negative spider degree")
                self.sig.check_types([n.type])
            elif isinstance(n, Box):
                self.sig[n.name]
            else:
                raise DiagramError(f"unknown node {n!r}")
            for p in self.ports(nid):
                q = self._mates.get(p)
                if q is None:
                    raise DiagramError(f"port {p} is not wired")
                if self._mates.get(q) != p:
                    raise DiagramError(f"edge {p}-{q} is not symmetric")
                if self.port_type(p) != self.port_type(q):
                    raise DiagramError(
                        f"edge {p}-{q} joins types {self.port_type(p)!r} and {self.port_type(q)!r}"
                    )
        for role, pos in positions.items():
            if sorted(pos) != list(range(len(pos))):
                raise DiagramError(f"{role} boundary positions are not 0..k-1: {sorted(pos)}")
        for p in self._mates:
            if p[0] not in self._nodes or not 0 <= p[1] < self.arity(p[0]):
                raise DiagramError(f"edge endpoint {p} does not exist")

    # -- identity ----------------------------------------------------------

    def raw(self) -> dict:
        """Id-dependent serialization (see :mod:`wirelogic.canon` for the invariant one)."""
        nodes = []
        for nid in sorted(self._nodes):
            n = self._nodes[nid]
            if isinstance(n, Box):
                nodes.append([nid, "box", n.name])
            elif isinstance(n, Spider):
                nodes.append([nid, "spider", n.color, n.type, n.legs])
            else:
                nodes.append([nid, n.role, n.pos, n.type])
        return {
            "nodes": nodes,
            "edges": [[list(p), list(q)] for p, q in self.edges],
            "loops": sorted(self._loops.items()),
        }

    @cached_property
    def fingerprint(self) -> str:
        blob = json.dumps(self.raw(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha1(blob.encode()).hexdigest()

    def __repr__(self) -> str:
        return (
            f"<Diagram {list(self.dom)} -> {list(self.cod)}: "
            f"{len(self.boxes())} boxes, {len(self.spiders())} spiders, {len(self.edges)} edges>"
        )

    def __eq__(self, other: object) -> bool:
        """Equality up to deformation (canonical forms agree)."""
        if not isinstance(other, Diagram):
            return NotImplemented
        return canonical_equal(self, other)

    def __hash__(self) -> int:
        from .canon import canonical_hash

        return hash(canonical_hash(self))

    def __rshift__(self, other: "Diagram") -> "Diagram":
        return compose_seq(self, other)

    def __matmul__(self, other: "Diagram") -> "Diagram":
        return compose_par(self, other)

    @property
    def dagger(self) -> "Diagram":
        return dagger(self)

    @property
    def T(self) -> "Diagram":
        return transpose(self)

    def relabel(self, mapping: Mapping[int, int]) -> "Diagram":
        """Same diagram with internal node ids renamed through ``mapping``."""
        nodes = {mapping[i]: n for i, n in self._nodes.items()}
        mates = {(mapping[p[0]], p[1]): (mapping[q[0]], q[1]) for p, q in self._mates.items()}
        return Diagram(self.sig, nodes, mates, self._loops)


class Builder:
    """Mutable open graph used while constructing or rewriting diagrams."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.nodes: dict[int, Node | _Joint] = {}
        self.mates: dict[Port, Port] = {}
        self.loops: Counter = Counter()
        self._next = 0

    def add(self, node: Node | _Joint) -> int:
        nid = self._next
        self._next += 1
        self.nodes[nid] = node
        return nid

    def joint(self, type_: str) -> int:
        return self.add(_Joint(type_))

    def link(self, p: Port, q: Port) -> None:
        if p in self.mates or q in self.mates:
            raise DiagramError(f"port already wired: {p if p in self.mates else q}")
        if p == q:
            raise DiagramError(f"cannot wire port {p} to itself")
        self.mates[p] = q
        self.mates[q] = p

    def unlink(self, p: Port) -> Port:
        q = self.mates.pop(p)
        del self.mates[q]
        return q

    def arity(self, nid: int) -> int:
        n = self.nodes[nid]
        if isinstance(n, Box):
            return len(self.sig[n.name].port_types)
        if isinstance(n, Spider):
            return n.legs
        if isinstance(n, _Joint):
            return 2
        return 1

    def remove(self, nid: int) -> None:
        for k in range(self.arity(nid)):
            if (nid, k) in self.mates:
                self.unlink((nid, k))
        del self.nodes[nid]

    def copy_in(self, d: Diagram, port_map=None) -> dict[int, int]:
        """Insert every node of ``d`` except boundaries listed in ``port_map``.

        ``port_map`` sends a boundary node id of ``d`` to the builder port that
        replaces it; edges touching such a boundary are rerouted there.
        """
        port_map = port_map or {}
        ids = {}
        for nid in sorted(d.nodes):
            if nid not in port_map:
                ids[nid] = self.add(d.nodes[nid])

        def tr(p: Port) -> Port:
            if p[0] in port_map:
                return port_map[p[0]]
            return (ids[p[0]], p[1])

        for p, q in d.edges:
            self.link(tr(p), tr(q))
        self.loops.update(d.loops)
        return ids

    def dissolve_joints(self) -> None:
        joints = sorted(i for i, n in self.nodes.items() if isinstance(n, _Joint))
        done: set[int] = set()
        for j in joints:
            if j in done:
                continue
            chain = [j]
            done.add(j)
            ends = []
            cycle = False
            for side in (0, 1):
                p = (j, side)
                q = self.mates[p]
                while isinstance(self.nodes[q[0]], _Joint):
                    jj = q[0]
                    if jj == j:
                        cycle = True
                        break
                    if jj not in done:
                        done.add(jj)
                        chain.append(jj)
                    p = (jj, 1 - q[1])
                    q = self.mates[p]
                if cycle:
                    break
                ends.append(q)
            t = self.nodes[j].type
            for jj in chain:
                self.remove(jj)
            if cycle:
                self.loops[t] += 1
            else:
                self.link(ends[0], ends[1])

    def freeze(self, check: bool = True) -> Diagram:
        self.dissolve_joints()
        ids = {old: new for new, old in enumerate(sorted(self.nodes))}
        nodes = {ids[i]: n for i, n in self.nodes.items()}
        mates = {(ids[p[0]], p[1]): (ids[q[0]], q[1]) for p, q in self.mates.items()}
        return Diagram(self.sig, nodes, mates, self.loops, check=check)


# -- constructors ------------------------------------------------------------


def _as_types(t: str | Sequence[str]) -> tuple[str, ...]:
    return (t,) if isinstance(t, str) else tuple(t)


def identity(sig: Signature, types: str | Sequence[str] = ()) -> Diagram:
    types = _as_types(types)
    sig.check_types(types)
    b = Builder(sig)
    for k, t in enumerate(types):
        i = b.add(Boundary(IN, k, t))
        o = b.add(Boundary(OUT, k, t))
        b.link((i, 0), (o, 0))
    return b.freeze()


def empty(sig: Signature) -> Diagram:
    return identity(sig, ())


def generator(sig: Signature, name: str) -> Diagram:
    g = sig[name]
    b = Builder(sig)
    box = b.add(Box(name))
    for k, t in enumerate(g.cod):
        o = b.add(Boundary(OUT, k, t))
        b.link((box, k), (o, 0))
    for k, t in enumerate(g.dom):
        i = b.add(Boundary(IN, k, t))
        b.link((box, len(g.cod) + k), (i, 0))
    return b.freeze()


def cup(sig: Signature, t: str) -> Diagram:
    sig.check_types([t])
    b = Builder(sig)
    o0 = b.add(Boundary(OUT, 0, t))
    o1 = b.add(Boundary(OUT, 1, t))
    b.link((o0, 0), (o1, 0))
    return b.freeze()


def cap(sig: Signature, t: str) -> Diagram:
    return dagger(cup(sig, t))


def swap(sig: Signature, s: str, t: str) -> Diagram:
    sig.check_types([s, t])
    b = Builder(sig)
    i0 = b.add(Boundary(IN, 0, s))
    i1 = b.add(Boundary(IN, 1, t))
    o0 = b.add(Boundary(OUT, 0, t))
    o1 = b.add(Boundary(OUT, 1, s))
    b.link((i0, 0), (o1, 0))
    b.link((i1, 0), (o0, 0))
    return b.freeze()


def spider(sig: Signature, color: str, t: str, n_in: int, n_out: int) -> Diagram:
    if color not in COLORS:
        raise DiagramError(f"spider color must be one of {COLORS}, got {color!r}")
    if n_in < 0 or n_out < 0:
        raise DiagramError("spider leg counts must be non-negative")
    sig.check_types([t])
    b = Builder(sig)
    s = b.add(Spider(color, t, n_in + n_out))
    for k in range(n_in):
        i = b.add(Boundary(IN, k, t))
        b.link((s, k), (i, 0))
    for k in range(n_out):
        o = b.add(Boundary(OUT, k, t))
        b.link((s, n_in + k), (o, 0))
    return b.freeze()


def compose_seq(f: Diagram, g: Diagram) -> Diagram:
    """``g`` after ``f``: outputs of ``f`` are glued to inputs of ``g``."""
    if f.cod != g.dom:
        for k, (a, b_) in enumerate(zip(f.cod, g.dom)):
            if a != b_:
                break
        else:
            k = min(len(f.cod), len(g.dom))
        raise CompositionError(
            f"cannot compose: outputs {list(f.cod)} vs inputs {list(g.dom)} differ at wire {k}", k
        )
    sig = f.sig.merged(g.sig)
    b = Builder(sig)
    joints = [b.joint(t) for t in f.cod]
    b.copy_in(f, {o: (j, 0) for o, j in zip(f.outputs, joints)})
    b.copy_in(g, {i: (j, 1) for i, j in zip(g.inputs, joints)})
    return b.freeze()


def compose_par(f: Diagram, g: Diagram) -> Diagram:
    sig = f.sig.merged(g.sig)
    b = Builder(sig)
    b.copy_in(f)
    ids = b.copy_in(g)
    n_in, n_out = len(f.dom), len(f.cod)
    for nid in ids.values():
        n = b.nodes[nid]
        if isinstance(n, Boundary):
            shift = n_in if n.role == IN else n_out
            b.nodes[nid] = Boundary(n.role, n.pos + shift, n.type)
    return b.freeze()


def seq(*ds: Diagram) -> Diagram:
    out = ds[0]
    for d in ds[1:]:
        out = compose_seq(out, d)
    return out


def par(*ds: Diagram) -> Diagram:
    out = ds[0]
    for d in ds[1:]:
        out = compose_par(out, d)
    return out


def _dagger_port(sig: Signature, name: str, k: int) -> int:
    g = sig[name]
    m, n = len(g.cod), len(g.dom)
    # output k of f is input k of its partner, input i of f is output i
    return n + k if k < m else k - m


def dagger(d: Diagram) -> Diagram:
    """Flip a diagram: inputs and outputs exchange roles, boxes become partners."""
    sig = d.sig
    nodes = {}
    for nid, n in d.nodes.items():
        if isinstance(n, Box):
            nodes[nid] = Box(sig[n.name].dagger)
        elif isinstance(n, Boundary):
            nodes[nid] = Boundary(OUT if n.role == IN else IN, n.pos, n.type)
        else:
            nodes[nid] = n

    def tr(p: Port) -> Port:
        n = d.nodes[p[0]]
        if isinstance(n, Box):
            return (p[0], _dagger_port(sig, n.name, p[1]))
        return p

    mates = {tr(p): tr(q) for p, q in d._mates.items()}
    return Diagram(sig, nodes, mates, d.loops)


def transpose(d: Diagram) -> Diagram:
    """Rotate by half a turn: bend every input up and every output down.

    Inputs become outputs in reversed order and vice versa; boxes are left in
    place, so in graph form this only reassigns boundary roles.
    """
    n_in, n_out = len(d.dom), len(d.cod)
    nodes = {}
    for nid, n in d.nodes.items():
        if isinstance(n, Boundary):
            if n.role == IN:
                nodes[nid] = Boundary(OUT, n_in - 1 - n.pos, n.type)
            else:
                nodes[nid] = Boundary(IN, n_out - 1 - n.pos, n.type)
        else:
            nodes[nid] = n
    return Diagram(d.sig, nodes, d._mates, d.loops)


def canonical_equal(a: Diagram, b: Diagram) -> bool:
    from .canon import canonical_form

    return canonical_form(a).key == canonical_form(b).key
