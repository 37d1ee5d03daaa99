"""Canonical serialization of diagrams.

Two diagrams get byte-identical canonical keys exactly when there is an
isomorphism of open graphs between them that keeps boundary positions,
generator names and port indices, spider colours, types and degrees.  Spider
legs are interchangeable, so only which nodes a spider touches matters.

The labelling is computed by colour refinement; remaining ties are broken by
trying every member of the first ambiguous class and keeping the smallest
serialization.  Components that do not reach the boundary are canonised on
their own and sorted, so the scalar part behaves like a multiset.
"""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass

from .diagram import Boundary, Box, Diagram


@dataclass(frozen=True)
class CanonicalForm:
    key: bytes
    labelling: dict[int, int]

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.key).hexdigest()


def _label(n) -> tuple:
    if isinstance(n, Boundary):
        return ("b", n.role, n.pos, n.type)
    if isinstance(n, Box):
        return ("x", n.name)
    return ("s", n.color, n.type, n.legs)


def _port_label(d: Diagram, p) -> int:
    return p[1] if isinstance(d.nodes[p[0]], Box) else -1


def _components(d: Diagram) -> list[list[int]]:
    parent = {i: i for i in d.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p, q in d.edges:
        a, b = find(p[0]), find(q[0])
        if a != b:
            parent[a] = b
    groups: dict[int, list[int]] = {}
    for i in sorted(d.nodes):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


class _Local:
    """One connected piece (or the union of boundary pieces) in local indices."""

    def __init__(self, d: Diagram, ids: list[int]):
        self.ids = ids
        index = {nid: k for k, nid in enumerate(ids)}
        self.labels = [_label(d.nodes[i]) for i in ids]
        self.adj: list[list[tuple[int, int, int]]] = [[] for _ in ids]
        self.edges: list[tuple[int, int, int, int]] = []
        for p, q in d.edges:
            if p[0] not in index:
                continue
            u, v = index[p[0]], index[q[0]]
            pl, ql = _port_label(d, p), _port_label(d, q)
            self.adj[u].append((pl, v, ql))
            self.adj[v].append((ql, u, pl))
            self.edges.append((u, pl, v, ql))
        # nodes with identical neighbourhoods are swappable by an automorphism
        self.twin_key = [(self.labels[v], tuple(sorted(self.adj[v]))) for v in range(len(ids))]

    def initial(self) -> list[int]:
        uniq = sorted(set(self.labels))
        rank = {l: i for i, l in enumerate(uniq)}
        return [rank[l] for l in self.labels]

    def refine(self, colors: list[int]) -> list[int]:
        n_classes = len(set(colors))
        while True:
            sigs = [
                (colors[v], tuple(sorted((mp, colors[u], up) for mp, u, up in self.adj[v])))
                for v in range(len(colors))
            ]
            uniq = sorted(set(sigs))
            rank = {s: i for i, s in enumerate(uniq)}
            colors = [rank[s] for s in sigs]
            if len(uniq) == n_classes:
                return colors
            n_classes = len(uniq)

    def serialize(self, colors: list[int]) -> tuple:
        labels = tuple(self.labels[v] for v in sorted(range(len(colors)), key=colors.__getitem__))
        edges = []
        for u, pl, v, ql in self.edges:
            a, b = (colors[u], pl), (colors[v], ql)
            edges.append(a + b if a <= b else b + a)
        return labels, tuple(sorted(edges))

    def search(self, colors: list[int]) -> tuple[tuple, list[int]]:
        colors = self.refine(colors)
        counts = Counter(colors)
        ties = [c for c, k in counts.items() if k > 1]
        if not ties:
            return self.serialize(colors), colors
        target = min(ties)
        best = None
        tried = set()
        for v in range(len(colors)):
            if colors[v] != target:
                continue
            twin = self.twin_key[v]
            if twin in tried:
                continue
            tried.add(twin)
            keyed = [(colors[u], 0 if u == v else 1) for u in range(len(colors))]
            uniq = sorted(set(keyed))
            rank = {k: i for i, k in enumerate(uniq)}
            result = self.search([rank[k] for k in keyed])
            if best is None or result[0] < best[0]:
                best = result
        return best


def _jsonable(obj):
    if isinstance(obj, tuple):
        return [_jsonable(x) for x in obj]
    return obj


def canonical_form(d: Diagram) -> CanonicalForm:
    cached = getattr(d, "_canon", None)
    if cached is not None:
        return cached
    comps = _components(d)
    open_ids: list[int] = []
    closed = []
    for comp in comps:
        if any(isinstance(d.nodes[i], Boundary) for i in comp):
            open_ids.extend(comp)
        else:
            closed.append(comp)
    open_ids.sort()

    labelling: dict[int, int] = {}
    open_part = _Local(d, open_ids)
    ser, colors = open_part.search(open_part.initial())
    for k, nid in enumerate(open_ids):
        labelling[nid] = colors[k]
    offset = len(open_ids)

    pieces = []
    for comp in closed:
        loc = _Local(d, comp)
        s, c = loc.search(loc.initial())
        pieces.append((s, c, comp))
    pieces.sort(key=lambda x: x[0])
    for s, c, comp in pieces:
        for k, nid in enumerate(comp):
            labelling[nid] = offset + c[k]
        offset += len(comp)

    blob = {
        "open": _jsonable(ser),
        "closed": [_jsonable(s) for s, _, _ in pieces],
        "loops": sorted(d.loops.items()),
    }
    key = json.dumps(blob, separators=(",", ":"), sort_keys=True).encode()
    form = CanonicalForm(key, labelling)
    d._canon = form
    return form


def canonical_hash(d: Diagram) -> str:
    return canonical_form(d).hash
