"""Graphviz DOT and standalone SVG renderings of diagrams.

The SVG layout is a simple layered drawing made here (no Graphviz needed):
inputs sit in the left column, outputs in the right, and interior nodes are
placed by breadth-first distance from the inputs.
"""
from __future__ import annotations

from collections import defaultdict, deque
from html import escape

from .diagram import DARK, IN, LIGHT, Boundary, Box, Diagram, Spider

SPIDER_FILL = {LIGHT: "#ffffff", DARK: "#555555"}
SPIDER_FONT = {LIGHT: "#000000", DARK: "#ffffff"}


def _dot_id(nid: int) -> str:
    return f"n{nid}"


def _dot_str(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(d: Diagram, name: str = "diagram") -> str:
    """One undirected graph; inputs ranked as sources, outputs as sinks."""
    lines = [f"graph {_dot_str(name)} {{", "  rankdir=LR;", '  node [fontname="Helvetica"];']
    ins = [_dot_id(i) for i in d.inputs]
    outs = [_dot_id(i) for i in d.outputs]
    for nid in sorted(d.nodes):
        n = d.nodes[nid]
        if isinstance(n, Boundary):
            label = f"{'in' if n.role == IN else 'out'}{n.pos}:{n.type}"
            attrs = f"shape=plaintext, label={_dot_str(label)}"
        elif isinstance(n, Box):
            attrs = f"shape=box, label={_dot_str(n.name)}"
        else:
            attrs = (
                f"shape=circle, style=filled, fillcolor={_dot_str(SPIDER_FILL[n.color])}, "
                f"fontcolor={_dot_str(SPIDER_FONT[n.color])}, label={_dot_str(n.type)}, width=0.3"
            )
        lines.append(f"  {_dot_id(nid)} [{attrs}];")
    if ins:
        lines.append("  { rank=source; " + "; ".join(ins) + "; }")
    if outs:
        lines.append("  { rank=sink; " + "; ".join(outs) + "; }")
    for p, q in d.edges:
        label = d.port_type(p)
        extra = []
        for port, side in ((p, "taillabel"), (q, "headlabel")):
            if isinstance(d.nodes[port[0]], Box):
                extra.append(f"{side}={_dot_str(str(port[1]))}")
        attr = ", ".join([f"label={_dot_str(label)}"] + extra)
        lines.append(f"  {_dot_id(p[0])} -- {_dot_id(q[0])} [{attr}];")
    for t, c in sorted(d.loops.items()):
        lines.append(f"  loop_{len(lines)} [shape=circle, label={_dot_str(f'{t} x{c}')}, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _layers(d: Diagram) -> dict[int, int]:
    # breadth-first distance from the inputs (or from any node for closed parts)
    dist: dict[int, int] = {}
    queue = deque()
    for i in d.inputs:
        dist[i] = 0
        queue.append(i)
    interior = d.interior()
    while True:
        while queue:
            u = queue.popleft()
            for v in d.neighbours(u):
                if v not in dist and not isinstance(d.nodes[v], Boundary):
                    dist[v] = dist[u] + 1
                    queue.append(v)
        rest = [v for v in interior if v not in dist]
        if not rest:
            break
        dist[rest[0]] = 1
        queue.append(rest[0])
    last = max([dist[v] for v in interior], default=0) + 1
    for o in d.outputs:
        dist[o] = last
    return dist


def to_svg(d: Diagram, width_step: int = 110, height_step: int = 60) -> str:
    layer = _layers(d)
    columns: dict[int, list[int]] = defaultdict(list)
    for nid in sorted(d.nodes, key=lambda i: (layer[i], getattr(d.nodes[i], "pos", 0), i)):
        columns[layer[nid]].append(nid)
    pos = {}
    rows = max((len(c) for c in columns.values()), default=1)
    for col, ids in columns.items():
        for k, nid in enumerate(ids):
            pos[nid] = (40 + col * width_step, 40 + k * height_step)
    width = 80 + max((c for c in columns), default=0) * width_step
    height = 80 + (rows - 1) * height_step + 20 * bool(d.loops)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="Helvetica" font-size="11">'
    ]
    for p, q in d.edges:
        (x1, y1), (x2, y2) = pos[p[0]], pos[q[0]]
        if p[0] == q[0]:
            out.append(f'<circle cx="{x1}" cy="{y1 - 18}" r="14" fill="none" stroke="#333"/>')
            continue
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#333"/>')
        out.append(
            f'<text x="{(x1 + x2) / 2:.1f}" y="{(y1 + y2) / 2 - 3:.1f}" fill="#777">{escape(d.port_type(p))}</text>'
        )
    for nid, (x, y) in sorted(pos.items()):
        n = d.nodes[nid]
        if isinstance(n, Boundary):
            label = f"{'in' if n.role == IN else 'out'}{n.pos}"
            out.append(f'<text x="{x}" y="{y + 4}" text-anchor="middle">{escape(label)}</text>')
        elif isinstance(n, Box):
            out.append(f'<rect x="{x - 22}" y="{y - 13}" width="44" height="26" fill="#fff" stroke="#000"/>')
            out.append(f'<text x="{x}" y="{y + 4}" text-anchor="middle">{escape(n.name)}</text>')
        else:
            assert isinstance(n, Spider)
            out.append(f'<circle cx="{x}" cy="{y}" r="9" fill="{SPIDER_FILL[n.color]}" stroke="#000"/>')
    if d.loops:
        text = ", ".join(f"{t} loop x{c}" for t, c in sorted(d.loops.items()))
        out.append(f'<text x="10" y="{height - 8}">{escape(text)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
