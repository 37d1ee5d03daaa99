"""JSON formats for signatures, diagrams, rulesets, models and traces.

Diagram format::

    {
      "types": ["Q"],
      "generators": [{"name": "f", "dom": ["Q"], "cod": ["Q"],
                      "dagger": "f†", "unitary": true}],
      "nodes": [{"id": 2, "kind": "box", "name": "f"},
                {"id": 3, "kind": "spider", "color": "light", "type": "Q", "legs": 3},
                {"id": 0, "kind": "input", "type": "Q"}, ...],
      "edges": [[[0, 0], [2, 1]], ...],
      "inputs": [0], "outputs": [1],
      "loops": {"Q": 1}
    }

Box ports are numbered outputs first, then inputs; every other node has
ports ``0..legs-1``.  ``inputs``/``outputs`` list boundary node ids in order.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .diagram import IN, OUT, Boundary, Box, Diagram, DiagramError, Signature, Spider
from .rewrite import EXACT, PatternRule, RewriteError, Rule, default_ruleset
from .tensor import Model


class FormatError(ValueError):
    """Malformed input file."""


def _load(source: str | Path | dict | list) -> Any:
    if isinstance(source, (dict, list)):
        return source
    text = Path(source).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{source}: invalid JSON ({e})") from None


# -- signatures -----------------------------------------------------------------


def signature_to_json(sig: Signature) -> dict:
    gens = []
    for name in sorted(sig.generators):
        g = sig.generators[name]
        gens.append(
            {"name": g.name, "dom": list(g.dom), "cod": list(g.cod), "dagger": g.dagger, "unitary": g.unitary}
        )
    return {"types": sorted(sig.types), "generators": gens}


def signature_from_json(obj: dict, sig: Signature | None = None) -> Signature:
    """Read ``types`` and ``generators``; partners may be listed or implied."""
    sig = sig.copy() if sig is not None else Signature()
    sig.add_types(*obj.get("types", []))
    pending = []
    for g in obj.get("generators", []):
        try:
            name, dom, cod = g["name"], tuple(g.get("dom", [])), tuple(g.get("cod", []))
        except (KeyError, TypeError):
            raise FormatError(f"generator entry {g!r} needs name/dom/cod") from None
        pending.append((name, dom, cod, g.get("dagger"), bool(g.get("unitary", False))))
    listed = {p[0] for p in pending}
    for name, dom, cod, partner, unitary in pending:
        if name in sig:
            # already declared, possibly as someone's partner: must agree
            g = sig[name]
            if (g.dom, g.cod) != (dom, cod) or (partner is not None and g.dagger != partner):
                raise FormatError(f"conflicting declarations for generator {name!r}")
            continue
        if partner is not None and partner != name and partner in listed:
            # add both ends together so the partner check sees a consistent pair
            other = next(p for p in pending if p[0] == partner)
            if other[3] not in (None, name):
                raise FormatError(f"generators {name!r} and {partner!r} disagree on daggers")
            sig.add_generator(name, dom, cod, dagger=partner, unitary=unitary or other[4])
        else:
            sig.add_generator(name, dom, cod, dagger=partner, unitary=unitary)
    return sig


# -- diagrams ---------------------------------------------------------------------


def diagram_to_json(d: Diagram, with_signature: bool = True) -> dict:
    nodes = []
    for nid in sorted(d.nodes):
        n = d.nodes[nid]
        if isinstance(n, Box):
            nodes.append({"id": nid, "kind": "box", "name": n.name})
        elif isinstance(n, Spider):
            nodes.append({"id": nid, "kind": "spider", "color": n.color, "type": n.type, "legs": n.legs})
        else:
            kind = "input" if n.role == IN else "output"
            nodes.append({"id": nid, "kind": kind, "type": n.type})
    out = signature_to_json(d.sig) if with_signature else {}
    out.update(
        {
            "nodes": nodes,
            "edges": [[list(p), list(q)] for p, q in d.edges],
            "inputs": list(d.inputs),
            "outputs": list(d.outputs),
            "loops": dict(sorted(d.loops.items())),
        }
    )
    return out


def diagram_from_json(obj: dict | str | Path, sig: Signature | None = None) -> Diagram:
    obj = _load(obj)
    if "types" in obj or "generators" in obj or sig is None:
        sig = signature_from_json(obj, sig)
    try:
        pos = {nid: (IN, k) for k, nid in enumerate(obj.get("inputs", []))}
        pos.update({nid: (OUT, k) for k, nid in enumerate(obj.get("outputs", []))})
        nodes = {}
        for n in obj["nodes"]:
            nid, kind = int(n["id"]), n["kind"]
            if kind == "box":
                nodes[nid] = Box(n["name"])
            elif kind == "spider":
                nodes[nid] = Spider(n["color"], n["type"], int(n["legs"]))
            elif kind in ("input", "output"):
                role, k = pos.get(nid, (None, None))
                if role != (IN if kind == "input" else OUT):
                    raise FormatError(f"boundary node {nid} is not listed in {kind}s")
                nodes[nid] = Boundary(role, k, n["type"])
            else:
                raise FormatError(f"unknown node kind {kind!r}")
        mates = {}
        for p, q in obj["edges"]:
            p, q = (int(p[0]), int(p[1])), (int(q[0]), int(q[1]))
            if p in mates or q in mates:
                raise FormatError(f"port used twice in edge {p}-{q}")
            mates[p] = q
            mates[q] = p
        loops = {str(t): int(c) for t, c in dict(obj.get("loops", {})).items()}
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"malformed diagram: {e!r}") from None
    try:
        return Diagram(sig, nodes, mates, loops)
    except DiagramError as e:
        raise FormatError(f"invalid diagram: {e}") from None


def save_diagram(d: Diagram, path: str | Path) -> None:
    Path(path).write_text(json.dumps(diagram_to_json(d), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


# -- rulesets ---------------------------------------------------------------------

_BUILTIN = {r.name: type(r) for r in default_ruleset()}


def rule_to_json(rule: Rule) -> dict:
    if not isinstance(rule, PatternRule):
        return {"builtin": rule.name}
    out = {
        "name": rule.name,
        "lhs": diagram_to_json(rule.lhs, with_signature=False),
        "rhs": diagram_to_json(rule.rhs, with_signature=False),
        "soundness": rule.soundness,
        "leg_polymorphic": rule.leg_polymorphic,
    }
    if rule.leg_polymorphic:
        out["carry"] = {str(k): v for k, v in rule.carry.items()}
    if any(k != v for k, v in rule.boundary_map.items()):
        out["boundary_map"] = [[list(k), list(v)] for k, v in sorted(rule.boundary_map.items())]
    return out


def ruleset_to_json(rules: list[Rule], sig: Signature | None = None) -> dict:
    out = signature_to_json(sig) if sig is not None else {}
    out["rules"] = [rule_to_json(r) for r in rules]
    return out


def ruleset_from_json(obj: dict | list | str | Path, sig: Signature | None = None) -> tuple[list[Rule], Signature]:
    """Load rules; ``{"builtin": "spider_fuse"}`` entries pull in shipped rules.

    A bare list is accepted as the ``rules`` array.
    """
    obj = _load(obj)
    if isinstance(obj, list):
        obj = {"rules": obj}
    sig = signature_from_json(obj, sig)
    rules: list[Rule] = []
    for i, r in enumerate(obj.get("rules", [])):
        if "builtin" in r:
            try:
                rules.append(_BUILTIN[r["builtin"]]())
            except KeyError:
                raise FormatError(f"rule {i}: unknown builtin {r['builtin']!r}") from None
            continue
        try:
            lhs = diagram_from_json(r["lhs"], sig)
            rhs = diagram_from_json(r["rhs"], sig)
            carry = {int(k): int(v) for k, v in r.get("carry", {}).items()} or None
            bmap = None
            if "boundary_map" in r:
                bmap = {tuple(k): tuple(v) for k, v in r["boundary_map"]}
            rules.append(
                PatternRule(
                    r.get("name", f"rule{i}"),
                    lhs,
                    rhs,
                    soundness=r.get("soundness", EXACT),
                    leg_polymorphic=bool(r.get("leg_polymorphic", False)),
                    carry=carry,
                    boundary_map=bmap,
                )
            )
        except KeyError as e:
            raise FormatError(f"rule {i}: missing field {e}") from None
        except RewriteError as e:
            raise FormatError(f"rule {i}: {e}") from None
    return rules, sig


# -- models -----------------------------------------------------------------------


def _decode_array(entry: dict) -> np.ndarray:
    data = entry["data"]
    flat = [complex(x[0], x[1]) if isinstance(x, (list, tuple)) else x for x in data]
    arr = np.array(flat)
    shape = tuple(entry.get("shape", arr.shape))
    if int(np.prod(shape)) != arr.size:
        raise FormatError(f"data of length {arr.size} does not fit shape {list(shape)}")
    return arr.reshape(shape)


def _encode_array(arr: np.ndarray) -> dict:
    arr = np.asarray(arr)
    flat = arr.reshape(-1)
    if np.iscomplexobj(flat):
        if np.all(np.imag(flat) == 0):
            data = [float(x) for x in np.real(flat)]
        else:
            data = [[float(x.real), float(x.imag)] for x in flat]
    elif flat.dtype == bool:
        data = [int(x) for x in flat]
    else:
        data = [float(x) for x in flat]
    return {"shape": list(arr.shape), "data": data}


def model_from_json(obj: dict | str | Path, sig: Signature | None = None) -> Model:
    """Load a model file.

    Keys: ``semiring``, ``dims`` (type -> int), ``generators`` (signature
    entries that may carry ``shape``/``data``), ``spiders`` (colour -> type ->
    ``{shape, data}`` basis rows), optional ``conjugate_dagger`` and ``name``.
    Complex entries are written as ``[re, im]`` pairs.
    """
    default_name = Path(obj).stem if isinstance(obj, (str, Path)) else "model"
    obj = _load(obj)
    try:
        dims = {str(t): int(k) for t, k in obj["dims"].items()}
        base = {"types": sorted(set(obj.get("types", [])) | set(dims)), "generators": obj.get("generators", [])}
        sig = signature_from_json(base, sig)
        tensors = {g["name"]: _decode_array(g) for g in obj.get("generators", []) if "data" in g}
        bases = {
            color: {t: _decode_array(b) for t, b in per.items()} for color, per in obj.get("spiders", {}).items()
        }
        return Model(
            obj.get("semiring", "complex"),
            dims,
            tensors,
            bases,
            sig=sig,
            conjugate_dagger=bool(obj.get("conjugate_dagger", True)),
            name=obj.get("name", default_name),
        )
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"malformed model: {e!r}") from None


def model_to_json(model: Model) -> dict:
    sig = model.signature()
    gens = signature_to_json(sig)["generators"]
    for g in gens:
        if g["name"] in model.tensors:
            g.update(_encode_array(model.tensors[g["name"]]))
    return {
        "name": model.name,
        "semiring": model.semiring.name,
        "dims": dict(model.dims),
        "generators": gens,
        "spiders": {c: {t: _encode_array(b) for t, b in per.items()} for c, per in model.bases.items()},
        "conjugate_dagger": model.conjugate_dagger,
    }


def tensor_to_json(value) -> dict:
    out = _encode_array(value.data)
    out.update({"n_outputs": value.n_outputs, "semiring": value.semiring.name})
    return out
