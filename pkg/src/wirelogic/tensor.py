"""Evaluating diagrams as tensors.

A :class:`Model` assigns a dimension to every wire type, a dense tensor to
every generator (axes ordered outputs then inputs), and an orthonormal basis
to every spider colour.  :func:`interpret` contracts the node tensors along
the edges of a diagram:

* a wire joining two boundary points is the identity (so a cup is
  ``sum_i |ii>``, unnormalised);
* a spider of degree k is ``sum_j b_j ⊗ ... ⊗ b_j`` (k factors) over the
  basis vectors ``b_j`` of its colour;
* each closed loop of type ``Q`` contributes a factor ``dim(Q)``.

Because spider legs and cups carry no orientation, spider bases must be real;
the model refuses complex bases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .diagram import (
    DARK,
    LIGHT,
    Boundary,
    Box,
    Diagram,
    Signature,
)
from .semiring import BOOLEAN, COMPLEX, NONNEG, Semiring, get_semiring

EXACT = "exact"
UP_TO_SCALAR = "up-to-scalar"

DEFAULT_TOL = 1e-9


class ModelError(Exception):
    pass


@dataclass(frozen=True)
class TensorValue:
    """Dense tensor with axes ordered outputs first, then inputs."""

    data: np.ndarray
    n_outputs: int
    semiring: Semiring = COMPLEX

    def __post_init__(self):
        if self.n_outputs > self.data.ndim:
            raise ValueError("more outputs than axes")

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def n_inputs(self) -> int:
        return self.data.ndim - self.n_outputs

    def matrix(self) -> np.ndarray:
        out = math.prod(self.shape[: self.n_outputs])
        return self.data.reshape(out, -1)

    def scalar(self):
        if self.data.ndim:
            raise ValueError("not a scalar")
        return self.data[()]


def hadamard_basis() -> np.ndarray:
    return np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)


class Model:
    """Concrete dimensions, generator tensors and spider bases.

    Args:
        semiring: carrier name or :class:`Semiring`.
        dims: positive dimension per wire type.
        tensors: generator name -> array shaped ``cod dims + dom dims``.
            Dagger partners missing from ``tensors`` are derived by conjugate
            transposition.
        bases: colour -> type -> matrix whose rows are the basis vectors.
            Light defaults to the standard basis, dark to the Hadamard basis
            on dimension-2 types of complex models.
        sig: declarations of the generators; required for partner lookup.
        conjugate_dagger: set to False to build a deliberately wrong model in
            which daggers transpose without conjugating.
    """

    def __init__(
        self,
        semiring: str | Semiring,
        dims: Mapping[str, int],
        tensors: Mapping[str, np.ndarray] | None = None,
        bases: Mapping[str, Mapping[str, np.ndarray]] | None = None,
        sig: Signature | None = None,
        conjugate_dagger: bool = True,
        name: str = "model",
    ):
        self.semiring = get_semiring(semiring)
        self.name = name
        self.dims = dict(dims)
        for t, k in self.dims.items():
            if not isinstance(k, (int, np.integer)) or k < 1:
                raise ModelError(f"dimension of {t!r} must be a positive integer")
        self.tensors = {k: self.semiring.coerce(v) for k, v in (tensors or {}).items()}
        self.bases = {c: {t: np.asarray(b) for t, b in per.items()} for c, per in (bases or {}).items()}
        self.sig = sig
        self.conjugate_dagger = conjugate_dagger
        self._cache: dict = {}
        if sig is not None:
            self.check(sig)

    def __repr__(self) -> str:
        return f"<Model {self.name} {self.semiring.name} dims={self.dims}>"

    def dim(self, t: str) -> int:
        try:
            return self.dims[t]
        except KeyError:
            raise ModelError(f"model has no dimension for wire type {t!r}") from None

    def signature(self) -> Signature:
        if self.sig is not None:
            return self.sig
        return Signature(self.dims)

    def has_basis(self, color: str, t: str) -> bool:
        try:
            self.basis(color, t)
            return True
        except ModelError:
            return False

    def basis(self, color: str, t: str) -> np.ndarray:
        key = ("basis", color, t)
        if key in self._cache:
            return self._cache[key]
        d = self.dim(t)
        given = self.bases.get(color, {}).get(t)
        if given is not None:
            b = given
        elif color == LIGHT:
            b = np.eye(d)
        elif color == DARK and d == 2 and self.semiring is COMPLEX:
            b = hadamard_basis()
        else:
            raise ModelError(f"model has no {color} basis for type {t!r}")
        b = np.asarray(b)
        if b.shape != (d, d):
            raise ModelError(f"{color} basis for {t!r} must be {d}x{d}")
        if np.iscomplexobj(b):
            if np.any(np.abs(np.imag(b)) > 1e-12):
                raise ModelError(f"{color} basis for {t!r} must be real")
            b = np.real(b)
        if self.semiring is BOOLEAN:
            b = BOOLEAN.coerce(b)
            if not (np.all(b.sum(axis=0) == 1) and np.all(b.sum(axis=1) == 1)):
                raise ModelError(f"boolean {color} basis for {t!r} must be a permutation")
        elif not np.allclose(b @ b.T, np.eye(d), atol=1e-9):
            raise ModelError(f"{color} basis for {t!r} is not orthonormal")
        elif self.semiring is NONNEG and np.any(b < 0):
            raise ModelError(f"{color} basis for {t!r} has negative entries")
        self._cache[key] = b
        return b

    def spider_tensor(self, color: str, t: str, legs: int) -> np.ndarray:
        key = ("spider", color, t, legs)
        if key in self._cache:
            return self._cache[key]
        b = self.basis(color, t)
        sr = self.semiring
        if legs == 0:
            out = sr.coerce(np.array(b.shape[0]) if sr is not BOOLEAN else np.array(1))
        else:
            w = sr.work(sr.coerce(b))
            ops = []
            for k in range(legs):
                ops += [w, [0, k + 1]]
            out = sr.finish(sr.settle(np.einsum(*ops, list(range(1, legs + 1)))))
            out = sr.coerce(out)
        self._cache[key] = out
        return out

    def tensor(self, sig: Signature, name: str) -> np.ndarray:
        g = sig[name]
        shape = tuple(self.dim(t) for t in g.port_types)
        if name in self.tensors:
            arr = self.tensors[name]
        elif g.dagger in self.tensors:
            arr = self._adjoint(self.tensors[g.dagger], len(g.dom))
        else:
            raise ModelError(f"model has no tensor for generator {name!r}")
        if arr.shape != shape:
            raise ModelError(f"tensor for {name!r} has shape {arr.shape}, expected {shape}")
        return arr

    def _adjoint(self, arr: np.ndarray, n_out_partner: int) -> np.ndarray:
        # partner has n_out_partner outputs; ours are its inputs
        axes = list(range(n_out_partner, arr.ndim)) + list(range(n_out_partner))
        out = np.transpose(arr, axes)
        return self.semiring.conj(out) if self.conjugate_dagger else out

    def check(self, sig: Signature, tol: float = 1e-9) -> None:
        """Validate shapes, dagger partners and unitarity flags against ``sig``."""
        for name, g in sig.generators.items():
            if name not in self.tensors and g.dagger not in self.tensors:
                continue
            arr = self.tensor(sig, name)
            if name in self.tensors and g.dagger in self.tensors:
                want = self._adjoint(self.tensors[g.dagger], len(g.dom))
                if not np.allclose(arr, want, atol=tol):
                    raise ModelError(f"tensor of {name!r} is not the adjoint of {g.dagger!r}")
            if g.unitary:
                m = TensorValue(arr, len(g.cod), self.semiring).matrix()
                if m.shape[0] != m.shape[1]:
                    raise ModelError(f"unitary generator {name!r} is not square")
                mh = np.conj(m.T) if self.semiring.involutive else m.T
                eye = np.eye(m.shape[0])
                prod1 = mh.astype(float if self.semiring is BOOLEAN else m.dtype) @ m
                prod2 = m.astype(prod1.dtype) @ mh.astype(prod1.dtype)
                if not (np.allclose(prod1, eye, atol=tol) and np.allclose(prod2, eye, atol=tol)):
                    raise ModelError(f"generator {name!r} is flagged unitary but its tensor is not")

    def with_tensors(self, sig: Signature | None = None, **tensors) -> "Model":
        merged = dict(self.tensors)
        merged.update(tensors)
        return Model(
            self.semiring, self.dims, merged, self.bases, sig or self.sig, self.conjugate_dagger, self.name
        )


# -- contraction ------------------------------------------------------------------


@dataclass
class Plan:
    """Pairwise contraction order in single-assignment form.

    Operands are numbered ``0..n-1``; the i-th step contracts two live
    operands into a new one numbered ``n + i``.
    """

    steps: list[tuple[int, int]] = field(default_factory=list)
    cost: int = 0
    max_rank: int = 0


@dataclass
class _Network:
    operands: list[np.ndarray]
    labels: list[list[int]]
    sizes: dict[int, int]
    output: list[int]
    scalar: object


def _network(d: Diagram, model: Model) -> _Network:
    sr = model.semiring
    labels, sizes, output = _labels_only(d, model)
    operands = []
    for p, q in d.edges:
        if isinstance(d.nodes[p[0]], Boundary) and isinstance(d.nodes[q[0]], Boundary):
            operands.append(sr.coerce(np.eye(model.dim(d.port_type(p)))))
    for nid in d.interior():
        n = d.nodes[nid]
        if isinstance(n, Box):
            operands.append(model.tensor(d.sig, n.name))
        else:
            operands.append(model.spider_tensor(n.color, n.type, n.legs))
    scalar = sr.one
    for t, c in d.loops.items():
        scalar = True if sr is BOOLEAN else scalar * sr.power(model.dim(t), c)
    return _Network(operands, labels, sizes, output, scalar)


def _greedy(labels: Sequence[Sequence[int]], sizes: Mapping[int, int], output: Sequence[int]) -> Plan:
    live = {i: list(l) for i, l in enumerate(labels)}
    nxt = len(labels)
    plan = Plan()
    keep_out = set(output)

    def result_labels(a, b):
        others = set(keep_out)
        for k, l in live.items():
            if k not in (a, b):
                others.update(l)
        res = []
        for x in live[a] + live[b]:
            if x in others and x not in res:
                res.append(x)
        return res

    def size(ls):
        return math.prod(sizes[x] for x in ls)

    while len(live) > 1:
        best = None
        keys = sorted(live)
        for i, a in enumerate(keys):
            for b in keys[i + 1 :]:
                if not set(live[a]) & set(live[b]):
                    continue
                res = result_labels(a, b)
                cand = (size(res), a, b, res)
                if best is None or cand[:3] < best[:3]:
                    best = cand
        if best is None:
            # disconnected pieces: outer product of the two smallest
            a, b = sorted(keys, key=lambda k: (size(live[k]), k))[:2]
            a, b = min(a, b), max(a, b)
            res = result_labels(a, b)
            best = (size(res), a, b, res)
        s, a, b, res = best
        plan.steps.append((a, b))
        plan.cost += s
        plan.max_rank = max(plan.max_rank, len(res))
        del live[a], live[b]
        live[nxt] = res
        nxt += 1
    return plan


def contraction_plan(d: Diagram, model: Model | None = None, default_dim: int = 2) -> Plan:
    """Greedy pairwise order that keeps the next intermediate smallest.

    ``plan.cost`` sums intermediate sizes and ``plan.max_rank`` is the largest
    number of open legs of any intermediate.  Without a model every wire type
    counts as dimension ``default_dim``.
    """
    if model is None:
        dims = {t: default_dim for t in d.sig.types}
        model = _ShapeOnly(dims)
    net = _labels_only(d, model)
    return _greedy(*net)


class _ShapeOnly:
    def __init__(self, dims):
        self.dims = dims

    def dim(self, t):
        return self.dims[t]


def _labels_only(d: Diagram, model) -> tuple[list[list[int]], dict[int, int], list[int]]:
    label_of: dict = {}
    for k, (p, q) in enumerate(d.edges):
        label_of[p] = k
        label_of[q] = k
    sizes = {label_of[p]: model.dim(d.port_type(p)) for p in label_of}
    nxt = len(d.edges)
    labels = []
    open_label = {}
    for p, q in d.edges:
        if isinstance(d.nodes[p[0]], Boundary) and isinstance(d.nodes[q[0]], Boundary):
            sizes[nxt] = sizes[label_of[p]]
            labels.append([label_of[p], nxt])
            open_label[p[0]], open_label[q[0]] = label_of[p], nxt
            nxt += 1
        else:
            for port in (p, q):
                if isinstance(d.nodes[port[0]], Boundary):
                    open_label[port[0]] = label_of[port]
    for nid in d.interior():
        labels.append([label_of[p] for p in d.ports(nid)])
    output = [open_label[i] for i in d.outputs] + [open_label[i] for i in d.inputs]
    return labels, sizes, output


def _einsum(sr: Semiring, pairs, out_labels):
    # relabel into the 0..51 range numpy accepts
    remap: dict[int, int] = {}
    args = []
    for arr, ls in pairs:
        args.append(arr)
        args.append([remap.setdefault(x, len(remap)) for x in ls])
    args.append([remap.setdefault(x, len(remap)) for x in out_labels])
    return sr.settle(np.einsum(*args))


def _run(net: _Network, plan: Plan, sr: Semiring) -> np.ndarray:
    ops = {i: sr.work(a) for i, a in enumerate(net.operands)}
    labs = {i: list(l) for i, l in enumerate(net.labels)}
    keep_out = set(net.output)
    nxt = len(net.operands)
    for a, b in plan.steps:
        others = set(keep_out)
        for k, l in labs.items():
            if k not in (a, b):
                others.update(l)
        res = []
        for x in labs[a] + labs[b]:
            if x in others and x not in res:
                res.append(x)
        ops[nxt] = _einsum(sr, [(ops[a], labs[a]), (ops[b], labs[b])], res)
        labs[nxt] = res
        del ops[a], ops[b], labs[a], labs[b]
        nxt += 1
    if ops:
        (k,) = ops
        out = _einsum(sr, [(ops[k], labs[k])], net.output)
    else:
        out = sr.work(sr.coerce(np.array(1)))
    return out


def interpret(d: Diagram, model: Model, plan: Plan | None = None, naive: bool = False) -> TensorValue:
    """Evaluate ``d`` in ``model``.

    With ``naive=True`` everything is contracted in a single ``einsum`` call,
    which is slow but independent of the planner.
    """
    sr = model.semiring
    net = _network(d, model)
    if naive:
        args = []
        for a, l in zip(net.operands, net.labels):
            args += [sr.work(a), l]
        if args:
            args.append(net.output)
            flat = sorted({x for l in net.labels for x in l} | set(net.output))
            remap = {x: i for i, x in enumerate(flat)}
            args = [[remap[x] for x in a] if isinstance(a, list) else a for a in args]
            out = sr.settle(np.einsum(*args, optimize=False))
        else:
            out = sr.work(sr.coerce(np.array(1)))
    else:
        if plan is None:
            plan = _greedy(net.labels, net.sizes, net.output)
        out = _run(net, plan, sr)
    out = sr.finish(out)
    if sr is BOOLEAN:
        out = np.logical_and(out, bool(net.scalar))
    else:
        out = out * net.scalar
    return TensorValue(sr.coerce(out), len(d.outputs), sr)


def _arr(x) -> np.ndarray:
    return x.data if isinstance(x, TensorValue) else np.asarray(x)


def scalar_between(a, b) -> complex | None:
    """The factor ``lam`` with ``a ≈ lam * b`` estimated at b's largest entry."""
    a, b = _arr(a), _arr(b)
    flat_b = b.reshape(-1)
    if flat_b.size == 0:
        return 1.0
    k = int(np.argmax(np.abs(flat_b)))
    if flat_b[k] == 0:
        return None
    return a.reshape(-1)[k] / flat_b[k]


def equal_tensors(a, b, mode: str = EXACT, tol: float = DEFAULT_TOL) -> bool:
    """Compare two tensors exactly or up to a non-zero scalar.

    Boolean tensors only support exact comparison; ``mode`` is ignored for
    them.
    """
    boolean = (isinstance(a, TensorValue) and a.semiring is BOOLEAN) or _arr(a).dtype == bool
    A, B = _arr(a), _arr(b)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    if boolean or B.dtype == bool:
        return bool(np.array_equal(A.astype(bool), B.astype(bool)))
    if mode == EXACT:
        return bool(A.size == 0 or np.max(np.abs(A - B)) <= tol)
    if mode != UP_TO_SCALAR:
        raise ValueError(f"unknown comparison mode {mode!r}")
    if A.size == 0:
        return True
    amax, bmax = np.max(np.abs(A)), np.max(np.abs(B))
    if amax <= tol and bmax <= tol:
        return True
    if amax <= tol or bmax <= tol:
        return False
    lam = scalar_between(A, B)
    return bool(np.max(np.abs(A - lam * B)) <= tol * amax)
