"""Worked protocols checked twice: by rewriting and by tensor evaluation.

Teleportation and entanglement swapping are verified against their expected
outcome (a plain wire, a plain cup).  Bayesian inversion is computed both
from Bayes' rule and from a diagram that bends the channel across a
prior-weighted cup and an inverse-marginal cap.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .canon import canonical_hash
from .diagram import Diagram, Signature, cap, canonical_equal, cup, generator, identity, seq, transpose, dagger
from .rewrite import RewriteTrace, normalize
from .tensor import DEFAULT_TOL, UP_TO_SCALAR, Model, equal_tensors, interpret, scalar_between

MAX_STEPS = 50


class ProtocolError(ValueError):
    pass


@dataclass
class ProtocolReport:
    name: str
    trace: RewriteTrace | None
    rewrite_ok: bool
    tensor_ok: bool
    mode: str = UP_TO_SCALAR
    tol: float = DEFAULT_TOL
    scalar: complex | None = None
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.rewrite_ok and self.tensor_ok

    def to_json(self) -> dict:
        sc = None
        if self.scalar is not None:
            z = complex(self.scalar)
            sc = [round(z.real, 12), round(z.imag, 12)]
        return {
            "protocol": self.name,
            "ok": self.ok,
            "rewrite": {
                "ok": self.rewrite_ok,
                "steps": len(self.trace.steps) if self.trace else 0,
                "final_hash": canonical_hash(self.trace.final) if self.trace else None,
            },
            "tensor": {"ok": self.tensor_ok, "mode": self.mode, "tol": self.tol, "scalar": sc},
            "details": self.details,
        }

    def text(self) -> str:
        mark = lambda b: "pass" if b else "FAIL"  # noqa: E731
        lines = [f"{self.name}: {mark(self.ok)}"]
        if self.trace is not None:
            rules = ", ".join(s.rule for s in self.trace.steps) or "none"
            lines.append(f"  rewrite: {mark(self.rewrite_ok)} in {len(self.trace.steps)} steps ({rules})")
        sc = "" if self.scalar is None else f", scalar {complex(self.scalar):.6g}"
        lines.append(f"  tensor:  {mark(self.tensor_ok)} ({self.mode}, tol {self.tol:g}{sc})")
        for k, v in self.details.items():
            lines.append(f"  {k}: {v}")
        lines.append(f"  time: {self.elapsed * 1000:.1f} ms")
        return "\n".join(lines)


def _require_unitary(model: Model, name: str, tol: float = 1e-9) -> Signature:
    sig = model.signature()
    if name not in sig:
        raise ProtocolError(f"model has no generator {name!r}")
    g = sig[name]
    if not g.unitary:
        raise ProtocolError(f"generator {name!r} is not declared unitary")
    if len(g.dom) != 1 or g.dom != g.cod:
        raise ProtocolError(f"generator {name!r} must map one wire to the same type")
    m = model.tensor(sig, name)
    if not np.allclose(np.conj(m.T) @ m, np.eye(m.shape[0]), atol=tol):
        raise ProtocolError(f"tensor of {name!r} is not unitary")
    return sig


def _verdicts(name, d: Diagram, expected: Diagram, model: Model, tol: float, details=None) -> ProtocolReport:
    t0 = time.perf_counter()
    final, trace = normalize(d, max_steps=MAX_STEPS)
    rewrite_ok = canonical_equal(final, expected) and not trace.exhausted
    a, b = interpret(d, model), interpret(expected, model)
    tensor_ok = equal_tensors(a, b, UP_TO_SCALAR, tol)
    scalar = scalar_between(a, b) if tensor_ok else None
    return ProtocolReport(
        name, trace, rewrite_ok, tensor_ok, UP_TO_SCALAR, tol, scalar, time.perf_counter() - t0, details or {}
    )


def bent_cap(sig: Signature, f: str) -> Diagram:
    """Effect on two wires: ``f`` on the second leg, then a cap."""
    t = sig[f].dom[0]
    return (identity(sig, t) @ generator(sig, f)) >> cap(sig, t)


def correction(sig: Signature, f: str) -> Diagram:
    """What Bob applies to undo ``f`` arriving through a bent wire."""
    return transpose(dagger(generator(sig, f)))


def teleportation_diagram(sig: Signature, f: str) -> Diagram:
    t = sig[f].dom[0]
    one = identity(sig, t)
    return seq(one @ cup(sig, t), bent_cap(sig, f) @ one, correction(sig, f))


def teleportation_demo(model: Model, f: str = "I", tol: float = DEFAULT_TOL) -> ProtocolReport:
    """Alice's system reaches Bob through a cup and an ``f``-decorated cap."""
    sig = _require_unitary(model, f)
    t = sig[f].dom[0]
    d = teleportation_diagram(sig, f)
    return _verdicts(f"teleportation[{f}]", d, identity(sig, t), model, tol, {"unitary": f, "dim": model.dim(t)})


def swapping_diagram(sig: Signature, f: str, misroute: bool = False) -> Diagram:
    """Two cups; the middle wires are capped (with ``f``), the last one corrected.

    With ``misroute`` the cap closes the first pair on itself instead of
    joining the two pairs, which must not give a cup.
    """
    t = sig[f].dom[0]
    one = identity(sig, t)
    cups = cup(sig, t) @ cup(sig, t)
    if misroute:
        return cups >> (bent_cap(sig, f) @ one @ correction(sig, f))
    return cups >> (one @ bent_cap(sig, f) @ correction(sig, f))


def swapping_demo(model: Model, f: str = "I", misroute: bool = False, tol: float = DEFAULT_TOL) -> ProtocolReport:
    sig = _require_unitary(model, f)
    t = sig[f].dom[0]
    d = swapping_diagram(sig, f, misroute)
    name = f"swapping[{f}]" + (" (misrouted)" if misroute else "")
    return _verdicts(name, d, cup(sig, t), model, tol, {"unitary": f, "dim": model.dim(t)})


# -- Bayesian inversion ----------------------------------------------------------------

STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class Inversion:
    matrix: np.ndarray  # rows y, columns x: B(x|y)
    marginal: np.ndarray
    unsupported: tuple[int, ...]
    deviation: float  # largest gap between the two computations

    @property
    def ok(self) -> bool:
        return not self.unsupported


def check_prior(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > STOCHASTIC_TOL:
        raise ProtocolError("prior must be a non-negative vector summing to 1")
    return p


def check_channel(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or np.any(M < 0) or np.any(np.abs(M.sum(axis=1) - 1.0) > STOCHASTIC_TOL):
        raise ProtocolError("channel must be a non-negative matrix whose rows sum to 1")
    return M


def bayes_rule(p, M, tol: float = STOCHASTIC_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Reference computation ``B[y, x] = M[x, y] p[x] / q[y]``; unsupported rows are zero."""
    p, M = np.asarray(p, float), np.asarray(M, float)
    q = p @ M
    B = np.zeros((M.shape[1], M.shape[0]))
    for y in range(M.shape[1]):
        if q[y] > tol:
            for x in range(M.shape[0]):
                B[y, x] = M[x, y] * p[x] / q[y]
    return B, q


def bayes_diagram(nx: int, ny: int) -> tuple[Diagram, Signature]:
    """``Y -> X``: the channel bent across a weighted cup on X and cap on Y."""
    sig = Signature(["X", "Y"])
    sig.add_generator("M", ["X"], ["Y"])
    sig.add_generator("prior_cup", [], ["X", "X"])
    sig.add_generator("evidence_cap", ["Y", "Y"], [])
    X, Y = identity(sig, "X"), identity(sig, "Y")
    d = seq(
        Y @ generator(sig, "prior_cup"),
        Y @ generator(sig, "M") @ X,
        generator(sig, "evidence_cap") @ X,
    )
    return d, sig


def bayes_invert(p, M, tol: float = STOCHASTIC_TOL) -> Inversion:
    """Invert channel ``M`` (rows x, ``M[x, y] = M(y|x)``) against prior ``p``.

    Returns ``B`` with rows y.  Evidence with ``q(y) <= tol`` cannot be
    inverted: its row is zero and ``y`` is listed in ``unsupported``.
    """
    p, M = check_prior(p), check_channel(M)
    if M.shape[0] != p.size:
        raise ProtocolError(f"channel has {M.shape[0]} rows but the prior has {p.size} entries")
    oracle, q = bayes_rule(p, M, tol)
    nx, ny = M.shape
    inv_q = np.array([1.0 / v if v > tol else 0.0 for v in q])
    d, sig = bayes_diagram(nx, ny)
    model = Model(
        "nonneg",
        {"X": nx, "Y": ny},
        {"M": M.T, "prior_cup": np.diag(p), "evidence_cap": np.diag(inv_q)},
        sig=sig,
    )
    via_diagram = interpret(d, model).data.T  # interpret gives [x, y]
    dev = float(np.max(np.abs(via_diagram - oracle))) if oracle.size else 0.0
    if dev > 1e-12:
        raise ProtocolError(f"diagrammatic inversion disagrees with Bayes' rule by {dev:.3g}")
    unsupported = tuple(int(y) for y in range(ny) if q[y] <= tol)
    return Inversion(via_diagram, q, unsupported, dev)


def bayes_demo(p, M) -> ProtocolReport:
    t0 = time.perf_counter()
    inv = bayes_invert(p, M)
    details = {
        "marginal": [round(float(v), 12) for v in inv.marginal],
        "inverse": [[round(float(v), 12) for v in row] for row in inv.matrix],
        "unsupported_evidence": list(inv.unsupported),
        "max_deviation": inv.deviation,
    }
    return ProtocolReport(
        "bayes", None, True, inv.deviation <= 1e-12, "exact", 1e-12, None, time.perf_counter() - t0, details
    )
