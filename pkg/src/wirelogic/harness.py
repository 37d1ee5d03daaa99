"""Falsification harness: evaluate both sides of rewrite rules in a model."""
from __future__ import annotations

import random
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .diagram import DARK, LIGHT, Diagram, Signature
from .rewrite import ComplementarityHopf, Rule, default_ruleset
from .tensor import DEFAULT_TOL, Model, ModelError, equal_tensors, interpret


@dataclass(frozen=True)
class Failure:
    rule: str
    case: int
    deviation: float
    lhs: Diagram
    rhs: Diagram


@dataclass
class SoundnessReport:
    model: str
    cases: dict[str, int] = field(default_factory=dict)
    failures: list[Failure] = field(default_factory=list)
    skipped: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = [f"model {self.model}: {sum(self.cases.values())} cases, {len(self.failures)} failures"]
        for rule, n in self.cases.items():
            bad = sum(1 for f in self.failures if f.rule == rule)
            lines.append(f"  {rule:24s} {n:4d} cases  {bad} failures")
        for rule, why in self.skipped.items():
            lines.append(f"  {rule:24s} skipped: {why}")
        return "\n".join(lines)


def case_rng(seed: int, rule: str, case: int) -> random.Random:
    return random.Random(zlib.crc32(f"{seed}:{rule}:{case}".encode()))


def _covered(d: Diagram, model: Model) -> bool:
    try:
        for nid in d.boxes():
            model.tensor(d.sig, d.nodes[nid].name)
    except (ModelError, KeyError):
        return False
    return True


def _deviation(a, b) -> float:
    if a.data.dtype == bool:
        return float(np.sum(a.data != b.data))
    return float(np.max(np.abs(a.data - b.data))) if a.data.size else 0.0


def soundness_harness(
    rules: Sequence[Rule] | None,
    model: Model,
    cases: int = 50,
    seed: int = 0,
    sig: Signature | None = None,
    max_legs: int = 6,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> SoundnessReport:
    """Check every rule's sides for equality in ``model``.

    Rules with random shapes get ``cases`` instances each; every instance is
    drawn from its own generator seeded by ``(seed, rule, case)``, so results
    do not depend on ``workers``.
    """
    rules = default_ruleset() if rules is None else list(rules)
    sig = sig or model.signature()
    types = sorted(t for t in model.dims if sig.has_type(t))
    report = SoundnessReport(model.name)
    jobs = []
    for rule in rules:
        kw = dict(types=types, max_legs=max_legs, count=1)
        if isinstance(rule, ComplementarityHopf):
            kw["types"] = [t for t in types if model.has_basis(LIGHT, t) and model.has_basis(DARK, t)]
            if not kw["types"]:
                report.skipped[rule.name] = "model has no light/dark pair"
                continue
        else:
            per_type_colors = [c for c in (LIGHT, DARK) if all(model.has_basis(c, t) for t in types)]
            kw["colors"] = per_type_colors or [LIGHT]
        instances = []
        if rule.randomized:
            for i in range(cases):
                instances += rule.instances(sig, case_rng(seed, rule.name, i), **kw)
        else:
            found = rule.instances(sig, case_rng(seed, rule.name, 0), **kw)
            instances = [p for p in found if _covered(p[0], model)]
        if not instances:
            report.skipped[rule.name] = "no instance covered by the model"
            continue
        report.cases[rule.name] = len(instances)
        for i, (lhs, rhs) in enumerate(instances):
            jobs.append((rule, i, lhs, rhs))

    def run(job):
        rule, i, lhs, rhs = job
        a, b = interpret(lhs, model), interpret(rhs, model)
        return job, equal_tensors(a, b, rule.soundness, tol), _deviation(a, b)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    for (rule, i, lhs, rhs), good, dev in results:
        if not good:
            report.failures.append(Failure(rule.name, i, dev, lhs, rhs))
    return report
