from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from wirelogic.diagram import Signature
from wirelogic.io import model_from_json
from wirelogic.tensor import Model, hadamard_basis

DATA = Path(__file__).resolve().parents[1] / "src" / "wirelogic" / "data"

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def qubit():
    return model_from_json(DATA / "qubit_model.json")


@pytest.fixture
def qutrit():
    return model_from_json(DATA / "qutrit_model.json")


@pytest.fixture
def sig_q() -> Signature:
    sig = Signature(["Q", "R"])
    sig.add_generator("f", ["Q"], ["Q"])
    sig.add_generator("g", ["Q"], ["Q"])
    sig.add_generator("h", ["Q", "R"], ["Q"])
    sig.add_generator("psi", [], ["Q"])
    sig.add_generator("v", ["Q"], [])
    sig.add_generator("U", ["Q"], ["Q"], unitary=True)
    return sig


def random_model(sig: Signature, dims: dict[str, int], seed: int = 0, dark: bool = True) -> Model:
    """Complex model with random tensors for every base generator of ``sig``."""
    rng = np.random.default_rng(seed)
    tensors = {}
    for name, g in sorted(sig.generators.items()):
        if g.dagger in tensors:
            continue
        shape = tuple(dims[t] for t in g.port_types)
        if g.unitary:
            n = int(np.prod([dims[t] for t in g.dom]))
            q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            tensors[name] = q.reshape(shape)
        else:
            tensors[name] = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    bases = {}
    if dark:
        bases["dark"] = {}
        for t, k in dims.items():
            if k == 2:
                bases["dark"][t] = hadamard_basis()
            else:
                q, _ = np.linalg.qr(rng.normal(size=(k, k)))
                bases["dark"][t] = q.T
    return Model("complex", dims, tensors, bases, sig=sig)
