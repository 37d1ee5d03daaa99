"""Scalar carriers for tensor models.

Three carriers are supported: complex floats (Hilbert-space model),
non-negative real floats (probabilities, distributional meaning) and booleans
(sets and relations).  Boolean contraction is done in integers and clipped
back to {0, 1}, which is exactly OR-of-ANDs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Semiring:
    name: str
    dtype: type
    involutive: bool  # whether conj is non-trivial

    @property
    def zero(self):
        return self.dtype(0)

    @property
    def one(self):
        return self.dtype(1)

    def add(self, a, b):
        if self is BOOLEAN:
            return np.logical_or(a, b)
        return np.add(a, b)

    def mul(self, a, b):
        if self is BOOLEAN:
            return np.logical_and(a, b)
        return np.multiply(a, b)

    def conj(self, a):
        return np.conj(a) if self.involutive else a

    def coerce(self, data) -> np.ndarray:
        """Cast ``data`` into this carrier, rejecting values outside it."""
        arr = np.asarray(data)
        if self is BOOLEAN:
            if arr.dtype != bool:
                if not np.all((arr == 0) | (arr == 1)):
                    raise ValueError("boolean tensors take entries 0/1 only")
                arr = arr != 0
            return arr.astype(bool)
        if self is NONNEG:
            if np.iscomplexobj(arr):
                if np.any(np.imag(arr) != 0):
                    raise ValueError("non-negative real tensors cannot have imaginary parts")
                arr = np.real(arr)
            arr = arr.astype(float)
            if np.any(arr < 0):
                raise ValueError("non-negative real tensors cannot have negative entries")
            return arr
        return arr.astype(complex)

    def work(self, arr: np.ndarray) -> np.ndarray:
        """Array type used during contraction."""
        return arr.astype(np.int64) if self is BOOLEAN else arr

    def settle(self, arr: np.ndarray) -> np.ndarray:
        """Renormalise an intermediate contraction result."""
        return np.minimum(arr, 1) if self is BOOLEAN else arr

    def finish(self, arr: np.ndarray) -> np.ndarray:
        return (arr > 0) if self is BOOLEAN else arr

    def power(self, x, n: int):
        if self is BOOLEAN:
            return bool(x) or n == 0
        return self.dtype(x) ** n


COMPLEX = Semiring("complex", complex, True)
NONNEG = Semiring("nonneg", float, False)
BOOLEAN = Semiring("boolean", bool, False)

_ALIASES = {
    "complex": COMPLEX,
    "complex-float": COMPLEX,
    "nonneg": NONNEG,
    "nonneg-real": NONNEG,
    "nonneg-real-float": NONNEG,
    "real": NONNEG,
    "boolean": BOOLEAN,
    "bool": BOOLEAN,
    "relations": BOOLEAN,
}


def get_semiring(name: str | Semiring) -> Semiring:
    if isinstance(name, Semiring):
        return name
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown semiring {name!r}; choose from {sorted(set(_ALIASES))}") from None
