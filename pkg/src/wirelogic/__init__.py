"""Typed string diagrams with rewriting and tensor semantics.

The core objects are :class:`Diagram` (an open graph with ordered input and
output wires), rewrite rules with recorded traces, and :class:`Model`, which
evaluates a diagram as a tensor over complex numbers, non-negative reals or
booleans.  On top sit a pregroup parser, distributional word vectors and a
few worked protocols.
"""
from .canon import CanonicalForm, canonical_form, canonical_hash
from .diagram import (
    DARK,
    LIGHT,
    CompositionError,
    Diagram,
    DiagramError,
    Signature,
    SignatureError,
    canonical_equal,
    cap,
    compose_par,
    compose_seq,
    cup,
    dagger,
    empty,
    generator,
    identity,
    par,
    seq,
    spider,
    swap,
    transpose,
)
from .harness import SoundnessReport, soundness_harness
from .rewrite import (
    EQUAL_EXACT,
    EQUAL_UP_TO_SCALAR,
    UNKNOWN,
    ComplementarityHopf,
    Match,
    PatternRule,
    RewriteTrace,
    Rule,
    SpiderFuse,
    SpiderIdentity,
    SpiderLoop,
    StaleMatch,
    Unitarity,
    check_equal_by_rewriting,
    default_ruleset,
    normalize,
    replay,
)
from .semiring import BOOLEAN, COMPLEX, NONNEG, Semiring
from .tensor import EXACT, UP_TO_SCALAR, Model, ModelError, TensorValue, contraction_plan, equal_tensors, interpret

__version__ = "0.1.0"
