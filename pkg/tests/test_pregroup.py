from __future__ import annotations

import random
from functools import lru_cache

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wirelogic.diagram import canonical_equal, cap, identity
from wirelogic.pregroup import (
    BRUTE_FORCE_LIMIT,
    LAMBEK,
    GrammarError,
    Reduction,
    SimpleType,
    all_reductions,
    brute_force_reduce,
    contract_ok,
    format_type,
    parse_type,
    reduce_to,
    reduces,
    reduction_to_diagram,
)

S = SimpleType("s")
ATOMS = ("n", "s")


def by_cancellation(ts, target) -> bool:
    """Independent oracle: delete adjacent cancelling pairs in every order."""
    want = () if target is None else (target,)

    @lru_cache(maxsize=None)
    def reach(w):
        if w == want:
            return True
        return any(reach(w[:i] + w[i + 2 :]) for i in range(len(w) - 1) if contract_ok(w[i], w[i + 1]))

    return reach(tuple(ts))


def random_types(rng, max_len=8):
    return tuple(SimpleType(rng.choice(ATOMS), rng.choice((-1, 0, 0, 1))) for _ in range(rng.randint(0, max_len)))


def test_parse_and_format():
    ts = parse_type("n n^l s n^r")
    assert ts == (SimpleType("n"), SimpleType("n", -1), S, SimpleType("n", 1))
    assert format_type(ts) == "n n^l s n^r"
    assert format_type(()) == "1"
    assert parse_type("n^l", LAMBEK) == (SimpleType("n", 1),)
    for bad in ("n^x", "3n", "n^l^l"):
        with pytest.raises(GrammarError):
            parse_type(bad)
    with pytest.raises(GrammarError):
        parse_type("n", "montague")
    with pytest.raises(GrammarError):
        SimpleType("n", 2)


def test_cancellation_directions():
    n, nl, nr = parse_type("n n^l n^r")
    assert contract_ok(n, nl) and contract_ok(nr, n)
    assert not contract_ok(nl, n) and not contract_ok(n, nr)
    assert not contract_ok(SimpleType("s"), nl)


def test_transitive_sentence():
    ts = parse_type("n n^l s n^r n")
    r = reduce_to(ts, S)
    assert r is not None and r.result == (S,)
    assert r.pairs == ((0, 1), (3, 4))
    r.validate()
    assert not reduces(parse_type("n n^l s n^r"), S)
    assert not reduces(parse_type("n n^r s n^l n"), S)  # mirrored convention
    assert reduces(parse_type("n n^r s n^l n", LAMBEK), S)


def test_negated_sentence():
    words = ["n", "n^l s s^r n", "n^l s s^r n", "n^l s n^r", "n"]
    ts = tuple(t for w in words for t in parse_type(w))
    r = reduce_to(ts, S)
    assert r is not None
    assert r.pairs == ((0, 1), (3, 6), (4, 5), (7, 10), (8, 9), (11, 12))
    assert r.survivors == (2,)


def test_unit_target_and_failures():
    assert reduces(parse_type("n n^l"), None)
    assert reduces((), None)
    assert not reduces((), S)
    assert reduce_to(parse_type("s n^l"), S) is None


def test_nested_pairs():
    assert reduce_to(parse_type("n n n^l n^l"), None).pairs == ((0, 3), (1, 2))
    assert reduce_to(parse_type("n^r n^r n n"), None).pairs == ((0, 3), (1, 2))


@given(st.integers(0, 10**9))
def test_witness_is_lexicographically_least(seed):
    ts = random_types(random.Random(seed), 10)
    for target in (None, S):
        want = () if target is None else (target,)
        witnesses = sorted(r.pairs for r in all_reductions(ts) if r.result == want)
        r = reduce_to(ts, target)
        assert (r.pairs if r else None) == (witnesses[0] if witnesses else None)


def test_validate_rejects_bad_witnesses():
    ts = parse_type("n n^l s n^r n")
    with pytest.raises(GrammarError):
        Reduction(ts, ((0, 1),), (2,)).validate()
    with pytest.raises(GrammarError):
        Reduction(ts, ((0, 2), (3, 4)), (1,)).validate()
    # a survivor inside a pair
    with pytest.raises(GrammarError):
        Reduction(parse_type("n s n^l"), ((0, 2),), (1,)).validate()


def test_brute_force_limit():
    with pytest.raises(GrammarError):
        list(all_reductions(parse_type(" ".join(["n"] * (BRUTE_FORCE_LIMIT + 1)))))


@given(st.integers(0, 10**9))
def test_dp_matches_both_oracles(seed):
    rng = random.Random(seed)
    ts = random_types(rng)
    for target in (None, S, SimpleType("n")):
        dp = reduces(ts, target)
        assert dp == brute_force_reduce(ts, target) == by_cancellation(ts, target)
        r = reduce_to(ts, target)
        if r is not None:
            r.validate()


@given(st.integers(0, 10**9))
def test_inserting_a_cancelling_pair_keeps_reductions(seed):
    # monotonicity: if w reduces, so does w with "x x^l" spliced in anywhere
    rng = random.Random(seed)
    ts = random_types(rng, 6)
    if not reduces(ts, S):
        return
    k = rng.randint(0, len(ts))
    a = rng.choice(ATOMS)
    pair = (SimpleType(a), SimpleType(a, -1)) if rng.random() < 0.5 else (SimpleType(a, 1), SimpleType(a))
    assert reduces(ts[:k] + pair + ts[k:], S)


def test_reduction_diagram_is_caps():
    r = reduce_to(parse_type("n n^l s n^r n"), S)
    d = reduction_to_diagram(r)
    assert d.dom == ("n", "n", "s", "n", "n") and d.cod == ("s",)
    assert not d.interior()
    sig = d.sig
    want = cap(sig, "n") @ identity(sig, "s") @ cap(sig, "n")
    assert canonical_equal(d, want)
