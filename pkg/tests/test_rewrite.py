from __future__ import annotations

import random
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import random_dom, random_signature, random_term
from wirelogic.canon import canonical_form
from wirelogic.diagram import (
    DARK,
    LIGHT,
    DiagramError,
    Signature,
    canonical_equal,
    cup,
    dagger,
    generator,
    identity,
    seq,
    spider,
)
from wirelogic.dsl import elaborate
from wirelogic.io import ruleset_from_json, ruleset_to_json
from wirelogic.rewrite import (
    EQUAL_EXACT,
    EQUAL_UP_TO_SCALAR,
    UNKNOWN,
    UP_TO_SCALAR,
    ComplementarityHopf,
    PatternRule,
    RewriteError,
    SpiderFuse,
    SpiderIdentity,
    SpiderLoop,
    StaleMatch,
    Unitarity,
    check_equal_by_rewriting,
    default_ruleset,
    normalize,
    replay,
    two_spiders,
)


def test_default_priority_order():
    names = [r.name for r in default_ruleset()]
    assert names == ["spider_identity", "spider_loop", "spider_fuse", "unitarity", "complementarity_hopf"]


def test_spider_identity(sig_q):
    lhs, rhs = SpiderIdentity().example(sig_q, "Q", DARK)
    assert normalize(lhs)[0] == rhs


def test_spider_loop_removes_all_self_loops(sig_q):
    for lhs, rhs in SpiderLoop().instances(sig_q, random.Random(1), count=10):
        out, trace = normalize(lhs, [SpiderLoop()])
        assert out == rhs
        assert len(trace.steps) == 1


@pytest.mark.parametrize("first,second,k", [((1, 2), (2, 1), 1), ((0, 3), (3, 0), 3), ((2, 2), (1, 3), 1)])
def test_spider_fuse_counts_legs(sig_q, first, second, k):
    lhs, rhs = SpiderFuse().example(sig_q, "Q", LIGHT, first, second, k)
    out, trace = normalize(lhs, [SpiderFuse()])
    assert out == rhs
    (s,) = out.spiders()
    n = first[0] + second[0] - k
    m = first[1] + second[1] - k
    assert out.size[0] == 1 + n + m and out.nodes[s].legs == n + m


def test_different_colours_do_not_fuse(sig_q):
    d = two_spiders(sig_q, (LIGHT, DARK), "Q", (1, 1), (1, 1), 1)
    assert not SpiderFuse().find_matches(d)


def test_hopf_needs_two_wires(sig_q):
    lhs, rhs = ComplementarityHopf().example(sig_q)
    out, trace = normalize(lhs, [ComplementarityHopf()])
    assert out == rhs
    assert not trace.exact
    assert trace.scalars == {"complementarity_hopf[Q]": 1}
    one_wire = two_spiders(sig_q, (LIGHT, DARK), "Q", (1, 1), (1, 1), 1)
    assert not ComplementarityHopf().find_matches(one_wire)


def test_unitarity(sig_q):
    u = generator(sig_q, "U")
    ud = generator(sig_q, "U†")
    assert normalize(u >> ud)[0] == identity(sig_q, "Q")
    assert normalize(ud >> u)[0] == identity(sig_q, "Q")
    # f is not declared unitary
    f = generator(sig_q, "f")
    assert normalize(f >> dagger(f))[0] == f >> dagger(f)


def test_stale_match_is_rejected(sig_q):
    d = spider(sig_q, LIGHT, "Q", 1, 1) @ spider(sig_q, LIGHT, "Q", 1, 1)
    rule = SpiderIdentity()
    m = rule.find_matches(d)[0]
    after = rule.apply(d, m)
    with pytest.raises(StaleMatch):
        rule.apply(after, m)
    with pytest.raises(StaleMatch):
        SpiderLoop().apply(d, m)


def test_max_steps(sig_q):
    d = seq(*[spider(sig_q, LIGHT, "Q", 1, 1)] * 4)
    out, trace = normalize(d, max_steps=2)
    assert trace.exhausted and len(trace.steps) == 2
    with pytest.raises(ValueError):
        normalize(d, max_steps=-1)
    assert not normalize(d)[1].exhausted


def test_five_spider_chain_fuses_to_one(sig_q):
    d = seq(*[spider(sig_q, LIGHT, "Q", 1, 2) >> spider(sig_q, LIGHT, "Q", 2, 1)] * 2, spider(sig_q, LIGHT, "Q", 1, 3))
    assert len(d.spiders()) == 5
    out, trace = normalize(d)
    assert len(out.spiders()) == 1
    assert out == spider(sig_q, LIGHT, "Q", 1, 3)


def _random_diagram(seed, spiders="both"):
    rng = random.Random(seed)
    sig = random_signature(rng)
    for name in list(sig.generators)[:1]:
        g = sig[name]
        if g.dom == g.cod:
            sig.generators[name] = replace(g, unitary=True)
    term, _ = random_term(sig, rng, random_dom(sig, rng), layers=4, spiders=spiders)
    return elaborate(term, sig)


@given(st.integers(0, 10**6))
def test_trace_replays_and_sizes_decrease(seed):
    d = _random_diagram(seed)
    out, trace = normalize(d)
    assert replay(trace) == out
    for s in trace.steps:
        assert s.size_after < s.size_before
    for rule in default_ruleset():
        assert not rule.find_matches(out)
    assert trace.final is out


def test_replay_detects_tampering(sig_q):
    d = seq(*[spider(sig_q, LIGHT, "Q", 1, 1)] * 3)
    _, trace = normalize(d)
    trace.steps[0] = replace(trace.steps[0], hash="0" * 64)
    with pytest.raises(RewriteError):
        replay(trace)


def test_trace_json(sig_q):
    lhs, _ = ComplementarityHopf().example(sig_q)
    _, trace = normalize(lhs)
    j = trace.to_json()
    assert j["steps"][0]["rule"] == "complementarity_hopf"
    assert j["final_hash"] == canonical_form(trace.final).hash
    assert j["scalars"] == {"complementarity_hopf[Q]": 1}


@given(st.integers(0, 10**6))
def test_confluence_on_single_colour_webs(seed):
    # without the Hopf rule, normal forms do not depend on the match order
    d = _random_diagram(seed, spiders=True)
    first, _ = normalize(d)
    for k in range(3):
        other, _ = normalize(d, rng=random.Random(seed * 7 + k))
        assert canonical_equal(first, other)


def test_check_equal_outcomes(sig_q):
    one = identity(sig_q, "Q")
    assert check_equal_by_rewriting(spider(sig_q, LIGHT, "Q", 1, 1), one) == EQUAL_EXACT
    lhs, rhs = ComplementarityHopf().example(sig_q)
    assert check_equal_by_rewriting(lhs, rhs) == EQUAL_UP_TO_SCALAR
    assert check_equal_by_rewriting(one @ (cup(sig_q, "Q") >> dagger(cup(sig_q, "Q"))), one) == EQUAL_UP_TO_SCALAR
    assert check_equal_by_rewriting(generator(sig_q, "f"), one) == UNKNOWN
    with pytest.raises(DiagramError):
        check_equal_by_rewriting(one, identity(sig_q, "R"))


# -- user pattern rules ------------------------------------------------------------


@pytest.fixture
def sig_p():
    sig = Signature(["Q"])
    sig.add_generator("f", ["Q"], ["Q"])
    sig.add_generator("g", ["Q"], ["Q"])
    sig.add_generator("h", ["Q"], ["Q"])
    return sig


def test_pattern_rule_rewrites_inside_context(sig_p):
    f, g, h = (generator(sig_p, n) for n in "fgh")
    rule = PatternRule("fg_to_h", f >> g, h)
    d = seq(h, f, g, f, g)
    out, trace = normalize(d, [rule])
    assert out == seq(h, h, h)
    assert [s.rule for s in trace.steps] == ["fg_to_h"] * 2


def test_pattern_rule_with_spider_legs(sig_p):
    f = generator(sig_p, "f")
    lhs = spider(sig_p, LIGHT, "Q", 1, 2) >> (f @ f)
    rhs = f >> spider(sig_p, LIGHT, "Q", 1, 2)
    exact = PatternRule("copy", lhs, rhs)
    poly = PatternRule("copy", lhs, rhs, leg_polymorphic=True)
    host = spider(sig_p, LIGHT, "Q", 1, 3) >> (f @ f @ identity(sig_p, "Q"))
    assert not exact.find_matches(host)
    out, _ = normalize(host, [poly])
    assert out.dom == host.dom and out.cod == host.cod
    assert len(out.spiders()) == 1 and out.nodes[out.spiders()[0]].legs == 4


def test_pattern_rule_boundary_map(sig_p):
    f, g = generator(sig_p, "f"), generator(sig_p, "g")
    lhs = spider(sig_p, LIGHT, "Q", 1, 2) >> (f @ g)
    rhs = spider(sig_p, LIGHT, "Q", 1, 2) >> (g @ f)
    with pytest.raises(RewriteError):
        PatternRule("bad", lhs, identity(sig_p, ["Q"]))
    with pytest.raises(RewriteError):
        PatternRule("bad", lhs, rhs, soundness="sometimes")
    with pytest.raises(RewriteError):
        PatternRule("bad", f @ g, g @ f)  # not connected
    bmap = {("in", 0): ("in", 0), ("out", 0): ("out", 1), ("out", 1): ("out", 0)}
    r = PatternRule("flip", lhs, rhs, boundary_map=bmap)
    out, trace = normalize(lhs, [r], max_steps=1)
    assert len(trace.steps) == 1
    # f keeps its wire, so the result is the same diagram
    assert canonical_equal(out, lhs)
    plain = PatternRule("flip", lhs, rhs)
    assert not canonical_equal(normalize(lhs, [plain], max_steps=1)[0], lhs)


def test_ruleset_json_round_trip(sig_p):
    f, g, h = (generator(sig_p, n) for n in "fgh")
    rules = default_ruleset() + [PatternRule("fg_to_h", f >> g, h, soundness=UP_TO_SCALAR)]
    obj = ruleset_to_json(rules, sig_p)
    back, sig = ruleset_from_json(obj)
    assert [r.name for r in back] == [r.name for r in rules]
    assert back[-1].soundness == UP_TO_SCALAR
    assert canonical_equal(normalize(seq(f, g), back)[0], h)
    assert isinstance(back[3], Unitarity)
