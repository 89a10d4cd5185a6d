import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bruteforce as bf
from ptsem.generator import GenParams, random_net
from ptsem.multiset import EMPTY, Multiset
from ptsem.net import (
    FiringError,
    NetError,
    enabled,
    enabled_transitions,
    explore,
    fire_sequence,
    fire_step,
    is_firing_sequence,
    longest_run_length,
    postset,
    preset,
    validate_net,
)

M = Multiset


def test_fixtures_are_valid(net_a, net_b, net_c):
    assert net_a.initial == M({"1": 1, "2": 1, "3": 1})
    assert net_b.initial == M({"p": 2, "pa": 1, "pb": 1, "pc": 1, "pd": 1})
    assert net_c.transitions == {"t", "u"}


def test_empty_preset_rejected():
    with pytest.raises(NetError, match="empty preset"):
        validate_net({"s": 1}, ["t"], [("t", "s")])


def test_not_disjoint_rejected():
    with pytest.raises(NetError, match="not disjoint"):
        validate_net({"x": 0, "s": 1}, ["x"], [("s", "x")])


def test_other_invariants():
    with pytest.raises(NetError, match="zero weight"):
        validate_net({"s": 1}, ["t"], [("s", "t", 0)])
    with pytest.raises(NetError, match="place and a transition"):
        validate_net({"s": 1, "r": 0}, ["t"], [("s", "t"), ("s", "r")])
    with pytest.raises(NetError, match="undeclared"):
        validate_net({"s": 1}, ["t"], [("s", "t"), ("q", "t")])
    with pytest.raises(NetError, match="unknown place"):
        validate_net(["s"], ["t"], [("s", "t")], {"r": 1})


def test_isolated_places_allowed():
    net = validate_net({"s": 1, "lonely": 3}, [], [])
    assert net.transitions == frozenset()


def test_preset(net_a, net_b):
    assert preset(net_a, M({"c": 1})) == M({"3": 1, "4": 1})
    assert preset(net_b, M({"a": 1, "b": 1})) == M({"p": 2, "pa": 1, "pb": 1})
    assert preset(net_a, EMPTY) == EMPTY
    assert postset(net_b, M({"a": 1, "b": 1})) == M({"q": 2})
    assert preset(net_a, M({"4": 1})) == M({"a": 1, "b": 1})


def test_enabled(net_b, net_c):
    assert enabled(net_b, net_b.initial, M({"a": 1, "b": 1}))
    assert not enabled(net_b, net_b.initial, M({"a": 1, "b": 1, "c": 1}))
    assert not enabled(net_c, net_c.initial, M({"t": 2}))
    with pytest.raises(ValueError):
        enabled(net_c, net_c.initial, EMPTY)


def test_fire_step(net_a, net_b):
    assert fire_step(net_a, M({"1": 1, "2": 1, "3": 1}), M({"a": 1})) == M({"2": 1, "3": 1, "4": 1})
    assert fire_step(net_b, net_b.initial, M({"a": 1, "b": 1})) == M({"pc": 1, "pd": 1, "q": 2})
    with pytest.raises(FiringError):
        fire_step(net_b, net_b.initial, M("abc"))


def test_self_loop_leaves_marking_unchanged():
    net = validate_net({"s": 2}, ["t"], [("s", "t"), ("t", "s")])
    assert fire_step(net, net.initial, M("t")) == net.initial


def test_fire_sequence(net_a, net_b, net_c):
    # a b c leaves one of the two 4-tokens behind
    assert fire_sequence(net_a, net_a.initial, "abc") == M({"4": 1, "5": 1})
    assert fire_sequence(net_b, net_b.initial, "abdc") == M({"q": 2})
    with pytest.raises(FiringError) as err:
        fire_sequence(net_c, net_c.initial, "tu")
    assert err.value.position == 1
    assert "u not enabled at position 2" in str(err.value)


def test_fire_sequence_agrees_with_bruteforce(net_a, net_b):
    for net in (net_a, net_b):
        for w in bf.all_words(net, 4):
            assert dict(bf.run(net, w)) == fire_sequence(net, net.initial, w).as_dict()
            assert is_firing_sequence(net, w)


def test_explore_net_c(net_c):
    ex = explore(net_c, 2, 16)
    assert ex.markings == {M({"s": 1}): (), EMPTY: ("t",)}
    assert not ex.truncated


def test_explore_net_a(net_a):
    ex = explore(net_a, 3, 16)
    assert len(ex.markings) == 7
    assert {bf.key(bf.Counter(m.as_dict())) for m in ex.markings} == bf.reachable(net_a, 3, 16)
    assert not ex.truncated


def test_explore_net_b_depth_zero(net_b):
    ex = explore(net_b, 0, 16)
    assert list(ex.markings) == [net_b.initial]
    assert ex.truncated and not ex.overflow


def test_explore_token_overflow():
    pump = validate_net({"s": 1}, ["t"], [("s", "t"), ("t", "s", 2)])
    ex = explore(pump, 10, 3)
    assert ex.truncated and ex.overflow
    assert max(m["s"] for m in ex.markings) == 3


def test_explore_witnesses_replay(net_b):
    ex = explore(net_b, 12, 16)
    for m, w in ex.markings.items():
        assert fire_sequence(net_b, net_b.initial, w) == m


def test_longest_run_length(net_a, net_b):
    assert longest_run_length(net_a, 10) == 3
    assert longest_run_length(net_b, 10) == 4
    pump = validate_net({"s": 1}, ["t"], [("s", "t"), ("t", "s")])
    assert longest_run_length(pump, 5) is None


def test_enabled_transitions(net_b):
    assert enabled_transitions(net_b, net_b.initial) == ["a", "b", "c"]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(0, 4))
def test_explore_matches_bruteforce(seed, tokens, depth):
    net = random_net(GenParams(4, 3, 0.35, 2, 2, seed))
    ex = explore(net, depth, tokens)
    got = {bf.key(bf.Counter(m.as_dict())) for m in ex.markings}
    if not bf.covers(bf.Counter({s: tokens for s in net.places}), bf.initial(net)):
        return
    assert got == bf.reachable(net, depth, tokens)
