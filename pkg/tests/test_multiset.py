from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptsem.multiset import EMPTY, Multiset, combine, leq, restrict, scale, size

M = Multiset
counts = st.dictionaries(st.sampled_from("xyzuvw"), st.integers(0, 5), max_size=6)
multisets = counts.map(Multiset)


def test_combine_examples():
    assert combine(M({"x": 2}), M({"x": 1, "y": 1}), "sum") == M({"x": 3, "y": 1})
    assert combine(M({"x": 1}), M({"x": 3}), "monus") == EMPTY
    assert combine(M({"x": 2, "y": 1}), M({"x": 1, "z": 4}), "union") == M({"x": 2, "y": 1, "z": 4})


def test_combine_rejects_unknown_kind():
    with pytest.raises(ValueError):
        combine(EMPTY, EMPTY, "intersection")


def test_leq_examples():
    assert leq(M({"x": 1}), M({"x": 2, "y": 1}))
    assert not leq(M({"x": 3}), M({"x": 2}))
    assert leq(EMPTY, M({"q": 7}))


def test_scale_examples():
    assert scale(2, M({"x": 1, "y": 3})) == M({"x": 2, "y": 6})
    assert scale(0, M({"x": 5})) == EMPTY
    a = M({"x": 4})
    assert scale(1, a) == a
    with pytest.raises(ValueError):
        scale(-1, a)


def test_restrict_examples():
    assert restrict(M({"x": 2, "y": 1}), {"x"}) == M({"x": 2})
    assert restrict(M({"x": 2}), set()) == EMPTY
    assert restrict(M({"t": 3, "u": 1}), {"t"}) == M({"t": 3})


def test_size_examples():
    assert size(M({"x": 2, "y": 1})) == 3
    assert size(EMPTY) == 0


def test_zero_counts_are_dropped():
    a = M({"x": 0, "y": 2})
    assert a == M({"y": 2})
    assert a.support() == frozenset({"y"})
    assert a["x"] == 0
    assert hash(a) == hash(M({"y": 2}))


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        M({"x": -1})


def test_iterable_constructor_counts_repeats():
    assert M("aab") == M({"a": 2, "b": 1})


def test_str_is_sorted():
    assert str(M({"b": 1, "a": 2})) == "{a:2, b:1}"
    assert str(EMPTY) == "{}"


@settings(max_examples=1000, deadline=None)
@given(counts, counts)
def test_operations_agree_with_counter(a, b):
    ca, cb = Counter(a), Counter(b)
    ma, mb = M(a), M(b)
    assert (ma + mb).as_dict() == dict(+(ca + cb))
    assert (ma - mb).as_dict() == dict(+(ca - cb))
    assert (ma | mb).as_dict() == dict(+(ca | cb))
    assert (ma <= mb) == all(ca[k] <= cb[k] for k in ca)
    assert size(ma) == sum(ca.values())


@settings(max_examples=1000, deadline=None)
@given(multisets, multisets, multisets, st.integers(0, 4))
def test_algebra_laws(a, b, c, k):
    assert a + EMPTY == a
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert (a + b) - b == a
    assert a - a == EMPTY
    assert a - EMPTY == a
    assert a | a == a
    assert a | b == b | a
    assert a | EMPTY == a
    assert a <= a | b
    assert (a - b) + (a | b) - (a | b) <= a
    assert (a <= b) == (a - b == EMPTY)
    assert size(scale(k, a)) == k * size(a)
    assert scale(k, a + b) == scale(k, a) + scale(k, b)
    assert all(n >= 1 for _, n in a.items())
    assert len(a) == sum(n for _, n in a.items())
