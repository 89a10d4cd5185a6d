"""Every witness a checker prints must survive an independent replay."""

from hypothesis import given, settings
from hypothesis import strategies as st

import bruteforce as bf
from ptsem.conflict import check_structural, find_conflicts
from ptsem.generator import GenParams, random_net
from ptsem.multiset import Multiset
from ptsem.traces import enumerate_runs, finite_run, run_conflict_free


def _small_net(seed):
    return random_net(GenParams(3, 3, 0.4, 2, 2, seed=f"witness:{seed}"))


def _independent_conflict(net, seq, marking, step):
    """Recompute from the arc list alone (no library firing code)."""
    m = bf.run(net, seq)
    if m is None or bf.key(m) != frozenset(marking.items()):
        return False
    each = all(bf.step_enabled(net, m, [t] * k) for t, k in step.items())
    return bool(step) and each and not bf.step_enabled(net, m, step.elements())


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 10**9))
def test_witnesses_replay(seed):
    net = _small_net(seed)
    for w in find_conflicts(net, 3, 4, 2).witnesses:
        assert w.replay(net)
        assert _independent_conflict(net, w.sequence, w.marking, w.step)
        tampered = type(w)(w.sequence, w.marking + Multiset({net.place_order[0]: 1}), w.step)
        assert not tampered.replay(net)
    v = check_structural(net, 3, 4)
    if v.violated:
        w = v.witness
        assert w.replay(net)
        m = bf.run(net, w.sequence)
        assert bf.step_enabled(net, m, [w.first, w.second])
        assert set(bf.pre(net, w.first)) & set(bf.pre(net, w.second))
    # fewer places, more contention: run-level witnesses are common here
    dense = random_net(GenParams(2, 3, 0.5, 1, 2, seed=f"witness-run:{seed}"))
    for c in enumerate_runs(dense, 3).maximal:
        v = run_conflict_free(dense, finite_run(dense, c), gmax=2)
        if v.violated:
            w = v.witness
            assert w.replay(dense)
            assert _independent_conflict(dense, w.sequence, w.marking, w.step)
