"""Firing-sequence view of runs.

Two firing sequences are adjacent when they differ by exchanging two
neighbouring transitions that could have fired together as a step from the
marking reached before them.  Classes of the reflexive-transitive closure
(trace classes) are the partial FS-runs; an FS-run is a prefix-closed,
directed set of them.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from .multiset import Multiset
from .net import Net, Word, _fire_one, fire_sequence, preset
from .verdict import Status, Verdict


@dataclass(frozen=True, eq=False)
class TraceClass:
    """An adjacency class of firing sequences.

    Identified by its lexicographically least member; ``members`` holds the
    whole (finite) class.
    """

    net: Net = field(repr=False)
    representative: Word
    members: frozenset[Word] = field(repr=False)

    @property
    def length(self) -> int:
        return len(self.representative)

    @property
    def size(self) -> int:
        return len(self.members)

    def transitions(self) -> Multiset:
        return Multiset(self.representative)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TraceClass):
            return NotImplemented
        return self.representative == other.representative and self.net == other.net

    def __hash__(self) -> int:
        return hash(self.representative)

    def __contains__(self, word: object) -> bool:
        return tuple(word) in self.members  # type: ignore[arg-type]


def _step_enabled(net: Net, marking: Multiset, t: str, u: str) -> bool:
    return net.pre(t) + net.pre(u) <= marking


def _markings_along(net: Net, word: Word) -> list[Multiset]:
    ms = [net.initial]
    for t in word:
        ms.append(_fire_one(net, ms[-1], t))
    return ms


def _neighbours(net: Net, word: Word) -> Iterator[Word]:
    ms = _markings_along(net, word)
    for i in range(len(word) - 1):
        t, u = word[i], word[i + 1]
        if t != u and _step_enabled(net, ms[i], t, u):
            yield word[:i] + (u, t) + word[i + 2:]


def adjacent(net: Net, sigma: Iterable[str], rho: Iterable[str]) -> bool:
    """``sigma = s1 t u s2``, ``rho = s1 u t s2`` and ``{t, u}`` is enabled
    after ``s1``."""
    sigma, rho = tuple(sigma), tuple(rho)
    fire_sequence(net, net.initial, sigma)
    fire_sequence(net, net.initial, rho)
    if len(sigma) != len(rho):
        return False
    ms = _markings_along(net, sigma)
    for i in range(len(sigma) - 1):
        t, u = sigma[i], sigma[i + 1]
        if (sigma[:i] == rho[:i] and rho[i] == u and rho[i + 1] == t
                and sigma[i + 2:] == rho[i + 2:] and _step_enabled(net, ms[i], t, u)):
            return True
    return False


def trace_class(net: Net, word: Iterable[str]) -> TraceClass:
    """Close ``word`` under adjacency by breadth-first search."""
    word = tuple(word)
    fire_sequence(net, net.initial, word)
    seen = {word}
    queue = deque([word])
    while queue:
        w = queue.popleft()
        for v in _neighbours(net, w):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return TraceClass(net, min(seen), frozenset(seen))


def trace_equivalent(net: Net, sigma: Iterable[str], rho: Iterable[str]) -> bool:
    sigma, rho = tuple(sigma), tuple(rho)
    fire_sequence(net, net.initial, sigma)
    fire_sequence(net, net.initial, rho)
    if Multiset(sigma) != Multiset(rho):
        return False
    return rho in trace_class(net, sigma).members


def class_leq(net: Net, c1: TraceClass, c2: TraceClass) -> bool:
    """``[sigma] <= [rho]`` iff some member of ``[rho]`` starts with a member
    of ``[sigma]``."""
    n = c1.length
    if n > c2.length:
        return False
    return any(m[:n] in c1.members for m in c2.members)


@dataclass(frozen=True)
class FiniteRun:
    """The finite FS-run generated by ``top``: every class below it."""

    top: TraceClass
    classes: frozenset[TraceClass]

    def __contains__(self, item: object) -> bool:
        return item in self.classes

    def words(self) -> dict[Word, TraceClass]:
        return {w: c for c in self.classes for w in c.members}


def finite_run(net: Net, top: TraceClass) -> FiniteRun:
    classes: dict[Word, TraceClass] = {}
    for m in sorted(top.members):
        for k in range(len(m) + 1):
            prefix = m[:k]
            if prefix in classes:
                continue
            c = trace_class(net, prefix)
            for w in c.members:
                classes[w] = c
    return FiniteRun(top, frozenset(classes.values()))


def is_prefix_closed(net: Net, classes: Iterable[TraceClass], universe: Iterable[TraceClass]) -> bool:
    """Every class of ``universe`` below a member of ``classes`` is a member."""
    cs = set(classes)
    return all(d in cs for d in universe if any(class_leq(net, d, c) for c in cs))


def is_directed(net: Net, classes: Iterable[TraceClass]) -> bool:
    cs = list(classes)
    return all(
        any(class_leq(net, a, c) and class_leq(net, b, c) for c in cs)
        for a, b in itertools.combinations(cs, 2)
    )


@dataclass(frozen=True)
class RunEnumeration:
    """All trace classes of firing sequences up to ``bound`` in length.

    ``maximal`` are the classes with no strict extension among the
    enumerated ones; ``truncated`` is set if some sequence of length
    ``bound`` can still be extended, i.e. maximality is only bound-relative.
    """

    classes: list[TraceClass]
    maximal: list[TraceClass]
    truncated: bool
    bound: int
    markings: dict[Word, Multiset] = field(repr=False, default_factory=dict)

    def class_of(self, word: Iterable[str]) -> TraceClass:
        word = tuple(word)
        for c in self.classes:
            if word in c.members:
                return c
        raise KeyError(word)

    @property
    def unique(self) -> bool:
        return len(self.maximal) == 1 and not self.truncated


def firing_sequences(net: Net, bound: int) -> dict[Word, Multiset]:
    """Every firing sequence of length <= ``bound`` with its final marking."""
    out: dict[Word, Multiset] = {(): net.initial}
    level = [()]
    for _ in range(bound):
        nxt = []
        for w in level:
            m = out[w]
            for t in net.transition_order:
                m2 = _fire_one(net, m, t)
                if m2 is not None:
                    v = w + (t,)
                    out[v] = m2
                    nxt.append(v)
        level = nxt
    return out


def enumerate_runs(net: Net, depth_bound: int) -> RunEnumeration:
    if depth_bound < 0:
        raise ValueError("bound must be non-negative")
    mk = firing_sequences(net, depth_bound)
    by_len: dict[int, list[Word]] = defaultdict(list)
    for w in mk:
        by_len[len(w)].append(w)

    classes: list[TraceClass] = []
    for k in range(depth_bound + 1):
        words = by_len.get(k, [])
        parent = {w: w for w in words}

        def find(w: Word) -> Word:
            while parent[w] != w:
                parent[w] = parent[parent[w]]
                w = parent[w]
            return w

        for w in words:
            for i in range(k - 1):
                t, u = w[i], w[i + 1]
                if t != u and _step_enabled(net, mk[w[:i]], t, u):
                    a, b = find(w), find(w[:i] + (u, t) + w[i + 2:])
                    if a != b:
                        parent[max(a, b)] = min(a, b)
        groups: dict[Word, list[Word]] = defaultdict(list)
        for w in words:
            groups[find(w)].append(w)
        for members in groups.values():
            classes.append(TraceClass(net, min(members), frozenset(members)))
    classes.sort(key=lambda c: (c.length, c.representative))

    def extendable(w: Word) -> bool:
        m = mk[w]
        return any(net.pre(t) <= m for t in net.transition_order)

    # a class has a strict extension within the bound iff one (hence every)
    # member can fire again and it is shorter than the bound
    maximal = [c for c in classes
               if c.length == depth_bound or not extendable(c.representative)]
    truncated = any(extendable(c.representative) for c in classes if c.length == depth_bound)
    return RunEnumeration(classes, maximal, truncated, depth_bound, mk)


@dataclass(frozen=True)
class RunConflictWitness:
    sequence: Word
    marking: Multiset
    step: Multiset

    def replay(self, net: Net) -> bool:
        """The marking is reached by ``sequence``, each ``t`` in the step is
        enabled on its own, and the step as a whole is not."""
        try:
            m = fire_sequence(net, net.initial, self.sequence)
        except ValueError:
            return False
        return (m == self.marking and bool(self.step)
                and all(net.pre(t) * k <= m for t, k in self.step.items())
                and not preset(net, self.step) <= m)

    def __str__(self) -> str:
        where = f"after {' '.join(self.sequence)}" if self.sequence else "M0"
        return (f"marking {where} = {self.marking}, "
                f"step {{{', '.join(self.step.elements())}}} not enabled")


def _candidate_steps(options: dict[str, list[int]]) -> list[Multiset]:
    ts = sorted(options)
    steps = []
    for combo in itertools.product(*([0] + options[t] for t in ts)):
        counts = {t: k for t, k in zip(ts, combo) if k}
        if counts:
            steps.append(Multiset(counts))
    steps.sort(key=lambda g: (len(g), g.elements()))
    return steps


def run_conflict_free(net: Net, run: FiniteRun | Iterable[TraceClass], gmax: int = 4) -> Verdict:
    """Check that ``run`` never leaves a conflict unresolved.

    For every word ``sigma`` and non-empty ``G`` with ``G(t) <= gmax``: if
    each ``[sigma t^G(t)]`` is in the run and ``G`` restricted to ``t`` is
    enabled after ``sigma``, then ``G`` must be enabled after ``sigma``.
    Returns a violated verdict with the first ``(sigma, G)`` found
    (shortest ``sigma``, then smallest ``G``).
    """
    if gmax < 1:
        raise ValueError("gmax must be at least 1")
    classes = run.classes if isinstance(run, FiniteRun) else frozenset(run)
    words = {w for c in classes for w in c.members}
    bounds = {"gmax": gmax}
    for sigma in sorted(words, key=lambda w: (len(w), w)):
        m = fire_sequence(net, net.initial, sigma)
        options: dict[str, list[int]] = {}
        for t in net.transition_order:
            pre = net.pre(t)
            ks = [k for k in range(1, gmax + 1)
                  if sigma + (t,) * k in words and pre * k <= m]
            if ks:
                options[t] = ks
        for g in _candidate_steps(options):
            if not preset(net, g) <= m:
                return Verdict(Status.VIOLATED, RunConflictWitness(sigma, m, g), bounds)
    return Verdict(Status.HOLDS, None, bounds)
