"""Semantic conflicts and the structural-conflict-net check."""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass

from .multiset import Multiset
from .net import Net, Word, explore, fire_sequence, preset
from .verdict import Status, Verdict

DEFAULT_DEPTH = 12
DEFAULT_TOKENS = 16
DEFAULT_GMAX = 4


class PreconditionError(ValueError):
    pass


def is_conflict(net: Net, marking: Multiset, step: Multiset | Iterable[str]) -> bool:
    """Each ``G`` restricted to a single transition is enabled at ``marking``
    but ``G`` as a whole is not."""
    g = Multiset(step)
    if not g:
        raise ValueError("conflict is defined for non-empty multisets only")
    if not all(net.pre(t) * k <= marking for t, k in g.items()):
        return False
    return not preset(net, g) <= marking


@dataclass(frozen=True)
class ConflictWitness:
    sequence: Word
    marking: Multiset
    step: Multiset

    def replay(self, net: Net) -> bool:
        """Re-check the witness from scratch."""
        try:
            m = fire_sequence(net, net.initial, self.sequence)
        except ValueError:
            return False
        return m == self.marking and bool(self.step) and is_conflict(net, m, self.step)

    def __str__(self) -> str:
        seq = " ".join(self.sequence) or "ε"
        return f"({seq}, {self.marking}, {{{', '.join(self.step.elements())}}})"


@dataclass(frozen=True)
class ConflictSearch:
    witnesses: list[ConflictWitness]
    truncated: bool
    bounds: dict[str, int]

    @property
    def verdict(self) -> Verdict:
        """Conflict-freeness as a verdict."""
        if self.witnesses:
            return Verdict(Status.VIOLATED, self.witnesses[0], self.bounds)
        return Verdict(Status.UNKNOWN if self.truncated else Status.HOLDS, None, self.bounds)


def _minimal_conflicts(net: Net, m: Multiset, gmax: int) -> list[Multiset]:
    caps = {}
    for t in net.transition_order:
        pre = net.pre(t)
        k = 0
        while k < gmax and pre * (k + 1) <= m:
            k += 1
        if k:
            caps[t] = k
    ts = sorted(caps)
    candidates = []
    for combo in itertools.product(*(range(caps[t] + 1) for t in ts)):
        if any(combo):
            candidates.append(Multiset({t: k for t, k in zip(ts, combo) if k}))
    candidates.sort(key=lambda g: (len(g), g.elements()))
    found: list[Multiset] = []
    for g in candidates:
        if any(h <= g for h in found):
            continue
        if not preset(net, g) <= m:
            found.append(g)
    return found


def find_conflicts(
    net: Net,
    depth_bound: int = DEFAULT_DEPTH,
    token_bound: int = DEFAULT_TOKENS,
    gmax: int = DEFAULT_GMAX,
) -> ConflictSearch:
    """The subset-minimal conflicting multisets at every explored reachable
    marking, in breadth-first marking order."""
    ex = explore(net, depth_bound, token_bound)
    witnesses = []
    for m, seq in ex.markings.items():
        for g in _minimal_conflicts(net, m, gmax):
            witnesses.append(ConflictWitness(seq, m, g))
    bounds = {"depth": depth_bound, "tokens": token_bound, "gmax": gmax}
    return ConflictSearch(witnesses, ex.truncated, bounds)


@dataclass(frozen=True)
class StructuralWitness:
    sequence: Word
    marking: Multiset
    first: str
    second: str
    shared: tuple[str, ...]

    def replay(self, net: Net) -> bool:
        try:
            m = fire_sequence(net, net.initial, self.sequence)
        except ValueError:
            return False
        shared = net.pre(self.first).support() & net.pre(self.second).support()
        return (m == self.marking and bool(shared)
                and preset(net, [self.first, self.second]) <= m)

    def __str__(self) -> str:
        where = f"after {' '.join(self.sequence)}" if self.sequence else "M0"
        return (f"marking {where} = {self.marking}, step {{{self.first}, {self.second}}}, "
                f"shared preplace {', '.join(self.shared)}")


def check_structural(
    net: Net, depth_bound: int = DEFAULT_DEPTH, token_bound: int = DEFAULT_TOKENS
) -> Verdict:
    """Look for a reachable marking enabling a step ``{t, u}`` (``t == u``
    allowed) whose transitions share a preplace."""
    ex = explore(net, depth_bound, token_bound)
    bounds = {"depth": depth_bound, "tokens": token_bound}
    ts = net.transition_order
    for m, seq in ex.markings.items():
        for i, t in enumerate(ts):
            for u in ts[i:]:
                shared = net.pre(t).support() & net.pre(u).support()
                if shared and net.pre(t) + net.pre(u) <= m:
                    w = StructuralWitness(seq, m, t, u, tuple(sorted(shared)))
                    return Verdict(Status.VIOLATED, w, bounds)
    return Verdict(Status.UNKNOWN if ex.truncated else Status.HOLDS, None, bounds)


def pairwise_conflict_reduction(
    net: Net,
    marking: Multiset,
    transitions: Iterable[str],
    depth_bound: int = DEFAULT_DEPTH,
    token_bound: int = DEFAULT_TOKENS,
    verdict: Verdict | None = None,
) -> bool:
    """Decide conflict of a set of transitions by looking at distinct pairs
    only; valid on structural conflict nets.

    Raises :class:`PreconditionError` unless the structural check holds
    (pass a precomputed ``verdict`` to skip re-running it).
    """
    if verdict is None:
        verdict = check_structural(net, depth_bound, token_bound)
    if not verdict.holds:
        raise PreconditionError(f"net is not known to be a structural conflict net ({verdict.status})")
    g = sorted(set(transitions))
    if not all(net.pre(t) <= marking for t in g):
        return False
    return any(not net.pre(t) + net.pre(u) <= marking for t, u in itertools.combinations(g, 2))
