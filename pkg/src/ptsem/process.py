"""Goltz-Reisig processes of a net.

A process is an occurrence net (acyclic, places with at most one producer and
one consumer) together with a labelling ``pi`` onto the host net.  Finite
processes only; occurrence-net arcs carry weight 1, so they are kept as a set
of pairs.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from collections import Counter, defaultdict
from collections.abc import Hashable, Iterable, Iterator, Mapping, Sequence
from types import MappingProxyType
from typing import NamedTuple, Protocol

from .multiset import Multiset
from .net import FiringError, Net, Word, fire_sequence


class Occ(NamedTuple):
    """Occurrence identifier: host label plus a birth index that records
    construction order."""

    label: str
    index: int

    def __str__(self) -> str:
        return f"{self.label}#{self.index}"


class ProcessError(ValueError):
    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ChoiceError(ValueError):
    """An explicit token choice does not fit the tokens available."""


def _key(x: Hashable) -> tuple:
    if isinstance(x, Occ):
        return (x.label, x.index)
    return (str(x), -1)


class Process:
    """A finite process ``((S, T, F, M0), pi)`` of ``net``.

    Construction does not validate; use :func:`validate_process`.  When
    ``initial`` is omitted it defaults to the place occurrences without a
    producer.
    """

    __slots__ = ("net", "places", "transitions", "arcs", "pi", "initial",
                 "_preds", "_succs", "_hash")

    def __init__(
        self,
        net: Net,
        places: Iterable[Hashable],
        transitions: Iterable[Hashable],
        arcs: Iterable[tuple[Hashable, Hashable]],
        pi: Mapping[Hashable, str],
        initial: Iterable[Hashable] | None = None,
    ) -> None:
        self.net = net
        self.places = frozenset(places)
        self.transitions = frozenset(transitions)
        self.arcs = frozenset(arcs)
        self.pi = MappingProxyType(dict(pi))
        preds: dict[Hashable, set] = defaultdict(set)
        succs: dict[Hashable, set] = defaultdict(set)
        for x, y in self.arcs:
            succs[x].add(y)
            preds[y].add(x)
        self._preds = {x: frozenset(v) for x, v in preds.items()}
        self._succs = {x: frozenset(v) for x, v in succs.items()}
        if initial is None:
            initial = (p for p in self.places if not self._preds.get(p))
        self.initial = frozenset(initial)
        self._hash = None

    def preds(self, x: Hashable) -> frozenset:
        return self._preds.get(x, frozenset())

    def succs(self, x: Hashable) -> frozenset:
        return self._succs.get(x, frozenset())

    @property
    def nodes(self) -> frozenset:
        return self.places | self.transitions

    def __len__(self) -> int:
        return len(self.transitions)

    def transition_labels(self) -> Multiset:
        return Multiset(self.pi[t] for t in self.transitions)

    def place_labels(self) -> Multiset:
        return Multiset(self.pi[p] for p in self.places)

    def producer(self, p: Hashable) -> Hashable | None:
        ps = self.preds(p)
        return next(iter(ps)) if ps else None

    def consumer(self, p: Hashable) -> Hashable | None:
        cs = self.succs(p)
        return next(iter(cs)) if cs else None

    def causal_preds(self, t: Hashable) -> frozenset:
        """Transition occurrences that directly produce an input of ``t``."""
        return frozenset(u for s in self.preds(t) for u in self.preds(s))

    def causal_past(self, x: Hashable) -> frozenset:
        """All nodes y with ``y F+ x``."""
        seen: set = set()
        stack = list(self.preds(x))
        while stack:
            y = stack.pop()
            if y not in seen:
                seen.add(y)
                stack.extend(self.preds(y))
        return frozenset(seen)

    def final_places(self) -> list:
        """Place occurrences with no consumer, in sorted order."""
        return sorted((p for p in self.places if not self.succs(p)), key=_key)

    def marking(self) -> Multiset:
        """Host marking reached after all transitions: the labels of the
        final place occurrences."""
        return Multiset(self.pi[p] for p in self.final_places())

    def _fields(self) -> tuple:
        return (self.places, self.transitions, self.arcs, self.initial,
                frozenset(self.pi.items()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Process):
            return NotImplemented
        return self.net == other.net and self._fields() == other._fields()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.places, self.transitions, self.arcs))
        return self._hash

    def __repr__(self) -> str:
        labels = " ".join(sorted(str(t) for t in self.transitions))
        return f"<Process |T|={len(self.transitions)} |S|={len(self.places)} [{labels}]>"


# -- validation ------------------------------------------------------------

def _find_cycle(P: Process) -> list | None:
    state: dict = {}
    for root in sorted(P.nodes, key=_key):
        if root in state:
            continue
        stack = [(root, iter(sorted(P.succs(root), key=_key)))]
        path = [root]
        state[root] = 1
        while stack:
            x, it = stack[-1]
            y = next(it, None)
            if y is None:
                state[x] = 2
                stack.pop()
                path.pop()
                continue
            if state.get(y) == 1:
                return path[path.index(y):] + [y]
            if y not in state:
                state[y] = 1
                path.append(y)
                stack.append((y, iter(sorted(P.succs(y), key=_key))))
    return None


def validate_process(P: Process) -> Process:
    """Return ``P`` if it is a process of ``P.net``; otherwise raise
    :class:`ProcessError` listing every violated condition."""
    net = P.net
    problems: list[str] = []
    both = P.places & P.transitions
    for x in sorted(both, key=_key):
        problems.append(f"{x} is both a place and a transition occurrence")
    nodes = P.nodes
    for x, y in sorted(P.arcs, key=lambda a: (_key(a[0]), _key(a[1]))):
        if x not in nodes or y not in nodes:
            problems.append(f"arc {x}->{y} uses an unknown occurrence")
        elif not ((x in P.places and y in P.transitions)
                  or (x in P.transitions and y in P.places)):
            problems.append(f"arc {x}->{y} does not join a place and a transition occurrence")
    for x in sorted(nodes, key=_key):
        if x not in P.pi:
            problems.append(f"pi undefined on {x}")
    if problems:
        raise ProcessError(problems)

    for p in sorted(P.places, key=_key):
        if len(P.preds(p)) > 1:
            problems.append(f"place branching: {p} has {len(P.preds(p))} producers")
        if len(P.succs(p)) > 1:
            problems.append(f"place branching: {p} has {len(P.succs(p))} consumers")
    expected_initial = frozenset(p for p in P.places if not P.preds(p))
    if P.initial != expected_initial:
        extra = sorted(map(str, P.initial - expected_initial))
        missing = sorted(map(str, expected_initial - P.initial))
        problems.append(f"initial-marking mismatch: marked {extra} should not be, {missing} should be")
    cycle = _find_cycle(P)
    if cycle:
        problems.append("cycle: " + "->".join(map(str, cycle)))

    for p in sorted(P.places, key=_key):
        if P.pi[p] not in net.places:
            problems.append(f"pi maps place occurrence {p} to {P.pi[p]}, not a place")
    for t in sorted(P.transitions, key=_key):
        if P.pi[t] not in net.transitions:
            problems.append(f"pi maps transition occurrence {t} to {P.pi[t]}, not a transition")
    if problems:
        raise ProcessError(problems)

    init_labels = Multiset(P.pi[p] for p in P.initial)
    if init_labels != net.initial:
        problems.append(f"initial-marking mismatch: pi(M0) = {init_labels}, net has {net.initial}")
    for t in sorted(P.transitions, key=_key):
        label = P.pi[t]
        ins = Multiset(P.pi[s] for s in P.preds(t))
        outs = Multiset(P.pi[s] for s in P.succs(t))
        want_in, want_out = net.pre(label), net.post(label)
        for s in sorted(want_in.support() | ins.support()):
            if want_in[s] != ins[s]:
                problems.append(
                    f"pi-count mismatch for arc {s}->{label} at {t}: "
                    f"net weight {want_in[s]}, occurrences {ins[s]}")
        for s in sorted(want_out.support() | outs.support()):
            if want_out[s] != outs[s]:
                problems.append(
                    f"pi-count mismatch for arc {label}->{s} at {t}: "
                    f"net weight {want_out[s]}, occurrences {outs[s]}")
    if problems:
        raise ProcessError(problems)
    return P


def is_valid_process(P: Process) -> bool:
    try:
        validate_process(P)
    except ProcessError:
        return False
    return True


# -- construction ------------------------------------------------------------

class TokenPolicy(Protocol):
    def choose(self, position: int, place: str, available: Sequence, count: int) -> Sequence:
        """Pick ``count`` of the ``available`` occurrences (oldest first)."""


class OldestFirst:
    def choose(self, position, place, available, count):
        return available[:count]

    def __repr__(self) -> str:
        return "oldest-first"


class NewestFirst:
    def choose(self, position, place, available, count):
        return available[len(available) - count:]

    def __repr__(self) -> str:
        return "newest-first"


class ExplicitChoice:
    """Consume, at ``(position, place)``, the tokens at the given indices of
    the availability list (ordered oldest first).  Unlisted situations fall
    back to oldest-first."""

    def __init__(self, choices: Mapping[tuple[int, str], Sequence[int]]):
        self.choices = {k: tuple(v) for k, v in choices.items()}
        self._used: set = set()

    def choose(self, position, place, available, count):
        idx = self.choices.get((position, place))
        if idx is None:
            return available[:count]
        self._used.add((position, place))
        if len(idx) != count or len(set(idx)) != count:
            raise ChoiceError(
                f"position {position}, place {place}: need {count} distinct indices, got {list(idx)}")
        if any(i < 0 or i >= len(available) for i in idx):
            raise ChoiceError(
                f"position {position}, place {place}: index out of range "
                f"(only {len(available)} tokens available)")
        return [available[i] for i in idx]

    def check_all_used(self) -> None:
        unused = set(self.choices) - self._used
        if unused:
            raise ChoiceError(f"choices never applicable: {sorted(unused)}")


class RandomChoice:
    def __init__(self, rng: random.Random):
        self.rng = rng

    def choose(self, position, place, available, count):
        picked = sorted(self.rng.sample(range(len(available)), count))
        return [available[i] for i in picked]


OLDEST_FIRST = OldestFirst()
NEWEST_FIRST = NewestFirst()


def _policy(policy: TokenPolicy | str) -> TokenPolicy:
    if isinstance(policy, str):
        try:
            return {"oldest": OLDEST_FIRST, "oldest-first": OLDEST_FIRST,
                    "newest": NEWEST_FIRST, "newest-first": NEWEST_FIRST}[policy]
        except KeyError:
            raise ValueError(f"unknown token policy {policy!r}") from None
    return policy


def build_process(net: Net, word: Iterable[str], policy: TokenPolicy | str = "oldest") -> Process:
    """Unwind ``word`` into a process whose linearisations include it.

    Initial occurrences are created per place in sorted order; each fired
    transition consumes tokens picked by ``policy`` and creates fresh output
    occurrences.  Birth indices follow creation order, so with the default
    policy the result is a deterministic function of ``(net, word)``.
    """
    word = tuple(word)
    fire_sequence(net, net.initial, word)
    policy = _policy(policy)
    counter = itertools.count()
    places, transitions, arcs, pi = [], [], [], {}
    avail: dict[str, list[Occ]] = defaultdict(list)
    for s, n in net.initial.items():
        for _ in range(n):
            o = Occ(s, next(counter))
            places.append(o)
            pi[o] = s
            avail[s].append(o)
    for pos, t in enumerate(word):
        to = Occ(t, next(counter))
        transitions.append(to)
        pi[to] = t
        for s, w in net.pre(t).items():
            chosen = list(policy.choose(pos, s, list(avail[s]), w))
            for o in chosen:
                avail[s].remove(o)
                arcs.append((o, to))
        for s, w in net.post(t).items():
            for _ in range(w):
                o = Occ(s, next(counter))
                places.append(o)
                pi[o] = s
                arcs.append((to, o))
                avail[s].append(o)
    if isinstance(policy, ExplicitChoice):
        policy.check_all_used()
    return Process(net, places, transitions, arcs, pi)


def empty_process(net: Net) -> Process:
    return build_process(net, ())


def pi_members(
    net: Net, word: Iterable[str], iso_dedup: bool = True, limit: int = 10000
) -> tuple[list[Process], bool]:
    """Processes having ``word`` as a linearisation, one per token choice
    (or one per isomorphism class when ``iso_dedup``).

    Returns ``(processes, truncated)``; ``truncated`` is set when more than
    ``limit`` raw choice combinations exist.
    """
    word = tuple(word)
    fire_sequence(net, net.initial, word)
    base = build_process(net, ())
    start_avail = defaultdict(tuple)
    for o in sorted(base.places, key=_key):
        start_avail[o.label] += (o,)
    n0 = len(base.places)
    found: list[Process] = []
    buckets: dict[tuple, list[Process]] = defaultdict(list)
    raw = 0
    truncated = False

    def add(P: Process) -> None:
        if iso_dedup:
            sig = signature(P)
            for Q in buckets[sig]:
                if are_isomorphic(P, Q):
                    return
            buckets[sig].append(P)
        found.append(P)

    def rec(pos, counter, places, transitions, arcs, avail):
        nonlocal raw, truncated
        if truncated:
            return
        if pos == len(word):
            if raw >= limit:
                truncated = True
                return
            raw += 1
            pi = {o: o.label for o in places + transitions}
            add(Process(net, places, transitions, arcs, pi))
            return
        t = word[pos]
        to = Occ(t, counter)
        counter += 1
        pre = net.pre(t).items()
        options = [list(itertools.combinations(avail[s], w)) for s, w in pre]
        post = net.post(t).items()
        for combo in itertools.product(*options):
            new_avail = dict(avail)
            new_arcs = list(arcs)
            for (s, _), chosen in zip(pre, combo):
                new_avail[s] = tuple(o for o in avail[s] if o not in chosen)
                new_arcs.extend((o, to) for o in chosen)
            new_places = list(places)
            c = counter
            for s, w in post:
                for _ in range(w):
                    o = Occ(s, c)
                    c += 1
                    new_places.append(o)
                    new_arcs.append((to, o))
                    new_avail[s] = new_avail.get(s, ()) + (o,)
            rec(pos + 1, c, new_places, transitions + [to], new_arcs, new_avail)
            if truncated:
                return

    rec(0, n0, sorted(base.places, key=_key), [], [], dict(start_avail))
    return found, truncated


# -- linearisations and prefixes -----------------------------------------------

def linearisations(P: Process) -> set[Word]:
    """All label sequences of enumerations of ``P``'s transitions that
    respect causality."""
    cpreds = {t: P.causal_preds(t) for t in P.transitions}
    order = sorted(P.transitions, key=_key)
    memo: dict[frozenset, set[Word]] = {}

    def words(placed: frozenset) -> set[Word]:
        if len(placed) == len(order):
            return {()}
        hit = memo.get(placed)
        if hit is not None:
            return hit
        out: set[Word] = set()
        for t in order:
            if t in placed or not cpreds[t] <= placed:
                continue
            label = P.pi[t]
            out.update((label,) + w for w in words(placed | {t}))
        memo[placed] = out
        return out

    return words(frozenset())


def linearisation(P: Process) -> Word:
    """One linearisation: repeatedly take the least enabled occurrence by
    (label, birth index)."""
    cpreds = {t: P.causal_preds(t) for t in P.transitions}
    placed: set = set()
    out = []
    while len(placed) < len(P.transitions):
        t = min((t for t in P.transitions if t not in placed and cpreds[t] <= placed),
                key=lambda t: (P.pi[t], _key(t)))
        placed.add(t)
        out.append(P.pi[t])
    return tuple(out)


def is_prefix(Pp: Process, P: Process) -> bool:
    """``Pp <= P``: a process on a subset of ``P``'s occurrences with the
    same initial marking and ``P``'s flow and labelling restricted to it."""
    if Pp.net != P.net:
        return False
    if not (Pp.places <= P.places and Pp.transitions <= P.transitions):
        return False
    if Pp.initial != P.initial:
        return False
    nodes = Pp.nodes
    if Pp.arcs != frozenset((x, y) for x, y in P.arcs if x in nodes and y in nodes):
        return False
    if not all(P.pi.get(x) == Pp.pi.get(x) for x in nodes):
        return False
    # the restriction must itself be a process (no dangling output places)
    return is_valid_process(Pp)


def is_downward_closed(P: Process, ts: Iterable[Hashable]) -> bool:
    ts = frozenset(ts)
    return all(P.causal_preds(t) <= ts for t in ts)


def prefix_by_transitions(P: Process, ts: Iterable[Hashable]) -> Process:
    """The unique prefix of ``P`` whose transition occurrences are ``ts``."""
    ts = frozenset(ts)
    unknown = ts - P.transitions
    if unknown:
        raise ValueError(f"not transition occurrences of the process: {sorted(map(str, unknown))}")
    for t in sorted(ts, key=_key):
        missing = P.causal_preds(t) - ts
        if missing:
            raise ValueError(
                f"transition set not downward-closed: {t} needs "
                f"{', '.join(sorted(map(str, missing)))}")
    places = set(P.initial)
    for t in ts:
        places |= P.succs(t)
    nodes = places | ts
    arcs = [(x, y) for x, y in P.arcs if x in nodes and y in nodes]
    return Process(P.net, places, ts, arcs, {x: P.pi[x] for x in nodes}, P.initial)


def downward_closed_sets(P: Process, size: int | None = None) -> Iterator[frozenset]:
    """All causally downward-closed transition sets (optionally of one size)."""
    order = []
    placed: set = set()
    cpreds = {t: P.causal_preds(t) for t in P.transitions}
    while len(order) < len(P.transitions):
        nxt = min((t for t in P.transitions if t not in placed and cpreds[t] <= placed), key=_key)
        placed.add(nxt)
        order.append(nxt)

    def rec(i: int, chosen: frozenset) -> Iterator[frozenset]:
        if size is not None and len(chosen) > size:
            return
        if i == len(order):
            if size is None or len(chosen) == size:
                yield chosen
            return
        yield from rec(i + 1, chosen)
        t = order[i]
        if cpreds[t] <= chosen:
            yield from rec(i + 1, chosen | {t})

    yield from rec(0, frozenset())


def prefixes(P: Process, size: int | None = None) -> Iterator[Process]:
    for ts in downward_closed_sets(P, size):
        yield prefix_by_transitions(P, ts)


def union_of_prefixes(P1: Process, P2: Process) -> Process:
    """Componentwise union of two prefixes of the same process."""
    return Process(P1.net, P1.places | P2.places, P1.transitions | P2.transitions,
                   P1.arcs | P2.arcs, {**P1.pi, **P2.pi}, P1.initial | P2.initial)


# -- isomorphism -------------------------------------------------------------

def _digest(obj: object) -> str:
    return hashlib.blake2b(repr(obj).encode(), digest_size=10).hexdigest()


def colours(P: Process) -> dict:
    """Colour refinement over in/out neighbourhoods, seeded by sort, label and
    initial flag.  Isomorphic processes stabilise in the same round, so their
    colours are directly comparable."""
    col = {}
    for x in P.places:
        col[x] = _digest(("S", P.pi.get(x), x in P.initial))
    for x in P.transitions:
        col[x] = _digest(("T", P.pi.get(x)))
    classes = len(set(col.values()))
    for _ in range(len(col)):
        new = {x: _digest((col[x],
                           sorted(col[y] for y in P.preds(x)),
                           sorted(col[y] for y in P.succs(x))))
               for x in col}
        col = new
        n = len(set(col.values()))
        if n == classes:
            break
        classes = n
    return col


def signature(P: Process) -> tuple:
    """Isomorphism invariant: sizes plus the colour histogram."""
    return (len(P.places), len(P.transitions), len(P.arcs),
            tuple(sorted(Counter(colours(P).values()).items())))


def find_isomorphism(P: Process, Q: Process) -> dict | None:
    """A label- and flow-preserving bijection from ``P`` onto ``Q``, or None."""
    if (len(P.places), len(P.transitions), len(P.arcs)) != \
            (len(Q.places), len(Q.transitions), len(Q.arcs)):
        return None
    cp, cq = colours(P), colours(Q)
    if Counter(cp.values()) != Counter(cq.values()):
        return None
    candidates: dict[str, list] = defaultdict(list)
    for y in sorted(Q.nodes, key=_key):
        candidates[cq[y]].append(y)

    # topological order so most nodes meet an already-mapped neighbour
    indeg = {x: len(P.preds(x)) for x in P.nodes}
    ready = sorted((x for x in P.nodes if indeg[x] == 0), key=_key)
    order = []
    while ready:
        x = ready.pop(0)
        order.append(x)
        for y in sorted(P.succs(x), key=_key):
            indeg[y] -= 1
            if indeg[y] == 0:
                ready.append(y)
    if len(order) != len(P.nodes):
        order = sorted(P.nodes, key=_key)

    mapping: dict = {}
    used: set = set()

    def consistent(x, y) -> bool:
        n_in = n_out = 0
        qp, qs = Q.preds(y), Q.succs(y)
        for z in P.preds(x):
            if z in mapping:
                if mapping[z] not in qp:
                    return False
                n_in += 1
        for z in P.succs(x):
            if z in mapping:
                if mapping[z] not in qs:
                    return False
                n_out += 1
        return (n_in == sum(1 for w in qp if w in used)
                and n_out == sum(1 for w in qs if w in used))

    def rec(i: int) -> bool:
        if i == len(order):
            return True
        x = order[i]
        for y in candidates[cp[x]]:
            if y in used or not consistent(x, y):
                continue
            mapping[x] = y
            used.add(y)
            if rec(i + 1):
                return True
            del mapping[x]
            used.discard(y)
        return False

    return dict(mapping) if rec(0) else None


def are_isomorphic(P: Process, Q: Process) -> bool:
    if P.net != Q.net:
        return False
    return find_isomorphism(P, Q) is not None


def dedup_isomorphic(processes: Iterable[Process]) -> list[Process]:
    out: list[Process] = []
    buckets: dict[tuple, list[Process]] = defaultdict(list)
    for P in processes:
        sig = signature(P)
        if any(are_isomorphic(P, Q) for Q in buckets[sig]):
            continue
        buckets[sig].append(P)
        out.append(P)
    return out


__all__ = [
    "ChoiceError", "ExplicitChoice", "FiringError", "NEWEST_FIRST", "OLDEST_FIRST",
    "Occ", "Process", "ProcessError", "RandomChoice", "TokenPolicy", "are_isomorphic",
    "build_process", "dedup_isomorphic", "downward_closed_sets", "empty_process",
    "find_isomorphism", "is_downward_closed", "is_prefix", "is_valid_process",
    "linearisation", "linearisations", "pi_members", "prefix_by_transitions", "prefixes",
    "signature", "union_of_prefixes", "validate_process",
]
