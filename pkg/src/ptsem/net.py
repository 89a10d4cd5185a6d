"""Place/transition nets, the step firing rule and bounded reachability."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .multiset import EMPTY, Multiset

Word = tuple[str, ...]


class NetError(ValueError):
    """Raised when a net description violates the net invariants."""

    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class FiringError(ValueError):
    """A transition (or step) is not enabled where it was asked to fire."""

    def __init__(self, position: int, transition: str, marking: Multiset):
        self.position = position
        self.transition = transition
        self.marking = marking
        super().__init__(
            f"{transition} not enabled at position {position + 1} (marking {marking})"
        )


@dataclass(frozen=True)
class Net:
    """A net ``(S, T, F, M0)``.

    ``arcs`` holds ``(source, target, weight)`` triples with weight >= 1.
    Instances are validated on construction, so every ``Net`` satisfies the
    invariants: S and T disjoint, every transition has a non-empty preset,
    every arc joins a place and a transition.
    """

    places: frozenset[str]
    transitions: frozenset[str]
    arcs: frozenset[tuple[str, str, int]]
    initial: Multiset = EMPTY
    _pre: dict = field(init=False, repr=False, compare=False, hash=False)
    _post: dict = field(init=False, repr=False, compare=False, hash=False)
    _t_order: tuple = field(init=False, repr=False, compare=False, hash=False)
    _p_order: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        problems = []
        clash = self.places & self.transitions
        for x in sorted(clash):
            problems.append(f"{x} is both a place and a transition (not disjoint)")
        nodes = self.places | self.transitions
        pre: dict[str, dict[str, int]] = {x: {} for x in nodes}
        post: dict[str, dict[str, int]] = {x: {} for x in nodes}
        seen = set()
        for src, dst, w in sorted(self.arcs):
            if (src, dst) in seen:
                problems.append(f"duplicate arc {src}->{dst}")
                continue
            seen.add((src, dst))
            if src not in nodes or dst not in nodes:
                missing = src if src not in nodes else dst
                problems.append(f"arc {src}->{dst} uses undeclared {missing}")
                continue
            if not ((src in self.places and dst in self.transitions)
                    or (src in self.transitions and dst in self.places)):
                problems.append(f"arc {src}->{dst} must join a place and a transition")
                continue
            if w < 1:
                problems.append(f"arc {src}->{dst} has zero weight")
                continue
            pre[dst][src] = w
            post[src][dst] = w
        for t in sorted(self.transitions - clash):
            if not pre[t]:
                problems.append(f"transition {t} has an empty preset")
        for s in self.initial.support():
            if s not in self.places:
                problems.append(f"initial marking mentions unknown place {s}")
        if problems:
            raise NetError(problems)
        object.__setattr__(self, "_pre", {x: Multiset(m) for x, m in pre.items()})
        object.__setattr__(self, "_post", {x: Multiset(m) for x, m in post.items()})
        object.__setattr__(self, "_t_order", tuple(sorted(self.transitions)))
        object.__setattr__(self, "_p_order", tuple(sorted(self.places)))

    @property
    def place_order(self) -> tuple[str, ...]:
        return self._p_order

    @property
    def transition_order(self) -> tuple[str, ...]:
        return self._t_order

    def pre(self, x: str) -> Multiset:
        try:
            return self._pre[x]
        except KeyError:
            raise KeyError(f"unknown net element {x!r}") from None

    def post(self, x: str) -> Multiset:
        try:
            return self._post[x]
        except KeyError:
            raise KeyError(f"unknown net element {x!r}") from None

    def weight(self, x: str, y: str) -> int:
        return self.post(x)[y]


def validate_net(
    places: Mapping[str, int] | Iterable[str],
    transitions: Iterable[str],
    arcs: Iterable[tuple],
    initial: Mapping[str, int] | None = None,
) -> Net:
    """Build a :class:`Net` from a raw description, raising :class:`NetError`.

    ``places`` is either a mapping place -> initial tokens or an iterable of
    place names (then ``initial`` gives the tokens).  ``arcs`` are
    ``(source, target)`` or ``(source, target, weight)`` tuples.
    """
    if isinstance(places, Mapping):
        tokens = dict(places)
        place_set = frozenset(places)
    else:
        place_set = frozenset(places)
        tokens = {}
    if initial:
        tokens.update(initial)
    arc_set = set()
    problems = []
    for arc in arcs:
        src, dst, *rest = arc
        w = rest[0] if rest else 1
        if (src, dst, w) in arc_set:
            problems.append(f"duplicate arc {src}->{dst}")
        arc_set.add((src, dst, w))
    try:
        m0 = Multiset(tokens)
    except (TypeError, ValueError) as exc:
        problems.append(str(exc))
        m0 = EMPTY
    try:
        net = Net(place_set, frozenset(transitions), frozenset(arc_set), m0)
    except NetError as exc:
        raise NetError(problems + exc.problems) from None
    if problems:
        raise NetError(problems)
    return net


def _weighted_sum(net: Net, xs: Multiset, side) -> Multiset:
    out: dict[str, int] = {}
    for x, k in xs.items():
        for y, w in side(x).items():
            out[y] = out.get(y, 0) + k * w
    return Multiset(out)


def preset(net: Net, xs: Multiset | Iterable[str]) -> Multiset:
    """``•X = sum_x X(x) * •x``."""
    return _weighted_sum(net, Multiset(xs), net.pre)


def postset(net: Net, xs: Multiset | Iterable[str]) -> Multiset:
    return _weighted_sum(net, Multiset(xs), net.post)


def enabled(net: Net, marking: Multiset, step: Multiset | Iterable[str]) -> bool:
    step = Multiset(step)
    if not step:
        raise ValueError("a step must be non-empty")
    return preset(net, step) <= marking


def fire_step(net: Net, marking: Multiset, step: Multiset | Iterable[str]) -> Multiset:
    """Fire ``step`` at ``marking``: ``M' = (M - •G) + G•``."""
    step = Multiset(step)
    if not enabled(net, marking, step):
        raise FiringError(0, str(step), marking)
    return (marking - preset(net, step)) + postset(net, step)


def _fire_one(net: Net, marking: Multiset, t: str) -> Multiset | None:
    pre = net.pre(t)
    if not pre <= marking:
        return None
    return (marking - pre) + net.post(t)


def fire_sequence(net: Net, marking: Multiset, word: Iterable[str]) -> Multiset:
    """Fire ``word`` one transition at a time; raise :class:`FiringError`
    carrying the 0-based failing position."""
    m = marking
    for i, t in enumerate(word):
        if t not in net.transitions:
            raise FiringError(i, t, m)
        nxt = _fire_one(net, m, t)
        if nxt is None:
            raise FiringError(i, t, m)
        m = nxt
    return m


def marking_after(net: Net, word: Iterable[str]) -> Multiset:
    return fire_sequence(net, net.initial, word)


def is_firing_sequence(net: Net, word: Iterable[str]) -> bool:
    try:
        marking_after(net, word)
    except FiringError:
        return False
    return True


def enabled_transitions(net: Net, marking: Multiset) -> list[str]:
    return [t for t in net.transition_order if net.pre(t) <= marking]


@dataclass(frozen=True)
class Exploration:
    """Result of :func:`explore`.

    ``markings`` maps every discovered marking to a shortest witness word
    (ties broken lexicographically).  ``truncated`` is set when some marking
    was not expanded because of a bound; ``overflow`` when the token bound
    was the cause.
    """

    markings: dict[Multiset, Word]
    truncated: bool
    overflow: bool = False
    max_depth: int = 0
    max_tokens: int = 0


def explore(net: Net, max_depth: int, max_tokens: int) -> Exploration:
    if max_depth < 0 or max_tokens < 0:
        raise ValueError("bounds must be non-negative")
    m0 = net.initial
    markings: dict[Multiset, Word] = {m0: ()}
    truncated = overflow = False
    if any(n > max_tokens for _, n in m0.items()):
        truncated = overflow = True
    frontier = [m0]
    for depth in range(max_depth + 1):
        nxt = []
        for m in frontier:
            for t in net.transition_order:
                m2 = _fire_one(net, m, t)
                if m2 is None or m2 in markings:
                    continue
                if depth == max_depth:
                    truncated = True
                    continue
                if any(n > max_tokens for _, n in m2.items()):
                    truncated = overflow = True
                    continue
                markings[m2] = markings[m] + (t,)
                nxt.append(m2)
        frontier = nxt
        if not frontier:
            break
    return Exploration(markings, truncated, overflow, max_depth, max_tokens)


def longest_run_length(net: Net, bound: int) -> int | None:
    """Length of the longest firing sequence, or ``None`` if one longer
    than ``bound`` exists."""
    layer = {net.initial}
    length = 0
    while layer:
        nxt = set()
        for m in layer:
            for t in net.transition_order:
                m2 = _fire_one(net, m, t)
                if m2 is not None:
                    nxt.add(m2)
        if not nxt:
            return length
        length += 1
        if length > bound:
            return None
        layer = nxt
    return length
