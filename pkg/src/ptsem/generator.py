"""Seeded random nets for the property suites."""

from __future__ import annotations

import random
from collections.abc import Callable
from dataclasses import dataclass, replace

from .conflict import check_structural
from .net import Net, explore, validate_net


class GenerationExhausted(RuntimeError):
    def __init__(self, what: str, attempts: int):
        self.attempts = attempts
        super().__init__(f"no {what} found in {attempts} attempts")


@dataclass(frozen=True)
class GenParams:
    place_count: int = 4
    transition_count: int = 3
    arc_density: float = 0.3
    max_weight: int = 1
    max_initial_tokens: int = 1
    seed: int | str = 0

    def __post_init__(self) -> None:
        if self.place_count < 1:
            raise ValueError("place_count must be >= 1")
        if self.transition_count < 0:
            raise ValueError("transition_count must be >= 0")
        if not 0.0 <= self.arc_density <= 1.0:
            raise ValueError("arc_density must lie in [0, 1]")
        if self.max_weight < 1:
            raise ValueError("max_weight must be >= 1")
        if self.max_initial_tokens < 0:
            raise ValueError("max_initial_tokens must be >= 0")


def _rng(seed: int | str) -> random.Random:
    return random.Random(f"ptsem:{seed}")


def random_net(p: GenParams) -> Net:
    """Places ``p0..``, transitions ``t0..``; each (place, transition) pair
    gets an arc in each direction with probability ``arc_density``.  A
    transition left without input gets one forced preplace."""
    rng = _rng(p.seed)
    places = [f"p{i}" for i in range(p.place_count)]
    transitions = [f"t{i}" for i in range(p.transition_count)]
    arcs = []
    for t in transitions:
        has_input = False
        for s in places:
            if rng.random() < p.arc_density:
                arcs.append((s, t, rng.randint(1, p.max_weight)))
                has_input = True
            if rng.random() < p.arc_density:
                arcs.append((t, s, rng.randint(1, p.max_weight)))
        if not has_input:
            arcs.append((rng.choice(places), t, rng.randint(1, p.max_weight)))
    tokens = {s: rng.randint(0, p.max_initial_tokens) for s in places}
    return validate_net(tokens, transitions, arcs)


def _attempt(p: GenParams, i: int) -> GenParams:
    return replace(p, seed=f"{p.seed}/{i}")


def random_structural_conflict_net(
    p: GenParams,
    depth_bound: int = 8,
    token_bound: int = 8,
    max_attempts: int = 1000,
    accept: Callable[[Net], bool] | None = None,
) -> Net:
    """Rejection-sample :func:`random_net` until the structural check holds
    within the bounds (and ``accept``, if given, agrees)."""
    for i in range(max_attempts):
        net = random_net(_attempt(p, i))
        if not check_structural(net, depth_bound, token_bound).holds:
            continue
        if accept is None or accept(net):
            return net
    raise GenerationExhausted("structural conflict net", max_attempts)


def is_one_safe_within(net: Net, depth_bound: int) -> bool:
    """No explored marking puts two tokens on a place, and the token bound
    of one was never exceeded."""
    ex = explore(net, depth_bound, 1)
    return not ex.overflow and all(n <= 1 for m in ex.markings for _, n in m.items())


def random_one_safe_net(
    p: GenParams, depth_bound: int = 8, max_attempts: int = 1000
) -> Net:
    for i in range(max_attempts):
        net = random_net(_attempt(p, i))
        if is_one_safe_within(net, depth_bound):
            return net
    raise GenerationExhausted("one-safe net", max_attempts)
