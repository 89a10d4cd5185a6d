"""Cross-checking property suites.

Each suite pits two independently implemented decision procedures against
each other (or checks a consequence that must hold) on small generated nets.
Instances are fully determined by ``(suite, seed, index)`` so a failure can
be replayed from the net text it records.  Failing nets are shrunk greedily
before being reported.
"""

from __future__ import annotations

import random
import time
from collections import defaultdict
from collections.abc import Callable
from dataclasses import dataclass, field

from .conflict import check_structural, find_conflicts
from .generator import GenParams, is_one_safe_within, random_net
from .io_format import parse_net, write_net
from .multiset import Multiset
from .net import Net, NetError, Word, longest_run_length
from .process import (
    RandomChoice,
    are_isomorphic,
    build_process,
    empty_process,
    is_prefix,
    pi_members,
    prefixes,
    union_of_prefixes,
)
from .swap import (
    bd_class_leq,
    bdify,
    class_ref,
    maximal_processes,
    process_class_leq,
    swap_equivalent,
)
from .traces import (
    adjacent,
    class_leq,
    enumerate_runs,
    finite_run,
    firing_sequences,
    run_conflict_free,
    trace_class,
    trace_equivalent,
)

MAX_TRANSITIONS = 6
MAX_PLACES = 8
MAX_DEPTH = 6

# an instance check returns the problems it found, each a message plus the
# data (sequences etc.) needed to see it again
Problem = tuple[str, dict]
InstanceCheck = Callable[[Net, random.Random], list[Problem]]


@dataclass(frozen=True)
class Failure:
    suite: str
    seed: int
    index: int
    net_text: str
    message: str
    data: dict = field(default_factory=dict)

    def replay(self) -> bool:
        """Re-run the instance check on the recorded net; true if it still
        fails."""
        check = SUITES[self.suite].check
        return bool(check(parse_net(self.net_text), _instance_rng(self.suite, self.seed, self.index)))

    def to_dict(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "index": self.index,
                "net": self.net_text, "message": self.message, "data": self.data}


@dataclass
class PropertyReport:
    property_id: str
    instances: int
    checks: int
    failures: list[Failure]
    seed: int
    bounds: dict
    elapsed: float = 0.0
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def render(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        bounds = ", ".join(f"{k}={v}" for k, v in sorted(self.bounds.items()))
        lines = [f"{status} {self.property_id}: {self.instances} instances, "
                 f"{self.checks} checks, {len(self.failures)} failures "
                 f"(seed {self.seed}; {bounds}; {self.elapsed:.2f}s)"]
        for f in self.failures:
            lines.append(f"  instance {f.index}: {f.message} {f.data}")
            lines.extend("    | " + ln for ln in f.net_text.splitlines())
        return "\n".join(lines)


@dataclass(frozen=True)
class Suite:
    check: InstanceCheck
    sample: Callable[[random.Random], Net | None]
    bounds: dict


def _instance_rng(suite: str, seed: int, index: int) -> random.Random:
    return random.Random(f"{suite}:{seed}:{index}")


# -- sampling ----------------------------------------------------------------

def _small_params(rng: random.Random, **overrides) -> GenParams:
    values = dict(
        place_count=rng.randint(2, 5),
        transition_count=rng.randint(2, 4),
        arc_density=rng.choice([0.25, 0.3, 0.4]),
        max_weight=rng.choice([1, 1, 2]),
        max_initial_tokens=rng.choice([1, 2]),
        seed=rng.randrange(1 << 30),
    )
    values.update(overrides)
    return GenParams(**values)


def _sample_live(rng: random.Random, min_len: int = 2, **overrides) -> Net | None:
    """A small net with at least one firing sequence of length ``min_len``."""
    for _ in range(200):
        net = random_net(_small_params(rng, **overrides))
        if any(len(w) == min_len for w in firing_sequences(net, min_len)):
            return net
    return None


def _words_of_length(net: Net, k: int) -> list[Word]:
    return sorted(w for w in firing_sequences(net, k) if len(w) == k)


def _show(w: Word) -> str:
    return " ".join(w) or "ε"


def _parikh_groups(words: list[Word]) -> dict[Multiset, list[Word]]:
    groups: dict[Multiset, list[Word]] = defaultdict(list)
    for w in words:
        groups[Multiset(w)].append(w)
    return groups


def _shares_member(ps: list, qs: list) -> bool:
    return any(are_isomorphic(p, q) for p in ps for q in qs)


# -- instance checks ----------------------------------------------------------

def _check_adjacency(net: Net, rng: random.Random) -> list[Problem]:
    problems: list[Problem] = []
    k = rng.randint(2, 4)
    words = _words_of_length(net, k) or _words_of_length(net, 2)
    picked = rng.sample(words, min(4, len(words)))
    word_set = set(words)
    pis = {}

    def pi(w: Word):
        if w not in pis:
            pis[w] = pi_members(net, w)[0]
        return pis[w]

    for sigma in picked:
        # adjacency implies a common process
        for i in range(len(sigma) - 1):
            rho = sigma[:i] + (sigma[i + 1], sigma[i]) + sigma[i + 2:]
            if rho != sigma and rho in word_set and adjacent(net, sigma, rho) and not _shares_member(pi(sigma), pi(rho)):
                problems.append(("adjacent words without a common process",
                                 {"sigma": _show(sigma), "rho": _show(rho)}))
        # a common process implies trace equivalence
        same = [w for w in _parikh_groups(words)[Multiset(sigma)] if w != sigma]
        for rho in rng.sample(same, min(3, len(same))):
            if _shares_member(pi(sigma), pi(rho)) and not trace_equivalent(net, sigma, rho):
                problems.append(("common process but not trace equivalent",
                                 {"sigma": _show(sigma), "rho": _show(rho)}))
    return problems


def _pick_pair(net: Net, rng: random.Random, k: int) -> tuple[Word, Word] | None:
    words = _words_of_length(net, k)
    if not words:
        return None
    sigma = rng.choice(words)
    roll = rng.random()
    if roll < 0.4:
        rho = rng.choice(sorted(trace_class(net, sigma).members))
    elif roll < 0.8:
        rho = rng.choice(_parikh_groups(words)[Multiset(sigma)])
    else:
        rho = rng.choice(words)
    return sigma, rho


def _check_trace_swap(net: Net, rng: random.Random) -> list[Problem]:
    for k in (rng.randint(2, 5), 2):
        pair = _pick_pair(net, rng, k)
        if pair:
            break
    else:
        return []
    sigma, rho = pair
    P = build_process(net, sigma, RandomChoice(rng))
    Q = build_process(net, rho, RandomChoice(rng))
    by_words = trace_equivalent(net, sigma, rho)
    by_swaps = swap_equivalent(P, Q, method="direct-bfs")
    if by_words != by_swaps:
        return [("trace equivalence and swapping equivalence disagree",
                 {"sigma": _show(sigma), "rho": _show(rho),
                  "trace": by_words, "swap": by_swaps})]
    return []


def _check_class_order(net: Net, rng: random.Random) -> list[Problem]:
    n = rng.randint(2, 4)
    upper = _words_of_length(net, n) or _words_of_length(net, 2)
    if not upper:
        return []
    rho = rng.choice(upper)
    k = rng.randint(0, len(rho))
    if rng.random() < 0.5:
        sigma = rng.choice(sorted(trace_class(net, rho).members))[:k]
    else:
        lower = _words_of_length(net, k)
        sigma = rng.choice(lower)
    by_words = class_leq(net, trace_class(net, sigma), trace_class(net, rho))
    P1 = build_process(net, sigma, RandomChoice(rng))
    P2 = build_process(net, rho, RandomChoice(rng))
    by_processes = process_class_leq(P1, P2)
    if by_words != by_processes:
        return [("class order on sequences and on processes disagree",
                 {"sigma": _show(sigma), "rho": _show(rho),
                  "traces": by_words, "processes": by_processes})]
    return []


def _check_run_freeness(net: Net, rng: random.Random) -> list[Problem]:
    """Every run generated by an enumerated class is conflict-free."""
    runs = enumerate_runs(net, MAX_DEPTH)
    for c in runs.classes:
        v = run_conflict_free(net, finite_run(net, c), gmax=4)
        if v.violated:
            w = v.witness
            return [("run is not conflict-free",
                     {"run": _show(c.representative), "sigma": _show(w.sequence),
                      "step": str(w.step)})]
    return []


def _check_conflict_splits(net: Net, rng: random.Random) -> list[Problem]:
    """A conflict forces at least two maximal runs and processes."""
    search = find_conflicts(net, MAX_DEPTH, 8, 4)
    if not search.witnesses:
        return []
    w = search.witnesses[0]
    bound = len(w.sequence) + max(k for _, k in w.step.items())
    problems: list[Problem] = []
    runs = enumerate_runs(net, bound)
    if len(runs.maximal) < 2:
        problems.append(("conflict but fewer than two maximal classes",
                         {"witness": str(w), "bound": bound, "maximal": len(runs.maximal)}))
    full = longest_run_length(net, MAX_DEPTH)
    if full is not None:
        mp = maximal_processes(net, full)
        if mp.verdict != "multiple":
            problems.append(("conflict but maximal processes are not multiple",
                             {"witness": str(w), "bound": full, "verdict": mp.verdict}))
    return problems


def _check_one_safe(net: Net, rng: random.Random) -> list[Problem]:
    words = [w for w in firing_sequences(net, 5) if w]
    problems: list[Problem] = []
    for sigma in rng.sample(sorted(words), min(8, len(words))):
        members, truncated = pi_members(net, sigma)
        if truncated or len(members) != 1:
            problems.append(("one-safe net with several processes for one sequence",
                             {"sigma": _show(sigma), "processes": len(members)}))
    return problems


def _check_bdify(net: Net, rng: random.Random) -> list[Problem]:
    k = rng.randint(1, 4)
    words = _words_of_length(net, k) or _words_of_length(net, 1)
    if not words:
        return []
    sigma = rng.choice(words)
    P = build_process(net, sigma, RandomChoice(rng))
    run = bdify(P)
    data = {"sigma": _show(sigma)}
    if not run.is_prefix_closed():
        return [("bdify is not prefix-closed", data)]
    if not run.is_directed():
        return [("bdify is not directed", data)]
    # the upper bound in the directedness argument: the union of two prefixes
    # is again a prefix, and it lies above both
    pres = list(prefixes(P))
    for _ in range(min(6, len(pres) ** 2)):
        a, b = rng.choice(pres), rng.choice(pres)
        u = union_of_prefixes(a, b)
        if not is_prefix(u, P):
            return [("union of prefixes is not a prefix", data)]
        cu = class_ref(u)
        if not (bd_class_leq(class_ref(a), cu, "direct") and bd_class_leq(class_ref(b), cu, "direct")):
            return [("union of prefixes is not an upper bound", data)]
    return []


# -- samplers ----------------------------------------------------------------

def _sample_general(rng: random.Random) -> Net | None:
    return _sample_live(rng)


def _sample_terminating(rng: random.Random) -> Net | None:
    return _sample_live(rng, transition_count=rng.randint(2, MAX_TRANSITIONS))


def _structural(rng: random.Random, terminating: bool = False) -> Net | None:
    for _ in range(500):
        net = random_net(_small_params(rng, max_initial_tokens=rng.choice([1, 2, 3])))
        if not any(len(w) == 1 for w in firing_sequences(net, 1)):
            continue
        if terminating and longest_run_length(net, MAX_DEPTH) is None:
            continue
        if check_structural(net, 8, 8).holds:
            return net
    return None


def _sample_structural(rng: random.Random) -> Net | None:
    return _structural(rng)


def _sample_conflicting_structural(rng: random.Random) -> Net | None:
    """Terminating structural conflict nets that do have a conflict."""
    for _ in range(200):
        net = _structural(rng, terminating=True)
        if net is not None and find_conflicts(net, MAX_DEPTH, 8, 4).witnesses:
            return net
    return None


def _sample_one_safe(rng: random.Random) -> Net | None:
    for _ in range(500):
        net = random_net(_small_params(rng, max_weight=1, max_initial_tokens=1,
                                       place_count=rng.randint(3, MAX_PLACES)))
        if any(len(w) == 2 for w in firing_sequences(net, 2)) and is_one_safe_within(net, 5):
            return net
    return None


SUITES: dict[str, Suite] = {
    "adjacency-common-process": Suite(_check_adjacency, _sample_general, {"depth": 4}),
    "trace-vs-swap": Suite(_check_trace_swap, _sample_terminating, {"depth": 5}),
    "class-order": Suite(_check_class_order, _sample_general, {"depth": 4}),
    "runs-conflict-free": Suite(_check_run_freeness, _sample_structural, {"depth": MAX_DEPTH, "gmax": 4}),
    "conflict-splits-runs": Suite(_check_conflict_splits, _sample_conflicting_structural,
                             {"depth": MAX_DEPTH, "tokens": 8, "gmax": 4}),
    "one-safe": Suite(_check_one_safe, _sample_one_safe, {"depth": 5}),
    "bdify-runs": Suite(_check_bdify, _sample_general, {"depth": 4}),
}


# -- shrinking and the driver ---------------------------------------------------

def _without_transition(net: Net, t: str) -> Net:
    arcs = frozenset(a for a in net.arcs if t not in a[:2])
    return Net(net.places, net.transitions - {t}, arcs, net.initial)


def _without_place(net: Net, s: str) -> Net:
    arcs = frozenset(a for a in net.arcs if s not in a[:2])
    return Net(net.places - {s}, net.transitions, arcs, net.initial.restrict(net.places - {s}))


def _with_token_removed(net: Net, s: str) -> Net:
    return Net(net.places, net.transitions, net.arcs, net.initial - Multiset([s]))


def shrink(net: Net, fails: Callable[[Net], bool]) -> Net:
    """Greedily drop transitions, places and tokens while ``fails`` holds."""
    changed = True
    while changed:
        changed = False
        candidates = ([lambda n, t=t: _without_transition(n, t) for t in net.transition_order]
                      + [lambda n, s=s: _without_place(n, s) for s in net.place_order]
                      + [lambda n, s=s: _with_token_removed(n, s) for s in net.initial.support()])
        for make in candidates:
            try:
                smaller = make(net)
            except NetError:
                continue
            if smaller != net and fails(smaller):
                net, changed = smaller, True
                break
    return net


def run_suite(name: str, count: int, seed: int = 0) -> PropertyReport:
    suite = SUITES[name]
    failures: list[Failure] = []
    checks = skipped = 0
    start = time.perf_counter()
    for i in range(count):
        net = suite.sample(random.Random(f"sample:{name}:{seed}:{i}"))
        if net is None:
            skipped += 1
            continue
        checks += 1
        problems = suite.check(net, _instance_rng(name, seed, i))
        if problems:
            small = shrink(net, lambda n: bool(suite.check(n, _instance_rng(name, seed, i))))
            for message, data in suite.check(small, _instance_rng(name, seed, i)) or problems:
                failures.append(Failure(name, seed, i, write_net(small), message, data))
    return PropertyReport(name, count, checks, failures, seed, dict(suite.bounds),
                          time.perf_counter() - start, skipped)


def check_adjacency_common_process(count: int = 100, seed: int = 0) -> PropertyReport:
    """Common processes versus adjacency and trace equivalence."""
    return run_suite("adjacency-common-process", count, seed)


def check_trace_swap_agreement(count: int = 200, seed: int = 0) -> PropertyReport:
    """Trace equivalence against swapping equivalence (direct search)."""
    return run_suite("trace-vs-swap", count, seed)


def check_class_order(count: int = 200, seed: int = 0) -> PropertyReport:
    """Class order on sequences against class order on processes."""
    return run_suite("class-order", count, seed)


def check_runs_conflict_free(count: int = 100, seed: int = 0) -> PropertyReport:
    return run_suite("runs-conflict-free", count, seed)


def check_conflict_splits_runs(count: int = 100, seed: int = 0) -> PropertyReport:
    return run_suite("conflict-splits-runs", count, seed)


def merge_reports(property_id: str, reports: list[PropertyReport]) -> PropertyReport:
    bounds: dict = {}
    for r in reports:
        bounds.update(r.bounds)
    return PropertyReport(property_id, sum(r.instances for r in reports),
                          sum(r.checks for r in reports),
                          [f for r in reports for f in r.failures], reports[0].seed, bounds,
                          sum(r.elapsed for r in reports), sum(r.skipped for r in reports))


def check_conflict_properties(count: int = 100, seed: int = 0) -> PropertyReport:
    """Runs are conflict-free, and conflicts split maximal runs/processes."""
    return merge_reports("conflict-properties",
                         [check_runs_conflict_free(count, seed), check_conflict_splits_runs(count, seed)])


def check_one_safe(count: int = 50, seed: int = 0) -> PropertyReport:
    return run_suite("one-safe", count, seed)


def check_bdify_runs(count: int = 100, seed: int = 0) -> PropertyReport:
    return run_suite("bdify-runs", count, seed)


DEFAULT_COUNTS = {
    "adjacency-common-process": 100,
    "trace-vs-swap": 200,
    "class-order": 200,
    "runs-conflict-free": 100,
    "conflict-splits-runs": 100,
    "one-safe": 50,
    "bdify-runs": 100,
}


def run_all(seed: int = 0, scale: float = 1.0) -> list[PropertyReport]:
    return [run_suite(name, max(1, round(n * scale)), seed) for name, n in DEFAULT_COUNTS.items()]


# -- fixture cases -----------------------------------------------------------

def fixture_checks(nets: dict[str, Net]) -> list[tuple[str, bool]]:
    """The worked examples on the bundled nets, as (description, ok) pairs."""
    A, B, C = nets["NET-A"], nets["NET-B"], nets["NET-C"]
    out = []
    pa, _ = pi_members(A, "abc")
    pb, _ = pi_members(A, "bac")
    out.append(("NET-A: abc and bac share a process and are trace equivalent",
                _shares_member(pa, pb) and trace_equivalent(A, "abc", "bac")))
    out.append(("NET-B: abdc and adbc are adjacent with a common process",
                adjacent(B, "abdc", "adbc") and _shares_member(pi_members(B, "abdc")[0],
                                                               pi_members(B, "adbc")[0])))
    left, right = pa
    out.append(("NET-A: both processes of abc are swapping equivalent either way",
                swap_equivalent(left, right, "direct-bfs")
                and trace_equivalent(A, "abc", "bca")))
    t, u = build_process(C, "t"), build_process(C, "u")
    out.append(("NET-C: [t] and [u] are not equivalent either way",
                not swap_equivalent(t, u, "direct-bfs") and not trace_equivalent(C, "t", "u")))
    out.append(("NET-A: [a] <= [abc] either way",
                class_leq(A, trace_class(A, "a"), trace_class(A, "abc"))
                and process_class_leq(build_process(A, "a"), left)))
    out.append(("NET-C: [t] and [u] incomparable either way",
                not class_leq(C, trace_class(C, "t"), trace_class(C, "u"))
                and not process_class_leq(t, u)))
    out.append(("NET-C: conflict at the initial marking, two maximal classes at bound 1",
                bool(find_conflicts(C).witnesses) and len(enumerate_runs(C, 1).maximal) == 2))
    out.append(("NET-A: conflict-free with a single maximal class",
                not find_conflicts(A).witnesses and len(enumerate_runs(A, 3).maximal) == 1))
    bl, br = bdify(left), bdify(right)
    out.append(("NET-A: bdify of both processes is prefix-closed, directed and equal",
                bl.is_prefix_closed() and bl.is_directed() and br.is_prefix_closed()
                and br.is_directed() and bl == br))
    e = bdify(empty_process(C))
    out.append(("NET-C: bdify of the empty process is a singleton",
                len(e) == 1 and e.is_directed()))
    return out
