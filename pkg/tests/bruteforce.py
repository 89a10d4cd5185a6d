"""Deliberately naive reference implementations used as test oracles.

Nothing here calls the package's algorithms; nets are read through their raw
arc sets only, and processes are plain networkx graphs.
"""

import itertools
from collections import Counter, deque

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher


def pre(net, t):
    return Counter({s: w for s, d, w in net.arcs if d == t})


def post(net, t):
    return Counter({d: w for s, d, w in net.arcs if s == t})


def initial(net):
    return Counter({s: n for s, n in net.initial.items()})


def covers(m, need):
    return all(m[s] >= k for s, k in need.items())


def fire(net, m, t):
    """Counter after firing t, or None."""
    if not covers(m, pre(net, t)):
        return None
    out = Counter(m)
    out.subtract(pre(net, t))
    out.update(post(net, t))
    return +out


def run(net, word):
    m = initial(net)
    for t in word:
        m = fire(net, m, t)
        if m is None:
            return None
    return m


def key(m):
    return frozenset((+m).items())


def all_words(net, bound):
    out = [()]
    frontier = [((), initial(net))]
    for _ in range(bound):
        nxt = []
        for w, m in frontier:
            for t in sorted(net.transitions):
                m2 = fire(net, m, t)
                if m2 is not None:
                    nxt.append((w + (t,), m2))
        out.extend(w for w, _ in nxt)
        frontier = nxt
    return out


def reachable(net, depth, tokens):
    """Markings reachable in <= depth steps without exceeding ``tokens``
    anywhere along the way."""
    seen = {key(initial(net))}
    frontier = [initial(net)]
    for _ in range(depth):
        nxt = []
        for m in frontier:
            for t in sorted(net.transitions):
                m2 = fire(net, m, t)
                if m2 is None or any(v > tokens for v in m2.values()):
                    continue
                if key(m2) not in seen:
                    seen.add(key(m2))
                    nxt.append(m2)
        frontier = nxt
    return seen


def step_enabled(net, m, step):
    need = Counter()
    for t in step:
        need.update(pre(net, t))
    return covers(m, need)


def adjacent(net, a, b):
    """a = s1 t u s2, b = s1 u t s2 with {t, u} enabled after s1 (t == u
    allowed)."""
    if len(a) != len(b) or run(net, a) is None or run(net, b) is None:
        return False
    for i in range(len(a) - 1):
        if (a[:i] == b[:i] and a[i + 2:] == b[i + 2:]
                and (a[i], a[i + 1]) == (b[i + 1], b[i])
                and step_enabled(net, run(net, a[:i]), [a[i], a[i + 1]])):
            return True
    return False


def trace_class(net, word):
    word = tuple(word)
    perms = {p for p in itertools.permutations(word) if run(net, p) is not None}
    seen = {word}
    queue = deque([word])
    while queue:
        w = queue.popleft()
        for v in perms:
            if v not in seen and adjacent(net, w, v):
                seen.add(v)
                queue.append(v)
    return seen


def process_graph(P):
    g = nx.DiGraph()
    for x in P.places:
        g.add_node(x, kind="place", label=P.pi[x])
    for x in P.transitions:
        g.add_node(x, kind="trans", label=P.pi[x])
    g.add_edges_from(P.arcs)
    return g


def isomorphic(g, h):
    return DiGraphMatcher(g, h, node_match=lambda a, b: a == b).is_isomorphic()


def process_graphs(net, word):
    """Every process of ``word``, one per choice of consumed tokens, as
    graphs built from scratch."""
    results = []
    m0 = initial(net)

    def rec(i, g, tokens, fresh):
        if i == len(word):
            results.append(g.copy())
            return
        t = word[i]
        tnode = ("T", i)
        options = []
        for s, w in sorted(pre(net, t).items()):
            options.append([(s, c) for c in itertools.combinations(tokens.get(s, []), w)])
        for choice in itertools.product(*options):
            h = g.copy()
            h.add_node(tnode, kind="trans", label=t)
            toks = {s: list(v) for s, v in tokens.items()}
            for s, chosen in choice:
                for node in chosen:
                    h.add_edge(node, tnode)
                    toks[s].remove(node)
            n = fresh
            for s, w in sorted(post(net, t).items()):
                for _ in range(w):
                    node = ("S", n)
                    n += 1
                    h.add_node(node, kind="place", label=s)
                    h.add_edge(tnode, node)
                    toks.setdefault(s, []).append(node)
            rec(i + 1, h, toks, n)

    g = nx.DiGraph()
    tokens = {}
    n = 0
    for s, k in sorted(m0.items()):
        for _ in range(k):
            g.add_node(("S", n), kind="place", label=s)
            tokens.setdefault(s, []).append(("S", n))
            n += 1
    rec(0, g, tokens, n)
    return results


def iso_classes(graphs):
    reps = []
    for g in graphs:
        if not any(isomorphic(g, h) for h in reps):
            reps.append(g)
    return reps


def linearisations(P):
    g = process_graph(P)
    ts = list(P.transitions)
    anc = {t: nx.ancestors(g, t) & set(ts) for t in ts}
    out = set()
    for perm in itertools.permutations(ts):
        pos = {t: i for i, t in enumerate(perm)}
        if all(pos[u] < pos[t] for t in ts for u in anc[t]):
            out.add(tuple(P.pi[t] for t in perm))
    return out


def minimal_conflicts(net, m, gmax):
    ts = sorted(net.transitions)
    found = []
    for combo in itertools.product(range(gmax + 1), repeat=len(ts)):
        g = {t: k for t, k in zip(ts, combo) if k}
        if not g:
            continue
        if not all(covers(m, Counter({s: w * k for s, w in pre(net, t).items()})) for t, k in g.items()):
            continue
        need = Counter()
        for t, k in g.items():
            need.update({s: w * k for s, w in pre(net, t).items()})
        if not covers(m, need):
            found.append(g)
    def below(a, b):
        return a != b and all(b.get(t, 0) >= k for t, k in a.items())
    return [g for g in found if not any(below(h, g) for h in found)]
