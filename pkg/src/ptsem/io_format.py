"""Line-oriented net files and process export.

Net file grammar (one declaration per line, ``#`` starts a comment)::

    place <id> [<tokens>]     tokens default 0
    trans <id>
    arc <from> <to> [<weight>] weight default 1

Identifiers match ``[A-Za-z0-9_]+`` and must be declared before use.
"""

from __future__ import annotations

import json
import re
from collections.abc import Hashable

from .multiset import Multiset
from .net import Net, NetError
from .process import Occ, Process, _key

_ID = re.compile(r"[A-Za-z0-9_]+\Z")
_OCC = re.compile(r"(.+)#(\d+)\Z")


class NetParseError(ValueError):
    def __init__(self, diagnostics: list[tuple[int, str]]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(f"line {n}: {msg}" for n, msg in diagnostics))


def _nat(text: str) -> int | None:
    return int(text) if text.isdigit() else None


def parse_net(text: str) -> Net:
    errors: list[tuple[int, str]] = []
    places: dict[str, int] = {}
    transitions: dict[str, int] = {}  # id -> declaring line
    arcs: dict[tuple[str, str], tuple[int, int]] = {}  # -> (weight, line)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kw, *args = line.split()
        if kw in ("place", "trans"):
            max_args = 2 if kw == "place" else 1
            if not 1 <= len(args) <= max_args:
                expected = "1 or 2 arguments" if kw == "place" else "1 argument"
                errors.append((lineno, f"'{kw}' takes {expected}"))
                continue
            name = args[0]
            if not _ID.match(name):
                errors.append((lineno, f"bad identifier {name!r}"))
                continue
            if name in places or name in transitions:
                kind = "place" if name in places else "transition"
                new = "place" if kw == "place" else "transition"
                if kind == new:
                    errors.append((lineno, f"duplicate declaration of {name}"))
                else:
                    errors.append((lineno, f"{name} already declared as a {kind} "
                                           "(places and transitions must be disjoint)"))
                continue
            if kw == "place":
                tokens = _nat(args[1]) if len(args) == 2 else 0
                if tokens is None:
                    errors.append((lineno, f"token count must be a natural number, got {args[1]!r}"))
                    continue
                places[name] = tokens
            else:
                transitions[name] = lineno
        elif kw == "arc":
            if len(args) not in (2, 3):
                errors.append((lineno, "'arc' takes 2 or 3 arguments"))
                continue
            src, dst = args[0], args[1]
            weight = _nat(args[2]) if len(args) == 3 else 1
            bad = False
            for x in (src, dst):
                if x not in places and x not in transitions:
                    errors.append((lineno, f"undeclared identifier {x}"))
                    bad = True
            if bad:
                continue
            if weight is None:
                errors.append((lineno, f"weight must be a natural number, got {args[2]!r}"))
                continue
            if weight == 0:
                errors.append((lineno, f"zero weight on arc {src} {dst}"))
                continue
            if (src in places) == (dst in places):
                errors.append((lineno, f"arc {src} {dst} must join a place and a transition"))
                continue
            if (src, dst) in arcs:
                errors.append((lineno, f"duplicate arc {src} {dst} (first on line {arcs[(src, dst)][1]})"))
                continue
            arcs[(src, dst)] = (weight, lineno)
        else:
            errors.append((lineno, f"unknown declaration {kw!r}"))
    inputs = {dst for (src, dst) in arcs if dst in transitions}
    for t, lineno in transitions.items():
        if t not in inputs:
            errors.append((lineno, f"transition {t} has an empty preset"))
    if errors:
        raise NetParseError(sorted(errors))
    try:
        return Net(frozenset(places), frozenset(transitions),
                   frozenset((s, d, w) for (s, d), (w, _) in arcs.items()),
                   Multiset(places))
    except NetError as exc:  # pragma: no cover - the checks above mirror Net's
        raise NetParseError([(0, p) for p in exc.problems]) from None


def read_net(path) -> Net:
    with open(path, encoding="utf-8") as fh:
        return parse_net(fh.read())


def write_net(net: Net) -> str:
    """Canonical text: places, transitions, then arcs, each sorted; default
    token counts and weights are omitted."""
    lines = []
    for s in net.place_order:
        n = net.initial[s]
        lines.append(f"place {s} {n}" if n else f"place {s}")
    lines.extend(f"trans {t}" for t in net.transition_order)
    for src, dst, w in sorted(net.arcs):
        lines.append(f"arc {src} {dst} {w}" if w != 1 else f"arc {src} {dst}")
    return "\n".join(lines) + "\n"


# -- processes ---------------------------------------------------------------

def _id(x: Hashable) -> str:
    return str(x)


def export_process(P: Process, fmt: str = "structured") -> str:
    if fmt == "structured":
        doc = {
            "places": [{"id": _id(p), "label": P.pi[p], "initial": p in P.initial}
                       for p in sorted(P.places, key=_key)],
            "transitions": [{"id": _id(t), "label": P.pi[t]}
                            for t in sorted(P.transitions, key=_key)],
            "arcs": [[_id(x), _id(y)]
                     for x, y in sorted(P.arcs, key=lambda a: (_key(a[0]), _key(a[1])))],
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "graph":
        lines = ["digraph process {"]
        for p in sorted(P.places, key=_key):
            style = ', style=bold' if p in P.initial else ""
            lines.append(f'  "{_id(p)}" [shape=circle, label="{P.pi[p]}"{style}];')
        for t in sorted(P.transitions, key=_key):
            lines.append(f'  "{_id(t)}" [shape=box, label="{P.pi[t]}"];')
        for x, y in sorted(P.arcs, key=lambda a: (_key(a[0]), _key(a[1]))):
            lines.append(f'  "{_id(x)}" -> "{_id(y)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown export format {fmt!r}")


def _parse_id(text: str, label: str) -> Hashable:
    m = _OCC.match(text)
    if m and m.group(1) == label:
        return Occ(label, int(m.group(2)))
    return text


def import_process(text: str, net: Net) -> Process:
    """Inverse of the structured export (the result is not validated)."""
    doc = json.loads(text)
    ids: dict[str, Hashable] = {}
    pi: dict[Hashable, str] = {}
    places, transitions, initial = [], [], []
    for entry in doc["places"]:
        x = _parse_id(entry["id"], entry["label"])
        ids[entry["id"]] = x
        pi[x] = entry["label"]
        places.append(x)
        if entry.get("initial"):
            initial.append(x)
    for entry in doc["transitions"]:
        x = _parse_id(entry["id"], entry["label"])
        ids[entry["id"]] = x
        pi[x] = entry["label"]
        transitions.append(x)
    arcs = []
    for a, b in doc["arcs"]:
        if a not in ids or b not in ids:
            raise ValueError(f"arc {a}->{b} mentions an unknown occurrence")
        arcs.append((ids[a], ids[b]))
    return Process(net, places, transitions, arcs, pi, initial)
