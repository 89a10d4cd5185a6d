"""Finite multisets over hashable elements.

A :class:`Multiset` never stores zero counts, so two multisets that differ
only in elements of multiplicity zero are equal (and hash equal).
"""

from __future__ import annotations

from collections.abc import Hashable, Iterable, Iterator, Mapping
from typing import Literal

CombineKind = Literal["sum", "monus", "union"]


def _sort_key(x: Hashable) -> str:
    return str(x)


class Multiset:
    """Immutable element -> positive count map.

    ``A[x]`` is 0 for elements not in ``A``; ``len(A)`` is the cardinality
    ``|A|`` (sum of counts), not the number of distinct elements.

    >>> Multiset("aab") + Multiset({"b": 1, "c": 2})
    Multiset({'a': 2, 'b': 2, 'c': 2})
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, items: Mapping[Hashable, int] | Iterable[Hashable] | None = None) -> None:
        counts: dict[Hashable, int] = {}
        if isinstance(items, Multiset):
            counts = dict(items._counts)
        elif isinstance(items, Mapping):
            for x, n in items.items():
                if not isinstance(n, int) or isinstance(n, bool):
                    raise TypeError(f"count of {x!r} must be an int, got {n!r}")
                if n < 0:
                    raise ValueError(f"negative count {n} for {x!r}")
                if n:
                    counts[x] = n
        elif items is not None:
            for x in items:
                counts[x] = counts.get(x, 0) + 1
        self._counts = counts
        self._hash: int | None = None

    @classmethod
    def _raw(cls, counts: dict[Hashable, int]) -> Multiset:
        # counts must already be in normal form
        ms = cls.__new__(cls)
        ms._counts = counts
        ms._hash = None
        return ms

    def __getitem__(self, x: Hashable) -> int:
        return self._counts.get(x, 0)

    def __contains__(self, x: object) -> bool:
        return x in self._counts

    def __iter__(self) -> Iterator[Hashable]:
        return iter(sorted(self._counts, key=_sort_key))

    def __len__(self) -> int:
        return sum(self._counts.values())

    def __bool__(self) -> bool:
        return bool(self._counts)

    def items(self) -> list[tuple[Hashable, int]]:
        return [(x, self._counts[x]) for x in self]

    def support(self) -> frozenset:
        return frozenset(self._counts)

    def elements(self) -> list[Hashable]:
        """Elements repeated by multiplicity, in sorted order."""
        return [x for x in self for _ in range(self._counts[x])]

    def as_dict(self) -> dict[Hashable, int]:
        return dict(self.items())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Multiset):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __add__(self, other: Multiset) -> Multiset:
        return combine(self, other, "sum")

    def __sub__(self, other: Multiset) -> Multiset:
        return combine(self, other, "monus")

    def __or__(self, other: Multiset) -> Multiset:
        return combine(self, other, "union")

    def __le__(self, other: Multiset) -> bool:
        return leq(self, other)

    def __ge__(self, other: Multiset) -> bool:
        return leq(other, self)

    def __lt__(self, other: Multiset) -> bool:
        return leq(self, other) and self != other

    def __gt__(self, other: Multiset) -> bool:
        return leq(other, self) and self != other

    def __mul__(self, k: int) -> Multiset:
        return scale(k, self)

    __rmul__ = __mul__

    def restrict(self, domain: Iterable[Hashable]) -> Multiset:
        return restrict(self, domain)

    def __repr__(self) -> str:
        return f"Multiset({self.as_dict()!r})"

    def __str__(self) -> str:
        return "{" + ", ".join(f"{x}:{n}" for x, n in self.items()) + "}"


def combine(a: Multiset, b: Multiset, kind: CombineKind) -> Multiset:
    """Pointwise sum, truncated difference (monus) or maximum (union)."""
    if kind == "sum":
        out = dict(a._counts)
        for x, n in b._counts.items():
            out[x] = out.get(x, 0) + n
    elif kind == "monus":
        out = {}
        for x, n in a._counts.items():
            d = n - b._counts.get(x, 0)
            if d > 0:
                out[x] = d
    elif kind == "union":
        out = dict(a._counts)
        for x, n in b._counts.items():
            if n > out.get(x, 0):
                out[x] = n
    else:
        raise ValueError(f"unknown combine kind {kind!r}")
    return Multiset._raw(out)


def leq(a: Multiset, b: Multiset) -> bool:
    """``A <= B`` iff ``A(x) <= B(x)`` for every x."""
    bc = b._counts
    return all(n <= bc.get(x, 0) for x, n in a._counts.items())


def scale(k: int, a: Multiset) -> Multiset:
    if k < 0:
        raise ValueError("scale factor must be a natural number")
    if k == 0:
        return Multiset._raw({})
    return Multiset._raw({x: k * n for x, n in a._counts.items()})


def restrict(a: Multiset, domain: Iterable[Hashable]) -> Multiset:
    dom = domain if isinstance(domain, (set, frozenset)) else set(domain)
    return Multiset._raw({x: n for x, n in a._counts.items() if x in dom})


def size(a: Multiset) -> int:
    return len(a)


EMPTY = Multiset()
