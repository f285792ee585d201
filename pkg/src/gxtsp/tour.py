"""Tour representation and the circular doubly-linked list used by IGX."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import ContractViolation
from .instance import Instance


def check_permutation(order: Sequence[int], n: int) -> None:
    if len(order) != n or sorted(order) != list(range(n)):
        shown = list(order[:20])
        raise ContractViolation(f"not a permutation of 0..{n - 1}: {shown}{' ...' if len(order) > 20 else ''}")


def tour_length(order: Sequence[int], inst: Instance) -> int:
    """Cyclic length of ``order``, including the closing edge."""
    check_permutation(order, inst.n)
    return _cycle_length(order, inst)


def _cycle_length(order, inst):
    dist = inst.distance_function()
    total = dist(order[-1], order[0])
    for a, b in zip(order, order[1:]):
        total += dist(a, b)
    return int(total)


@dataclass(frozen=True)
class Tour:
    order: tuple
    length: int

    @classmethod
    def from_order(cls, order: Sequence[int], inst: Instance) -> "Tour":
        order = tuple(int(v) for v in order)
        return cls(order, tour_length(order, inst))

    @property
    def n(self) -> int:
        return len(self.order)

    def labels(self) -> list[int]:
        """1-based node labels, as printed in TSPLIB files."""
        return [v + 1 for v in self.order]

    def canonical(self) -> tuple:
        """Rotation/direction-free form: starts at node 0, smaller second node."""
        k = self.order.index(0)
        fwd = self.order[k:] + self.order[:k]
        rev = (fwd[0],) + tuple(reversed(fwd[1:]))
        return min(fwd, rev)


class LinkedTourList:
    """Circular doubly-linked list over node indices 0..n-1.

    ``next``/``prev`` are flat index arrays; a node's identity is its index.
    Removing a node splices its neighbours together in O(1).
    """

    __slots__ = ("next", "prev", "present", "size")

    def __init__(self, order: Sequence[int]):
        n = len(order)
        self.next = [0] * n
        self.prev = [0] * n
        for k in range(n):
            a = order[k]
            b = order[k + 1] if k + 1 < n else order[0]
            self.next[a] = b
            self.prev[b] = a
        self.present = [True] * n
        self.size = n

    @classmethod
    def from_tour(cls, tour: Tour) -> "LinkedTourList":
        return cls(tour.order)

    def unlink(self, v: int) -> tuple[Optional[int], Optional[int]]:
        """Remove ``v`` and return its former (prev, next) neighbours.

        Returns ``(None, None)`` when ``v`` was the last node.
        """
        if not (0 <= v < len(self.present)) or not self.present[v]:
            raise ContractViolation(f"node {v} is not in the list")
        self.present[v] = False
        self.size -= 1
        if self.size == 0:
            return None, None
        left = self.prev[v]
        right = self.next[v]
        self.next[left] = right
        self.prev[right] = left
        return left, right

    def walk(self, start: int) -> Iterator[int]:
        if not self.present[start]:
            raise ContractViolation(f"node {start} is not in the list")
        v = start
        for _ in range(self.size):
            yield v
            v = self.next[v]

    def check(self) -> None:
        """Assert the structural invariants (one cycle over present nodes)."""
        alive = [v for v, p in enumerate(self.present) if p]
        if len(alive) != self.size:
            raise AssertionError(f"size {self.size} but {len(alive)} nodes present")
        if not alive:
            return
        for v in alive:
            if self.prev[self.next[v]] != v or self.next[self.prev[v]] != v:
                raise AssertionError(f"broken links at node {v}")
        seen = list(self.walk(alive[0]))
        if sorted(seen) != alive or self.next[seen[-1]] != alive[0]:
            raise AssertionError("present nodes do not form a single cycle")


def linked_from_tour(t: Tour) -> LinkedTourList:
    return LinkedTourList.from_tour(t)
