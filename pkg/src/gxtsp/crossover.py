"""Greedy crossover family: IGX plus the four earlier GX variants.

Every operator has the signature ``op(father, mother, inst, rng, start=None,
trace=None) -> Tour``. The child starts at ``start`` (drawn uniformly from
``rng`` when None) and is extended from the current node to the nearest of
its parent neighbours. The variants differ in where the neighbours come from
and in what happens when none of them is usable.

Ties between equidistant candidates go to the first one in probe order:
father-prev, father-next, mother-prev, mother-next.

Passing a list as ``trace`` records one :class:`Step` per appended node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ContractViolation
from .instance import Instance
from .tour import LinkedTourList, Tour

SOURCES = ("father-prev", "father-next", "mother-prev", "mother-next")
SAMPLE_SIZE = 20


@dataclass
class Step:
    current: int
    candidates: list  # (node, source, distance, visited-at-probe-time)
    chosen: int
    fallback: Optional[str] = None
    sampled: list = field(default_factory=list)


Operator = Callable[..., Tour]
OPERATORS: dict[str, Operator] = {}


def register(name: str):
    """Add an operator to the by-name registry."""

    def deco(fn):
        if name in OPERATORS:
            raise ValueError(f"operator {name!r} already registered")
        OPERATORS[name] = fn
        fn.operator_name = name
        return fn

    return deco


def get_operator(name: str) -> Operator:
    try:
        return OPERATORS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown operator {name!r}; valid operators: {', '.join(sorted(OPERATORS))}") from None


def _check_parents(father: Tour, mother: Tour, inst: Instance) -> int:
    n = inst.n
    if father.n != n or mother.n != n:
        raise ContractViolation(f"parent sizes {father.n}/{mother.n} do not match instance size {n}")
    return n


def _pick_start(n, rng, start):
    if start is None:
        return int(rng.integers(n))
    if not 0 <= start < n:
        raise ContractViolation(f"start node {start} out of range for n={n}")
    return int(start)


def _nearest(cur, cands, dist):
    """First minimum over (node, ...) candidates in the given order."""
    best = None
    best_d = None
    for c in cands:
        d = dist(cur, c[0])
        if best_d is None or d < best_d:
            best, best_d = c[0], d
    return best


def _dedup(pairs):
    seen = set()
    out = []
    for node, src in pairs:
        if node is not None and node not in seen:
            seen.add(node)
            out.append((node, src))
    return out


@register("igx")
def igx(father: Tour, mother: Tour, inst: Instance, rng=None, start=None, trace=None) -> Tour:
    """Improved greedy crossover, O(n).

    Both parents are held as circular linked lists. Each node copied to the
    child is unlinked from both lists, and the unlink hands back its current
    neighbours, which are by construction not yet in the child.
    """
    n = _check_parents(father, mother, inst)
    dist = inst.distance_function()
    fl = LinkedTourList(father.order)
    ml = LinkedTourList(mother.order)
    cur = _pick_start(n, rng, start)
    child = [cur]
    for _ in range(n - 1):
        fp, fn = fl.unlink(cur)
        mp, mn = ml.unlink(cur)
        cands = _dedup(zip((fp, fn, mp, mn), SOURCES))
        nxt = _nearest(cur, cands, dist)
        if trace is not None:
            probed = [(c, s, dist(cur, c), c in child) for c, s in cands]
            trace.append(Step(cur, probed, nxt))
        child.append(nxt)
        cur = nxt
    return Tour(tuple(child), _closed_length(child, dist))


def _closed_length(order, dist):
    total = dist(order[-1], order[0])
    for a, b in zip(order, order[1:]):
        total += dist(a, b)
    return int(total)


def _static_neighbors(order):
    n = len(order)
    prev = [0] * n
    nxt = [0] * n
    for k, v in enumerate(order):
        prev[v] = order[k - 1]
        nxt[v] = order[(k + 1) % n]
    return prev, nxt


class _Unvisited:
    """Unvisited-node pool with O(1) removal and uniform draws."""

    def __init__(self, n):
        self.items = list(range(n))
        self.pos = list(range(n))
        self.visited = [False] * n

    def __len__(self):
        return len(self.items)

    def remove(self, v):
        self.visited[v] = True
        i = self.pos[v]
        last = self.items.pop()
        if last != v:
            self.items[i] = last
            self.pos[last] = i

    def draw(self, rng):
        return self.items[int(rng.integers(len(self.items)))]


def _static_gx(father, mother, inst, rng, start, trace, *, first_only, fallback):
    n = _check_parents(father, mother, inst)
    dist = inst.distance_function()
    fprev, fnext = _static_neighbors(father.order)
    mprev, mnext = _static_neighbors(mother.order)
    pool = _Unvisited(n)
    cur = _pick_start(n, rng, start)
    pool.remove(cur)
    child = [cur]
    while len(pool):
        cands = _dedup(zip((fprev[cur], fnext[cur], mprev[cur], mnext[cur]), SOURCES))
        if first_only:
            # single nearest neighbour; consult nothing else if it is taken
            best = _nearest(cur, cands, dist)
            nxt = None if pool.visited[best] else best
        else:
            nxt = _nearest(cur, [c for c in cands if not pool.visited[c[0]]], dist)
        how = None
        sampled = []
        if nxt is None:
            how = fallback
            if fallback == "random":
                nxt = pool.draw(rng)
            elif fallback == "best20":
                k = len(pool)
                m = min(SAMPLE_SIZE, k)
                idx = rng.choice(k, size=m, replace=False)
                sampled = [pool.items[int(i)] for i in idx]
                nxt = _nearest(cur, [(v,) for v in sampled], dist)
            elif fallback == "global":
                nxt = min(pool.items, key=lambda v: (dist(cur, v), v))
            else:
                raise AssertionError(fallback)
        if trace is not None:
            probed = [(c, s, dist(cur, c), pool.visited[c]) for c, s in cands]
            trace.append(Step(cur, probed, nxt, how, sampled))
        pool.remove(nxt)
        child.append(nxt)
        cur = nxt
    return Tour(tuple(child), _closed_length(child, dist))


@register("vgx")
def vgx(father, mother, inst, rng=None, start=None, trace=None) -> Tour:
    """Very greedy crossover: falls back to the nearest of all unvisited nodes."""
    return _static_gx(father, mother, inst, rng, start, trace, first_only=False, fallback="global")


@register("gx_random")
def gx_random(father, mother, inst, rng=None, start=None, trace=None) -> Tour:
    """Classical GX: a random unvisited node whenever the nearest neighbour is taken.

    Only the single nearest of the four parent neighbours is considered; the
    other three are not tried before falling back (see gx_four_random for that).
    """
    return _static_gx(father, mother, inst, rng, start, trace, first_only=True, fallback="random")


@register("gx_four_random")
def gx_four_random(father, mother, inst, rng=None, start=None, trace=None) -> Tour:
    return _static_gx(father, mother, inst, rng, start, trace, first_only=False, fallback="random")


@register("gx_four_best20")
def gx_four_best20(father, mother, inst, rng=None, start=None, trace=None) -> Tour:
    """Nearest of up to 20 distinct unvisited nodes sampled without replacement."""
    return _static_gx(father, mother, inst, rng, start, trace, first_only=False, fallback="best20")


def reference_igx_oracle(father: Tour, mother: Tour, inst: Instance, start: int) -> Tour:
    """IGX recomputed by explicit scanning, O(n^2).

    For each parent, walk outward from the current node's original position
    in both directions until an unvisited node turns up. No linked lists.
    """
    n = _check_parents(father, mother, inst)
    if not 0 <= start < n:
        raise ContractViolation(f"start node {start} out of range for n={n}")
    parents = (father.order, mother.order)
    where = [{v: k for k, v in enumerate(p)} for p in parents]
    visited = set([start])
    child = [start]
    cur = start
    while len(child) < n:
        found = []
        for p, pos in zip(parents, where):
            k = pos[cur]
            for step in (-1, 1):
                j = k
                for _ in range(n):
                    j = (j + step) % n
                    if p[j] not in visited:
                        found.append(p[j])
                        break
        best = None
        for c in dict.fromkeys(found):
            d = inst.distance(cur, c)
            if best is None or d < best[1]:
                best = (c, d)
        cur = best[0]
        visited.add(cur)
        child.append(cur)
    return Tour.from_order(child, inst)


def make_rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)
