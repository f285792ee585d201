"""2-opt and 3-opt improvement of a single tour.

Both searches use first-improvement sweeps over tour positions with integer
delta evaluation. A pass is one full sweep; passes repeat until a sweep
applies no move or ``max_passes`` is reached. The kernels are compiled with
numba and work on the instance's full distance matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .errors import ContractViolation
from .instance import Instance
from .tour import Tour, check_permutation, tour_length


@dataclass(frozen=True)
class LocalSearchConfig:
    two_opt_enabled: bool = True
    three_opt_enabled: bool = True
    max_passes: Optional[int] = None  # None = run to convergence

    def __post_init__(self):
        if self.max_passes is not None and self.max_passes < 1:
            raise ContractViolation("max_passes must be >= 1 when bounded")


DEFAULT_LS = LocalSearchConfig()


@njit(cache=True)
def _two_opt_kernel(t, D, max_passes):
    n = t.shape[0]
    passes = 0
    moves = 0
    improved = True
    while improved and (max_passes <= 0 or passes < max_passes):
        improved = False
        passes += 1
        for i in range(n - 2):
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue  # the two edges would share node t[0]
                a = t[i]
                b = t[i + 1]
                c = t[j]
                d = t[(j + 1) % n]
                if D[a, c] + D[b, d] < D[a, b] + D[c, d]:
                    lo = i + 1
                    hi = j
                    while lo < hi:
                        tmp = t[lo]
                        t[lo] = t[hi]
                        t[hi] = tmp
                        lo += 1
                        hi -= 1
                    improved = True
                    moves += 1
    return moves


@njit(cache=True)
def _reverse(buf, lo, hi):
    while lo < hi:
        tmp = buf[lo]
        buf[lo] = buf[hi]
        buf[hi] = tmp
        lo += 1
        hi -= 1


@njit(cache=True)
def _apply_3opt(t, i, j, k, case):
    # t = [.. a] [b .. c] [d .. e] [f ..] with a=t[i], c=t[j], e=t[k]
    s1 = t[i + 1:j + 1].copy()
    s2 = t[j + 1:k + 1].copy()
    l1 = s1.shape[0]
    l2 = s2.shape[0]
    if case == 0:  # a-c b-d: reverse s1
        _reverse(t, i + 1, j)
    elif case == 1:  # c-e d-f: reverse s2
        _reverse(t, j + 1, k)
    elif case == 2:  # a-e b-f: reverse s1+s2
        _reverse(t, i + 1, k)
    elif case == 3:  # a-c b-e d-f: reverse both in place
        _reverse(t, i + 1, j)
        _reverse(t, j + 1, k)
    else:
        # the remaining cases put s2 first
        p = i + 1
        if case == 4:  # a-e d-b c-f: s2 reversed, s1 as is
            for q in range(l2):
                t[p + q] = s2[l2 - 1 - q]
            for q in range(l1):
                t[p + l2 + q] = s1[q]
        elif case == 5:  # a-d e-c b-f: s2 as is, s1 reversed
            for q in range(l2):
                t[p + q] = s2[q]
            for q in range(l1):
                t[p + l2 + q] = s1[l1 - 1 - q]
        else:  # a-d e-b c-f: swap segments
            for q in range(l2):
                t[p + q] = s2[q]
            for q in range(l1):
                t[p + l2 + q] = s1[q]


@njit(cache=True)
def _three_opt_kernel(t, D, max_passes):
    n = t.shape[0]
    passes = 0
    moves = 0
    gains = np.zeros(7, dtype=np.int64)
    improved = True
    while improved and (max_passes <= 0 or passes < max_passes):
        improved = False
        passes += 1
        for i in range(n - 2):
            for j in range(i + 1, n - 1):
                for k in range(j + 1, n):
                    a = t[i]
                    b = t[i + 1]
                    c = t[j]
                    d = t[j + 1]
                    e = t[k]
                    f = t[(k + 1) % n]
                    dab = D[a, b]
                    dcd = D[c, d]
                    d_ef = D[e, f]
                    gains[0] = dab + dcd - D[a, c] - D[b, d]
                    gains[1] = dcd + d_ef - D[c, e] - D[d, f]
                    gains[2] = dab + d_ef - D[a, e] - D[b, f]
                    base = dab + dcd + d_ef
                    gains[3] = base - D[a, c] - D[b, e] - D[d, f]
                    gains[4] = base - D[a, e] - D[d, b] - D[c, f]
                    gains[5] = base - D[a, d] - D[e, c] - D[b, f]
                    gains[6] = base - D[a, d] - D[e, b] - D[c, f]
                    best = 0
                    for q in range(1, 7):
                        if gains[q] > gains[best]:
                            best = q
                    if gains[best] > 0:
                        _apply_3opt(t, i, j, k, best)
                        improved = True
                        moves += 1
    return moves


def _run(kernel, t: Tour, inst: Instance, max_passes):
    check_permutation(t.order, inst.n)
    if inst.n < 4:
        return t
    arr = np.array(t.order, dtype=np.int64)
    moves = kernel(arr, inst.dist_matrix, 0 if max_passes is None else int(max_passes))
    if moves == 0:
        return t
    order = tuple(arr.tolist())
    length = tour_length(order, inst)
    assert length < t.length, "local search made the tour longer"
    return Tour(order, length)


def two_opt(t: Tour, inst: Instance, cfg: LocalSearchConfig = DEFAULT_LS) -> Tour:
    """First-improvement 2-opt; the result admits no improving 2-exchange when
    run without a pass limit."""
    return _run(_two_opt_kernel, t, inst, cfg.max_passes)


def three_opt(t: Tour, inst: Instance, cfg: LocalSearchConfig = DEFAULT_LS) -> Tour:
    """Sequential 3-opt: for each position triple the best of the seven
    reconnections is applied if it shortens the tour."""
    return _run(_three_opt_kernel, t, inst, cfg.max_passes)


def improve(t: Tour, inst: Instance, cfg: LocalSearchConfig = DEFAULT_LS) -> Tour:
    if cfg.two_opt_enabled:
        t = two_opt(t, inst, cfg)
    if cfg.three_opt_enabled:
        t = three_opt(t, inst, cfg)
    return t

