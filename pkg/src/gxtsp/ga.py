"""Generational memetic GA: crossover, 2-opt + 3-opt, truncation survival.

Each outer iteration produces ``generation_size`` children into a side pool,
then merges them with the population and keeps the ``population_size``
shortest tours (stable, so incumbents win ties). The outer loop continues
as long as at least one child of the iteration survived.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .crossover import get_operator
from .errors import ContractViolation
from .instance import Instance
from .local_search import DEFAULT_LS, LocalSearchConfig, improve
from .tour import Tour


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 50
    generation_size: int = 500
    operator: str = "igx"
    ls: LocalSearchConfig = DEFAULT_LS
    seed: int = 0
    max_outer_loops: Optional[int] = 10_000
    reject_duplicates: bool = False
    start_node: Optional[int] = None  # fixed crossover start; None = random

    def __post_init__(self):
        if self.population_size < 2:
            raise ContractViolation("population_size must be >= 2")
        if self.generation_size < 1:
            raise ContractViolation("generation_size must be >= 1")
        if self.max_outer_loops is not None and self.max_outer_loops < 1:
            raise ContractViolation("max_outer_loops must be >= 1")
        get_operator(self.operator)


@dataclass
class GAResult:
    best_tour: Tour
    best_length: int
    outer_loops: int
    wall_time: float
    children_produced: int
    abnormal_stop: bool = False
    history: list = field(default_factory=list)  # best length after each outer loop


class Population:
    """Fixed-capacity pool of tours kept sorted by length (best first)."""

    def __init__(self, individuals, capacity):
        self.capacity = capacity
        self.individuals = sorted(individuals, key=lambda t: t.length)

    def __len__(self):
        return len(self.individuals)

    def __getitem__(self, k):
        return self.individuals[k]

    def best(self) -> Tour:
        return self.individuals[0]

    def lengths(self):
        return [t.length for t in self.individuals]


def init_population(inst: Instance, cfg: GAConfig, rng: np.random.Generator) -> Population:
    tours = [Tour.from_order(rng.permutation(inst.n).tolist(), inst) for _ in range(cfg.population_size)]
    return Population(tours, cfg.population_size)


def select_parents(pop: Population, rng: np.random.Generator) -> tuple[Tour, Tour]:
    """Two distinct members, uniformly without replacement."""
    if len(pop) < 2:
        raise ContractViolation("need at least two individuals to select parents")
    i, j = rng.choice(len(pop), size=2, replace=False)
    return pop[int(i)], pop[int(j)]


def reduce_population(pool: list, cfg: GAConfig) -> list:
    """Keep the ``population_size`` shortest tours of ``pool``.

    ``pool`` is in insertion order; ties keep the earlier entry.
    """
    if len(pool) < cfg.population_size:
        raise ContractViolation(f"pool of {len(pool)} is smaller than population_size {cfg.population_size}")
    return sorted(pool, key=lambda t: t.length)[: cfg.population_size]


def run_ga(
    inst: Instance,
    cfg: GAConfig,
    on_loop: Optional[Callable[[int, Population], None]] = None,
    initial: Optional[list] = None,
) -> GAResult:
    """Run the GA to its stopping rule; ``initial`` replaces random initialization."""
    op = get_operator(cfg.operator)
    if cfg.start_node is not None and not 0 <= cfg.start_node < inst.n:
        raise ContractViolation(f"start_node {cfg.start_node} out of range for n={inst.n}")
    rng = np.random.default_rng(cfg.seed)
    t0 = time.perf_counter()

    if initial is None:
        pop = init_population(inst, cfg, rng)
    else:
        if len(initial) != cfg.population_size:
            raise ContractViolation(f"initial population has {len(initial)} tours, expected {cfg.population_size}")
        for t in initial:
            if t.n != inst.n:
                raise ContractViolation("initial tour does not match the instance size")
        pop = Population(list(initial), cfg.population_size)
    loops = 0
    children = 0
    history = []
    abnormal = False
    changed = True
    while changed:
        if cfg.max_outer_loops is not None and loops >= cfg.max_outer_loops:
            abnormal = True
            break
        loops += 1
        seen = {t.canonical() for t in pop.individuals} if cfg.reject_duplicates else None
        brood = []
        for _ in range(cfg.generation_size):
            father, mother = select_parents(pop, rng)
            child = op(father, mother, inst, rng, start=cfg.start_node)
            child = improve(child, inst, cfg.ls)
            children += 1
            if seen is not None:
                key = child.canonical()
                if key in seen:
                    continue
                seen.add(key)
            brood.append(child)
        survivors = reduce_population(pop.individuals + brood, cfg)
        brood_ids = {id(c) for c in brood}
        changed = any(id(t) in brood_ids for t in survivors)
        pop = Population(survivors, cfg.population_size)
        history.append(pop.best().length)
        if on_loop is not None:
            on_loop(loops, pop)

    best = pop.best()
    return GAResult(
        best_tour=best,
        best_length=best.length,
        outer_loops=loops,
        wall_time=time.perf_counter() - t0,
        children_produced=children,
        abnormal_stop=abnormal,
        history=history,
    )
