import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gxtsp import crossover
from gxtsp.crossover import OPERATORS, get_operator, make_rng, reference_igx_oracle
from gxtsp.errors import ContractViolation
from gxtsp.instance import Instance, random_instance
from gxtsp.tour import Tour

from conftest import labels, random_tour

ALL_OPS = sorted(OPERATORS)


def test_registry_names():
    assert set(OPERATORS) == {"igx", "vgx", "gx_random", "gx_four_random", "gx_four_best20"}


def test_unknown_operator_lists_valid_names():
    with pytest.raises(ValueError, match="gx_four_best20, gx_four_random, gx_random, igx, vgx"):
        get_operator("pmx")


def test_plugin_registration():
    @crossover.register("first_parent_copy")
    def copy_father(father, mother, inst, rng=None, start=None, trace=None):
        return father

    try:
        assert get_operator("first_parent_copy") is copy_father
        with pytest.raises(ValueError, match="already registered"):
            crossover.register("igx")(copy_father)
    finally:
        del OPERATORS["first_parent_copy"]


@pytest.mark.parametrize("name", ALL_OPS)
def test_mismatched_parents(name, fig1, parents):
    small = Instance.from_coords([(0, 0), (1, 0), (0, 1)])
    short = Tour.from_order([0, 1, 2], small)
    with pytest.raises(ContractViolation):
        get_operator(name)(parents[0], short, fig1, make_rng(0))


# --- worked example -------------------------------------------------------

def test_igx_first_step(fig1, parents):
    steps = []
    crossover.igx(*parents, fig1, start=0, trace=steps)
    first = steps[0]
    assert sorted(labels(c for c, *_ in first.candidates)) == [2, 5, 6, 7]
    assert first.chosen + 1 == 2
    assert fig1.distance(0, 1) == 12


def test_igx_full_trace(fig1, parents):
    child = crossover.igx(*parents, fig1, start=0)
    assert child.labels() == [1, 2, 3, 7, 6, 8, 5, 4]
    assert child.length == 180


def test_igx_tie_goes_to_father_prev(fig1, parents):
    steps = []
    crossover.igx(*parents, fig1, start=0, trace=steps)
    at3 = steps[2]
    assert at3.current + 1 == 3
    assert [(c + 1, src, d) for c, src, d, _ in at3.candidates] == [(7, "father-prev", 35), (6, "father-next", 35)]
    assert at3.chosen + 1 == 7


def test_vgx_full_trace(fig1, parents):
    steps = []
    child = crossover.vgx(*parents, fig1, start=0, trace=steps)
    assert child.labels() == [1, 2, 3, 7, 5, 4, 8, 6]
    assert child.length == 195
    assert not any(s.fallback for s in steps)
    igx_child = crossover.igx(*parents, fig1, start=0)
    assert child.labels()[:3] == igx_child.labels()[:3]


def test_gx_random_special_case(fig1, parents):
    # child 1, 2: nearest neighbour of 2 is 1 (d=12) and already taken
    thirds = Counter()
    for seed in range(600):
        steps = []
        child = crossover.gx_random(*parents, fig1, make_rng(seed), start=0, trace=steps)
        assert child.labels()[:2] == [1, 2]
        assert steps[1].fallback == "random"
        thirds[child.labels()[2]] += 1
    assert set(thirds) == {3, 4, 5, 6, 7, 8}
    # each of six outcomes expected 100 times; 5-sigma band
    assert all(50 <= c <= 150 for c in thirds.values())


def test_gx_four_random_special_case(fig1, parents):
    steps = []
    child = crossover.gx_four_random(*parents, fig1, make_rng(0), start=0, trace=steps)
    assert child.labels()[:3] == [1, 2, 3]
    at2 = steps[1]
    assert sorted(labels(c for c, *_ in at2.candidates)) == [1, 3, 4, 6]
    assert [c + 1 for c, _, _, seen in at2.candidates if seen] == [1]
    assert at2.fallback is None


def test_pinned_children(fig1, parents):
    expected = {
        "igx": ([2, 1, 6, 8, 3, 7, 4, 5], 181),
        "vgx": ([2, 1, 6, 8, 5, 4, 7, 3], 187),
        "gx_random": ([2, 1, 5, 4, 7, 6, 3, 8], 185),
        "gx_four_random": ([2, 1, 6, 8, 5, 4, 3, 7], 220),
        "gx_four_best20": ([2, 1, 6, 8, 5, 4, 7, 3], 187),
    }
    for name, (labs, length) in expected.items():
        child = get_operator(name)(*parents, fig1, make_rng(2024))
        assert (child.labels(), child.length) == (labs, length), name


def test_vgx_global_fallback_picks_nearest_unvisited(fig1, parents):
    steps = []
    child = crossover.vgx(*parents, fig1, make_rng(2024), trace=steps)
    (fb,) = [s for s in steps if s.fallback]
    assert fb.fallback == "global"
    k = child.order.index(fb.current)
    remaining = child.order[k + 1:]
    assert fb.chosen == min(remaining, key=lambda v: (fig1.distance(fb.current, v), v))


# --- fallbacks ---------------------------------------------------------------

def _fallback_steps(op, n_trials=200, n=40):
    rng = np.random.default_rng(7)
    for _ in range(n_trials):
        inst = random_instance(n, rng)
        f, m = random_tour(inst, rng), random_tour(inst, rng)
        steps = []
        child = op(f, m, inst, rng, trace=steps)
        for s in steps:
            if s.fallback:
                k = child.order.index(s.current)
                yield inst, child, k, s


def test_best20_samples_distinct_unvisited():
    seen_large = seen_small = False
    for inst, child, k, s in _fallback_steps(crossover.gx_four_best20, n=80):
        unvisited = set(child.order[k + 1:])
        assert len(set(s.sampled)) == len(s.sampled) == min(20, len(unvisited))
        assert set(s.sampled) <= unvisited
        assert s.chosen in s.sampled
        assert inst.distance(s.current, s.chosen) == min(inst.distance(s.current, v) for v in s.sampled)
        if len(unvisited) <= 20:
            # the sample is the whole pool: plain greedy scan
            assert set(s.sampled) == unvisited
            seen_small = True
        else:
            seen_large = True
    assert seen_small and seen_large


def test_best20_single_unvisited(fig1):
    # a parent pair where the last step must fall back with one node left
    f = Tour.from_order([0, 1, 2, 3, 4, 5, 6, 7], fig1)
    for seed in range(50):
        steps = []
        child = crossover.gx_four_best20(f, f, fig1, make_rng(seed), trace=steps)
        for s in steps:
            if s.fallback and len(s.sampled) == 1:
                assert s.chosen == s.sampled[0]
        assert sorted(child.order) == list(range(8))


def test_random_fallbacks_only_pick_unvisited():
    for name in ("gx_random", "gx_four_random"):
        hits = 0
        for inst, child, k, s in _fallback_steps(get_operator(name), n_trials=50):
            assert s.chosen in child.order[k + 1:]
            hits += 1
        assert hits > 0


def test_four_variants_fall_back_only_when_all_visited():
    for name in ("vgx", "gx_four_random", "gx_four_best20"):
        for _, _, _, s in _fallback_steps(get_operator(name), n_trials=30):
            assert all(seen for *_, seen in s.candidates)


# --- identical parents ------------------------------------------------------

def _is_arc(nodes, cycle):
    n = len(cycle)
    pos = sorted(cycle.index(v) for v in nodes)
    gaps = sum(1 for a, b in zip(pos, pos[1:] + [pos[0] + n]) if b - a > 1)
    return gaps <= 1


def test_identical_parents_igx_grows_one_arc(fig1, parents):
    # every pick is an end of the remaining chain, so the child's prefix is
    # always one contiguous arc of the parent cycle (not necessarily a rotation)
    father = parents[0]
    for s in range(8):
        child = crossover.igx(father, father, fig1, start=s)
        for k in range(1, 9):
            assert _is_arc(child.order[:k], list(father.order))
    rng = np.random.default_rng(11)
    for _ in range(100):
        inst = random_instance(25, rng)
        t = random_tour(inst, rng)
        child = crossover.igx(t, t, inst, rng)
        assert all(_is_arc(child.order[:k], list(t.order)) for k in range(1, 26))


def test_identical_parents_rotation_when_forward_is_nearer():
    # on a circle visited in order, the forward neighbour is always nearest
    import math
    pts = [(1000 * math.cos(2 * math.pi * k / 12), 1000 * math.sin(2 * math.pi * k / 12) * (1 + k / 50))
           for k in range(12)]
    inst = Instance.from_coords(pts)
    t = Tour.from_order(range(12), inst)
    child = crossover.igx(t, t, inst, start=0)
    assert child.order in (t.order, (0,) + tuple(range(11, 0, -1)))


def test_identical_parents_vgx_takes_nearer_neighbour(fig1, parents):
    father = parents[0]
    for s in range(8):
        child = crossover.vgx(father, father, fig1, start=s)
        k = father.order.index(s)
        p, q = father.order[k - 1], father.order[(k + 1) % 8]
        nearer = p if fig1.distance(s, p) <= fig1.distance(s, q) else q
        assert child.order[:2] == (s, nearer)


# --- IGX oracle -------------------------------------------------------------

def test_oracle_fig1(fig1, parents):
    assert reference_igx_oracle(*parents, fig1, 0).labels() == [1, 2, 3, 7, 6, 8, 5, 4]
    for s in range(8):
        assert reference_igx_oracle(*parents, fig1, s).order == crossover.igx(*parents, fig1, start=s).order


def test_oracle_n3_exhaustive():
    inst = Instance.from_coords([(0, 0), (5, 1), (2, 7)])
    tours = [Tour.from_order(p, inst) for p in itertools.permutations(range(3))]
    for f, m in itertools.product(tours, repeat=2):
        for s in range(3):
            assert reference_igx_oracle(f, m, inst, s).order == crossover.igx(f, m, inst, start=s).order


def test_oracle_random_30_nodes():
    rng = np.random.default_rng(99)
    for _ in range(1000):
        inst = random_instance(30, rng, scale=60)  # small grid so ties occur
        f, m = random_tour(inst, rng), random_tour(inst, rng)
        s = int(rng.integers(30))
        assert reference_igx_oracle(f, m, inst, s).order == crossover.igx(f, m, inst, start=s).order


def test_igx_probes_only_unvisited():
    rng = np.random.default_rng(3)
    for _ in range(200):
        inst = random_instance(int(rng.integers(3, 50)), rng)
        steps = []
        crossover.igx(random_tour(inst, rng), random_tour(inst, rng), inst, rng, trace=steps)
        assert len(steps) == inst.n - 1
        for s in steps:
            assert 1 <= len(s.candidates) <= 4
            assert not any(seen for *_, seen in s.candidates)


# --- validity and determinism --------------------------------------------------

@pytest.mark.parametrize("name", ALL_OPS)
def test_n4_exhaustive_validity(name):
    inst = Instance.from_coords([(0, 0), (4, 0), (4, 3), (1, 5)])
    op = get_operator(name)
    tours = [Tour.from_order(p, inst) for p in itertools.permutations(range(4))]
    for f, m in itertools.product(tours, repeat=2):
        for seed in range(100):
            child = op(f, m, inst, make_rng(seed))
            assert sorted(child.order) == [0, 1, 2, 3]
            assert child.length == Tour.from_order(child.order, inst).length


@pytest.mark.parametrize("name", ALL_OPS)
def test_n3_valid(name):
    inst = Instance.from_coords([(0, 0), (1, 0), (0, 1)])
    f, m = Tour.from_order([0, 1, 2], inst), Tour.from_order([2, 1, 0], inst)
    for seed in range(20):
        assert sorted(get_operator(name)(f, m, inst, make_rng(seed)).order) == [0, 1, 2]


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(ALL_OPS), st.integers(3, 60), st.integers(0, 2**32 - 1))
def test_validity_property(name, n, seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(n, rng, scale=100)
    child = get_operator(name)(random_tour(inst, rng), random_tour(inst, rng), inst, rng)
    assert sorted(child.order) == list(range(n))
    assert child.length == Tour.from_order(child.order, inst).length


@pytest.mark.parametrize("name", ALL_OPS)
def test_determinism(name):
    rng = np.random.default_rng(5)
    inst = random_instance(70, rng)
    f, m = random_tour(inst, rng), random_tour(inst, rng)
    a = get_operator(name)(f, m, inst, make_rng(42))
    b = get_operator(name)(f, m, inst, make_rng(42))
    assert repr(a) == repr(b)


def test_start_out_of_range(fig1, parents):
    with pytest.raises(ContractViolation):
        crossover.igx(*parents, fig1, start=8)
