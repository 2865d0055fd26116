import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmbp.bnb import PartialAssignment, Side, branching_order, solve_bnb, swap_local_search, upper_bound
from mmbp.enumeration import _Scorer, candidate_count, solve_enumeration
from mmbp.generate import GenConfig, generate
from mmbp.graph import Bisection, Instance, cut_weight, parse_instance, prefix_instance
from mmbp.result import OPTIMAL, TIME_LIMIT

from oracles import best_completion, brute_force, instances, naive_sums


def empty_instance(n, k=2):
    return Instance(n, k, ())


# -- enumeration ---------------------------------------------------------------


def test_enumeration_k4(k4):
    res = solve_enumeration(k4)
    assert res.status == OPTIMAL
    assert res.best_value == 8000
    assert res.best_bisection.members == (1, 4)
    assert res.explored == 3


def test_enumeration_k4_first_coordinate(k4):
    # first coordinates: {1,2} -> 6, {1,3} -> 10, {1,4} -> 8
    one = prefix_instance(k4, 1)
    assert cut_weight(one, [1, 4]).weight == 8000
    res = solve_enumeration(one)
    assert (res.best_value, res.best_bisection.members) == (10000, (1, 3)) == brute_force(one)


@pytest.mark.parametrize("n", [2, 4, 8, 12])
def test_enumeration_zero_edges(n):
    res = solve_enumeration(empty_instance(n))
    assert res.best_value == 0
    assert res.explored == math.comb(n - 1, n // 2 - 1) == candidate_count(n)
    assert res.best_bisection.members == tuple(range(1, n // 2 + 1))


def test_two_vertices():
    inst = parse_instance("2 1 1\n1 2 4.500\n")
    assert solve_enumeration(inst).best_value == 4500
    assert solve_bnb(inst).best_value == 4500


@settings(max_examples=80, deadline=None)
@given(instances(max_n=10))
def test_enumeration_matches_brute_force(inst):
    res = solve_enumeration(inst)
    assert (res.best_value, res.best_bisection.members) == brute_force(inst)


def test_batch_scores_equal_direct_evaluation():
    inst = generate(GenConfig(10, 30, 4, seed=11))
    combos = np.array(list(itertools.combinations(range(2, 11), 4)))
    scorer = _Scorer(inst)
    for row in combos:
        value, _ = scorer(row[None, :])
        assert value == min(naive_sums(inst, [1, *row.tolist()]))


def test_int64_path_matches_float_path():
    inst = generate(GenConfig(10, 30, 3, seed=4))
    scorer = _Scorer(inst)
    scorer.w = inst.weight_matrix  # force the integer route
    batch = np.array(list(itertools.combinations(range(2, 11), 4)))
    assert scorer(batch) == _Scorer(inst)(batch)


def test_enumeration_worker_count_does_not_matter():
    inst = generate(GenConfig(16, 60, 5, seed=8))
    a = solve_enumeration(inst, jobs=1)
    b = solve_enumeration(inst, jobs=4)
    assert (a.best_value, a.best_bisection, a.explored) == (b.best_value, b.best_bisection, b.explored)


def test_enumeration_tie_break_is_lexicographic():
    # perfect matching 1-2, 3-4, 5-6: many bisections cut all three edges
    inst = parse_instance("6 3 1\n1 2 1.000\n3 4 1.000\n5 6 1.000\n")
    res = solve_enumeration(inst)
    assert res.best_value == 3000
    assert res.best_bisection.members == (1, 3, 5)


@pytest.mark.parametrize("jobs", [1, 3])
def test_enumeration_time_limit(jobs):
    inst = generate(GenConfig(26, 80, 3, seed=1))
    res = solve_enumeration(inst, time_limit=0.0, jobs=jobs)
    assert res.status == TIME_LIMIT
    assert res.explored < candidate_count(26)


def test_enumeration_time_limit_keeps_incumbent():
    inst = generate(GenConfig(30, 100, 3, seed=1))
    res = solve_enumeration(inst, time_limit=0.3)
    assert res.status == TIME_LIMIT
    assert 0 < res.explored < candidate_count(30)
    assert cut_weight(inst, res.best_bisection).weight == res.best_value
    assert res.time_total < 0.3 + 1.0


# -- bound ---------------------------------------------------------------------


def test_bound_all_free(k4):
    pa = PartialAssignment.from_sides(k4, {})
    assert upper_bound(k4, pa) == min(k4.coordinate_totals) == 12000


def test_bound_all_assigned_is_exact(k4):
    pa = PartialAssignment.from_sides(k4, {1: Side.IN, 2: Side.OUT, 3: Side.OUT, 4: Side.IN})
    assert pa.fixed_cut_sums == (8000, 8000)
    assert upper_bound(k4, pa) == 8000


def test_bound_with_full_side_is_exact(k4):
    pa = PartialAssignment.from_sides(k4, {1: Side.IN, 2: Side.IN})
    assert upper_bound(k4, pa) == cut_weight(k4, [1, 2]).weight == 6000


def test_partial_assignment_rejects_unbalanced(k4):
    with pytest.raises(ValueError):
        PartialAssignment.from_sides(k4, {1: Side.IN, 2: Side.IN, 3: Side.IN})


@settings(max_examples=150, deadline=None)
@given(instances(max_n=10, min_n=2), st.data())
def test_bound_is_sound(inst, data):
    n, half = inst.vertex_count, inst.vertex_count // 2
    order = data.draw(st.permutations(range(1, n + 1)))
    fixed = data.draw(st.integers(0, n))
    n_in = data.draw(st.integers(max(0, fixed - half), min(fixed, half)))
    assigned = {v: i < n_in for i, v in enumerate(order[:fixed])}
    pa = PartialAssignment.from_sides(inst, {v: Side.IN if s else Side.OUT for v, s in assigned.items()})
    assert upper_bound(inst, pa) >= best_completion(inst, assigned)


# -- branch and bound ----------------------------------------------------------


def test_bnb_k4(k4):
    res = solve_bnb(k4)
    assert res.status == OPTIMAL
    assert (res.best_value, res.best_bisection.members) == (8000, (1, 4))


@pytest.mark.parametrize("n", [2, 4, 10])
def test_bnb_zero_edges_stops_at_root(n):
    res = solve_bnb(empty_instance(n))
    assert res.best_value == 0
    assert res.explored == 1
    assert res.stats["pruned_by_bound"] + res.stats["pruned_by_balance"] == 1


def test_bnb_matches_enumeration_n12():
    inst = generate(GenConfig(12, 20, 5, seed=2024))
    a, b = solve_enumeration(inst), solve_bnb(inst)
    assert (b.best_value, b.best_bisection) == (a.best_value, a.best_bisection)
    assert (a.best_value, a.best_bisection.members) == brute_force(inst)


@settings(max_examples=80, deadline=None)
@given(instances(max_n=10), st.booleans())
def test_bnb_matches_brute_force(inst, local_search):
    res = solve_bnb(inst, local_search=local_search)
    assert (res.best_value, res.best_bisection.members) == brute_force(inst)


def test_bnb_tie_break_is_lexicographic():
    inst = parse_instance("6 3 1\n5 6 1.000\n3 4 1.000\n1 2 1.000\n")
    assert solve_bnb(inst).best_bisection.members == (1, 3, 5)
    assert solve_bnb(inst, local_search=False).best_bisection.members == (1, 3, 5)


def test_bnb_explores_no_more_than_full_tree():
    inst = generate(GenConfig(12, 40, 3, seed=5))
    res = solve_bnb(inst)
    # unpruned tree below the anchored root: sum over depths of 2^(depth-1)
    assert res.explored <= 2 ** (inst.vertex_count) - 1


def test_branching_order():
    inst = parse_instance("4 2 1\n1 2 1.000\n3 4 5.000\n")
    assert branching_order(inst) == [1, 3, 4, 2]


def test_local_search_never_worsens():
    for seed in range(10):
        inst = generate(GenConfig(14, 40, 3, seed=seed))
        start = tuple(range(1, 8))
        improved = swap_local_search(inst, start)
        Bisection(improved, 14)  # raises unless canonical and balanced
        assert cut_weight(inst, improved).weight >= cut_weight(inst, start).weight


def test_bnb_time_limit():
    inst = generate(GenConfig(40, 200, 5, seed=1))
    res = solve_bnb(inst, time_limit=0.2)
    assert res.status == TIME_LIMIT
    assert cut_weight(inst, res.best_bisection).weight == res.best_value
    assert res.time_total < 0.2 + 1.0
