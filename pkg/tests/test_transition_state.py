import math
from collections import Counter

import numpy as np
import pytest

from dihedral_sv import oracles
from dihedral_sv.errors import SupportTooLarge
from dihedral_sv.phase_sampler import GroupState, random_groups
from dihedral_sv.transition_state import (
    GroupSupport,
    apply_phase_filter,
    assemble_transition,
    count_global_solutions,
    generate_transition,
    global_solution_exponents,
    label_bits,
    survivor_tau,
)


def filter_until(group, n, c, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        sup = apply_phase_filter(group, n, rng)
        if sup.c == c:
            return sup
    raise AssertionError(f"c = {c} never measured")


def test_worked_example_n4():
    # labels: 00 -> 0, x_1=1 -> 3, x_2=1 -> 5, 11 -> 8 = 0 (mod 8)
    sup = filter_until(GroupState(1, (3, 5)), 4, 0)
    assert sup.labels == [0, 3]
    assert [label_bits(l, 2) for l in sup.labels] == [(0, 0), (1, 1)]
    assert dict(sup.survivors) == {0: 0, 3: 8}


def test_worked_example_c0_frequency():
    rng = np.random.default_rng(5)
    draws = 4000
    hits = sum(apply_phase_filter(GroupState(1, (3, 5)), 4, rng).c == 0 for _ in range(draws))
    sigma = math.sqrt(draws * 0.25)
    assert abs(hits - draws / 2) < 3 * sigma


def test_zero_coefficients_all_survive():
    sup = apply_phase_filter(GroupState(1, (0, 0, 0)), 9, np.random.default_rng(1))
    assert sup.c == 0 and sup.labels == list(range(8))


def test_single_label_outcome():
    sup = filter_until(GroupState(1, (1, 2)), 4, 3)
    assert sup.labels == [3]


def test_measurement_distribution_matches_multiplicity():
    coeffs = (6, 2, 4)  # subset sums mod 8 collide heavily
    n = 4
    values = [sum(a * ((x >> j) & 1) for j, a in enumerate(coeffs)) % 8 for x in range(8)]
    mult = Counter(values)
    rng = np.random.default_rng(11)
    draws = 6000
    seen = Counter(apply_phase_filter(GroupState(1, coeffs), n, rng).c for _ in range(draws))
    for c, k in mult.items():
        p = k / 8
        assert abs(seen[c] - draws * p) < 3 * math.sqrt(draws * p * (1 - p))
    assert set(seen) <= set(mult)


def test_product_cardinality_and_tau():
    sup = filter_until(GroupState(1, (3, 5)), 4, 0)
    sup2 = GroupSupport(2, sup.coefficients, sup.survivors, sup.c)
    state = assemble_transition([sup, sup2], 4)
    assert survivor_tau(state) == 4
    assert sorted(sv.exponent for sv in state.survivors) == [0, 0, 8, 8]


def test_global_phase_elimination():
    a = GroupSupport(1, (3, 0), ((1, 3),), 3)
    b = GroupSupport(2, (0, 8), ((0, 0), (2, 8)), 0)
    state = assemble_transition([a, b], 4)
    assert state.reference_exponent == 3
    assert [sv.exponent for sv in state.survivors] == [0, 8]
    assert state.flip_exponents() == [0, 1]


def test_support_cap():
    sup = apply_phase_filter(GroupState(1, (0, 0, 0)), 9, np.random.default_rng(0))
    with pytest.raises(SupportTooLarge):
        assemble_transition([sup, sup], 9, cap=63)


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9])
def test_factorisation_matches_exhaustive_filter(n):
    rng = np.random.default_rng(40 + n)
    for _ in range(25):
        groups = random_groups(n, rng)
        state = generate_transition(groups, n, rng)
        assert survivor_tau(state) >= 1
        coeffs = [g.coefficients for g in groups]
        brute = oracles.filter_survivors(coeffs, state.cs, n)
        got = sorted((sv.labels, (sv.exponent + state.reference_exponent) % (1 << n)) for sv in state.survivors)
        assert got == brute
        half = 1 << (n - 1)
        assert {sv.exponent for sv in state.survivors} <= {0, half}
        assert all((e - state.c) % half == 0 for _, e in brute)


def test_transcripts_independent_of_processing_order():
    groups = random_groups(16, np.random.default_rng(3))
    a = generate_transition(groups, 16, np.random.default_rng(8))
    b = generate_transition(groups, 16, np.random.default_rng(8))
    assert a == b
    # each group's outcome depends only on its own child stream
    children = np.random.default_rng(8).spawn(len(groups))
    rev = [apply_phase_filter(g, 16, r) for g, r in reversed(list(zip(groups, children)))]
    assert tuple(s.c for s in reversed(rev)) == a.cs


def test_tau_below_two_is_common_at_n16():
    rng = np.random.default_rng(0)
    taus = [survivor_tau(generate_transition(random_groups(16, rng), 16, rng)) for _ in range(300)]
    assert min(taus) >= 1
    assert sum(t < 2 for t in taus) > 250


@pytest.mark.parametrize("n", [4, 9, 16])
def test_global_counting_matches_enumeration(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        coeffs = [g.coefficients for g in random_groups(n, rng)]
        c = int(rng.integers(0, 1 << (n - 1)))
        exps = oracles.total_solution_exponents(coeffs, c, n)
        assert count_global_solutions(coeffs, c, n) == len(exps)
        assert sorted(global_solution_exponents(coeffs, c, n)) == exps


def test_wide_register_filter():
    n = 100
    rng = np.random.default_rng(2)
    groups = random_groups(n, rng)
    state = generate_transition(groups, n, rng)
    for sv in state.survivors:
        total = sum(sum(a * b for a, b in zip(g.coefficients, label_bits(l, g.m))) for g, l in zip(groups, sv.labels))
        assert (total - state.c) % (1 << (n - 1)) == 0
