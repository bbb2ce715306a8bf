import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dihedral_sv.errors import DegenerateWeights, TooLarge
from dihedral_sv.sv_solver import (
    SubsetSumInstance,
    brute_force_congruence,
    brute_force_subset_sum,
    build_lo_lattice,
    default_scale,
    density,
    solve_congruence,
    sv_solve,
)


def test_density_example():
    assert density(SubsetSumInstance((1, 2, 3, 4, 1 << 10), 0)) == pytest.approx(0.5)
    with pytest.raises(DegenerateWeights):
        density(SubsetSumInstance((1, 1), 1))


def test_instance_validation():
    for weights, target in [((), 0), ((0, 1), 1), ((-2, 1), 1), ((1,), -1)]:
        with pytest.raises(ValueError):
            SubsetSumInstance(weights, target)


def test_lattice_construction():
    lat = build_lo_lattice(SubsetSumInstance((3, 5), 8), 10)
    assert lat.rows == ((1, 0, 30), (0, 1, 50), (0, 0, 80))


def test_default_scale():
    assert default_scale(3, 4) == 64  # sqrt(4) * 16 = 32, strictly exceeded by 64
    assert default_scale(1, 0) == 2
    for m, bits in [(10, 100), (80, 32)]:
        lam = default_scale(m, bits)
        assert lam > math.sqrt(m + 1) * 2 ** bits >= lam // 2


def test_two_solutions_found():
    sols = {s.x for s in sv_solve(SubsetSumInstance((3, 5, 8), 8))}
    assert sols == {(1, 1, 0), (0, 0, 1)}


def test_full_sum_via_complement():
    inst = SubsetSumInstance((7, 11, 19, 23), 60)
    assert [s.x for s in sv_solve(inst)] == [(1, 1, 1, 1)]


def test_zero_target():
    assert [s.x for s in sv_solve(SubsetSumInstance((4, 9), 0))] == [(0, 0)]


def test_no_solution_is_empty():
    assert sv_solve(SubsetSumInstance((2, 4, 6), 5)) == []
    assert sv_solve(SubsetSumInstance((2, 4, 6), 13)) == []


def test_solve_congruence_example():
    found = {(s.x, s.shift) for s in solve_congruence((3, 5), 0, 4)}
    assert found == {((0, 0), 0), ((1, 1), 1)}


def test_solve_congruence_empty():
    assert solve_congruence((2, 4), 1, 4) == []


def test_solve_congruence_zero_weights():
    found = {s.x for s in solve_congruence((0, 3, 0), 3, 5)}
    assert found == {(a, 1, b) for a in (0, 1) for b in (0, 1)}


def test_brute_force_examples():
    assert sorted(brute_force_subset_sum(SubsetSumInstance((3, 5, 8), 8))) == [(0, 0, 1), (1, 1, 0)]
    assert brute_force_subset_sum(SubsetSumInstance((2, 4), 3)) == []
    big = SubsetSumInstance((1 << 70, 3, 1 << 70), (1 << 71) + 3)
    assert brute_force_subset_sum(big) == [(1, 1, 1)]
    with pytest.raises(TooLarge):
        brute_force_subset_sum(SubsetSumInstance(tuple(range(1, 26)), 5))


def test_brute_force_congruence_matches_definition():
    sols = brute_force_congruence((3, 5, 6), 3, 4)
    expected = [x for x in itertools.product((0, 1), repeat=3)
                if (3 * x[0] + 5 * x[1] + 6 * x[2]) % 8 == 3]
    assert sorted(s.x for s in sols) == sorted(expected)
    for s in sols:
        assert 3 * s.x[0] + 5 * s.x[1] + 6 * s.x[2] == 3 + 8 * s.shift


@pytest.mark.parametrize("bits", [8, 20, 40])
def test_containment_random(bits):
    rng = np.random.default_rng(bits)
    for _ in range(40):
        m = int(rng.integers(2, 13))
        weights = [int(w) for w in rng.integers(1, 1 << bits, size=m)]
        x = rng.integers(0, 2, size=m)
        inst = SubsetSumInstance(weights, int(np.dot(weights, x)))
        exact = set(brute_force_subset_sum(inst))
        found = {s.x for s in sv_solve(inst)}
        assert found <= exact
        assert all(inst.is_solution(v) for v in found)


@pytest.mark.parametrize("n", [4, 9, 16])
def test_congruence_containment(n):
    rng = np.random.default_rng(n)
    m = math.isqrt(n - 1) + 1
    for _ in range(30):
        weights = [int(w) for w in rng.integers(0, 1 << n, size=m)]
        c = int(rng.integers(0, 1 << (n - 1)))
        exact = {(s.x, s.shift) for s in brute_force_congruence(weights, c, n)}
        found = {(s.x, s.shift) for s in solve_congruence(weights, c, n)}
        assert found <= exact


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 10 ** 6), min_size=1, max_size=10), st.data())
def test_complement_symmetry(weights, data):
    x = data.draw(st.lists(st.integers(0, 1), min_size=len(weights), max_size=len(weights)))
    inst = SubsetSumInstance(weights, sum(w * b for w, b in zip(weights, x)))
    comp = inst.complement()
    assert {tuple(1 - b for b in s) for s in brute_force_subset_sum(inst)} == set(brute_force_subset_sum(comp))
    for sol in sv_solve(inst):
        assert comp.is_solution(tuple(1 - b for b in sol.x))


def test_low_density_planted_recovery():
    rng = np.random.default_rng(21)
    hits = 0
    for _ in range(30):
        weights = [int.from_bytes(rng.bytes(13), "big") % (1 << 100) or 1 for _ in range(10)]
        x = tuple(int(b) for b in rng.integers(0, 2, size=10))
        inst = SubsetSumInstance(weights, sum(w * b for w, b in zip(weights, x)))
        assert density(inst) < 0.6463
        hits += x in {s.x for s in sv_solve(inst)}
    assert hits >= 27
