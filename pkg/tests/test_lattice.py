from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dihedral_sv.errors import DependentRows
from dihedral_sv.lattice import check_lll, gram_determinant, gram_schmidt, lll_reduce, same_lattice


def test_identity_is_fixed():
    assert lll_reduce([[1, 0], [0, 1]]) == [[1, 0], [0, 1]]


def test_size_reduction_example():
    assert lll_reduce([[1, 0], [3, 1]]) == [[1, 0], [0, 1]]


def test_classic_three_dimensional_example():
    basis = [[1, 1, 1], [-1, 0, 2], [3, 5, 6]]
    out = lll_reduce(basis)
    assert check_lll(out) == []
    assert same_lattice(basis, out)
    assert out[0] == [0, 1, 0]


def random_basis(rng, dim, bound=50):
    while True:
        b = rng.integers(-bound, bound + 1, size=(dim, dim)).tolist()
        if gram_determinant(b) != 0:
            return b


def test_random_bases_reduce():
    rng = np.random.default_rng(6)
    for _ in range(40):
        b = random_basis(rng, 6)
        out = lll_reduce(b)
        assert check_lll(out) == []
        assert gram_determinant(out) == gram_determinant(b)
        assert same_lattice(b, out)


def test_rectangular_knapsack_like_basis():
    rng = np.random.default_rng(1)
    a = [int(v) for v in rng.integers(1, 1 << 40, size=8)]
    basis = [[int(i == j) for j in range(8)] + [a[i] << 10] for i in range(8)]
    out = lll_reduce(basis)
    assert check_lll(out) == []
    assert gram_determinant(out) == gram_determinant(basis)


@pytest.mark.parametrize("delta", [Fraction(1, 2), Fraction(99, 100)])
def test_other_deltas(delta):
    rng = np.random.default_rng(9)
    b = random_basis(rng, 5)
    out = lll_reduce(b, delta)
    assert check_lll(out, delta) == []
    assert same_lattice(b, out)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7).flatmap(
    lambda d: st.lists(st.lists(st.integers(-1000, 1000), min_size=d, max_size=d), min_size=d, max_size=d)))
def test_reduction_properties(basis):
    if gram_determinant(basis) == 0:
        with pytest.raises(DependentRows):
            lll_reduce(basis)
        return
    out = lll_reduce(basis)
    assert check_lll(out) == []
    assert gram_determinant(out) == gram_determinant(basis)
    assert same_lattice(basis, out)
    # first vector obeys the LLL approximation bound |b1|^2 <= 2^(d-1) lambda_1^2 <= 2^(d-1) |b*_i|^2
    _, _, norms = gram_schmidt(out)
    assert sum(x * x for x in out[0]) <= 2 ** (len(out) - 1) * min(norms)


def test_dependent_rows():
    with pytest.raises(DependentRows):
        lll_reduce([[1, 2], [2, 4]])
    with pytest.raises(DependentRows):
        lll_reduce([[0, 0], [1, 0]])


@pytest.mark.parametrize("delta", [Fraction(1, 4), 1, Fraction(3, 2)])
def test_bad_delta(delta):
    with pytest.raises(ValueError):
        lll_reduce([[1, 0], [0, 1]], delta)


def test_verifier_detects_unreduced():
    assert check_lll([[1, 0], [3, 1]])
    assert check_lll([[10, 0], [0, 1]])


def test_same_lattice_rejects_sublattice():
    assert not same_lattice([[1, 0], [0, 1]], [[2, 0], [0, 1]])
