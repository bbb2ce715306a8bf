import functools

import numpy as np
import pytest
from scipy.stats import chisquare

from dihedral_sv.dihedral_core import HiddenInstance
from dihedral_sv.errors import ArityMismatch
from dihedral_sv.phase_sampler import (
    PhaseState,
    build_groups,
    group_count,
    materialize,
    random_groups,
    sample_phase_state,
    uniform_residue,
)


@pytest.mark.parametrize("n, m", [(2, 2), (4, 2), (5, 3), (9, 3), (10, 4), (16, 4), (17, 5), (676, 26)])
def test_group_count(n, m):
    assert group_count(n) == m


def test_sampling_is_reproducible():
    inst = HiddenInstance(12, 5)
    r1, r2 = np.random.default_rng(77), np.random.default_rng(77)
    assert [sample_phase_state(inst, r1).k for _ in range(50)] == [sample_phase_state(inst, r2).k for _ in range(50)]


def test_shortcut_uniform():
    inst = HiddenInstance(4, 3)
    rng = np.random.default_rng(31)
    counts = np.bincount([sample_phase_state(inst, rng).k for _ in range(16000)], minlength=16)
    assert chisquare(counts).pvalue > 0.01


def test_k_zero_state_has_unit_phase():
    st = PhaseState(4, 0)
    for s in range(16):
        a0, a1 = st.amplitudes(s)
        assert abs(a1 / a0 - 1) < 1e-12


def test_full_path_selectable():
    inst = HiddenInstance(5, 9)
    st = sample_phase_state(inst, np.random.default_rng(0), method="full")
    assert 0 <= st.k < 32
    with pytest.raises(ValueError):
        sample_phase_state(inst, np.random.default_rng(0), method="nope")


def test_build_groups_packing():
    groups = build_groups([PhaseState(4, k) for k in (3, 5, 2, 7)], 4)
    assert [g.coefficients for g in groups] == [(3, 5), (2, 7)]
    assert [g.index for g in groups] == [1, 2]


def test_build_groups_n9():
    groups = build_groups([PhaseState(9, k) for k in range(9)], 9)
    assert len(groups) == 3 and all(g.m == 3 for g in groups)


def test_build_groups_arity():
    with pytest.raises(ArityMismatch):
        build_groups([PhaseState(9, 0)] * 8, 9)


def test_zero_coefficients_uniform_state():
    groups = build_groups([PhaseState(4, 0)] * 4, 4)
    amps = materialize(groups, 4, s=5)
    assert np.allclose(amps, np.full(16, 0.25))


@pytest.mark.parametrize("n", [4, 6, 8])
def test_representation_faithfulness(n):
    rng = np.random.default_rng(n)
    s = int(rng.integers(0, 1 << n))
    m = group_count(n)
    states = [PhaseState(n, int(rng.integers(0, 1 << n))) for _ in range(m * m)]
    groups = build_groups(states, n)
    # Explicit tensor product; group 1 is most significant, and inside a group
    # label bit j is qubit j, so qubit order within a block is reversed.
    factors = []
    for g in range(m):
        for j in reversed(range(m)):
            factors.append(np.array(states[g * m + j].amplitudes(s)))
    explicit = functools.reduce(np.kron, factors)
    assert np.allclose(materialize(groups, n, s), explicit, atol=1e-9)


def test_random_groups_and_wide_residues():
    rng = np.random.default_rng(3)
    groups = random_groups(100, rng)
    assert len(groups) == 10
    assert all(0 <= a < 2 ** 100 for g in groups for a in g.coefficients)
    assert max(uniform_residue(rng, 200) for _ in range(20)).bit_length() > 150
