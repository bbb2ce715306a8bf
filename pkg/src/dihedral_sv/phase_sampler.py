"""Phase states ``|0> + e^{2 pi i k s / 2^n}|1>`` and their packing into groups."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dihedral_core import HiddenInstance, coset_fourier_sample, quantum_scope
from .errors import ArityMismatch


@dataclass(frozen=True)
class PhaseState:
    n: int
    k: int

    def amplitudes(self, s: int) -> tuple[complex, complex]:
        """Normalised amplitudes for a given slope (quantum side only)."""
        r = 1 / math.sqrt(2)
        return complex(r), complex(r * np.exp(2j * np.pi * ((self.k * s) % (1 << self.n)) / (1 << self.n)))


@dataclass(frozen=True)
class GroupState:
    """Group ``index`` (1-based) holding coefficients ``(a_i1, ..., a_im)``.

    Label ``x_i`` has bit ``j`` equal to ``x_ij``; its phase exponent is
    ``sum_j a_ij x_ij``.
    """

    index: int
    coefficients: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.coefficients)


def group_count(n: int) -> int:
    """m = ceil(sqrt(n))."""
    return math.isqrt(n - 1) + 1 if n > 0 else 0


def uniform_residue(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in ``[0, 2^n)`` for any width."""
    if n <= 62:
        return int(rng.integers(0, 1 << n))
    return int.from_bytes(rng.bytes((n + 7) // 8), "little") & ((1 << n) - 1)


def sample_phase_state(inst: HiddenInstance, rng: np.random.Generator, method: str = "shortcut") -> PhaseState:
    """Draw one phase state; ``k`` is uniform on ``[0, 2^n)``.

    ``method="full"`` routes through the brute-force coset Fourier simulation
    (n <= 10), whose ``k`` distribution is identical.
    """
    if method == "shortcut":
        return PhaseState(inst.n, uniform_residue(rng, inst.n))
    if method == "full":
        with quantum_scope():
            return PhaseState(inst.n, coset_fourier_sample(inst, rng).k)
    raise ValueError(f"unknown sampling method {method!r}")


def build_groups(states: Sequence[PhaseState], n: int) -> list[GroupState]:
    m = group_count(n)
    if len(states) != m * m:
        raise ArityMismatch(f"need {m * m} phase states for n={n}, got {len(states)}")
    ks = [st.k for st in states]
    return [GroupState(i + 1, tuple(ks[i * m:(i + 1) * m])) for i in range(m)]


def random_groups(n: int, rng: np.random.Generator) -> list[GroupState]:
    """Groups built from ``m*m`` shortcut-sampled indices (no slope needed)."""
    m = group_count(n)
    return build_groups([PhaseState(n, uniform_residue(rng, n)) for _ in range(m * m)], n)


def coefficient_matrix(groups: Sequence[GroupState]) -> list[list[int]]:
    return [list(g.coefficients) for g in groups]


def label_exponents(coefficients: Sequence[int]) -> list[int]:
    """Exact exponents ``a_i(x_i)`` for every label ``x_i`` in ``[0, 2^m)``."""
    values = [0]
    for a in coefficients:
        values = values + [v + a for v in values]
    return values


def materialize(groups: Sequence[GroupState], n: int, s: int) -> np.ndarray:
    """Full amplitude vector of the joint group state (validation only).

    Index layout: group 1's label is the most significant block, and within
    a group bit ``j`` of the label is ``x_ij``.
    """
    N = 1 << n
    exps = np.array([0], dtype=object)
    for g in groups:
        vals = np.array(label_exponents(g.coefficients), dtype=object)
        exps = (exps[:, None] + vals[None, :]).ravel()
    phases = np.array([(int(e) * s) % N for e in exps], dtype=float)
    amps = np.exp(2j * np.pi * phases / N)
    return amps / np.sqrt(len(amps))
