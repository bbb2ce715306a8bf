"""Phase-filter measurement and the collapsed (transition) state.

The filter ``g_i(x_i) = a_i(x_i) mod 2^(n-1)`` acts on group ``i`` alone, so
the joint measurement factorises: each group is enumerated over its ``2^m``
labels and measured independently, and the survivor set is the Cartesian
product of the per-group survivor sets.

Only the exact exponents ``a(x)`` are stored.  They do not depend on the
slope, which enters only when a measurement is simulated downstream.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import SupportTooLarge
from .phase_sampler import GroupState, label_exponents

MAX_GROUP_SIZE = 26
DEFAULT_SUPPORT_CAP = 1 << 24


class Survivor(NamedTuple):
    labels: tuple[int, ...]  # per-group label, bit j of labels[i] is x_ij
    exponent: int            # a(x) mod 2^n minus the reference exponent


@dataclass(frozen=True)
class GroupSupport:
    index: int
    coefficients: tuple[int, ...]
    survivors: tuple[tuple[int, int], ...]  # (label, exact a_i(x_i))
    c: int

    @property
    def labels(self) -> list[int]:
        return [lab for lab, _ in self.survivors]


@dataclass(frozen=True)
class TransitionState:
    n: int
    m: int
    survivors: tuple[Survivor, ...]
    c: int
    reference_exponent: int
    coefficients: tuple[tuple[int, ...], ...]
    cs: tuple[int, ...]

    def flip_exponents(self) -> list[int]:
        """0 or 1 per survivor: whether its phase is ``(-1)^s`` relative to the reference."""
        half = 1 << (self.n - 1)
        return [sv.exponent // half for sv in self.survivors]


def label_bits(label: int, m: int) -> tuple[int, ...]:
    return tuple((label >> j) & 1 for j in range(m))


def bits_label(bits: Sequence[int]) -> int:
    return sum(int(b) << j for j, b in enumerate(bits))


def _label_values(coefficients: Sequence[int], n: int):
    m = len(coefficients)
    if n + m.bit_length() < 62:
        vals = np.zeros(1, dtype=np.int64)
        for a in coefficients:
            vals = np.concatenate([vals, vals + int(a)])
        return vals
    return np.array(label_exponents(coefficients), dtype=object)


def apply_phase_filter(group: GroupState, n: int, rng: np.random.Generator) -> GroupSupport:
    """Measure ``g_i`` on the uniform superposition of group ``i``'s labels."""
    m = group.m
    if m > MAX_GROUP_SIZE:
        raise ValueError(f"group of {m} qubits cannot be enumerated (max {MAX_GROUP_SIZE})")
    mod = 1 << (n - 1)
    values = _label_values(group.coefficients, n)
    residues = values % mod
    # Uniform amplitudes: P(c) = multiplicity(c) / 2^m, same as reading a uniform label.
    c = int(residues[int(rng.integers(0, len(values)))])
    idx = np.flatnonzero(residues == c)
    survivors = tuple((int(i), int(values[i])) for i in idx)
    return GroupSupport(group.index, tuple(group.coefficients), survivors, c)


def assemble_transition(supports: Sequence[GroupSupport], n: int, cap: int = DEFAULT_SUPPORT_CAP) -> TransitionState:
    size = 1
    for sup in supports:
        if not sup.survivors:
            raise ValueError(f"group {sup.index} has an empty support")
        size *= len(sup.survivors)
    if size > cap:
        raise SupportTooLarge(f"{size} survivors exceed cap {cap}")
    N = 1 << n
    raw = []
    for combo in itertools.product(*(sup.survivors for sup in supports)):
        raw.append((tuple(lab for lab, _ in combo), sum(v for _, v in combo) % N))
    ref = min(e for _, e in raw)
    survivors = tuple(Survivor(labels, e - ref) for labels, e in raw)
    return TransitionState(
        n=n,
        m=len(supports),
        survivors=survivors,
        c=sum(sup.c for sup in supports) % (1 << (n - 1)),
        reference_exponent=ref,
        coefficients=tuple(sup.coefficients for sup in supports),
        cs=tuple(sup.c for sup in supports),
    )


def survivor_tau(state: TransitionState) -> int:
    return len(state.survivors)


def generate_transition(groups: Sequence[GroupState], n: int, rng: np.random.Generator,
                        cap: int = DEFAULT_SUPPORT_CAP) -> TransitionState:
    """Filter every group on its own child stream, then assemble.

    Child streams are spawned up front, so the transcript does not depend on
    the order in which groups are processed.
    """
    children = rng.spawn(len(groups))
    supports = [apply_phase_filter(g, n, r) for g, r in zip(groups, children)]
    return assemble_transition(supports, n, cap)


def filtered_tau(groups: Sequence[GroupState], n: int, rng: np.random.Generator) -> int:
    """Survivor count of a filter run without materialising the product."""
    children = rng.spawn(len(groups))
    tau = 1
    for g, r in zip(groups, children):
        tau *= len(apply_phase_filter(g, n, r).survivors)
    return tau


# Total-congruence counting: #{x : a(x) = c mod 2^(n-1)} over all m*m bits,
# for an externally fixed c.  Meet in the middle over the two halves of the groups.

def _half_sums(coeff_rows: Sequence[Sequence[int]], n: int):
    vals = np.zeros(1, dtype=object if n >= 60 else np.int64)
    for row in coeff_rows:
        v = _label_values(row, n)
        if vals.dtype != v.dtype:
            vals, v = vals.astype(object), v.astype(object)
        vals = (vals[:, None] + v[None, :]).ravel()
    return vals % (1 << n)


def global_solution_exponents(coefficients: Sequence[Sequence[int]], c: int, n: int) -> list[int]:
    """Exponents ``a(x) mod 2^n`` of every ``x`` with ``a(x) = c mod 2^(n-1)``."""
    mod = 1 << (n - 1)
    N = 1 << n
    h = len(coefficients) // 2
    left = _half_sums(coefficients[:h], n)
    right = _half_sums(coefficients[h:], n)
    order = np.argsort(right % mod, kind="stable")
    r_sorted = right[order]
    r_res = r_sorted % mod
    need = (c - left) % mod
    lo = np.searchsorted(r_res, need, side="left")
    hi = np.searchsorted(r_res, need, side="right")
    out = []
    for i in np.flatnonzero(hi > lo):
        for j in range(lo[i], hi[i]):
            out.append(int((left[i] + r_sorted[j]) % N))
    return out


def count_global_solutions(coefficients: Sequence[Sequence[int]], c: int, n: int) -> int:
    mod = 1 << (n - 1)
    h = len(coefficients) // 2
    left = _half_sums(coefficients[:h], n) % mod
    right = np.sort(_half_sums(coefficients[h:], n) % mod)
    need = (c - left) % mod
    return int(np.sum(np.searchsorted(right, need, side="right") - np.searchsorted(right, need, side="left")))
