"""Low-density subset sum by lattice reduction (algorithm SV).

An instance ``sum a_i x_i = M`` is embedded in the lattice with basis rows
``b_i = (e_i, lam * a_i)`` and ``b_{m+1} = (0, ..., 0, lam * M)``.  A solution
``x`` is the short vector ``sum x_i b_i - b_{m+1} = (x, 0)``.  Each reduced
row and its negation is scanned for that 0/1 pattern; the same is done for the
complementary instance (target ``sum a_i - M``), whose solutions are bitwise
complements.  Every reported solution is checked by substitution.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DegenerateWeights, TooLarge
from .lattice import lll_reduce

DEFAULT_DELTA = Fraction(3, 4)
BRUTE_FORCE_MAX_M = 24


@dataclass(frozen=True)
class SubsetSumInstance:
    weights: tuple[int, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "target", int(self.target))
        if not self.weights:
            raise ValueError("an instance needs at least one weight")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        if self.target < 0:
            raise ValueError("target must be non-negative")

    @property
    def m(self) -> int:
        return len(self.weights)

    def complement(self) -> "SubsetSumInstance":
        return SubsetSumInstance(self.weights, sum(self.weights) - self.target)

    def evaluate(self, x: Sequence[int]) -> int:
        return sum(w * xi for w, xi in zip(self.weights, x))

    def is_solution(self, x: Sequence[int]) -> bool:
        return len(x) == self.m and all(xi in (0, 1) for xi in x) and self.evaluate(x) == self.target


@dataclass(frozen=True)
class SVSolution:
    x: tuple[int, ...]
    shift: Optional[int] = None  # t in M = c + t * 2^(n-1), set by solve_congruence


@dataclass(frozen=True)
class LatticeBasis:
    rows: tuple[tuple[int, ...], ...]
    scale: int


def density(inst: SubsetSumInstance) -> float:
    """``m / log2(max a_i)``."""
    top = max(inst.weights)
    if top < 2:
        raise DegenerateWeights("density needs a weight of at least 2")
    return inst.m / math.log2(top)


def default_scale(m: int, bits: int) -> int:
    """Smallest power of two exceeding ``sqrt(m + 1) * 2^bits``."""
    # 2^e > sqrt(m+1) 2^bits  <=>  4^(e - bits) > m + 1
    e = bits
    while 4 ** (e - bits) <= m + 1:
        e += 1
    return 1 << e


def resolve_scale(policy: Union[str, int, None], m: int, bits: int) -> int:
    if policy in (None, "auto"):
        return default_scale(m, bits)
    lam = int(policy)
    if lam < 1:
        raise ValueError(f"lattice scale must be positive, got {lam}")
    return lam


def build_lo_lattice(inst: SubsetSumInstance, scale: int) -> LatticeBasis:
    m = inst.m
    rows = [tuple([int(i == j) for j in range(m)] + [scale * inst.weights[i]]) for i in range(m)]
    rows.append(tuple([0] * m + [scale * inst.target]))
    return LatticeBasis(tuple(rows), scale)


def _scan(rows: Iterable[Sequence[int]], m: int) -> list[tuple[int, ...]]:
    found = []
    for row in rows:
        if row[m] != 0:
            continue
        for v in (row, [-x for x in row]):
            head = v[:m]
            if all(x in (0, 1) for x in head) and any(head):
                found.append(tuple(head))
    return found


def sv_pass(inst: SubsetSumInstance, delta=DEFAULT_DELTA, scale=None) -> list[tuple[int, ...]]:
    """One reduction-and-scan pass on ``inst`` (no complement)."""
    if inst.target == 0:
        return [tuple([0] * inst.m)]
    if inst.target > sum(inst.weights):
        return []
    bits = max(max(inst.weights), inst.target).bit_length()
    lattice = build_lo_lattice(inst, resolve_scale(scale, inst.m, bits))
    reduced = lll_reduce(lattice.rows, delta)
    return [x for x in dict.fromkeys(_scan(reduced, inst.m)) if inst.is_solution(x)]


def sv_solve(inst: SubsetSumInstance, delta=DEFAULT_DELTA, scale=None) -> list[SVSolution]:
    """Run SV on the instance and on its complement.

    Returns the distinct verified solutions, possibly none: the method is
    heuristic and an empty list is the "not found" outcome.
    """
    found = sv_pass(inst, delta, scale)
    if inst.target <= sum(inst.weights):
        found += [tuple(1 - b for b in x) for x in sv_pass(inst.complement(), delta, scale)]
    return [SVSolution(x) for x in dict.fromkeys(found) if inst.is_solution(x)]


def solve_congruence(weights: Sequence[int], c: int, n: int, delta=DEFAULT_DELTA, scale=None) -> list[SVSolution]:
    """All solutions SV finds of ``sum a_j x_j = c (mod 2^(n-1))``.

    Each shift ``t`` in ``[0, 2m)`` gives the exact instance with target
    ``c + t 2^(n-1)``.  Zero weights carry no information, so they are
    removed before the lattice step and both of their values are restored
    afterwards.  With ``scale=None`` the lattice scale is the smallest power
    of two exceeding ``sqrt(m' + 1) 2^n``.
    """
    weights = [int(w) for w in weights]
    mod = 1 << (n - 1)
    m = len(weights)
    live = [j for j, w in enumerate(weights) if w != 0]
    dead = [j for j, w in enumerate(weights) if w == 0]
    if scale is None and live:
        scale = default_scale(len(live), n)

    out: dict[tuple[int, ...], SVSolution] = {}
    total = sum(weights)
    for t in range(2 * m):
        target = c + t * mod
        if target > total:
            break
        if live:
            sub = SubsetSumInstance([weights[j] for j in live], target)
            partial = [s.x for s in sv_solve(sub, delta, scale)]
        else:
            partial = [()] if target == 0 else []
        for px in partial:
            for fill in itertools.product((0, 1), repeat=len(dead)):
                x = [0] * m
                for j, b in zip(live, px):
                    x[j] = b
                for j, b in zip(dead, fill):
                    x[j] = b
                x = tuple(x)
                if sum(w * b for w, b in zip(weights, x)) == target and x not in out:
                    out[x] = SVSolution(x, t)
    return list(out.values())


def brute_force_subset_sum(inst: SubsetSumInstance) -> list[tuple[int, ...]]:
    """Every 0/1 solution, by exhaustive enumeration of all ``2^m`` subsets."""
    m = inst.m
    if m > BRUTE_FORCE_MAX_M:
        raise TooLarge(f"brute force supports m <= {BRUTE_FORCE_MAX_M}, got {m}")
    if max(max(inst.weights), inst.target).bit_length() + m < 62:
        sums = np.zeros(1, dtype=np.int64)
        for w in inst.weights:
            sums = np.concatenate([sums, sums + w])
        hits = np.flatnonzero(sums == inst.target)
    else:
        sums = [0]
        for w in inst.weights:
            sums = sums + [v + w for v in sums]
        hits = [i for i, v in enumerate(sums) if v == inst.target]
    return [tuple((int(i) >> j) & 1 for j in range(m)) for i in hits]


def brute_force_congruence(weights: Sequence[int], c: int, n: int) -> list[SVSolution]:
    """Every ``x`` with ``sum a_j x_j = c (mod 2^(n-1))``, with its shift ``t``."""
    m = len(weights)
    if m > BRUTE_FORCE_MAX_M:
        raise TooLarge(f"brute force supports m <= {BRUTE_FORCE_MAX_M}, got {m}")
    mod = 1 << (n - 1)
    out = []
    for x in itertools.product((0, 1), repeat=m):
        x = x[::-1]  # ascending label order: bit j of the label is x_j
        v = sum(int(w) * b for w, b in zip(weights, x))
        if v % mod == c % mod:
            out.append(SVSolution(tuple(x), (v - c) // mod))
    return out
