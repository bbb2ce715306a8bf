"""Exhaustive enumerations used to cross-check the factorised fast paths.

These enumerate the full ``m*m``-bit label space directly, bit ``j`` of the
flat label being coefficient ``j`` of the row-major coefficient matrix.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

BRUTE_FORCE_MAX_BITS = 25


def _flat_exponents(coefficients: Sequence[Sequence[int]]) -> np.ndarray:
    flat = [int(a) for row in coefficients for a in row]
    if len(flat) > BRUTE_FORCE_MAX_BITS:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_BITS} label bits, got {len(flat)}")
    exps = np.zeros(1 << len(flat), dtype=np.int64)
    for j, a in enumerate(flat):
        exps[1 << j: 1 << (j + 1)] = exps[: 1 << j] + a
    return exps


def total_solution_exponents(coefficients: Sequence[Sequence[int]], c: int, n: int) -> list[int]:
    """Sorted ``a(x) mod 2^n`` over every ``x`` with ``a(x) = c (mod 2^(n-1))``."""
    exps = _flat_exponents(coefficients)
    hits = exps[exps % (1 << (n - 1)) == c]
    return sorted(int(e) % (1 << n) for e in hits)


def filter_survivors(coefficients: Sequence[Sequence[int]], cs: Sequence[int], n: int) -> list[tuple[tuple[int, ...], int]]:
    """Every ``x`` with ``a_i(x_i) = c_i (mod 2^(n-1))`` for all groups.

    Returns ``(per-group labels, a(x) mod 2^n)`` pairs in ascending label order.
    """
    m = len(coefficients[0])
    mod = 1 << (n - 1)
    width = [len(row) for row in coefficients]
    ok = np.ones(1 << sum(width), dtype=bool)
    idx = np.arange(1 << sum(width), dtype=np.int64)
    offset = 0
    total = np.zeros_like(idx)
    for row, ci in zip(coefficients, cs):
        part = np.zeros_like(idx)
        for j, a in enumerate(row):
            part += ((idx >> (offset + j)) & 1) * int(a)
        ok &= part % mod == ci
        total += part
        offset += len(row)
    out = []
    for flat in np.flatnonzero(ok):
        labels = tuple((int(flat) >> (i * m)) & ((1 << m) - 1) for i in range(len(coefficients)))
        out.append((labels, int(total[flat]) % (1 << n)))
    return sorted(out)
