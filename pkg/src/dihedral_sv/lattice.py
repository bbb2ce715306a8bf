"""Exact integer LLL reduction and an independent rational verifier.

The reduction is the all-integer variant: it tracks the Gram determinants
``d_i = prod_{j<i} |b*_j|^2`` and the scaled coefficients
``lam[k][j] = d_{j+1} mu_{k,j}``, all of which are integers, so no rational
or floating-point arithmetic is ever performed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DependentRows

Basis = list[list[int]]


def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(u, v))


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> Basis:
    """LLL-reduce the rows of ``basis`` with Lovász parameter ``delta``.

    Returns a new basis of the same lattice which is size-reduced
    (``|mu| <= 1/2``) and satisfies the Lovász condition for ``delta``.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError(f"delta must lie in (1/4, 1), got {delta}")
    p, q = delta.numerator, delta.denominator

    b = [[int(x) for x in row] for row in basis]
    n = len(b)
    if n == 0:
        return b
    d = [1] + [0] * n  # d[i + 1] belongs to row i
    lam = [[0] * n for _ in range(n)]

    d[1] = _dot(b[0], b[0])
    if d[1] == 0:
        raise DependentRows("row 0 is zero")

    def reduce(k: int, l: int) -> None:
        dl = d[l + 1]
        lkl = lam[k][l]
        if 2 * abs(lkl) > dl:
            r = (2 * lkl + dl) // (2 * dl)
            bk, bl = b[k], b[l]
            for i in range(len(bk)):
                bk[i] -= r * bl[i]
            lam[k][l] = lkl - r * dl
            lk, ll = lam[k], lam[l]
            for i in range(l):
                lk[i] -= r * ll[i]

    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = _dot(b[k], b[j])
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise DependentRows(f"row {k} lies in the span of the previous rows")
                    d[k + 1] = u
        reduce(k, k - 1)
        lk = lam[k][k - 1]
        if q * d[k + 1] * d[k - 1] < p * d[k] * d[k] - q * lk * lk:
            b[k], b[k - 1] = b[k - 1], b[k]
            for j in range(k - 1):
                lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
            big = (d[k - 1] * d[k + 1] + lk * lk) // d[k]
            for i in range(k + 1, kmax + 1):
                t = lam[i][k]
                lam[i][k] = (d[k + 1] * lam[i][k - 1] - lk * t) // d[k]
                lam[i][k - 1] = (big * t + lk * lam[i][k]) // d[k + 1]
            d[k] = big
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                reduce(k, l)
            k += 1
    return b


# Independent verification, done with Fractions from scratch.

def gram_schmidt(basis: Sequence[Sequence[int]]) -> tuple[list[list[Fraction]], list[list[Fraction]], list[Fraction]]:
    """Return ``(b_star, mu, norms)`` with ``norms[i] = |b*_i|^2``."""
    n = len(basis)
    b_star: list[list[Fraction]] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    norms: list[Fraction] = []
    for i, row in enumerate(basis):
        v = [Fraction(x) for x in row]
        for j in range(i):
            if norms[j] == 0:
                continue
            mu[i][j] = sum(Fraction(x) * y for x, y in zip(row, b_star[j])) / norms[j]
            v = [vi - mu[i][j] * wj for vi, wj in zip(v, b_star[j])]
        b_star.append(v)
        norms.append(sum(x * x for x in v))
    return b_star, mu, norms


def gram_determinant(basis: Sequence[Sequence[int]]) -> int:
    """``det(B B^T)`` by fraction-free Bareiss elimination."""
    return _int_det([[_dot(u, v) for v in basis] for u in basis])


def check_lll(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> list[str]:
    """List every violated LLL condition (empty list means reduced)."""
    delta = Fraction(delta)
    _, mu, norms = gram_schmidt(basis)
    problems = []
    for i in range(len(basis)):
        if norms[i] == 0:
            problems.append(f"row {i} is dependent")
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                problems.append(f"|mu[{i}][{j}]| = {abs(mu[i][j])} > 1/2")
        if i and norms[i] < (delta - mu[i][i - 1] ** 2) * norms[i - 1]:
            problems.append(f"Lovasz condition fails at row {i}")
    return problems


def same_lattice(b1: Sequence[Sequence[int]], b2: Sequence[Sequence[int]]) -> bool:
    """True iff two square full-rank bases generate the same lattice.

    Solves ``U b1 = b2`` over the rationals and checks ``U`` is an integral
    matrix with determinant +-1.
    """
    n = len(b1)
    if n != len(b2) or any(len(r) != n for r in list(b1) + list(b2)):
        raise ValueError("same_lattice expects square bases of equal size")
    # U = b2 b1^{-1}; solve b1^T U^T = b2^T column by column via Gauss-Jordan.
    a = [[Fraction(b1[j][i]) for j in range(n)] + [Fraction(b2[r][i]) for r in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return False
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    ut = [row[n:] for row in a]  # ut[j][r] = U[r][j]
    if any(x.denominator != 1 for row in ut for x in row):
        return False
    u = [[int(ut[j][r]) for j in range(n)] for r in range(n)]
    return abs(_int_det(u)) == 1


def _int_det(mat: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (Bareiss)."""
    g = [list(r) for r in mat]
    n = len(g)
    prev, sign = 1, 1
    for k in range(n - 1):
        if g[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if g[i][k] != 0), None)
            if swap is None:
                return 0
            g[k], g[swap] = g[swap], g[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                g[i][j] = (g[i][j] * g[k][k] - g[i][k] * g[k][j]) // prev
        prev = g[k][k]
    return sign * g[n - 1][n - 1] if n else 1
