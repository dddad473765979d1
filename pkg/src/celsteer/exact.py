"""Exact-arithmetic characteristic polynomial and Hurwitz minors.

Every float64 is a dyadic rational, so a float matrix has an exact
characteristic polynomial. Computing it in integers sidesteps the catastrophic
cancellation that float Faddeev-LeVerrier suffers on stiff spectra.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np


def _common_denominator(values):
    den = 1
    for v in values:
        den = math.lcm(den, v.denominator)
    return den


def char_poly_exact(k: np.ndarray) -> list[Fraction]:
    """Coefficients of det(x I - k), leading coefficient first, as exact fractions.

    Integer Faddeev-LeVerrier: with N_j = (j-1)! M_j and d_j = j! c_j the
    recursion N_j = (j-1) K N_{j-1} + d_{j-1} I, d_j = -tr(K N_j) stays in Z.
    """
    k = np.asarray(k, dtype=float)
    n = k.shape[0]
    fracs = [Fraction(float(x)) for x in k.flat]
    den = _common_denominator(fracs)
    m = [[int(fracs[i * n + j] * den) for j in range(n)] for i in range(n)]

    d = [1]
    prev = [[0] * n for _ in range(n)]
    for j in range(1, n + 1):
        # N_j = (j-1) * M @ N_{j-1} + d_{j-1} I
        cur = [[0] * n for _ in range(n)]
        for r in range(n):
            mr = m[r]
            row = cur[r]
            for c in range(n):
                s = 0
                for t in range(n):
                    if mr[t]:
                        s += mr[t] * prev[t][c]
                row[c] = (j - 1) * s
            row[r] += d[j - 1]
        tr = 0
        for r in range(n):
            mr = m[r]
            for t in range(n):
                if mr[t]:
                    tr += mr[t] * cur[t][r]
        d.append(-tr)
        prev = cur
    # c_j(K) = d_j / (j! den^j)
    return [Fraction(d[j], math.factorial(j) * den**j) for j in range(n + 1)]


def _bareiss_leading_minors(mat: list[list[int]]) -> list[int]:
    n = len(mat)
    a = [row[:] for row in mat]
    minors = []
    prev_pivot = 1
    for k in range(n):
        pivot = a[k][k]
        minors.append(pivot)
        if pivot == 0:
            # leading minor vanished; the rest need pivoting, do them one by one
            minors.extend(_det_int([r[: m] for r in mat[: m]]) for m in range(k + 2, n + 1))
            return minors
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev_pivot
        prev_pivot = pivot
    return minors


def _det_int(mat: list[list[int]]) -> int:
    n = len(mat)
    a = [row[:] for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for p in range(k + 1, n):
                if a[p][k] != 0:
                    a[k], a[p] = a[p], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(float(x))


def hurwitz_matrix(a: Sequence) -> list[list]:
    """n x n Hurwitz matrix of a_0..a_n, H[i][j] = a[2(j+1) - (i+1)] (zero outside 0..n)."""
    n = len(a) - 1
    zero = a[0] * 0
    return [[a[2 * (j + 1) - (i + 1)] if 0 <= 2 * (j + 1) - (i + 1) <= n else zero
             for j in range(n)] for i in range(n)]


def hurwitz_determinants_exact(a: Sequence) -> list[Fraction]:
    """Leading principal minors Lambda_1..Lambda_n of the Hurwitz matrix, exactly."""
    coeffs = [_as_fraction(x) for x in a]
    den = _common_denominator(coeffs)
    ints = [int(c * den) for c in coeffs]
    minors = _bareiss_leading_minors(hurwitz_matrix(ints))
    # scaling every coefficient by den scales the k-th minor by den**k
    return [Fraction(mk, den ** (k + 1)) for k, mk in enumerate(minors)]
