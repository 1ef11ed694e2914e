# Copyright 2025 Juspay
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at https://www.apache.org/licenses/LICENSE-2.0.txt

"""Exact integer lattice algebra.

Hermite and Smith normal forms over Python integers. Subgroups, kernels,
images and inverses all reduce to these; nothing here touches floating point.
Matrices are plain lists of lists of int.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

Matrix = list[list[int]]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = gcd(a, b) >= 0 and s*a + t*b = g."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def identity_matrix(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def hermite_normal_form(rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Row Hermite normal form of the lattice spanned by ``rows``.

    Output rows are echelon with positive pivots, entries above each pivot
    reduced into [0, pivot). Zero rows are dropped, so the result is unique
    for the lattice.
    """
    pending = [list(map(int, r)) for r in rows if any(r)]
    out: Matrix = []
    pivots: list[int] = []
    for c in range(ncols):
        pivot: Optional[list[int]] = None
        rest: Matrix = []
        for row in pending:
            if row[c] == 0:
                rest.append(row)
                continue
            if pivot is None:
                pivot = row
                continue
            g, s, t = xgcd(pivot[c], row[c])
            a, b = pivot[c] // g, row[c] // g
            merged = [s * p + t * q for p, q in zip(pivot, row)]
            other = [a * q - b * p for p, q in zip(pivot, row)]
            pivot = merged
            if any(other):
                rest.append(other)
        pending = rest
        if pivot is None:
            continue
        if pivot[c] < 0:
            pivot = [-v for v in pivot]
        out.append(pivot)
        pivots.append(c)

    for i, c in enumerate(pivots):
        p = out[i][c]
        for j in range(i):
            q = out[j][c] // p
            if q:
                out[j] = [u - q * v for u, v in zip(out[j], out[i])]
    return out


def _swap_rows(M: Matrix, i: int, j: int) -> None:
    M[i], M[j] = M[j], M[i]


def _swap_cols(M: Matrix, i: int, j: int) -> None:
    for row in M:
        row[i], row[j] = row[j], row[i]


def _add_row(M: Matrix, target: int, source: int, k: int) -> None:
    M[target] = [u + k * v for u, v in zip(M[target], M[source])]


def _add_col(M: Matrix, target: int, source: int, k: int) -> None:
    for row in M:
        row[target] += k * row[source]


def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, S, V) with U*M*V = S, U and V unimodular.

    S is diagonal with non-negative entries s_1 | s_2 | ... ; trailing zeros
    come last.
    """
    S = [list(map(int, r)) for r in M]
    m = len(S)
    n = len(S[0]) if m else 0
    U = identity_matrix(m)
    V = identity_matrix(n)

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j] and (best is None or abs(S[i][j]) < abs(S[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        _swap_rows(S, t, best[0])
        _swap_rows(U, t, best[0])
        _swap_cols(S, t, best[1])
        _swap_cols(V, t, best[1])

        while True:
            p = S[t][t]
            for i in range(t + 1, m):
                if S[i][t]:
                    q = S[i][t] // p
                    _add_row(S, i, t, -q)
                    _add_row(U, i, t, -q)
            for j in range(t + 1, n):
                if S[t][j]:
                    q = S[t][j] // p
                    _add_col(S, j, t, -q)
                    _add_col(V, j, t, -q)

            i = next((i for i in range(t + 1, m) if S[i][t]), None)
            if i is not None:
                _swap_rows(S, t, i)
                _swap_rows(U, t, i)
                continue
            j = next((j for j in range(t + 1, n) if S[t][j]), None)
            if j is not None:
                _swap_cols(S, t, j)
                _swap_cols(V, t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p),
                None,
            )
            if bad is not None:
                _add_row(S, t, bad, 1)
                _add_row(U, t, bad, 1)
                continue
            break

        if S[t][t] < 0:
            S[t] = [-v for v in S[t]]
            U[t] = [-v for v in U[t]]
        t += 1
    return U, S, V


def _rank(S: Matrix) -> int:
    return sum(1 for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i])


def integer_kernel(M: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Basis (as rows) of {x in Z^ncols : M x = 0}."""
    if not M:
        return identity_matrix(ncols)
    _, S, V = smith_normal_form(M)
    r = _rank(S)
    return [[V[i][j] for i in range(ncols)] for j in range(r, ncols)]


def solve_integer(M: Sequence[Sequence[int]], b: Sequence[int]) -> Optional[list[int]]:
    """One integer solution of M x = b, or None."""
    m = len(M)
    n = len(M[0])
    U, S, V = smith_normal_form(M)
    c = [sum(U[i][k] * b[k] for k in range(m)) for i in range(m)]
    z = [0] * n
    for i in range(m):
        s = S[i][i] if i < n else 0
        if s == 0:
            if c[i]:
                return None
            continue
        if c[i] % s:
            return None
        z[i] = c[i] // s
    return [sum(V[i][j] * z[j] for j in range(n)) for i in range(n)]


def upper_triangular_inverse(B: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    """Exact inverse of a square upper-triangular integer matrix."""
    n = len(B)
    inv = [[Fraction(0)] * n for _ in range(n)]
    for col in range(n):
        for i in range(n - 1, -1, -1):
            acc = Fraction(int(i == col))
            for k in range(i + 1, n):
                acc -= B[i][k] * inv[k][col]
            inv[i][col] = acc / B[i][i]
    return inv


def diagonal_invariants(values: Sequence[int]) -> list[int]:
    """Invariant factors of diag(values), ones dropped, in divisibility order."""
    _, S, _ = smith_normal_form([[v if i == j else 0 for j in range(len(values))]
                                 for i, v in enumerate(values)])
    return [S[i][i] for i in range(len(values)) if S[i][i] > 1]
