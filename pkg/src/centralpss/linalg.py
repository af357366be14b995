"""Exact dense linear algebra over Q on lists of Fractions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


def to_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def rref(A: Matrix, b: list[Fraction] | None = None) -> tuple[Matrix, list[Fraction] | None, list[int]]:
    """Reduced row echelon form of ``A`` (and the matching right-hand side).

    Returns ``(R, rhs, pivots)``; zero rows are dropped from ``R``.  An
    inconsistent system shows up as ``rhs`` containing a nonzero entry whose
    row of ``R`` is zero, so those rows are kept when ``b`` is given.
    """
    M = [list(row) for row in A]
    rhs = list(b) if b is not None else None
    ncols = len(M[0]) if M else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        if rhs is not None:
            rhs[r], rhs[p] = rhs[p], rhs[r]
        inv = 1 / M[r][c]
        row = [v * inv for v in M[r]]
        M[r] = row
        if rhs is not None:
            rhs[r] *= inv
        nz = [(j, v) for j, v in enumerate(row) if v]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                Mi = M[i]
                for j, v in nz:
                    Mi[j] -= f * v
                if rhs is not None:
                    rhs[i] -= f * rhs[r]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    if rhs is None:
        return M[:r], None, pivots
    tail = [(M[i], rhs[i]) for i in range(r, len(M)) if rhs[i]]
    return M[:r] + [t[0] for t in tail], rhs[:r] + [t[1] for t in tail], pivots


class InconsistentSystem(ValueError):
    pass


@dataclass
class AffineSolution:
    """Solution set ``x0 + N t`` of a linear system; ``null_basis`` holds the columns of N."""

    particular: list[Fraction]
    null_basis: list[list[Fraction]]
    # coordinate carrying each null vector's unit entry (x0 is zero there)
    free: list[int]

    def params_of(self, x: Sequence[Fraction]) -> list[Fraction]:
        return [x[i] for i in self.free]

    def point(self, params: Sequence[Fraction]) -> list[Fraction]:
        x = list(self.particular)
        for t, vec in zip(params, self.null_basis):
            if t:
                for i, v in enumerate(vec):
                    if v:
                        x[i] += t * v
        return x


def solve_affine(A: Matrix, b: list[Fraction], ncols: int) -> AffineSolution:
    """Parameterize all solutions of ``A x = b``; raises InconsistentSystem."""
    if not A:
        return AffineSolution([Fraction(0)] * ncols, [_unit(ncols, j) for j in range(ncols)], list(range(ncols)))
    R, rhs, pivots = rref(A, b)
    if len(R) > len(pivots):
        raise InconsistentSystem("linear system has no solution")
    x0 = [Fraction(0)] * ncols
    for row_rhs, c in zip(rhs, pivots):
        x0[c] = row_rhs
    pivot_set = set(pivots)
    null = []
    free_cols = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for row, c in zip(R, pivots):
            if row[free]:
                vec[c] = -row[free]
        null.append(vec)
        free_cols.append(free)
    return AffineSolution(x0, null, free_cols)


def _unit(n: int, j: int) -> list[Fraction]:
    v = [Fraction(0)] * n
    v[j] = Fraction(1)
    return v


def solve_square(M: Matrix, b: list[Fraction]) -> list[Fraction]:
    sol = solve_affine(M, b, len(M))
    if sol.null_basis:
        raise InconsistentSystem("matrix is singular")
    return sol.particular


def least_norm(sol: AffineSolution, weights: Sequence[Fraction] | None = None) -> list[Fraction]:
    """The point of ``sol`` minimizing ``sum(w_i * x_i^2)``, computed exactly.

    Projects the particular solution onto the W-orthogonal complement of the
    null space: solve (N^T W N) t = -N^T W x0.
    """
    N = sol.null_basis
    x0 = sol.particular
    if not N:
        return list(x0)
    n = len(x0)
    w = [Fraction(1)] * n if weights is None else [Fraction(v) for v in weights]
    WN = [[w[i] * vec[i] for i in range(n)] for vec in N]
    k = len(N)
    gram = [[sum((a * c for a, c in zip(WN[r], N[s]) if a and c), Fraction(0)) for s in range(k)] for r in range(k)]
    rhs = [-sum((a * c for a, c in zip(WN[r], x0) if a and c), Fraction(0)) for r in range(k)]
    t = solve_square(gram, rhs)
    return sol.point(t)


@dataclass
class RationalLDL:
    """Exact factorization ``P^T G P = L D L^T``.

    ``perm[i]`` is the original index placed at position ``i``; ``L`` is unit
    lower triangular and ``D`` the diagonal, both in permuted coordinates.
    """

    perm: list[int]
    L: Matrix
    D: list[Fraction]

    def reconstruct(self) -> Matrix:
        """Return G in original coordinates, rebuilt from the factors."""
        n = len(self.D)
        PGP = [[sum((self.L[i][k] * self.D[k] * self.L[j][k] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]
        G = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                G[self.perm[i]][self.perm[j]] = PGP[i][j]
        return G


def rational_psd_decompose(G: Sequence[Sequence]) -> RationalLDL | None:
    """Pivoted LDL^T of a symmetric rational matrix, or None when it is not PSD.

    A symmetric pivot is taken only when the current diagonal entry is zero.
    A negative remaining diagonal entry, or a zero diagonal entry whose row is
    nonzero, proves the matrix is indefinite.
    """
    A = to_fraction_matrix(G)
    n = len(A)
    if any(len(row) != n for row in A):
        raise ValueError("matrix is not square")
    if any(A[i][j] != A[j][i] for i in range(n) for j in range(i)):
        raise ValueError("matrix is not symmetric")
    perm = list(range(n))
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for k in range(n):
        if any(A[i][i] < 0 for i in range(k, n)):
            return None
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][i] > 0), None)
            if p is None:
                if any(A[i][j] for i in range(k, n) for j in range(k, n)):
                    return None
                break
            _swap(A, L, perm, k, p)
        d = A[k][k]
        D[k] = d
        col = [A[i][k] / d for i in range(k + 1, n)]
        for off, i in enumerate(range(k + 1, n)):
            L[i][k] = col[off]
        for oi, i in enumerate(range(k + 1, n)):
            li = col[oi]
            if not li:
                continue
            Ai = A[i]
            for j in range(k + 1, n):
                if A[k][j]:
                    Ai[j] -= li * A[k][j]
    return RationalLDL(perm, L, D)


def _swap(A: Matrix, L: Matrix, perm: list[int], k: int, p: int) -> None:
    A[k], A[p] = A[p], A[k]
    for row in A:
        row[k], row[p] = row[p], row[k]
    perm[k], perm[p] = perm[p], perm[k]
    for j in range(k):
        L[k][j], L[p][j] = L[p][j], L[k][j]
