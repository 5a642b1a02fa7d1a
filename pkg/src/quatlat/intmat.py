"""Exact normal forms for small integer matrices.

Row convention throughout: a matrix is a list of rows, and lattices act by
integer row combinations, so the Hermite form is produced by left-unimodular
row operations and is upper triangular with positive pivots and reduced
entries above each pivot.  The Smith form keeps both transformation matrices
because downstream code consumes the right transform as a change of basis.
"""

from __future__ import annotations

from fractions import Fraction

IntMat = list[list[int]]


def identity(n: int) -> IntMat:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    assert len(A[0]) == k
    return [
        [sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)] for i in range(n)
    ]


def mat_vec(A, v):
    return [sum(row[j] * v[j] for j in range(len(v))) for row in A]


def vec_mat(v, A):
    return [sum(v[i] * A[i][j] for i in range(len(v))) for j in range(len(A[0]))]


def transpose(A):
    return [list(col) for col in zip(*A)]


def det(A) -> int:
    """Cofactor-expansion determinant; intended for n <= 4."""
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    total = 0
    sign = 1
    for j in range(n):
        if A[0][j]:
            minor = [[A[i][k] for k in range(n) if k != j] for i in range(1, n)]
            total += sign * A[0][j] * det(minor)
        sign = -sign
    return total


def hnf(rows) -> IntMat:
    """Canonical row Hermite normal form; returns only the nonzero rows.

    Pivots are positive, entries above each pivot lie in [0, pivot), and two
    integer row spans are equal exactly when their forms coincide.
    """
    A = [[int(v) for v in row] for row in rows]
    if not A:
        return []
    m, n = len(A), len(A[0])
    r = 0
    for j in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][j] != 0]
            if not nz:
                has_pivot = False
                break
            i0 = min(nz, key=lambda i: (abs(A[i][j]), i))
            if i0 != r:
                A[r], A[i0] = A[i0], A[r]
            others = [i for i in range(r + 1, m) if A[i][j] != 0]
            if not others:
                has_pivot = True
                break
            arj = A[r]
            for i in others:
                q = A[i][j] // arj[j]
                if q:
                    A[i] = [A[i][k] - q * arj[k] for k in range(n)]
        if has_pivot:
            if A[r][j] < 0:
                A[r] = [-v for v in A[r]]
            for i in range(r):
                q = A[i][j] // A[r][j]
                if q:
                    A[i] = [A[i][k] - q * A[r][k] for k in range(n)]
            r += 1
    return A[:r]


def snf_with_transforms(A) -> tuple[IntMat, IntMat, IntMat]:
    """Smith normal form by elementary operations, transforms retained.

    Returns (D, U, V) with U @ A @ V == D, U and V unimodular, D diagonal
    with each diagonal entry nonnegative and dividing the next.
    """
    D = [[int(v) for v in row] for row in A]
    m, n = len(D), len(D[0])
    U = identity(m)
    V = identity(n)

    def add_row(dst, src, k):
        D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in D:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if D[i][j] and (
                        best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])
                    ):
                        best = (i, j)
            if best is None:
                break
            i0, j0 = best
            if i0 != t:
                D[t], D[i0] = D[i0], D[t]
                U[t], U[i0] = U[i0], U[t]
            if j0 != t:
                for row in D:
                    row[t], row[j0] = row[j0], row[t]
                for row in V:
                    row[t], row[j0] = row[j0], row[t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    dirty = dirty or D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    dirty = dirty or D[t][j] != 0
            if dirty:
                continue
            piv = D[t][t]
            offender = None
            for i in range(t + 1, m):
                if any(D[i][j] % piv for j in range(t + 1, n)):
                    offender = i
                    break
            if offender is None:
                break
            add_row(t, offender, 1)
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            U[t] = [-v for v in U[t]]
    return D, U, V


def inverse_frac(A) -> list[list[Fraction]]:
    """Exact inverse of a square matrix with int or Fraction entries."""
    n = len(A)
    M = [
        [Fraction(A[i][j]) for j in range(n)]
        + [Fraction(1 if i == j else 0) for j in range(n)]
        for i in range(n)
    ]
    for c in range(n):
        piv = None
        for r in range(c, n):
            if M[r][c] != 0:
                piv = r
                break
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [v / pv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [vr - f * vc for vr, vc in zip(M[r], M[c])]
    return [row[n:] for row in M]


def solve_left_frac(H, vec) -> list[Fraction]:
    """Solve c * H = vec for upper-triangular H with nonzero diagonal."""
    n = len(H)
    c = [Fraction(0)] * n
    for j in range(n):
        s = Fraction(vec[j]) - sum(c[i] * H[i][j] for i in range(j))
        c[j] = s / H[j][j]
    return c


def is_unimodular(A) -> bool:
    return det(A) in (1, -1)
