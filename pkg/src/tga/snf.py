"""Integer Smith normal form and the small amount of lattice algebra built on it.

Matrices are plain lists of lists of Python ints so that arithmetic never
overflows. Every routine is deterministic for a fixed input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def as_int_matrix(M: Sequence[Sequence[int]], ncols: int | None = None) -> Matrix:
    rows = [[int(x) for x in row] for row in M]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if any(len(r) != ncols for r in rows):
        raise ValueError("ragged integer matrix")
    return rows


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A:
        return []
    inner = len(B)
    ncols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(ncols)] for i in range(len(A))]


def transpose(A: Matrix, nrows: int | None = None) -> Matrix:
    if not A:
        return [[] for _ in range(nrows or 0)]
    return [list(col) for col in zip(*A)]


def determinant(A: Matrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [row[:] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D``.

    ``U`` and ``V`` are unimodular and ``D`` is diagonal with non-negative
    entries, each dividing the next. ``ncols`` is only needed for matrices
    with zero rows.
    """
    A = as_int_matrix(M, ncols)
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row[dst] += c * row[src]
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, c):  # col[dst] += c * col[src]
        for row in A:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    add_row(t, i, -q)
                if A[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    add_col(t, j, -q)
                if A[t][j]:
                    dirty = True
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if best is None:
            break
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return U, A, V


def diagonal(D: Matrix) -> list[int]:
    k = min(len(D), len(D[0]) if D else 0)
    return [D[i][i] for i in range(k)]


def rank(M: Sequence[Sequence[int]], ncols: int | None = None) -> int:
    _, D, _ = smith_normal_form(M, ncols)
    return sum(1 for d in diagonal(D) if d)


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group ``Z^rank + Z/d1 + ... + Z/dk``."""

    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("negative free rank")
        if any(d <= 1 for d in self.torsion):
            raise ValueError("invariant factors must exceed 1")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise ValueError("invariant factors must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def to_dict(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        if self.is_trivial:
            return "trivial"
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts)


def cokernel(M: Sequence[Sequence[int]], nrows: int, ncols: int) -> AbelianGroup:
    """Cokernel ``Z^nrows / im(M)`` of an ``nrows x ncols`` integer matrix."""
    if nrows == 0:
        return AbelianGroup(0)
    if ncols == 0:
        return AbelianGroup(nrows)
    _, D, _ = smith_normal_form(M, ncols)
    d = [x for x in diagonal(D) if x]
    return AbelianGroup(nrows - len(d), tuple(x for x in d if x > 1))


def integer_kernel(M: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Rows form a basis of ``{x in Z^ncols : M x = 0}``."""
    if not M:
        return identity(ncols)
    _, D, V = smith_normal_form(M, ncols)
    r = sum(1 for d in diagonal(D) if d)
    return [[V[i][j] for i in range(ncols)] for j in range(r, ncols)]


def solve_integer(M: Sequence[Sequence[int]], b: Sequence[int], ncols: int) -> list[int] | None:
    """Some integer ``x`` with ``M x = b``, or ``None`` if there is none."""
    if not M:
        return [0] * ncols if not any(b) else None
    U, D, V = smith_normal_form(M, ncols)
    y = [sum(u * bi for u, bi in zip(row, b)) for row in U]
    d = diagonal(D)
    z = [0] * ncols
    for i, yi in enumerate(y):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if yi:
                return None
        elif yi % di:
            return None
        else:
            z[i] = yi // di
    return [sum(V[i][j] * z[j] for j in range(ncols)) for i in range(ncols)]


def hermite_rows(B: Matrix, order: Sequence[int] | None = None) -> Matrix:
    """Row-style Hermite normal form of the lattice spanned by the rows of ``B``.

    Pivot columns are scanned in ``order`` (default: left to right); pivots
    are positive and entries above a pivot are reduced into ``[0, pivot)``.
    The result depends only on the lattice, not on the spanning set.
    """
    rows = [r[:] for r in B if any(r)]
    if not rows:
        return []
    n = len(rows[0])
    cols = list(order) if order is not None else list(range(n))
    out: Matrix = []
    for c in cols:
        live = [r for r in rows if r[c]]
        rest = [r for r in rows if not r[c]]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            piv = live[0]
            reduced = [piv]
            for r in live[1:]:
                q = r[c] // piv[c]
                r = [a - q * b for a, b in zip(r, piv)]
                if r[c]:
                    reduced.append(r)
                elif any(r):
                    rest.append(r)
            live = reduced
        piv = live[0]
        if piv[c] < 0:
            piv = [-a for a in piv]
        for k, r in enumerate(out):
            q = r[c] // piv[c]
            if q:
                out[k] = [a - q * b for a, b in zip(r, piv)]
        out.append(piv)
        rows = rest
    return out
