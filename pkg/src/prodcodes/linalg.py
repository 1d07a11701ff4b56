"""Dense exact linear algebra over a Field.

All functions take the field first and operate on numpy int64 arrays of
element codes.  Row reduction uses a fixed deterministic pivot rule (first
nonzero entry scanning columns left to right, rows top to bottom) so that
every basis this module produces is bit-reproducible.
"""

from __future__ import annotations

import numpy as np

from .gf import Field

_MATMUL_BLOCK = 1 << 22


def matmul(F: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Exact matrix product over F."""
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    B = np.atleast_2d(np.asarray(B, dtype=np.int64))
    m, k = A.shape
    k2, n = B.shape
    if k != k2:
        raise ValueError(f"shape mismatch {A.shape} x {B.shape}")
    if k == 0 or m == 0 or n == 0:
        return np.zeros((m, n), dtype=np.int64)
    if F.e == 1:
        # int64 is safe: p < 2^20 so each product < 2^40; block the inner
        # dimension to keep the accumulated sum below 2^62
        out = np.zeros((m, n), dtype=np.int64)
        step = max(1, (1 << 22) // max(1, F.p))
        for i in range(0, k, step):
            out += A[:, i:i + step] @ B[i:i + step, :]
            out %= F.p
        return out
    out = np.zeros((m, n), dtype=np.int64)
    step = max(1, _MATMUL_BLOCK // max(1, m * n))
    for i in range(0, k, step):
        terms = F.mul(A[:, i:i + step, None], B[None, i:i + step, :])
        if F.p == 2:
            out ^= np.bitwise_xor.reduce(terms, axis=1)
        else:
            for j in range(terms.shape[1]):
                out = F.add(out, terms[:, j, :])
    return out


def matvec(F: Field, A: np.ndarray, x: np.ndarray) -> np.ndarray:
    return matmul(F, A, np.asarray(x, dtype=np.int64).reshape(-1, 1))[:, 0]


def rref(F: Field, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = np.atleast_2d(np.asarray(M, dtype=np.int64)).copy()
    m, n = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        col = R[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
        pv = R[r, c]
        if pv != 1:
            R[r] = F.mul(R[r], F.inv(pv))
        factors = R[:, c].copy()
        factors[r] = 0
        rows = np.nonzero(factors)[0]
        if rows.size:
            R[rows] = F.sub(R[rows], F.mul(factors[rows, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(F: Field, M: np.ndarray) -> int:
    return len(rref(F, M)[1])


def row_space(F: Field, M: np.ndarray) -> np.ndarray:
    """Full-rank basis of the row space, in rref form."""
    R, piv = rref(F, M)
    return R[: len(piv)]


def right_kernel(F: Field, M: np.ndarray) -> np.ndarray:
    """Basis (as rows) of {x : M x = 0}."""
    M = np.atleast_2d(np.asarray(M, dtype=np.int64))
    m, n = M.shape
    R, piv = rref(F, M)
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for r, pc in enumerate(piv):
            basis[i, pc] = F.neg(R[r, fc])
    return basis


def left_kernel(F: Field, M: np.ndarray) -> np.ndarray:
    return right_kernel(F, np.atleast_2d(np.asarray(M, dtype=np.int64)).T)


def solve_right(F: Field, A: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Deterministic particular solution of A x = b, or None if inconsistent.

    Free coordinates are set to zero (the pivot-ordered particular solution).
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    b = np.asarray(b, dtype=np.int64)
    squeeze = b.ndim == 1
    if A.shape[0] == 0:
        # vacuous system: the pivot-ordered particular solution is zero
        ncols = 1 if squeeze else (b.shape[1] if b.ndim == 2 else 1)
        X = np.zeros((A.shape[1], ncols), dtype=np.int64)
        return X[:, 0] if squeeze else X
    B = b.reshape(A.shape[0], -1)
    aug = np.concatenate([A, B], axis=1)
    R, piv = rref(F, aug)
    n = A.shape[1]
    for c in piv:
        if c >= n:
            return None
    X = np.zeros((n, B.shape[1]), dtype=np.int64)
    for r, c in enumerate(piv):
        X[c] = R[r, n:]
    return X[:, 0] if squeeze else X


def solve_left(F: Field, A: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """x with x A = b (row-vector convention), or None."""
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    b = np.asarray(b, dtype=np.int64)
    if b.ndim == 1:
        x = solve_right(F, A.T, b)
        return x
    x = solve_right(F, A.T, b.T)
    return None if x is None else x.T


def in_row_space(F: Field, M: np.ndarray, v: np.ndarray) -> bool:
    return solve_left(F, M, v) is not None


def row_space_contains(F: Field, A: np.ndarray, B: np.ndarray) -> bool:
    """True iff rowspace(B) is contained in rowspace(A)."""
    ra = rank(F, A)
    return rank(F, np.concatenate([np.atleast_2d(A), np.atleast_2d(B)], axis=0)) == ra


def row_space_equal(F: Field, A: np.ndarray, B: np.ndarray) -> bool:
    Ra = row_space(F, A)
    Rb = row_space(F, B)
    return Ra.shape == Rb.shape and bool(np.array_equal(Ra, Rb))


def row_space_intersection(F: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Full-rank basis of rowspace(A) and rowspace(B) intersection."""
    A = row_space(F, A)
    B = row_space(F, B)
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros((0, A.shape[1] if A.size else B.shape[1]), dtype=np.int64)
    stacked = np.concatenate([A, B], axis=0)
    lk = left_kernel(F, stacked)
    if lk.shape[0] == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64)
    inter = matmul(F, lk[:, : A.shape[0]], A)
    return row_space(F, inter)


def weight(v: np.ndarray) -> int:
    return int(np.count_nonzero(v))


def kron(F: Field, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Kronecker product over F (row-major tensor index convention)."""
    A = np.atleast_2d(np.asarray(A, dtype=np.int64))
    B = np.atleast_2d(np.asarray(B, dtype=np.int64))
    out = F.mul(A[:, None, :, None], B[None, :, None, :])
    return out.reshape(A.shape[0] * B.shape[0], A.shape[1] * B.shape[1])


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def enumerate_span(F: Field, basis: np.ndarray, chunk: int = 1 << 14):
    """Yield (coeff_block, vector_block) covering every F-combination of the
    basis rows exactly once.  Deterministic mixed-radix order."""
    basis = np.atleast_2d(np.asarray(basis, dtype=np.int64))
    k = basis.shape[0]
    total = F.q ** k
    radix = F.q ** np.arange(k, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        coefs = (idx[:, None] // radix[None, :]) % F.q
        yield coefs, matmul(F, coefs, basis)


class Matrix:
    """Thin immutable wrapper pairing a Field with a dense code array."""

    __slots__ = ("field", "array")

    def __init__(self, field: Field, array) -> None:
        arr = np.atleast_2d(np.asarray(array, dtype=np.int64))
        if np.any(arr < 0) or np.any(arr >= field.q):
            raise ValueError("entries out of range for field")
        arr.setflags(write=False)
        self.field = field
        self.array = arr

    @property
    def rows(self) -> int:
        return self.array.shape[0]

    @property
    def cols(self) -> int:
        return self.array.shape[1]

    @property
    def entries(self) -> list[int]:
        return [int(x) for x in self.array.ravel()]

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if other.field != self.field:
            raise ValueError("field mismatch")
        return Matrix(self.field, matmul(self.field, self.array, other.array))

    def rank(self) -> int:
        return rank(self.field, self.array)

    def kernel(self) -> "Matrix":
        return Matrix(self.field, right_kernel(self.field, self.array))

    def solve(self, b) -> np.ndarray | None:
        return solve_right(self.field, self.array, b)

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.array.T)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix) and self.field == other.field
                and np.array_equal(self.array, other.array))

    def __repr__(self) -> str:
        return f"Matrix({self.field}, {self.rows}x{self.cols})"
