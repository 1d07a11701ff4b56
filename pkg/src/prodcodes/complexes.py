"""Single-sector chain complexes over characteristic-2 fields.

A complex is one square boundary matrix with boundary^2 = 0; the associated
quantum code, homological products, homology dimensions, systolic distances
and filling constants all live here.  Vectors are rows; the boundary acts by
v -> (boundary @ v^T)^T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gf import Field
from . import linalg as la
from .codes import DistanceResult, LinearCode, DEFAULT_DISTANCE_BUDGET


class SingleSectorComplex:
    """(C, boundary) with boundary^2 = 0 over a characteristic-2 field."""

    def __init__(self, field: Field, boundary: np.ndarray):
        if field.p != 2:
            raise ValueError("single-sector products are restricted to characteristic 2")
        boundary = np.atleast_2d(np.asarray(boundary, dtype=np.int64))
        if boundary.shape[0] != boundary.shape[1]:
            raise ValueError("boundary matrix must be square")
        sq = la.matmul(field, boundary, boundary)
        if np.any(sq):
            raise ValueError("boundary^2 != 0")
        self.field = field
        self.boundary = boundary
        self.boundary.setflags(write=False)
        self.dim = boundary.shape[0]
        self._cycles: np.ndarray | None = None
        self._boundaries: np.ndarray | None = None

    @property
    def coboundary(self) -> np.ndarray:
        return self.boundary.T

    @property
    def locality(self) -> int:
        if self.dim == 0:
            return 0
        rw = int(np.count_nonzero(self.boundary, axis=1).max())
        cw = int(np.count_nonzero(self.boundary, axis=0).max())
        return max(rw, cw)

    # subspaces --------------------------------------------------------------

    def cycles(self) -> np.ndarray:
        if self._cycles is None:
            self._cycles = la.right_kernel(self.field, self.boundary)
        return self._cycles

    def boundaries(self) -> np.ndarray:
        if self._boundaries is None:
            self._boundaries = la.row_space(self.field, self.boundary.T)
        return self._boundaries

    def cocycles(self) -> np.ndarray:
        return la.right_kernel(self.field, self.boundary.T)

    def coboundaries(self) -> np.ndarray:
        return la.row_space(self.field, self.boundary)

    def homology_dim(self) -> int:
        return self.cycles().shape[0] - self.boundaries().shape[0]

    def transpose(self) -> "SingleSectorComplex":
        return SingleSectorComplex(self.field, self.boundary.T)

    # homology bases ----------------------------------------------------------

    def homology_reps(self) -> np.ndarray:
        """Cycle representatives completing the boundary basis to the cycles."""
        return _complete_basis(self.field, self.boundaries(), self.cycles())

    def cohomology_reps(self) -> np.ndarray:
        return _complete_basis(self.field, self.coboundaries(), self.cocycles())

    def dual_bases(self) -> tuple[np.ndarray, np.ndarray]:
        """(cocycle_basis, cycle_basis) with cocycle_i . cycle_j = 1_{i=j}."""
        F = self.field
        cyc = self.homology_reps()
        coc = self.cohomology_reps()
        pairing = la.matmul(F, coc, cyc.T)
        k = cyc.shape[0]
        if k == 0:
            return coc, cyc
        # nondegeneracy of the pairing lets us normalize the cocycle side
        inv = la.solve_right(F, pairing, la.identity(k))
        if inv is None:
            raise RuntimeError("degenerate homology pairing")
        return la.matmul(F, inv.T, coc), cyc

    def associated_code(self) -> tuple[LinearCode, LinearCode]:
        """(Q_X, Q_Z) = (ker coboundary, ker boundary)."""
        qx = LinearCode(self.field, self.dim, self.cocycles(), label="Q_X")
        qz = LinearCode(self.field, self.dim, self.cycles(), label="Q_Z")
        return qx, qz

    def __repr__(self) -> str:
        return f"SingleSectorComplex(dim={self.dim}, k={self.homology_dim()})"


def _complete_basis(F: Field, inner: np.ndarray, outer: np.ndarray) -> np.ndarray:
    """Rows of `outer` extending rowspace(inner) to rowspace(outer)."""
    picked = []
    current = inner
    r = la.rank(F, current)
    for row in outer:
        cand = np.concatenate([current, row[None, :]], axis=0)
        rc = la.rank(F, cand)
        if rc > r:
            picked.append(row)
            current = cand
            r = rc
    return (np.stack(picked, axis=0) if picked
            else np.zeros((0, outer.shape[1]), dtype=np.int64))


def from_css(qx: LinearCode, qz: LinearCode,
             hx: np.ndarray | None = None, hz: np.ndarray | None = None) -> SingleSectorComplex:
    """Complex with boundary = H_X^T H_Z from a CSS pair with equal dims."""
    if qx.field != qz.field or qx.n != qz.n:
        raise ValueError("codes must share field and length")
    if qx.k != qz.k:
        raise ValueError("dim Q_X != dim Q_Z")
    F = qx.field
    hx = qx.parity_check() if hx is None else np.atleast_2d(np.asarray(hx, dtype=np.int64))
    hz = qz.parity_check() if hz is None else np.atleast_2d(np.asarray(hz, dtype=np.int64))
    if la.rank(F, hx) != hx.shape[0] or la.rank(F, hz) != hz.shape[0]:
        raise ValueError("parity checks must be full rank")
    if np.any(la.matmul(F, hz, hx.T)):
        raise ValueError("CSS orthogonality H_Z H_X^T = 0 fails")
    boundary = la.matmul(F, hx.T, hz)
    return SingleSectorComplex(F, boundary)


def hom_product(A: SingleSectorComplex, B: SingleSectorComplex) -> SingleSectorComplex:
    """Homological product: boundary = dA (x) I + I (x) dB (characteristic 2)."""
    if A.field != B.field:
        raise ValueError("field mismatch")
    F = A.field
    ia = la.identity(A.dim)
    ib = la.identity(B.dim)
    boundary = F.add(la.kron(F, A.boundary, ib), la.kron(F, ia, B.boundary))
    return SingleSectorComplex(F, boundary)


# ---------------------------------------------------------------------------
# distances and filling
# ---------------------------------------------------------------------------


def systolic_distance(C: SingleSectorComplex,
                      budget: int = DEFAULT_DISTANCE_BUDGET,
                      seed: int = 0, trials: int = 5000) -> DistanceResult:
    """Min weight over cycles that are not boundaries; exact by coset
    enumeration when (q^k - 1) * q^dim(B) fits the budget."""
    F = C.field
    k = C.homology_dim()
    if k == 0:
        return DistanceResult(math.inf, True, "zero-homology")
    reps = C.homology_reps()
    bnd = C.boundaries()
    total = (F.q ** k - 1) * (F.q ** bnd.shape[0])
    if total <= budget:
        best = C.dim + 1
        for coefs, cls in la.enumerate_span(F, reps):
            nz = np.any(coefs, axis=1)
            for rep in cls[nz]:
                for _, bwords in la.enumerate_span(F, bnd):
                    w = int(np.count_nonzero(F.add(rep[None, :], bwords), axis=1).min())
                    best = min(best, w)
        return DistanceResult(best, True, "coset-enumeration")
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
    best = C.dim + 1
    for _ in range(trials):
        coef = F.random(rng, k)
        if not coef.any():
            continue
        v = la.matmul(F, coef[None, :], reps)[0]
        if bnd.shape[0]:
            v = F.add(v, la.matmul(F, F.random(rng, bnd.shape[0])[None, :], bnd)[0])
        best = min(best, la.weight(v))
    return DistanceResult(best, False, "coset-sampling-upper-bound")


def cosystolic_distance(C: SingleSectorComplex,
                        budget: int = DEFAULT_DISTANCE_BUDGET,
                        seed: int = 0) -> DistanceResult:
    return systolic_distance(C.transpose(), budget, seed)


@dataclass
class FillingEstimate:
    mu_hat: float          # lower estimate of the filling constant
    trials: int
    exact_preimages: bool
    samples: list


def filling_constant_estimate(C: SingleSectorComplex, trials: int, seed: int,
                              budget: int = DEFAULT_DISTANCE_BUDGET) -> FillingEstimate:
    """max over sampled boundaries b of min{|c| : boundary(c) = b} / |b|.

    Preimage minimization is exact (kernel coset enumeration) when q^dim(Z)
    fits the budget, otherwise randomized descent over kernel directions.
    """
    F = C.field
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
    cyc = C.cycles()
    exact = F.q ** cyc.shape[0] <= budget
    cyc_words = None
    if exact and cyc.shape[0]:
        cyc_words = np.concatenate([w for _, w in la.enumerate_span(F, cyc)], axis=0)
    best = 0.0
    samples = []
    done = 0
    attempts = 0
    while done < trials and attempts < trials * 20:
        attempts += 1
        x = F.random(rng, C.dim)
        b = la.matvec(F, C.boundary, x)
        if not b.any():
            continue
        if exact:
            if cyc_words is not None:
                pre = int(np.count_nonzero(F.add(x[None, :], cyc_words), axis=1).min())
            else:
                pre = la.weight(x)
        else:
            pre = _descend(F, x, cyc, rng)
        ratio = pre / la.weight(b)
        samples.append((la.weight(b), pre, ratio))
        best = max(best, ratio)
        done += 1
    return FillingEstimate(best, done, exact, samples)


def _descend(F: Field, x: np.ndarray, kernel: np.ndarray, rng: np.random.Generator,
             restarts: int = 4) -> int:
    best = la.weight(x)
    for _ in range(restarts):
        cur = x.copy()
        if kernel.shape[0]:
            coef = F.random(rng, kernel.shape[0])
            cur = F.add(cur, la.matmul(F, coef[None, :], kernel)[0])
        improved = True
        while improved:
            improved = False
            for row in kernel:
                for scalar in range(1, F.q):
                    cand = F.add(cur, F.mul(np.int64(scalar), row))
                    if la.weight(cand) < la.weight(cur):
                        cur = cand
                        improved = True
        best = min(best, la.weight(cur))
    return best
