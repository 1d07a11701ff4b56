"""Approximation decoder for dual tensor products of two Reed-Solomon codes.

The decoder runs three subroutines: an error-locator stage that lands in a
slightly enlarged code (dec_init), a degree-reduction stage that strips the
extra coefficient rows and columns with per-stripe Reed-Solomon decoding
(dec_close), and a greedy peeling stage that minimizes the final coset
representative (dec_finish).  A Berlekamp-Welch decoder backs both stripe
decoding and peeling.

All constants derive from one scale parameter gamma: the reference analysis
sets gamma = 1000, and the desk-scale "scaled-constants" mode lowers gamma so
that the promise radius d0 = (rho*eps*n/gamma)^2 is nontrivial at small n.
Every derived quantity is recomputed from gamma and surfaced on the
instance, and reports flag gamma != 1000 as beyond-reference extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from functools import cached_property

import numpy as np

from .gf import Field
from . import linalg as la
from .codes import ReedSolomon, canonical_points, rs_code, vandermonde
from .poly import uni_divmod, uni_gcd, uni_trim, uni_eval


class PromiseViolation(RuntimeError):
    """An internal linear solve or stripe decode failed: the input was
    outside the decoding promise."""


# ---------------------------------------------------------------------------
# Berlekamp-Welch
# ---------------------------------------------------------------------------


def berlekamp_welch(F: Field, points: np.ndarray, k: int, word: np.ndarray,
                    max_errors: int) -> np.ndarray | None:
    """Unique decoding of RS_points(k): the codeword within max_errors of
    word, or None when no consistent codeword exists.

    Beyond the unique-decoding radius the routine returns some consistent
    codeword or None, never a wrong-radius claim.
    """
    points = np.asarray(points, dtype=np.int64)
    word = np.asarray(word, dtype=np.int64)
    n = points.size
    t = int(max_errors)
    if t < 0 or k < 0 or k > n:
        return None
    # unknowns: Q of degree < k + t and monic E of degree t with
    # Q(x) = word(x) * E(x) at every point
    Vq = vandermonde(F, points, k + t)
    Ve = vandermonde(F, points, t)
    lhs = np.concatenate([Vq, F.neg(F.mul(word[:, None], Ve))], axis=1)
    rhs = F.mul(word, F.power(points, t))
    sol = la.solve_right(F, lhs, rhs)
    if sol is None:
        return None
    Q = uni_trim(sol[: k + t])
    E = np.concatenate([sol[k + t:], np.array([1], dtype=np.int64)])
    P, rem = uni_divmod(F, Q, E)
    if uni_trim(rem).size or P.size > k:
        return None
    cw = uni_eval(F, P, points)
    if int(np.count_nonzero(F.sub(word, cw))) > t:
        return None
    return cw


# ---------------------------------------------------------------------------
# instance
# ---------------------------------------------------------------------------


@dataclass
class DualTensorInstance:
    """Everything fixed about one decoding family: the two RS codes, the rate
    slack eps, the configured product-expansion rho, and the constant scale."""

    field: Field
    n: int
    k1: int
    k2: int
    E1: np.ndarray
    E2: np.ndarray
    eps: Fraction
    rho: Fraction = Fraction(1, 8)
    gamma: int = 1000

    def __post_init__(self):
        if self.k1 + self.k2 > (1 - self.eps) * self.n:
            raise ValueError("rates must satisfy k1 + k2 <= (1 - eps) n")
        self.E1 = np.asarray(self.E1, dtype=np.int64)
        self.E2 = np.asarray(self.E2, dtype=np.int64)
        if self.E1.size != self.n or self.E2.size != self.n:
            raise ValueError("evaluation sets must have size n")

    @staticmethod
    def build(F: Field, n: int, k1: int, k2: int, eps: Fraction,
              rho: Fraction = Fraction(1, 8), gamma: int = 1000,
              E1: np.ndarray | None = None, E2: np.ndarray | None = None
              ) -> "DualTensorInstance":
        pts = canonical_points(F, n)
        return DualTensorInstance(F, n, k1, k2,
                                  pts if E1 is None else E1,
                                  pts if E2 is None else E2, eps, rho, gamma)

    # derived constants ------------------------------------------------------

    @property
    def unit(self) -> Fraction:
        return self.rho * self.eps * self.n / self.gamma

    @property
    def s(self) -> int:
        return max(1, math.ceil(self.unit))

    @property
    def d0(self) -> Fraction:
        return self.unit ** 2

    @property
    def alpha(self) -> Fraction:
        return (Fraction(self.gamma) / (self.rho * self.eps)) ** 2

    @property
    def stage1_bound(self) -> Fraction:
        # rho*eps*n^2/50 at the reference gamma = 1000
        return Fraction(20, self.gamma) * self.rho * self.eps * self.n ** 2

    @property
    def stripe_bound(self) -> Fraction:
        # eps*n/25 at the reference gamma = 1000
        return Fraction(40, self.gamma) * self.eps * self.n

    def stripe_radius(self, kdim: int) -> int:
        cap = (self.n - kdim) // 2
        return min(int(self.stripe_bound), cap)

    @property
    def peel_radius(self) -> int:
        return math.ceil(self.eps * self.n / 2) - 1

    # codes -------------------------------------------------------------------

    @cached_property
    def C1(self) -> ReedSolomon:
        return rs_code(self.field, self.n, self.k1, self.E1)

    @cached_property
    def C2(self) -> ReedSolomon:
        return rs_code(self.field, self.n, self.k2, self.E2)

    @cached_property
    def C1p(self) -> ReedSolomon:
        return rs_code(self.field, self.n, self.k1 + self.s, self.E1)

    @cached_property
    def C2p(self) -> ReedSolomon:
        return rs_code(self.field, self.n, self.k2 + self.s, self.E2)

    def member(self, c: np.ndarray) -> bool:
        H1 = self.C1.parity_check()
        H2 = self.C2.parity_check()
        return not np.any(la.matmul(self.field, la.matmul(self.field, H1, c), H2.T))

    def member_enlarged(self, c: np.ndarray) -> bool:
        H1 = self.C1p.parity_check()
        H2 = self.C2p.parity_check()
        return not np.any(la.matmul(self.field, la.matmul(self.field, H1, c), H2.T))

    def to_json(self) -> dict:
        return {
            "field": {"p": self.field.p, "e": self.field.e,
                      "modulus": list(self.field.modulus)},
            "n": self.n, "k1": self.k1, "k2": self.k2,
            "E1": [int(x) for x in self.E1], "E2": [int(x) for x in self.E2],
            "eps": [self.eps.numerator, self.eps.denominator],
            "rho": [self.rho.numerator, self.rho.denominator],
            "gamma": self.gamma,
        }

    @staticmethod
    def from_json(doc: dict) -> "DualTensorInstance":
        f = doc["field"]
        F = Field.get(f["p"], f["e"], tuple(f["modulus"]))
        return DualTensorInstance(
            F, doc["n"], doc["k1"], doc["k2"],
            np.array(doc["E1"], dtype=np.int64), np.array(doc["E2"], dtype=np.int64),
            Fraction(*doc["eps"]), Fraction(*doc["rho"]), doc["gamma"])


# ---------------------------------------------------------------------------
# stage 1: error-locator stage
# ---------------------------------------------------------------------------


def _scaled_parity(F: Field, H: np.ndarray, powers: np.ndarray) -> np.ndarray:
    return F.mul(H, powers[None, :])


def _dual_support_basis(inst: DualTensorInstance, T: np.ndarray) -> np.ndarray:
    """Basis (as flattened Z with w = H1'^T Z H2') of the vectors of
    C1'^perp (x) C2'^perp supported inside the cell set T."""
    F = inst.field
    H1p = inst.C1p.parity_check()
    H2p = inst.C2p.parity_check()
    m1, m2 = H1p.shape[0], H2p.shape[0]
    off = np.argwhere(~T)
    if off.shape[0] == 0:
        return la.identity(m1 * m2)
    rows = []
    for start in range(0, off.shape[0], 4096):
        blk = off[start:start + 4096]
        R = H1p[:, blk[:, 0]].T  # (cells, m1)
        S = H2p[:, blk[:, 1]].T  # (cells, m2)
        rows.append(F.mul(R[:, :, None], S[:, None, :]).reshape(blk.shape[0], m1 * m2))
    return la.right_kernel(F, np.concatenate(rows, axis=0))


def _e_coeff_basis(inst: DualTensorInstance, K: np.ndarray,
                   T: np.ndarray) -> np.ndarray:
    """Basis of all e in F[X]^{[0,s]^2} with (e*c) restricted to the cell set
    T lying inside the restriction of C1' [+] C2'.

    K is the (m1*m2) x (s+1)^2 matrix whose column (a, b) flattens
    H1'(x1^a x2^b c)H2'^T; the constraint row induced by a support-confined
    dual vector w = H1'^T Z H2' is then vec(Z) K.
    """
    F = inst.field
    Zker = _dual_support_basis(inst, T)
    if Zker.shape[0] == 0:
        return la.identity((inst.s + 1) ** 2)
    return la.right_kernel(F, la.matmul(F, Zker, K))


def _row_polys(inst: DualTensorInstance, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(per-x1 coefficient rows in X2, per-x2 coefficient columns in X1)."""
    F = inst.field
    V1s = vandermonde(F, inst.E1, inst.s + 1)
    V2s = vandermonde(F, inst.E2, inst.s + 1)
    rows = la.matmul(F, V1s, U)          # n x (s+1): e(x1, X2) coefficients
    cols = la.matmul(F, U, V2s.T)        # (s+1) x n: e(X1, x2) coefficients
    return rows, cols


def _gcd_over(F: Field, coeff_rows: list[np.ndarray]) -> np.ndarray:
    """Monic gcd of a set of univariate polynomials; the all-zero set gives
    the zero polynomial (empty coefficient array)."""
    g = np.zeros(0, dtype=np.int64)
    for cr in coeff_rows:
        cr = uni_trim(cr)
        if cr.size == 0:
            continue
        g = cr if g.size == 0 else uni_gcd(F, g, cr)
        if g.size == 1:  # gcd is already 1
            return g
    return g


def dec_init(inst: DualTensorInstance, c: np.ndarray) -> np.ndarray:
    """Stage 1: returns c' in C1' [+] C2' close to c (error-locator stage)."""
    F = inst.field
    n, s = inst.n, inst.s
    c = np.asarray(c, dtype=np.int64).reshape(n, n)
    H1p = inst.C1p.parity_check()
    H2p = inst.C2p.parity_check()
    V1s = vandermonde(F, inst.E1, s + 1)
    V2s = vandermonde(F, inst.E2, s + 1)

    # nonzero e0 with (e0 * c) in C1' [+] C2': kernel of a linear system in
    # the (s+1)^2 coefficients
    cols = []
    for a in range(s + 1):
        Ca = la.matmul(F, _scaled_parity(F, H1p, V1s[:, a]), c)
        for b in range(s + 1):
            M = la.matmul(F, Ca, _scaled_parity(F, H2p, V2s[:, b]).T)
            cols.append(M.ravel())
    K = np.stack(cols, axis=1)
    ker = la.right_kernel(F, K)
    if ker.shape[0] == 0:
        raise PromiseViolation("no nonzero error locator e0 exists")
    U0 = ker[0].reshape(s + 1, s + 1)

    e0_rows, e0_cols = _row_polys(inst, U0)
    alive1 = np.any(e0_rows != 0, axis=1)
    alive2 = np.any(e0_cols != 0, axis=0)
    e0_grid = la.matmul(F, la.matmul(F, V1s, U0), V2s.T)
    supp = e0_grid != 0

    def current_T() -> np.ndarray:
        return supp & np.outer(alive1, alive2)

    basis = _e_coeff_basis(inst, K, current_T())
    g1: list[np.ndarray | None] = [None] * n
    g2: list[np.ndarray | None] = [None] * n
    e_rows = [_row_polys(inst, u.reshape(s + 1, s + 1)) for u in basis]
    for x1 in range(n):
        if alive1[x1]:
            g1[x1] = _gcd_over(F, [rows[x1] for rows, _ in e_rows])
    for x2 in range(n):
        if alive2[x2]:
            g2[x2] = _gcd_over(F, [cols[:, x2] for _, cols in e_rows])

    # while some gcd vanishes on a live pair, remove the pair
    while True:
        hit = None
        live1 = np.nonzero(alive1)[0]
        live2 = np.nonzero(alive2)[0]
        for x1 in live1:
            vals = uni_eval(F, g1[x1], inst.E2[live2]) if g1[x1].size else \
                np.zeros(live2.size, dtype=np.int64)
            zero2 = live2[np.nonzero(vals == 0)[0]] if g1[x1].size else live2
            if zero2.size:
                hit = (int(x1), int(zero2[0]))
                break
        if hit is None:
            for x2 in live2:
                vals = uni_eval(F, g2[x2], inst.E1[live1]) if g2[x2].size else \
                    np.zeros(live1.size, dtype=np.int64)
                zero1 = live1[np.nonzero(vals == 0)[0]] if g2[x2].size else live1
                if zero1.size:
                    hit = (int(zero1[0]), int(x2))
                    break
        if hit is None:
            break
        alive1[hit[0]] = False
        alive2[hit[1]] = False

    # recompute the basis over the shrunken support, then drop every index
    # whose recomputed gcd is not 1
    basis2 = _e_coeff_basis(inst, K, current_T())
    e_rows2 = [_row_polys(inst, u.reshape(s + 1, s + 1)) for u in basis2]
    for x1 in np.nonzero(alive1)[0]:
        g = _gcd_over(F, [rows[x1] for rows, _ in e_rows2])
        if not (g.size == 1 and g[0] == 1):
            alive1[x1] = False
    for x2 in np.nonzero(alive2)[0]:
        g = _gcd_over(F, [cols[:, x2] for _, cols in e_rows2])
        if not (g.size == 1 and g[0] == 1):
            alive2[x2] = False

    # erasure fill: any c' in C1' [+] C2' agreeing with c on the final cells
    T = current_T()
    cp = np.where(T, c, 0).astype(np.int64)
    off = np.argwhere(~T)
    if off.shape[0]:
        m1, m2 = H1p.shape[0], H2p.shape[0]
        cols = []
        for start in range(0, off.shape[0], 4096):
            blk = off[start:start + 4096]
            R = H1p[:, blk[:, 0]].T
            S = H2p[:, blk[:, 1]].T
            cols.append(F.mul(R[:, :, None], S[:, None, :]).reshape(blk.shape[0], m1 * m2))
        A = np.concatenate(cols, axis=0).T  # (m1*m2) x cells
        rhs = F.neg(la.matmul(F, la.matmul(F, H1p, cp), H2p.T).ravel())
        sol = la.solve_right(F, A, rhs)
        if sol is None:
            raise PromiseViolation("erasure fill infeasible")
        cp[off[:, 0], off[:, 1]] = sol
    if not inst.member_enlarged(cp):
        raise PromiseViolation("stage-1 output escaped the enlarged code")
    return cp


# ---------------------------------------------------------------------------
# stage 2: degree reduction
# ---------------------------------------------------------------------------


def bivariate_coeffs(F: Field, E1: np.ndarray, E2: np.ndarray,
                     c: np.ndarray) -> np.ndarray:
    """The unique coefficient matrix with ev(f) = c on the grid E1 x E2."""
    n = E1.size
    V1 = vandermonde(F, E1, n)
    V2 = vandermonde(F, E2, n)
    T1 = la.solve_right(F, V1, c)
    Fc = la.solve_right(F, V2, T1.T)
    assert T1 is not None and Fc is not None
    return Fc.T


def dec_close(inst: DualTensorInstance, cp: np.ndarray) -> np.ndarray:
    """Stage 2: strip the s extra coefficient rows/columns by per-stripe RS
    decoding, landing in C1 [+] C2."""
    F = inst.field
    n, s, k1, k2 = inst.n, inst.s, inst.k1, inst.k2
    cp = np.asarray(cp, dtype=np.int64).reshape(n, n)
    Fc = bivariate_coeffs(F, inst.E1, inst.E2, cp)
    V1 = vandermonde(F, inst.E1, n)
    V2 = vandermonde(F, inst.E2, n)
    out = cp.copy()
    rad2 = inst.stripe_radius(k2 + s)
    for j1 in range(k1, k1 + s):
        v = la.matvec(F, V2, Fc[j1, :])
        cw = berlekamp_welch(F, inst.E2, k2 + s, v, rad2)
        if cw is None:
            raise PromiseViolation(f"stripe decode failed on coefficient row {j1}")
        r = F.sub(v, cw)
        out = F.sub(out, F.mul(V1[:, j1][:, None], r[None, :]))
    rad1 = inst.stripe_radius(k1 + s)
    for j2 in range(k2, k2 + s):
        v = la.matvec(F, V1, Fc[:, j2])
        cw = berlekamp_welch(F, inst.E1, k1 + s, v, rad1)
        if cw is None:
            raise PromiseViolation(f"stripe decode failed on coefficient column {j2}")
        r = F.sub(v, cw)
        out = F.sub(out, F.mul(r[:, None], V2[:, j2][None, :]))
    if not inst.member(out):
        raise PromiseViolation("stage-2 output is not in C1 [+] C2")
    return out


# ---------------------------------------------------------------------------
# stage 3: greedy peeling
# ---------------------------------------------------------------------------


def dec_finish(inst: DualTensorInstance, y: np.ndarray) -> tuple[np.ndarray, int]:
    """Stage 3: repeatedly peel single-column/row codewords within the peel
    radius; strictly decreases |y| each step, at most n^2 iterations."""
    F = inst.field
    n = inst.n
    y = np.asarray(y, dtype=np.int64).reshape(n, n).copy()
    t = inst.peel_radius
    iters = 0
    while True:
        progressed = False
        for x2 in range(n):
            col = y[:, x2]
            if not col.any():
                continue
            cw = berlekamp_welch(F, inst.E1, inst.k1, col, t)
            if cw is not None and cw.any():
                y[:, x2] = F.sub(col, cw)
                progressed = True
                break
        for x1 in range(n):
            row = y[x1, :]
            if not row.any():
                continue
            cw = berlekamp_welch(F, inst.E2, inst.k2, row, t)
            if cw is not None and cw.any():
                y[x1, :] = F.sub(row, cw)
                progressed = True
                break
        if not progressed:
            return y, iters
        iters += 1
        if iters > n * n:
            raise AssertionError("peeling exceeded the n^2 iteration bound")


# ---------------------------------------------------------------------------
# full alpha-decoder
# ---------------------------------------------------------------------------


@dataclass
class AlphaResult:
    word: np.ndarray
    fallback: bool
    residual: int
    stages: dict = dfield(default_factory=dict)


def alpha_decode(inst: DualTensorInstance, c: np.ndarray) -> AlphaResult:
    """Total decoder: always outputs a codeword of C1 [+] C2; within alpha
    times the optimal distance whenever the input satisfies the promise
    d(c, code) <= d0.  FALLBACK marks the arbitrary-codeword escape hatch."""
    F = inst.field
    n = inst.n
    c = np.asarray(c, dtype=np.int64).reshape(n, n)
    if inst.member(c):
        return AlphaResult(c.copy(), False, 0, {"path": "membership"})
    if inst.d0 < 1:
        return AlphaResult(np.zeros((n, n), dtype=np.int64), True,
                           int(np.count_nonzero(c)), {"path": "membership"})
    try:
        cp = dec_init(inst, c)
        s1 = int(np.count_nonzero(F.sub(cp, c)))
        cpp = dec_close(inst, cp)
        y = F.sub(cpp, c)
        yp, iters = dec_finish(inst, y)
        out = F.add(c, yp)
        if not inst.member(out):
            raise PromiseViolation("final output not a codeword")
        return AlphaResult(out, False, int(np.count_nonzero(F.sub(out, c))),
                           {"path": "pipeline", "stage1_residual": s1,
                            "stage3_weight": int(np.count_nonzero(yp)),
                            "peel_iterations": iters})
    except PromiseViolation as exc:
        return AlphaResult(np.zeros((n, n), dtype=np.int64), True,
                           int(np.count_nonzero(c)),
                           {"path": "fallback", "reason": str(exc)})


# ---------------------------------------------------------------------------
# planted instances
# ---------------------------------------------------------------------------


def random_codeword(inst: DualTensorInstance, rng: np.random.Generator) -> np.ndarray:
    """Uniform element of C1 [+] C2 written as column-part + row-part."""
    F = inst.field
    n = inst.n
    colpart = la.matmul(F, inst.C1.gen.T, F.random(rng, (inst.k1, n))) \
        if inst.k1 else np.zeros((n, n), dtype=np.int64)
    rowpart = la.matmul(F, F.random(rng, (n, inst.k2)), inst.C2.gen) \
        if inst.k2 else np.zeros((n, n), dtype=np.int64)
    return F.add(colpart, rowpart)


def random_error(F: Field, n: int, weight: int, rng: np.random.Generator) -> np.ndarray:
    e = np.zeros(n * n, dtype=np.int64)
    if weight:
        support = rng.permutation(n * n)[:weight]
        e[support] = F.random(rng, weight, nonzero=True)
    return e.reshape(n, n)
