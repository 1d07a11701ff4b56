"""Verification and synthesis of transversal multi-controlled-Z gates.

The gate condition is purely classical: subspaces L (logical) and S
(stabilizer) of the physical space must satisfy the multiplication property
L^{*r} intersect S*(L+S)^{*(r-1)} = {0}; a coefficients vector a then makes
the phase identity sum_j z^1_j...z^r_j = sum_j a_j z'^1_j...z'^r_j hold for
all encoded representatives.  This module machine-checks the property (dense
rank certificates, with an exponent-set fast path for evaluation codes on a
full field grid), synthesizes the coefficients vector, tests the phase
identity on sampled tuples, and builds the three-factor punctured-tensor
construction at large q in factored form.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from functools import reduce

import numpy as np

from .gf import Field
from . import linalg as la
from .codes import (BudgetExceeded, LinearCode, box_exponents, canonical_points,
                    eval_code, monomial_eval_matrix, rs_code)
from .subsystem import CssPair, quantum_rs, subsystem_product


# ---------------------------------------------------------------------------
# star-power spans with duplicate collapse
# ---------------------------------------------------------------------------


def _dedup_rows(rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] <= 1:
        return rows
    seen: set[bytes] = set()
    keep = []
    for i in range(rows.shape[0]):
        key = rows[i].tobytes()
        if key not in seen:
            seen.add(key)
            keep.append(i)
    return rows[keep]


def _pair_products(F: Field, A: np.ndarray, B: np.ndarray,
                   chunk: int = 1 << 20) -> np.ndarray:
    n = A.shape[1]
    out = []
    step = max(1, chunk // max(1, B.shape[0] * n))
    for i in range(0, A.shape[0], step):
        block = F.mul(A[i:i + step, None, :], B[None, :, :])
        out.append(block.reshape(-1, n))
    return np.concatenate(out, axis=0)


def star_span(F: Field, A: np.ndarray, B: np.ndarray,
              pair_cap: int = 2_000_000) -> np.ndarray:
    """Spanning rows of span(A) * span(B): pairwise products, duplicates
    collapsed, compressed to a row basis when they outgrow the ambient
    dimension."""
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64)
    if A.shape[0] * B.shape[0] > pair_cap:
        raise BudgetExceeded(
            f"star product with {A.shape[0] * B.shape[0]} generator pairs exceeds cap")
    rows = _dedup_rows(_pair_products(F, A, B))
    rows = rows[np.any(rows, axis=1)]
    if rows.shape[0] > A.shape[1]:
        rows = la.row_space(F, rows)
    return rows


@dataclass
class MultCertificate:
    holds: bool
    rank_l_power: int
    rank_obstruction: int
    rank_stack: int
    intersection_dim: int
    method: str

    def to_json(self) -> dict:
        return {"holds": self.holds, "rank_l_power": self.rank_l_power,
                "rank_obstruction": self.rank_obstruction,
                "rank_stack": self.rank_stack,
                "intersection_dim": self.intersection_dim, "method": self.method}


def multiplication_property(F: Field, L_gen: np.ndarray, S_gen: np.ndarray,
                            r: int, pair_cap: int = 2_000_000,
                            ambient_cap: int = 200_000) -> MultCertificate:
    """Rank certificate for L^{*r} intersect S*(L+S)^{*(r-1)} = {0}.

    Refuses (BudgetExceeded) rather than run past the caps.
    """
    if r < 2:
        raise ValueError("gate arity r must be >= 2")
    L_gen = np.atleast_2d(np.asarray(L_gen, dtype=np.int64))
    S_gen = np.atleast_2d(np.asarray(S_gen, dtype=np.int64))
    n = L_gen.shape[1]
    if n > ambient_cap:
        raise BudgetExceeded(f"ambient dimension {n} exceeds cap {ambient_cap}")
    LS = np.concatenate([L_gen, S_gen], axis=0)
    lpow = L_gen
    for _ in range(r - 1):
        lpow = star_span(F, lpow, L_gen, pair_cap)
    obst = S_gen
    for _ in range(r - 1):
        obst = star_span(F, obst, LS, pair_cap)
    ra = la.rank(F, lpow)
    rb = la.rank(F, obst)
    rs = la.rank(F, np.concatenate([lpow, obst], axis=0))
    inter = ra + rb - rs
    return MultCertificate(inter == 0, ra, rb, rs, inter, "dense-rank")


# ---------------------------------------------------------------------------
# exponent-set machinery for full-grid evaluation codes
# ---------------------------------------------------------------------------


def reduce_exponent(q: int, e: int) -> int:
    """Exponent reduction on a full field grid: x^q = x for all x."""
    if e < q:
        return e
    return 1 + (e - 1) % (q - 1)


def reduce_tuple(q: int, expo: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(reduce_exponent(q, e) for e in expo)


def sumset(q: int, A: set[tuple[int, ...]], B: set[tuple[int, ...]],
           reduce_exps: bool = True) -> set[tuple[int, ...]]:
    out = set()
    for a in A:
        for b in B:
            s = tuple(x + y for x, y in zip(a, b))
            out.add(reduce_tuple(q, s) if reduce_exps else s)
    return out


def power_sumset(q: int, A: set[tuple[int, ...]], r: int,
                 reduce_exps: bool = True) -> set[tuple[int, ...]]:
    out = A
    for _ in range(r - 1):
        out = sumset(q, out, A, reduce_exps)
    return out


@dataclass
class ExponentCheck:
    empty: bool
    witness: tuple[int, ...] | None
    l_power_set: frozenset
    obstruction_set: frozenset


def exponent_intersection(q: int, M: set[tuple[int, ...]],
                          T: set[tuple[int, ...]], r: int,
                          reduce_exps: bool = True) -> ExponentCheck:
    """Emptiness of red(rM) intersect red(T + (M u T)^{+(r-1)}): the symbolic
    counterpart of the multiplication property for monomial-spanned spaces on a
    full field grid (exact when exponent reduction is enabled)."""
    lpow = power_sumset(q, M, r, reduce_exps)
    mu = M | T
    obst = T
    for _ in range(r - 1):
        obst = sumset(q, obst, mu, reduce_exps)
    inter = lpow & obst
    witness = min(inter) if inter else None
    return ExponentCheck(not inter, witness, frozenset(lpow), frozenset(obst))


# ---------------------------------------------------------------------------
# Reed-Solomon instantiation
# ---------------------------------------------------------------------------


@dataclass
class TransRsParams:
    r: int
    q: int
    eps: Fraction
    k1x: int
    k1z: int
    k2x: int
    k2z: int
    ell_lo: int
    ell_hi: int

    @property
    def factor_dims(self) -> tuple[int, int]:
        return (self.k1x + self.k1z - self.q, self.k2x + self.k2z - self.q)

    @property
    def code_dim(self) -> int:
        d1, d2 = self.factor_dims
        return d1 * d2

    @property
    def gate_qudits(self) -> int:
        return (self.ell_hi - self.ell_lo) ** 2

    def m_box(self) -> set[tuple[int, int]]:
        return set(itertools.product(range(self.ell_lo, self.ell_hi), repeat=2))

    def t_box(self) -> set[tuple[int, int]]:
        out = set()
        for a in range(self.k1z):
            for b in range(self.q - self.k2x):
                out.add((a, b))
        for a in range(self.q - self.k1x):
            for b in range(self.k2z):
                out.add((a, b))
        return out

    def to_json(self) -> dict:
        return {"r": self.r, "q": self.q,
                "eps": [self.eps.numerator, self.eps.denominator],
                "k1x": self.k1x, "k1z": self.k1z, "k2x": self.k2x, "k2z": self.k2z,
                "ell_lo": self.ell_lo, "ell_hi": self.ell_hi,
                "code_dim": self.code_dim, "gate_qudits": self.gate_qudits}


def transrs_params(r: int, q: int) -> TransRsParams:
    """Parameter record of the two-factor quantum-RS gate construction."""
    if q < 4 * r * r:
        raise ValueError(f"need q >= 4r^2 = {4 * r * r}, got q = {q}")
    eps = Fraction(1, 4 * r)
    floor_eq = math.floor(eps * q)
    k1 = q - floor_eq
    k2x = q - 2 * floor_eq
    k2z = q // r
    ell_lo = math.ceil(Fraction(q, r) - Fraction(q, 2 * r * r))
    ell_hi = k2z
    return TransRsParams(r, q, eps, k1, k1, k2x, k2z, ell_lo, ell_hi)


def exponent_set_check(r: int, q: int, ell_lo: int | None = None,
                       reduce_exps: bool = True) -> ExponentCheck:
    """Symbolic multiplication-property check for the RS instantiation; an
    overridden ell_lo supports stress harnesses that break the window."""
    p = transrs_params(r, q)
    if ell_lo is not None:
        p = TransRsParams(p.r, p.q, p.eps, p.k1x, p.k1z, p.k2x, p.k2z,
                          ell_lo, p.ell_hi)
    return exponent_intersection(q, p.m_box(), p.t_box(), r, reduce_exps)


# ---------------------------------------------------------------------------
# gate synthesis (dense representation)
# ---------------------------------------------------------------------------


@dataclass
class GateInstance:
    r: int
    factors: list[CssPair]
    L_list: list[LinearCode]
    S_basis: np.ndarray
    A_sets: list[list[int]]          # per-factor information sets
    A_flat: np.ndarray               # flat product indices, message order
    enc_basis: np.ndarray            # (l, N): encodings of the unit messages
    a: np.ndarray                    # coefficients vector, length N
    certificate: MultCertificate
    label: str = ""

    @property
    def n_logical(self) -> int:
        return self.enc_basis.shape[0]

    @property
    def field(self) -> Field:
        return self.factors[0].field

    def to_json(self) -> dict:
        return {"r": self.r, "label": self.label,
                "factors": [f.to_json() for f in self.factors],
                "L": [L.to_json() for L in self.L_list],
                "S": [int(x) for x in self.S_basis.ravel()],
                "S_rows": self.S_basis.shape[0],
                "A_sets": self.A_sets,
                "a": [int(x) for x in self.a],
                "certificate": self.certificate.to_json()}


def first_information_set(code: LinearCode) -> list[int]:
    """First column set on which the code restricts isomorphically (pivots
    of the rref generator)."""
    _, piv = la.rref(code.field, code.gen)
    return piv


def synthesize_gate(factors: list[CssPair], L_list: list[LinearCode], r: int,
                    S_basis: np.ndarray | None = None,
                    certificate: MultCertificate | None = None,
                    pair_cap: int = 2_000_000, label: str = "") -> GateInstance:
    """Build the coefficients vector from the multiplication property.

    The projection onto L^{*r} along the obstruction space is extended by
    zero on the pivot-ordered complement, making the vector reproducible.
    """
    F = factors[0].field
    N = int(np.prod([f.n for f in factors]))
    for f, L in zip(factors, L_list):
        if not la.row_space_contains(F, f.qz.gen, L.gen):
            raise ValueError("L_i must lie inside Q_Z^i")
        if la.row_space_intersection(F, L.gen, f.qx.dual().gen).shape[0]:
            raise ValueError("L_i must intersect (Q_X^i)^perp trivially")
    product = subsystem_product(factors) if len(factors) > 1 else factors[0]
    if S_basis is None:
        S_basis = product.stabilizer_basis()
    L_gen = reduce(lambda a, b: la.kron(F, a, b), [L.gen for L in L_list])
    if certificate is None:
        certificate = multiplication_property(F, L_gen, S_basis, r, pair_cap)
    if not certificate.holds:
        raise ValueError(f"multiplication property fails: {certificate}")

    # star-power bases
    LS = np.concatenate([L_gen, S_basis], axis=0)
    lpow = L_gen
    for _ in range(r - 1):
        lpow = star_span(F, lpow, L_gen, pair_cap)
    lpow = la.row_space(F, lpow)
    obst = S_basis
    for _ in range(r - 1):
        obst = star_span(F, obst, LS, pair_cap)
    obst = la.row_space(F, obst)

    # information sets and unit-message encodings
    A_sets = [first_information_set(L) for L in L_list]
    enc_factors = []
    for L, A in zip(L_list, A_sets):
        coefs = la.solve_right(F, L.gen[:, A].T, la.identity(len(A)))
        assert coefs is not None
        enc_factors.append(la.matmul(F, coefs.T, L.gen))
    enc_basis = reduce(lambda a, b: la.kron(F, a, b), enc_factors)
    A_flat = np.array([
        np.ravel_multi_index(idx, tuple(f.n for f in factors))
        for idx in itertools.product(*A_sets)], dtype=np.int64)

    # eta = projection onto span(lpow) along span(obst), zero on the
    # pivot-ordered complement; a._z = indicator(A) . eta(z)
    partial = np.concatenate([lpow, obst], axis=0)
    _, piv = la.rref(F, partial)
    pivset = set(piv)
    free = [c for c in range(N) if c not in pivset][: N - partial.shape[0]]
    comp = np.zeros((N - partial.shape[0], N), dtype=np.int64)
    for i, c in enumerate(free):
        comp[i, c] = 1
    M = np.concatenate([partial, comp], axis=0)
    if M.shape[0] != N or la.rank(F, M) != N:
        raise RuntimeError("complement completion failed")
    w = np.zeros(N, dtype=np.int64)
    ones_a = np.zeros(N, dtype=np.int64)
    ones_a[A_flat] = 1
    w[: lpow.shape[0]] = la.matmul(F, lpow, ones_a[:, None])[:, 0]
    a = la.solve_right(F, M, w)
    if a is None:
        raise RuntimeError("coefficient solve failed")
    return GateInstance(r, factors, L_list, S_basis, [list(map(int, A)) for A in A_sets],
                        A_flat, enc_basis, a, certificate, label)


@dataclass
class PhaseReport:
    trials: int
    passed: int
    counterexample: dict | None

    @property
    def all_passed(self) -> bool:
        return self.passed == self.trials and self.counterexample is None


def phase_identity_test(gate: GateInstance, trials: int, seed: int) -> PhaseReport:
    """Exactly check sum_j prod_h z^h_j = sum_j a_j prod_h z'^h_j on sampled
    messages and coset representatives z'^h = Enc(z^h) + random stabilizer."""
    F = gate.field
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
    ell = gate.n_logical
    S = gate.S_basis
    for trial in range(trials):
        msgs = [F.random(rng, ell) for _ in range(gate.r)]
        reps = []
        for z in msgs:
            rep = la.matmul(F, z[None, :], gate.enc_basis)[0]
            if S.shape[0]:
                rep = F.add(rep, la.matmul(F, F.random(rng, S.shape[0])[None, :], S)[0])
            reps.append(rep)
        lhs = np.int64(0)
        prod_msgs = reduce(F.mul, msgs)
        lhs = reduce(F.add, [prod_msgs[j] for j in range(ell)], np.int64(0))
        prod_reps = reduce(F.mul, reps)
        rhs = np.int64(0)
        terms = F.mul(gate.a, prod_reps)
        for j in range(terms.size):
            rhs = F.add(rhs, terms[j])
        if int(lhs) != int(rhs):
            return PhaseReport(trials, trial, {
                "trial": trial, "lhs": int(lhs), "rhs": int(rhs),
                "messages": [[int(x) for x in z] for z in msgs]})
    return PhaseReport(trials, trials, None)


# ---------------------------------------------------------------------------
# two-factor Reed-Solomon gate builder
# ---------------------------------------------------------------------------


def _certify_monomial_stabilizer(F: Field, factors: list[CssPair],
                                 S_monomial: np.ndarray,
                                 t_exps: list[tuple[int, int]]) -> None:
    """Machine-check that the monomial rows span S = Q_Z intersect Q_X^perp
    of the product, using factor-level tests only.

    Membership: each row, reshaped to a matrix, is killed by the factor Q_Z
    parity checks and orthogonal to Q_X^1 (x) Q_X^2.  Independence: distinct
    reduced monomials on a full grid are independent because the univariate
    Vandermonde matrices are invertible.  Dimension: dim S = dim Q_Z - k with
    k the product of the factor dimensions.
    """
    n1, n2 = factors[0].n, factors[1].n
    h1z = factors[0].qz.parity_check()
    h2z = factors[1].qz.parity_check()
    g1x = factors[0].qx.gen
    g2x = factors[1].qx.gen
    for row in S_monomial:
        V = row.reshape(n1, n2)
        if np.any(la.matmul(F, h1z, V)) or np.any(la.matmul(F, V, h2z.T)):
            raise RuntimeError("monomial stabilizer row escapes Q_Z")
        if np.any(la.matmul(F, la.matmul(F, g1x, V), g2x.T)):
            raise RuntimeError("monomial stabilizer row escapes Q_X^perp")
    pts = canonical_points(F, F.q)
    V1 = vandermonde_full(F, pts)
    if la.rank(F, V1) != F.q:
        raise RuntimeError("full-grid Vandermonde is singular")
    k = factors[0].dimension * factors[1].dimension
    dim_s = factors[0].qz.k * factors[1].qz.k - k
    if len(t_exps) != dim_s:
        raise RuntimeError(f"monomial count {len(t_exps)} != dim S = {dim_s}")


def vandermonde_full(F: Field, points: np.ndarray) -> np.ndarray:
    from .codes import vandermonde
    return vandermonde(F, points, points.size)


def build_transrs_gate(F: Field, r: int, use_monomial_structure: bool | None = None,
                       pair_cap: int = 2_000_000) -> GateInstance:
    """Gate instance for the two-factor quantum-RS construction at q = |F|.

    Small fields run the generic dense-rank route; larger ones exploit that
    every space involved is spanned by monomial evaluations on the full grid
    (certified at the factor level), where star products act on exponent
    sets and the projection is diagonal in monomial coordinates.
    """
    q = F.q
    p = transrs_params(r, q)
    factors = [quantum_rs(F, q, p.k1x, p.k1z), quantum_rs(F, q, p.k2x, p.k2z)]
    pts = canonical_points(F, q)
    L_list = [rs_window(F, pts, p.ell_lo, p.ell_hi),
              rs_window(F, pts, p.ell_lo, p.ell_hi)]
    grid = grid_points(F, 2)
    t_exps = sorted(p.t_box())
    S_monomial = monomial_eval_matrix(F, grid, t_exps)
    if use_monomial_structure is None:
        use_monomial_structure = q > 16
    if not use_monomial_structure:
        product = subsystem_product(factors)
        S_generic = product.stabilizer_basis()
        if la.rank(F, np.concatenate([S_generic, S_monomial], axis=0)) != \
                S_generic.shape[0] or S_generic.shape[0] != len(t_exps):
            raise RuntimeError("monomial model of the stabilizer space is wrong")
        cert = multiplication_property(
            F, la.kron(F, L_list[0].gen, L_list[1].gen), S_generic, r, pair_cap)
        return synthesize_gate(factors, L_list, r, S_basis=S_generic,
                               certificate=cert, pair_cap=pair_cap,
                               label=f"transRS(r={r},q={q})")
    _certify_monomial_stabilizer(F, factors, S_monomial, t_exps)
    m_exps = set(p.m_box())
    lpow_exps = sorted(power_sumset(q, m_exps, r))
    mu = m_exps | set(t_exps)
    obst_exps: set[tuple[int, ...]] = set(t_exps)
    for _ in range(r - 1):
        obst_exps = sumset(q, obst_exps, mu)
    inter = set(lpow_exps) & obst_exps
    # distinct reduced monomials on the full grid are independent, so set
    # sizes are the ranks once the Vandermonde factors are invertible
    ra, rb = len(lpow_exps), len(obst_exps)
    cert = MultCertificate(not inter, ra, rb, ra + rb - len(inter),
                           len(inter), "monomial-rank")
    if not cert.holds:
        raise ValueError(f"multiplication property fails: {cert}")
    return _synthesize_monomial(F, factors, L_list, p, lpow_exps, S_monomial,
                                cert, label=f"transRS(r={r},q={q})")


def _synthesize_monomial(F: Field, factors: list[CssPair],
                         L_list: list[LinearCode], p: TransRsParams,
                         lpow_exps: list[tuple[int, int]],
                         S_basis: np.ndarray, cert: MultCertificate,
                         label: str) -> GateInstance:
    """Coefficients vector via monomial coordinates: the projection onto the
    L-power monomials along all remaining monomials is a coordinate
    projection after full-grid interpolation, so
    a = sum_d (1_A . ev(X^d)) * (V1^{-1}[d1, :] (x) V2^{-1}[d2, :])."""
    q = F.q
    pts = canonical_points(F, q)
    V = vandermonde_full(F, pts)
    Vinv = la.solve_right(F, V, la.identity(q))
    assert Vinv is not None
    A_sets = [first_information_set(L) for L in L_list]
    enc_factors = []
    for L, A in zip(L_list, A_sets):
        coefs = la.solve_right(F, L.gen[:, A].T, la.identity(len(A)))
        assert coefs is not None
        enc_factors.append(la.matmul(F, coefs.T, L.gen))
    enc_basis = la.kron(F, enc_factors[0], enc_factors[1])
    A_flat = np.array([np.ravel_multi_index(idx, (q, q))
                       for idx in itertools.product(*A_sets)], dtype=np.int64)
    grid = grid_points(F, 2)
    a = np.zeros(q * q, dtype=np.int64)
    for (d1, d2) in lpow_exps:
        mono = monomial_eval_matrix(F, grid, [(d1, d2)])[0]
        beta = np.int64(0)
        for j in A_flat:
            beta = F.add(beta, mono[j])
        if beta:
            a = F.add(a, F.mul(np.int64(beta),
                               la.kron(F, Vinv[d1][None, :], Vinv[d2][None, :])[0]))
    return GateInstance(p.r, factors, L_list, S_basis,
                        [list(map(int, A)) for A in A_sets], A_flat,
                        enc_basis, a, cert, label)


def rs_window(F: Field, points: np.ndarray, lo: int, hi: int) -> LinearCode:
    gen = monomial_eval_matrix(F, points[:, None], [(e,) for e in range(lo, hi)])
    return LinearCode(F, points.size, gen, label=f"ev[X^[{lo},{hi})]")


def grid_points(F: Field, t: int) -> np.ndarray:
    pts = canonical_points(F, F.q)
    cols = np.meshgrid(*([pts] * t), indexing="ij")
    return np.stack([c.ravel() for c in cols], axis=1)


# ---------------------------------------------------------------------------
# three-factor punctured-tensor construction at large q
# ---------------------------------------------------------------------------


@dataclass
class TripleProductParams:
    m: int
    u: int
    k0: int
    eps: Fraction
    kx: tuple[int, int, int]
    kz: tuple[int, int, int]
    ell_lo: int
    ell_hi: int

    @property
    def n(self) -> int:
        return self.m ** self.u

    @property
    def window_size(self) -> int:
        return max(0, self.ell_hi - self.ell_lo)

    @property
    def degraded(self) -> bool:
        return self.m < 100

    @property
    def logical_qudits(self) -> int:
        return self.window_size ** self.u

    def to_json(self) -> dict:
        return {"m": self.m, "u": self.u, "k0": self.k0,
                "eps": [self.eps.numerator, self.eps.denominator],
                "kx": list(self.kx), "kz": list(self.kz),
                "ell_lo": self.ell_lo, "ell_hi": self.ell_hi,
                "window_size": self.window_size, "degraded": self.degraded}


def triple_product_params(m: int, u: int) -> TripleProductParams:
    if m < 8:
        raise ValueError("m >= 8 required")
    k0 = m // 4
    eps = Fraction(1, 100)
    kx = math.floor(eps * k0)
    k12z = (2 * k0) // 3
    k3z = k0 // 3
    ell_lo = math.ceil((Fraction(1, 3) - eps) * k0)
    ell_hi = k0 // 3
    return TripleProductParams(m, u, k0, eps, (kx, kx, kx), (k12z, k12z, k3z),
                               ell_lo, ell_hi)


def smallest_window_m(start: int = 8, stop: int = 10_000) -> int:
    """Smallest m whose logical window [ell_lo, ell_hi) is nonempty."""
    for m in range(start, stop):
        if triple_product_params(m, 1).window_size > 0:
            return m
    raise RuntimeError("no nonempty window below the search bound")


# exponent-range bookkeeping for the obstruction-kill certificate: each
# factor part of a spanning element is either an evaluation box [lo, hi]
# per coordinate ("ev") or the dual-type code (gamma_i * ev-box)^perp
_EV, _DUAL = "ev", "dual"


def _factor_profile(p: TripleProductParams, kind: str, axis: int):
    """(type, degree range) of the axis-`axis` part of a spanning element of
    kind L, S1, S2, or S3."""
    if kind == "L":
        return (_EV, (p.ell_lo, p.ell_hi - 1))
    idx = int(kind[1]) - 1
    if axis == idx:
        # the gauge slot: (Q_X^i)^perp = ev box [0, kx)
        return (_EV, (0, p.kx[axis] - 1))
    if axis == 2:
        # factor 3 Z-code is a plain evaluation box
        return (_EV, (0, p.kz[2] - 1))
    return (_DUAL, None)


@dataclass
class TripleCertificate:
    holds: bool
    checks: dict
    failed_patterns: list

    def to_json(self) -> dict:
        return {"holds": self.holds, "checks": self.checks,
                "failed_patterns": [list(x) for x in self.failed_patterns]}


def _kill_certificate(p: TripleProductParams) -> tuple[bool, list]:
    """Exhaustive pattern check that every spanning product of
    S * (L+S)^{*2} is annihilated by the shifted gamma functional.

    Patterns assign each of the three product slots a kind (first slot in
    S1..S3, others in L/S1..S3).  A pattern is killed on axis i either by the
    gammareq functional (all three axis parts are evaluation boxes whose
    shifted degree range avoids k0 inside [0, 2k0]) or by duality (exactly
    one part is the dual-type code and the others' shifted product degree
    stays below that code's defining box).
    """
    shift = p.k0 - 3 * p.ell_lo
    failed = []
    kinds = ["S1", "S2", "S3"]
    all_kinds = ["L", "S1", "S2", "S3"]
    for pat in itertools.product(kinds, all_kinds, all_kinds):
        killed = False
        for axis in range(3):
            profs = [_factor_profile(p, kind, axis) for kind in pat]
            duals = [t for t, _ in profs if t == _DUAL]
            if not duals:
                lo = sum(r[0] for _, r in profs) + shift
                hi = sum(r[1] for _, r in profs) + shift
                if hi <= 2 * p.k0 and (hi < p.k0 or lo > p.k0):
                    killed = True
                    break
            elif len(duals) == 1:
                rest_hi = sum(r[1] for t, r in profs if t == _EV) + shift
                if rest_hi < p.kz[axis]:
                    killed = True
                    break
        if not killed:
            failed.append(pat)
    return not failed, failed


@dataclass
class TripleProductGate:
    field: Field
    params: TripleProductParams
    points: list[np.ndarray]        # three (n, u) evaluation sets
    gammas: list[np.ndarray]
    L_vectors: list[np.ndarray]     # one window monomial evaluation per factor
    j_star: tuple[int, int, int]
    a_parts: list[np.ndarray]       # gamma_i * ev(X^shift), per factor
    a_scale: int
    certificate: TripleCertificate
    block_bases: dict               # per factor-slot code bases for S sampling
    label: str = ""

    @property
    def n(self) -> int:
        return self.params.n

    def to_json(self) -> dict:
        return {"label": self.label, "params": self.params.to_json(),
                "field": {"p": self.field.p, "e": self.field.e,
                          "modulus": list(self.field.modulus)},
                "points": [[int(x) for x in E.ravel()] for E in self.points],
                "gammas": [[int(x) for x in g] for g in self.gammas],
                "j_star": list(self.j_star),
                "a_parts": [[int(x) for x in a] for a in self.a_parts],
                "a_scale": self.a_scale,
                "certificate": self.certificate.to_json()}


class GammaSolveError(RuntimeError):
    pass


def _solve_gamma(F: Field, points: np.ndarray, k0: int, u: int,
                 rng: np.random.Generator, retries: int = 64) -> np.ndarray:
    """Vector gamma with gamma . ev(X^a) = 1_{a = (k0..k0)} over the box
    [0, 2k0]^u, randomized inside the solution coset until entrywise nonzero."""
    exps = box_exponents(0, 2 * k0 + 1, u)
    M = monomial_eval_matrix(F, points, exps)
    if la.rank(F, M) != len(exps):
        raise GammaSolveError("monomial box evaluations are not independent")
    target = np.zeros(len(exps), dtype=np.int64)
    target[exps.index(tuple([k0] * u))] = 1
    g0 = la.solve_right(F, M, target)
    if g0 is None:
        raise GammaSolveError("gamma system is infeasible")
    K = la.right_kernel(F, M)
    for _ in range(retries):
        g = g0
        if K.shape[0]:
            g = F.add(g0, la.matmul(F, F.random(rng, K.shape[0])[None, :], K)[0])
        if np.all(g != 0):
            return g
    raise GammaSolveError("no entrywise-nonzero gamma found within retries")


def triple_product_build(F: Field, m: int, u: int, seed: int,
                         require_window: bool = True) -> TripleProductGate:
    """Three-factor punctured-tensor-RS gate at desk scale, in factored form.

    The multiplication property is certified structurally: full-rank monomial
    boxes up to degree 2*k0 per factor, exact gamma conditions with all
    entries nonzero, and the exhaustive pattern-kill check; the projection is
    the shifted gamma functional, so the coefficients vector is an elementary
    tensor of the per-factor parts.
    """
    p = triple_product_params(m, u)
    checks: dict = {"window_size": p.window_size, "degraded_regime": p.degraded}
    if p.window_size == 0:
        if require_window:
            raise ValueError(
                f"logical window [{p.ell_lo}, {p.ell_hi}) is empty at m={m}")
    if p.window_size > 1:
        raise BudgetExceeded(
            "factored synthesis covers window size 1; larger windows need the "
            "dense route")
    n = p.n
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
    points = []
    for i in range(3):
        E = _sample_points(F, n, u, rng)
        points.append(E)
    gammas = [_solve_gamma(F, E, p.k0, u, rng) for E in points]
    for i, (E, g) in enumerate(zip(points, gammas)):
        exps = box_exponents(0, 2 * p.k0 + 1, u)
        M = monomial_eval_matrix(F, E, exps)
        got = la.matmul(F, M, g[:, None])[:, 0]
        want = np.zeros(len(exps), dtype=np.int64)
        want[exps.index(tuple([p.k0] * u))] = 1
        if not np.array_equal(got, want):
            raise GammaSolveError(f"gamma conditions fail for factor {i}")
        checks[f"gamma{i}_nonzero"] = bool(np.all(g != 0))
    ok_kill, failed = _kill_certificate(p)
    checks["pattern_kill"] = ok_kill
    shift = p.k0 - 3 * p.ell_lo
    checks["shift_in_range"] = bool(0 <= shift <= 3 * p.eps * p.k0)
    checks["L_inside_Qz"] = bool(p.ell_hi - 1 + max(p.kz[0], p.kz[1]) - 1 < p.k0
                                 and p.ell_hi <= p.kz[2])
    checks["L_meets_gauge_trivially"] = bool(p.kx[0] <= p.ell_lo)
    # factor CSS conditions: (Q_X^i)^perp <= Q_Z^i
    checks["factor_css"] = bool(
        p.kx[0] - 1 + p.kz[0] - 1 < p.k0 and p.kx[1] - 1 + p.kz[1] - 1 < p.k0
        and p.kx[2] <= p.kz[2])
    window_exp = tuple([p.ell_lo] * u)
    L_vectors = [monomial_eval_matrix(F, E, [window_exp])[0] for E in points]
    j_star = tuple(int(np.nonzero(v)[0][0]) for v in L_vectors)
    shift_exp = tuple([shift] * u)
    a_parts = [F.mul(g, monomial_eval_matrix(F, E, [shift_exp])[0])
               for g, E in zip(gammas, points)]
    a_scale = 1
    for v, j in zip(L_vectors, j_star):
        a_scale = int(F.mul(np.int64(a_scale), F.power(v[j], 3)))
    # phi(u_raw) = prod_i gamma_i . ev(X^{shift + 3*ell_lo}) must equal 1
    phi_u = 1
    for g, E in zip(gammas, points):
        cube = monomial_eval_matrix(F, E, [tuple([3 * p.ell_lo + shift] * u)])[0]
        phi_u = int(F.mul(np.int64(phi_u), _dot(F, g, cube)))
    checks["phi_on_Lpower"] = phi_u == 1
    holds = all(bool(v) for k, v in checks.items()
                if k not in ("window_size", "degraded_regime")) and phi_u == 1
    cert = TripleCertificate(holds, checks, failed)
    block_bases = _triple_block_bases(F, p, points, gammas)
    return TripleProductGate(F, p, points, gammas, L_vectors, j_star,
                             a_parts, a_scale, cert, block_bases,
                             label=f"triple(m={m},u={u},q={F.q})")


def _dot(F: Field, a: np.ndarray, b: np.ndarray) -> np.int64:
    terms = F.mul(a, b)
    if F.p == 2:
        return np.bitwise_xor.reduce(terms)
    out = np.int64(0)
    for t in terms:
        out = F.add(out, t)
    return out


def _sample_points(F: Field, n: int, u: int, rng: np.random.Generator) -> np.ndarray:
    seen: set[tuple[int, ...]] = set()
    rows = []
    while len(rows) < n:
        cand = tuple(int(x) for x in rng.integers(0, F.q, size=u))
        if cand not in seen:
            seen.add(cand)
            rows.append(cand)
    return np.array(rows, dtype=np.int64)


def _triple_block_bases(F: Field, p: TripleProductParams,
                        points: list[np.ndarray],
                        gammas: list[np.ndarray]) -> dict:
    """Generator bases of every factor slot appearing in L and S1..S3."""
    def ev_box(i: int, k: int) -> np.ndarray:
        return monomial_eval_matrix(F, points[i], box_exponents(0, k, p.u))

    qz = []
    for i in range(3):
        if i < 2:
            scaled = F.mul(gammas[i][None, :], ev_box(i, p.kz[i]))
            qz.append(la.right_kernel(F, scaled))
        else:
            qz.append(ev_box(2, p.kz[2]))
    qx_perp = [ev_box(i, p.kx[i]) for i in range(3)]
    return {"qz": qz, "qx_perp": qx_perp}


def triple_phase_identity_test(gate: TripleProductGate, trials: int, seed: int,
                               terms_per_block: int = 2) -> PhaseReport:
    """Phase identity over the factored representation: coset representatives
    are encoded messages plus random low-tensor-rank stabilizer elements, and
    both sides are evaluated exactly through per-factor inner products."""
    F = gate.field
    p = gate.params
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
    qz = gate.block_bases["qz"]
    qx_perp = gate.block_bases["qx_perp"]
    slots = {
        "S1": (qx_perp[0], qz[1], qz[2]),
        "S2": (qz[0], qx_perp[1], qz[2]),
        "S3": (qz[0], qz[1], qx_perp[2]),
    }
    vhat = [F.div(v, v[j]) for v, j in zip(gate.L_vectors, gate.j_star)]

    def sample_rep(z: int) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        terms = [(F.mul(np.int64(z), vhat[0]), vhat[1], vhat[2])]
        for name in ("S1", "S2", "S3"):
            b1, b2, b3 = slots[name]
            for _ in range(terms_per_block):
                t1 = la.matmul(F, F.random(rng, b1.shape[0])[None, :], b1)[0]
                t2 = la.matmul(F, F.random(rng, b2.shape[0])[None, :], b2)[0]
                t3 = la.matmul(F, F.random(rng, b3.shape[0])[None, :], b3)[0]
                terms.append((t1, t2, t3))
        return terms

    for trial in range(trials):
        msgs = [int(F.random(rng, None)) for _ in range(3)]
        reps = [sample_rep(z) for z in msgs]
        lhs = int(F.mul(F.mul(np.int64(msgs[0]), np.int64(msgs[1])),
                        np.int64(msgs[2])))
        rhs = np.int64(0)
        for t1 in reps[0]:
            for t2 in reps[1]:
                for t3 in reps[2]:
                    term = np.int64(gate.a_scale)
                    for axis in range(3):
                        prod = F.mul(F.mul(t1[axis], t2[axis]), t3[axis])
                        term = F.mul(term, _dot(F, gate.a_parts[axis], prod))
                    rhs = F.add(rhs, term)
        if int(rhs) != lhs:
            return PhaseReport(trials, trial,
                               {"trial": trial, "lhs": lhs, "rhs": int(rhs),
                                "messages": msgs})
    return PhaseReport(trials, trials, None)
