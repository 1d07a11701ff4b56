"""Quantum-level decoding for products of quantum Reed-Solomon codes.

Covers the coefficient-extraction subroutine that moves a dual-tensor
decoding into the quantum code space (dec_quantum), delta-decoders for both
the homological-product CSS codes and the subsystem products, the syndrome
formulation (reduce to the word formulation by Gaussian elimination), and
single-shot decoding from noisy syndromes over amplified product checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from functools import cached_property

import numpy as np

from .gf import Field
from . import linalg as la
from .codes import BudgetExceeded
from .complexes import SingleSectorComplex, from_css, hom_product
from .decoder import (DualTensorInstance, PromiseViolation, alpha_decode,
                      berlekamp_welch, bivariate_coeffs)
from .subsystem import CheckMatrices, CssPair, check_matrices, quantum_rs, \
    subsystem_product
from .codes import vandermonde


class InconsistentInput(RuntimeError):
    """The provided syndrome is not in the image of the check matrix."""


@dataclass
class SyndromeInput:
    s_x: np.ndarray
    s_z: np.ndarray
    checks: CheckMatrices

    def __post_init__(self):
        if self.s_x.size != self.checks.hx.shape[0] or \
                self.s_z.size != self.checks.hz.shape[0]:
            raise ValueError("syndrome lengths do not match the check matrices")


@dataclass
class CorrectionCoset:
    representative: np.ndarray
    modulus: str  # "qx_perp" or "qz_perp"


# ---------------------------------------------------------------------------
# Algorithm: coefficient-stripe cleanup into Q_Z'
# ---------------------------------------------------------------------------


def dec_quantum(F: Field, E1: np.ndarray, E2: np.ndarray,
                k1: int, k1p: int, k2: int, k2p: int,
                c0: np.ndarray, radius: int) -> np.ndarray:
    """Move c0 in ev^{[0,k1)} [+] ev^{[0,k2p)} into
    Q_Z' = ev^{([0,k1) x [0,n)) u ([0,n) x [0,k2)) u ([0,k1p) x [0,k2p))}
    by decoding each coefficient column j2 in [k2, k2p) against the length-n
    RS code of dimension k1p.
    """
    n = E1.size
    c0 = np.asarray(c0, dtype=np.int64).reshape(n, n)
    Fc = bivariate_coeffs(F, E1, E2, c0)
    V1 = vandermonde(F, E1, n)
    V2 = vandermonde(F, E2, n)
    out = c0.copy()
    for j2 in range(k2, k2p):
        v = la.matvec(F, V1, Fc[:, j2])
        cw = berlekamp_welch(F, E1, k1p, v, radius)
        if cw is None:
            raise PromiseViolation(f"quantum stripe decode failed at column {j2}")
        r = F.sub(v, cw)
        out = F.sub(out, F.mul(r[:, None], V2[:, j2][None, :]))
    return out


# ---------------------------------------------------------------------------
# product instances
# ---------------------------------------------------------------------------


@dataclass
class QdecParams:
    eps: Fraction
    rho: Fraction = Fraction(1, 8)
    gamma: int = 1000

    @property
    def alpha(self) -> Fraction:
        return (Fraction(self.gamma) / (self.rho * self.eps)) ** 2

    @property
    def delta_prime(self) -> Fraction:
        return self.eps * self.rho / 4

    @property
    def delta(self) -> Fraction:
        # reference formula rho*eps*delta'/(50*alpha) with 50 rescaled by gamma
        return self.rho * self.eps * self.delta_prime * Fraction(20, self.gamma) / self.alpha

    def stripe_radius(self, n: int, kdim: int) -> int:
        exact = Fraction(40, self.gamma) * self.eps * self.delta_prime * n
        return min(int(exact), (n - kdim) // 2)


@dataclass
class SubsystemProductInstance:
    """Subsystem product of two quantum RS pairs plus decoding parameters."""

    factors: list[CssPair]
    params: QdecParams

    def __post_init__(self):
        if len(self.factors) != 2:
            raise ValueError("the decoder covers two-factor products")
        f1, f2 = self.factors
        n = f1.n
        eps = self.params.eps
        lhs1 = (n - f1.qz.k) + f2.qx.k
        lhs2 = (n - f1.qx.k) + f2.qz.k
        if lhs1 > (1 - eps) * n or lhs2 > (1 - eps) * n:
            raise ValueError("rate conditions of the product decoder fail for eps")
        if f1.qz.k > (1 - eps) * n or f1.qx.k > (1 - eps) * n:
            raise ValueError("first-factor dimensions must stay <= (1 - eps) n")

    @cached_property
    def product(self) -> CssPair:
        return subsystem_product(self.factors)

    @property
    def field(self) -> Field:
        return self.factors[0].field

    @property
    def n(self) -> int:
        return self.factors[0].n

    @cached_property
    def z_dt(self) -> DualTensorInstance:
        """Dual tensor instance containing Q_Z': (Q^1_X)^perp [+] Q^2_Z."""
        f1, f2 = self.factors
        return DualTensorInstance(
            self.field, self.n, self.n - f1.qx.k, f2.qz.k,
            f1.qx.points, f2.qz.points,
            self.params.eps, self.params.rho, self.params.gamma)

    @cached_property
    def x_dt(self) -> DualTensorInstance:
        f1, f2 = self.factors
        return DualTensorInstance(
            self.field, self.n, self.n - f1.qz.k, f2.qx.k,
            f1.qz.points, f2.qx.points,
            self.params.eps, self.params.rho, self.params.gamma)

    def to_json(self) -> dict:
        return {"kind": "subsystem-product",
                "factors": [f.to_json() for f in self.factors],
                "eps": [self.params.eps.numerator, self.params.eps.denominator],
                "rho": [self.params.rho.numerator, self.params.rho.denominator],
                "gamma": self.params.gamma}

    @staticmethod
    def from_json(doc: dict) -> "SubsystemProductInstance":
        factors = [CssPair.from_json(d) for d in doc["factors"]]
        return SubsystemProductInstance(
            factors, QdecParams(Fraction(*doc["eps"]), Fraction(*doc["rho"]),
                                doc["gamma"]))


@dataclass
class QuantumDecodeResult:
    coset_x: CorrectionCoset
    coset_z: CorrectionCoset
    fallback_x: bool
    fallback_z: bool
    notes: dict = dfield(default_factory=dict)

    @property
    def fallback(self) -> bool:
        return self.fallback_x or self.fallback_z


def _decode_side(inst: SubsystemProductInstance, word: np.ndarray,
                 side: str) -> tuple[np.ndarray, bool]:
    """Shared pipeline: alpha-decode in the enclosing dual tensor code, then
    stripe cleanup into Q_Z' (or Q_X' for side='x')."""
    F = inst.field
    n = inst.n
    f1, f2 = inst.factors
    word = np.asarray(word, dtype=np.int64).reshape(n, n)
    if side == "z":
        dt = inst.z_dt
        k1, k1p = n - f1.qx.k, f1.qz.k
        k2, k2p = n - f2.qx.k, f2.qz.k
    else:
        dt = inst.x_dt
        k1, k1p = n - f1.qz.k, f1.qx.k
        k2, k2p = n - f2.qz.k, f2.qx.k
    res = alpha_decode(dt, word)
    radius = inst.params.stripe_radius(n, k1p)
    return dec_quantum(F, dt.E1, dt.E2, k1, k1p, k2, k2p, res.word, radius), res.fallback


def subsystem_decode(inst: SubsystemProductInstance, c_x: np.ndarray,
                     c_z: np.ndarray) -> QuantumDecodeResult:
    """Subsystem delta-decoder: representatives of the gauge cosets closest
    to the corrupted words (the cleanup output itself is the representative)."""
    rep_z, fb_z = _decode_side(inst, c_z, "z")
    rep_x, fb_x = _decode_side(inst, c_x, "x")
    return QuantumDecodeResult(CorrectionCoset(rep_x.ravel(), "qz_perp"),
                               CorrectionCoset(rep_z.ravel(), "qx_perp"),
                               fb_x, fb_z)


@dataclass
class CssProductInstance:
    """Homological product of the single-sector complexes of two quantum RS
    pairs with dim Q_X = dim Q_Z (so the boundary map construction applies)."""

    factors: list[CssPair]
    params: QdecParams

    def __post_init__(self):
        if len(self.factors) != 2:
            raise ValueError("two factors required")
        for f in self.factors:
            if f.qx.k != f.qz.k:
                raise ValueError("factors need dim Q_X = dim Q_Z")

    @property
    def field(self) -> Field:
        return self.factors[0].field

    @property
    def n(self) -> int:
        return self.factors[0].n

    @cached_property
    def complexes(self) -> list[SingleSectorComplex]:
        return [from_css(f.qx, f.qz) for f in self.factors]

    @cached_property
    def product_complex(self) -> SingleSectorComplex:
        return hom_product(self.complexes[0], self.complexes[1])

    @cached_property
    def code(self) -> CssPair:
        qx, qz = self.product_complex.associated_code()
        return CssPair(qx, qz, subsystem=False, label="hom-product")

    @cached_property
    def _sub(self) -> SubsystemProductInstance:
        return SubsystemProductInstance(self.factors, self.params)

    def to_json(self) -> dict:
        doc = self._sub.to_json()
        doc["kind"] = "css-product"
        return doc

    @staticmethod
    def from_json(doc: dict) -> "CssProductInstance":
        factors = [CssPair.from_json(d) for d in doc["factors"]]
        return CssProductInstance(
            factors, QdecParams(Fraction(*doc["eps"]), Fraction(*doc["rho"]),
                                doc["gamma"]))


def css_decode(inst: CssProductInstance, c_x: np.ndarray, c_z: np.ndarray
               ) -> QuantumDecodeResult:
    """Delta-decoder for the homological-product CSS code: pipeline output is
    projected to the unique logical coset of Q_Z/Q_X^perp inside the cleanup
    coset modulo (Q^1_X (x) Q^2_X)^perp."""
    F = inst.field
    code = inst.code
    f1, f2 = inst.factors
    rep_z, fb_z = _decode_side(inst._sub, c_z, "z")
    rep_x, fb_x = _decode_side(inst._sub, c_x, "x")
    from .codes import tensor
    qxx_perp = tensor(f1.qx, f2.qx).dual().gen
    qzz_perp = tensor(f1.qz, f2.qz).dual().gen
    z = _project_coset(F, code.qz.gen, qxx_perp, rep_z.ravel())
    x = _project_coset(F, code.qx.gen, qzz_perp, rep_x.ravel())
    return QuantumDecodeResult(CorrectionCoset(x, "qz_perp"),
                               CorrectionCoset(z, "qx_perp"), fb_x, fb_z)


def _project_coset(F: Field, code_gen: np.ndarray, ambient_dual: np.ndarray,
                   rep: np.ndarray) -> np.ndarray:
    """The element of rowspace(code_gen) lying in rep + rowspace(ambient_dual)."""
    stack = np.concatenate([code_gen, ambient_dual], axis=0)
    x = la.solve_left(F, stack, rep)
    if x is None:
        raise PromiseViolation("cleanup output escaped the expected coset")
    return la.matmul(F, x[None, : code_gen.shape[0]], code_gen)[0]


# ---------------------------------------------------------------------------
# syndrome formulation
# ---------------------------------------------------------------------------


def syndrome_to_word(F: Field, checks: CheckMatrices, s_x: np.ndarray,
                     s_z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Any particular words with H_X c_x = s_x and H_Z c_z = s_z."""
    c_x = la.solve_right(F, checks.hx, np.asarray(s_x, dtype=np.int64))
    c_z = la.solve_right(F, checks.hz, np.asarray(s_z, dtype=np.int64))
    if c_x is None or c_z is None:
        raise InconsistentInput("syndrome outside the image of the check matrix")
    return c_x, c_z


def syndrome_decode(inst: SubsystemProductInstance, checks: CheckMatrices,
                    s_x: np.ndarray, s_z: np.ndarray
                    ) -> QuantumDecodeResult:
    """Syndrome-formulation decoding: pick any preimages, decode them, and
    return the correction cosets (preimage minus decoded representative)."""
    F = inst.field
    c_x, c_z = syndrome_to_word(F, checks, s_x, s_z)
    res = subsystem_decode(inst, c_x, c_z)
    bx = F.sub(c_x, res.coset_x.representative)
    bz = F.sub(c_z, res.coset_z.representative)
    return QuantumDecodeResult(CorrectionCoset(bx, "qz_perp"),
                               CorrectionCoset(bz, "qx_perp"),
                               res.fallback_x, res.fallback_z)


# ---------------------------------------------------------------------------
# bounded-weight coset search
# ---------------------------------------------------------------------------


def bounded_syndrome_search(F: Field, H: np.ndarray, target: np.ndarray,
                            max_weight: int, budget: int = 2_000_000
                            ) -> np.ndarray | None:
    """Minimum-weight e with H e = target, searched by increasing weight up
    to max_weight; None if nothing within range."""
    H = np.atleast_2d(np.asarray(H, dtype=np.int64))
    m, n = H.shape
    target = np.asarray(target, dtype=np.int64)
    if not target.any():
        return np.zeros(n, dtype=np.int64)
    if m == 0:
        return None
    # weight 1: target must be a scalar multiple of one column
    for j in range(n):
        col = H[:, j]
        nz = np.nonzero(col)[0]
        tnz = np.nonzero(target)[0]
        if nz.size == 0 or not np.array_equal(nz, tnz):
            continue
        v = F.div(target[nz[0]], col[nz[0]])
        if np.array_equal(F.mul(v, col), target):
            e = np.zeros(n, dtype=np.int64)
            e[j] = v
            return e
    work = 0
    for w in range(2, max_weight + 1):
        for support in itertools.combinations(range(n), w):
            work += 1
            if work > budget:
                raise BudgetExceeded("bounded syndrome search exceeded budget")
            sol = la.solve_right(F, H[:, list(support)], target)
            if sol is not None and np.count_nonzero(sol) == w:
                e = np.zeros(n, dtype=np.int64)
                e[list(support)] = sol
                return e
    return None


def coset_min_weight(F: Field, space: np.ndarray, v: np.ndarray,
                     cap: int, budget: int = 2_000_000) -> int | None:
    """Weight of the lightest element of v + rowspace(space), searched up to
    the cap; None when the true minimum exceeds the cap."""
    H = la.right_kernel(F, space) if space.shape[0] else la.identity(v.size)
    if H.shape[0] == 0:
        return 0
    target = la.matvec(F, H, v)
    e = bounded_syndrome_search(F, H, target, cap, budget)
    return None if e is None else la.weight(e)


# ---------------------------------------------------------------------------
# single-shot decoding
# ---------------------------------------------------------------------------


@dataclass
class SingleShotResult:
    correction: CorrectionCoset | None
    denoise_failures: int
    syndrome_consistent: bool
    denoised_syndrome: np.ndarray | None
    notes: dict = dfield(default_factory=dict)


def nearest_syndrome_exact(F: Field, H: np.ndarray, s: np.ndarray,
                           budget: int = 200_000) -> np.ndarray | None:
    """Exact minimum-distance projection of s onto im(H) by enumerating the
    image; None when the image is too large for the budget."""
    img = la.row_space(F, H.T)
    if img.shape[0] == 0:
        return np.zeros_like(s)
    if F.q ** img.shape[0] > budget:
        return None
    best, best_w = None, None
    for _, words in la.enumerate_span(F, img):
        d = np.count_nonzero(F.sub(words, s[None, :]), axis=1)
        i = int(np.argmin(d))
        if best_w is None or d[i] < best_w:
            best_w = int(d[i])
            best = words[i].copy()
    return best


def _denoise_product_syndrome(F: Field, factors: list[CssPair], side: str,
                              s: np.ndarray) -> tuple[np.ndarray, int]:
    """Per-block Reed-Solomon denoising of an amplified product syndrome.

    Block 1 columns lie in the factor-1 outer RS code, block 2 rows in the
    factor-2 outer code; each stripe decodes within the unique radius.
    """
    n = factors[0].n
    m1 = (factors[0].qx if side == "x" else factors[0].qz).parity_check().shape[0]
    m2 = (factors[1].qx if side == "x" else factors[1].qz).parity_check().shape[0]
    from .codes import rs_code
    out = np.asarray(s, dtype=np.int64).copy()
    failures = 0
    blk1 = out[: 2 * m1 * n].reshape(2 * m1, n)
    if m1:
        outer1 = rs_code(F, 2 * m1, m1)
        for j in range(n):
            cw = berlekamp_welch(F, outer1.points, m1, blk1[:, j], m1 // 2)
            if cw is None:
                failures += 1
            else:
                blk1[:, j] = cw
    blk2 = out[2 * m1 * n:].reshape(n, 2 * m2)
    if m2:
        outer2 = rs_code(F, 2 * m2, m2)
        for i in range(n):
            cw = berlekamp_welch(F, outer2.points, m2, blk2[i, :], m2 // 2)
            if cw is None:
                failures += 1
            else:
                blk2[i, :] = cw
    return out, failures


def single_shot_decode(inst: SubsystemProductInstance, checks: CheckMatrices,
                       s_z: np.ndarray, distance: int,
                       method: str = "auto") -> SingleShotResult:
    """X-error decoder from one noisy Z-syndrome over amplified checks.

    Denoises the syndrome per block, solves for any preimage, then finds a
    correction of weight < distance/2 in the preimage's coset modulo
    Q_Z + Q_X^perp.  Failures are recorded in the result, never raised.
    """
    F = inst.field
    if checks.style != "amplified":
        raise ValueError("single-shot decoding expects amplified checks")
    exact = nearest_syndrome_exact(F, checks.hz, np.asarray(s_z, dtype=np.int64))
    if exact is not None:
        s_prime, failures = exact, 0
    else:
        s_prime, failures = _denoise_product_syndrome(F, inst.factors, "z", s_z)
    w = la.solve_right(F, checks.hz, s_prime)
    if w is None:
        return SingleShotResult(None, failures, False, s_prime,
                                {"reason": "denoised syndrome inconsistent"})
    prod = inst.product
    V = np.concatenate([prod.qz.gen, prod.qx.dual().gen], axis=0)
    cap = max(0, math.ceil(distance / 2) - 1)
    if method == "auto":
        method = "search" if prod.n <= 512 else "pipeline"
    if method == "search":
        HV = la.right_kernel(F, V)
        target = la.matvec(F, HV, w) if HV.shape[0] else np.zeros(0, dtype=np.int64)
        e = bounded_syndrome_search(F, HV, target, cap) if HV.shape[0] else \
            np.zeros(prod.n, dtype=np.int64)
        if e is None:
            return SingleShotResult(None, failures, True, s_prime,
                                    {"reason": f"no correction of weight < {distance}/2"})
        return SingleShotResult(CorrectionCoset(e, "qx_perp"), failures, True,
                                s_prime, {"method": "search"})
    # pipeline route: w is a corrupted Q_Z'-word; peel the decoded part off
    try:
        rep, _ = _decode_side(inst, w, "z")
    except PromiseViolation as exc:
        return SingleShotResult(None, failures, True, s_prime, {"reason": str(exc)})
    e = F.sub(w, rep.ravel())
    return SingleShotResult(CorrectionCoset(e, "qx_perp"), failures, True,
                            s_prime, {"method": "pipeline"})
