"""CSS and subsystem CSS codes, subsystem products, distance accounting,
and the tensor / amplified check matrices used for single-shot decoding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .gf import Field
from . import linalg as la
from .codes import (DEFAULT_DISTANCE_BUDGET, DistanceResult, LinearCode,
                    canonical_points, rs_code, tensor)


class CssPair:
    """Ordered pair (Q_X, Q_Z); with subsystem=False, Q_X^perp <= Q_Z is enforced."""

    def __init__(self, qx: LinearCode, qz: LinearCode, subsystem: bool = False,
                 label: str = ""):
        if qx.field != qz.field:
            raise ValueError("field mismatch")
        if qx.n != qz.n:
            raise ValueError("length mismatch")
        if not subsystem:
            if not la.row_space_contains(qx.field, qz.gen, qx.dual().gen):
                raise ValueError("CSS condition Q_X^perp <= Q_Z fails")
        self.qx = qx
        self.qz = qz
        self.subsystem = subsystem
        self.label = label
        self.factors: list["CssPair"] | None = None
        self._stab: np.ndarray | None = None

    @property
    def field(self) -> Field:
        return self.qx.field

    @property
    def n(self) -> int:
        return self.qx.n

    def stabilizer_basis(self) -> np.ndarray:
        """Basis of S = Q_Z intersect Q_X^perp."""
        if self._stab is None:
            self._stab = la.row_space_intersection(
                self.field, self.qz.gen, self.qx.dual().gen)
        return self._stab

    @property
    def dimension(self) -> int:
        return self.qz.k - self.stabilizer_basis().shape[0]

    def gauge_z_basis(self) -> np.ndarray:
        """Z-gauge span Q_X^perp (acts trivially on encoded information)."""
        return self.qx.dual().gen

    def gauge_x_basis(self) -> np.ndarray:
        return self.qz.dual().gen

    def logical_z_space(self) -> np.ndarray:
        """Basis of Q_Z' = Q_Z + Q_X^perp."""
        return la.row_space(self.field,
                            np.concatenate([self.qz.gen, self.qx.dual().gen], axis=0))

    def logical_x_space(self) -> np.ndarray:
        return la.row_space(self.field,
                            np.concatenate([self.qx.gen, self.qz.dual().gen], axis=0))

    def swap(self) -> "CssPair":
        return CssPair(self.qz, self.qx, subsystem=self.subsystem,
                       label=f"swap({self.label})")

    def to_json(self) -> dict:
        return {"qx": self.qx.to_json(), "qz": self.qz.to_json(),
                "subsystem": self.subsystem, "label": self.label}

    @staticmethod
    def from_json(doc: dict) -> "CssPair":
        return CssPair(LinearCode.from_json(doc["qx"]), LinearCode.from_json(doc["qz"]),
                       subsystem=doc["subsystem"], label=doc.get("label", ""))

    def __repr__(self) -> str:
        kind = "subsystem" if self.subsystem else "css"
        return f"CssPair[{kind}; n={self.n}, k={self.dimension}]"


def quantum_rs(F: Field, n: int, kx: int, kz: int,
               points: np.ndarray | None = None) -> CssPair:
    """Quantum Reed-Solomon pair (RS(n,kx), RS(n,kz)); needs kx + kz >= n."""
    if kx + kz < n:
        raise ValueError(f"kx + kz = {kx + kz} < n = {n}: orthogonality fails")
    if points is None:
        points = canonical_points(F, n)
    qx = rs_code(F, n, kx, points)
    qz = rs_code(F, n, kz, points)
    return CssPair(qx, qz, subsystem=False, label=f"qRS({n},{kx},{kz})")


def subsystem_product(factors: list[CssPair]) -> CssPair:
    """Component-wise tensor product of CSS pairs; dimension multiplies,
    locality (of the natural checks) adds."""
    if not factors:
        raise ValueError("need at least one factor")
    if any(f.subsystem for f in factors):
        raise ValueError("factors must be non-subsystem CSS pairs")
    if len({f.field for f in factors}) != 1:
        raise ValueError("factors must share a field")
    if len(factors) == 1:
        return factors[0]
    qx = reduce(tensor, (f.qx for f in factors))
    qz = reduce(tensor, (f.qz for f in factors))
    out = CssPair(qx, qz, subsystem=True,
                  label=" (x) ".join(f.label or "?" for f in factors))
    out.factors = list(factors)
    # locality adds across factors (checks are H_i (x) I blocks)
    out.locality_record = sum(
        CheckMatrices._locality(f.qx.parity_check(), f.qz.parity_check())
        for f in factors)
    return out


# ---------------------------------------------------------------------------
# distance
# ---------------------------------------------------------------------------


def _side_distance(F: Field, logical_space: np.ndarray, gauge_dual: np.ndarray,
                   budget: int, rng: np.random.Generator | None,
                   trials: int) -> tuple[float, bool]:
    """Min weight over span(logical_space) setminus span(gauge_dual)."""
    dim = logical_space.shape[0]
    n = logical_space.shape[1]
    if dim == 0:
        return math.inf, True
    # membership in the gauge span tested through its parity map
    gauge_par = la.right_kernel(F, gauge_dual) if gauge_dual.shape[0] else la.identity(n)
    if F.q ** dim <= budget:
        best = math.inf
        for _, words in la.enumerate_span(F, logical_space):
            if gauge_par.shape[0]:
                syn = la.matmul(F, words, gauge_par.T)
                outside = np.any(syn, axis=1)
            else:
                outside = np.zeros(words.shape[0], dtype=bool)
            w = np.count_nonzero(words[outside], axis=1)
            if w.size:
                best = min(best, int(w.min()))
        return best, True
    assert rng is not None
    best = math.inf
    for _ in range(trials):
        coef = F.random(rng, dim)
        v = la.matmul(F, coef[None, :], logical_space)[0]
        if gauge_par.shape[0] and not np.any(la.matvec(F, gauge_par, v)):
            continue
        if v.any():
            best = min(best, la.weight(v))
    return best, False


def subsystem_distance(Q: CssPair, budget: int = DEFAULT_DISTANCE_BUDGET,
                       seed: int = 0, trials: int = 5000) -> DistanceResult:
    """Subsystem distance: min weight over the two dressed-logical classes
    (Q_X + Q_Z^perp) setminus Q_Z^perp and (Q_Z + Q_X^perp) setminus Q_X^perp."""
    F = Q.field
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
    dz, ez = _side_distance(F, Q.logical_z_space(), Q.qx.dual().gen, budget, rng, trials)
    dx, ex = _side_distance(F, Q.logical_x_space(), Q.qz.dual().gen, budget, rng, trials)
    val = min(dx, dz)
    exact = ex and ez
    return DistanceResult(val, exact,
                          "coset-enumeration" if exact else "sampling-upper-bound")


def logical_coset_equal(Q: CssPair, side: str, r1: np.ndarray, r2: np.ndarray) -> bool:
    """Whether two representatives define the same coset modulo the gauge
    space (Q_X^perp for side='z', Q_Z^perp for side='x')."""
    gauge = Q.qx.dual().gen if side == "z" else Q.qz.dual().gen
    diff = Q.field.sub(np.asarray(r1, dtype=np.int64), np.asarray(r2, dtype=np.int64))
    if not diff.any():
        return True
    return la.in_row_space(Q.field, gauge, diff)


# ---------------------------------------------------------------------------
# check matrices
# ---------------------------------------------------------------------------


@dataclass
class CheckMatrices:
    hx: np.ndarray
    hz: np.ndarray
    locality: int
    style: str

    @staticmethod
    def _locality(*mats: np.ndarray) -> int:
        w = 0
        for m in mats:
            if m.size:
                w = max(w, int(np.count_nonzero(m, axis=1).max()),
                        int(np.count_nonzero(m, axis=0).max()))
        return w

    def to_json(self) -> dict:
        return {"hx": [int(x) for x in self.hx.ravel()], "hx_rows": self.hx.shape[0],
                "hz": [int(x) for x in self.hz.ravel()], "hz_rows": self.hz.shape[0],
                "n": self.hx.shape[1], "locality": self.locality, "style": self.style}


def _stacked_tensor_checks(F: Field, mats: list[np.ndarray], lengths: list[int]) -> np.ndarray:
    """vstack over i of I (x) ... (x) H_i (x) ... (x) I (row-major flattening)."""
    blocks = []
    for i, H in enumerate(mats):
        left = int(np.prod(lengths[:i])) if i else 1
        right = int(np.prod(lengths[i + 1:])) if i + 1 < len(lengths) else 1
        blk = la.kron(F, la.identity(left), la.kron(F, H, la.identity(right)))
        blocks.append(blk)
    return np.concatenate(blocks, axis=0)


def check_matrices(Q: CssPair, style: str = "tensor") -> CheckMatrices:
    """Parity checks of a subsystem product.

    'tensor' stacks the factor checks H_i (x) I; 'amplified' first encodes
    each factor syndrome with a rate-1/2 Reed-Solomon outer code (H_i' =
    G_i H_i) so that the syndrome spaces become linear-distance codes.
    """
    if Q.factors is None:
        raise ValueError("check matrices require a product built by subsystem_product")
    F = Q.field
    lengths = [f.n for f in Q.factors]
    hxs = [f.qx.parity_check() for f in Q.factors]
    hzs = [f.qz.parity_check() for f in Q.factors]
    if style == "amplified":
        hxs = [_amplify(F, H) for H in hxs]
        hzs = [_amplify(F, H) for H in hzs]
    elif style != "tensor":
        raise ValueError(f"unknown style {style!r}")
    hx = _stacked_tensor_checks(F, hxs, lengths)
    hz = _stacked_tensor_checks(F, hzs, lengths)
    return CheckMatrices(hx, hz, CheckMatrices._locality(hx, hz), style)


def _amplify(F: Field, H: np.ndarray) -> np.ndarray:
    """Replace H by G H for a rate-1/2 RS generator, doubling the rows while
    keeping the kernel; the image becomes an RS code of distance m + 1."""
    m = H.shape[0]
    if m == 0:
        return H
    if 2 * m > F.q:
        raise ValueError(f"amplified checks need q >= 2m (q={F.q}, m={m})")
    outer = rs_code(F, 2 * m, m)
    return la.matmul(F, outer.gen.T, H)
