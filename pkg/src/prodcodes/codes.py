"""Classical linear codes and the product constructions applied to them:
Reed-Solomon and multivariate evaluation codes, duals, tensor and dual-tensor
products, star products, MDS and distance checks, and a Monte-Carlo local
testability estimator.

A LinearCode is an immutable row space.  Generator matrices are stored in
reduced row echelon form so that equal subspaces have identical generators.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field as dfield
from typing import Iterable, Sequence

import numpy as np

from .gf import Field
from . import linalg as la

DEFAULT_DISTANCE_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive computation would exceed its budget."""


@dataclass(frozen=True)
class DistanceResult:
    value: float  # int, or math.inf for the zero code
    exact: bool
    method: str

    def __int__(self) -> int:
        if not math.isfinite(self.value):
            raise ValueError("infinite distance sentinel")
        return int(self.value)


class LinearCode:
    """A k-dimensional subspace of F^n carried as an rref generator matrix.

    assume_reduced skips the reduction for generators already known to be in
    reduced row echelon form (e.g. Kronecker products of rref generators).
    """

    def __init__(self, field: Field, n: int, gen: np.ndarray, label: str = "",
                 assume_reduced: bool = False):
        gen = np.asarray(gen, dtype=np.int64).reshape(-1, n)
        if np.any(gen < 0) or np.any(gen >= field.q):
            raise ValueError("generator entries outside field")
        self.field = field
        self.n = int(n)
        if assume_reduced or gen.shape[0] == 0:
            self.gen = gen.copy()
        else:
            self.gen = la.row_space(field, gen)
        self.gen.setflags(write=False)
        self.label = label
        self._dual: LinearCode | None = None

    # basic parameters ------------------------------------------------------

    @property
    def k(self) -> int:
        return self.gen.shape[0]

    @property
    def rate(self) -> float:
        return self.k / self.n

    def __repr__(self) -> str:
        tag = f" {self.label!r}" if self.label else ""
        return f"LinearCode[{self.n},{self.k}]_{self.field.q}{tag}"

    # subspace relations ----------------------------------------------------

    def dual(self) -> "LinearCode":
        if self._dual is None:
            ker = la.right_kernel(self.field, self.gen) if self.k else la.identity(self.n)
            self._dual = LinearCode(self.field, self.n, ker, label=f"dual({self.label})")
            self._dual._dual = self
        return self._dual

    def parity_check(self) -> np.ndarray:
        """Full-rank parity-check matrix (lazily computed as the dual basis)."""
        return self.dual().gen

    def contains(self, v: np.ndarray) -> bool:
        v = np.asarray(v, dtype=np.int64)
        H = self.parity_check()
        if H.shape[0] == 0:
            return True
        return not np.any(la.matvec(self.field, H, v))

    def same_subspace(self, other: "LinearCode") -> bool:
        return (self.field == other.field and self.n == other.n
                and self.gen.shape == other.gen.shape
                and bool(np.array_equal(self.gen, other.gen)))

    def codeword(self, message: np.ndarray) -> np.ndarray:
        return la.matmul(self.field, np.atleast_2d(message), self.gen)[0]

    # metrics -----------------------------------------------------------------

    def min_distance(self, budget: int = DEFAULT_DISTANCE_BUDGET,
                     seed: int = 0, trials: int = 2000) -> DistanceResult:
        """Exact distance by enumeration when q^k <= budget, otherwise a
        flagged information-set sampling estimate (an upper bound on d)."""
        F = self.field
        if self.k == 0:
            return DistanceResult(math.inf, True, "zero-code")
        if F.q ** self.k <= budget:
            best = self.n + 1
            for _, words in la.enumerate_span(F, self.gen):
                w = np.count_nonzero(words, axis=1)
                w = w[w > 0]
                if w.size:
                    best = min(best, int(w.min()))
            return DistanceResult(best, True, "enumeration")
        rng = np.random.default_rng(seed)
        best = int(np.count_nonzero(self.gen, axis=1).min())
        for _ in range(trials // 10):
            # information-set resampling: systematic rows over a random
            # full-rank column set are low-weight codeword candidates
            cols = rng.permutation(self.n)[: self.k]
            sub = self.gen[:, cols]
            if la.rank(F, sub) < self.k:
                continue
            coefs = la.solve_right(F, sub.T, la.identity(self.k))
            if coefs is None:
                continue
            rows = la.matmul(F, coefs.T, self.gen)
            best = min(best, int(np.count_nonzero(rows, axis=1).min()))
        for _ in range(trials):
            msg = F.random(rng, self.k)
            if msg.any():
                best = min(best, la.weight(self.codeword(msg)))
        return DistanceResult(best, False, "sampling-upper-bound")

    def is_mds(self, minor_budget: int = 1_000_000) -> bool:
        """True iff distance equals n-k+1.  Tests the smaller of code/dual
        by exhaustive maximal minors, falling back to a distance computation."""
        if self.k == 0 or self.k == self.n:
            return True
        side = self if self.k <= self.n - self.k else self.dual()
        if math.comb(side.n, side.k) <= minor_budget:
            F = side.field
            for cols in itertools.combinations(range(side.n), side.k):
                if la.rank(F, side.gen[:, list(cols)]) < side.k:
                    return False
            return True
        d = self.min_distance()
        if not d.exact:
            raise BudgetExceeded("is_mds: neither minors nor enumeration feasible")
        return d.value == self.n - self.k + 1

    # serialization -----------------------------------------------------------

    def to_json(self) -> dict:
        doc = {
            "field": {"p": self.field.p, "e": self.field.e,
                      "modulus": list(self.field.modulus)},
            "n": self.n,
            "k": self.k,
            "gen": [int(x) for x in self.gen.ravel()],
            "label": self.label,
        }
        if isinstance(self, ReedSolomon):
            doc["rs"] = {"k": self.rs_dim, "points": [int(x) for x in self.points]}
        return doc

    @staticmethod
    def from_json(doc: dict) -> "LinearCode":
        f = doc["field"]
        F = Field.get(f["p"], f["e"], tuple(f["modulus"]))
        if "rs" in doc:
            code = ReedSolomon(F, doc["n"], doc["rs"]["k"],
                               np.array(doc["rs"]["points"], dtype=np.int64),
                               label=doc.get("label", ""))
            expect = np.array(doc["gen"], dtype=np.int64).reshape(doc["k"], doc["n"])
            if not np.array_equal(code.gen, expect):
                raise ValueError("serialized RS generator does not match its points")
            return code
        gen = np.array(doc["gen"], dtype=np.int64).reshape(doc["k"], doc["n"])
        return LinearCode(F, doc["n"], gen, label=doc.get("label", ""))


def zero_code(F: Field, n: int) -> LinearCode:
    return LinearCode(F, n, np.zeros((0, n), dtype=np.int64), label="zero")


def full_code(F: Field, n: int) -> LinearCode:
    return LinearCode(F, n, la.identity(n), label="full")


# ---------------------------------------------------------------------------
# evaluation codes
# ---------------------------------------------------------------------------


def canonical_points(F: Field, n: int) -> np.ndarray:
    """First n field elements in the canonical order 0, 1, g, g^2, ..."""
    if n > F.q:
        raise ValueError(f"cannot choose {n} distinct points in GF({F.q})")
    return F.element_order()[:n]


def vandermonde(F: Field, points: np.ndarray, k: int) -> np.ndarray:
    """n x k matrix with entry (i, j) = points[i]^j."""
    points = np.asarray(points, dtype=np.int64)
    cols = [np.ones_like(points)]
    for _ in range(1, k):
        cols.append(F.mul(cols[-1], points))
    return np.stack(cols, axis=1) if k else np.zeros((points.size, 0), dtype=np.int64)


def monomial_eval_matrix(F: Field, points: np.ndarray,
                         exponents: Sequence[tuple[int, ...]]) -> np.ndarray:
    """Rows = evaluations of the monomials X^a on the given points.

    points has shape (N, t); exponents is a sequence of length-t tuples.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.int64))
    rows = []
    for expo in exponents:
        row = np.ones(points.shape[0], dtype=np.int64)
        for j, d in enumerate(expo):
            if d:
                row = F.mul(row, F.power(points[:, j], d))
        rows.append(row)
    if not rows:
        return np.zeros((0, points.shape[0]), dtype=np.int64)
    return np.stack(rows, axis=0)


class ReedSolomon(LinearCode):
    """RS code: evaluations of polynomials of degree < k on distinct points."""

    def __init__(self, field: Field, n: int, k: int, points: np.ndarray, label: str = ""):
        if not 0 <= k <= n <= field.q:
            raise ValueError(f"need 0 <= k <= n <= q, got k={k} n={n} q={field.q}")
        points = np.asarray(points, dtype=np.int64)
        if points.size != n or np.unique(points).size != n:
            raise ValueError("evaluation points must be n distinct field elements")
        gen = vandermonde(field, points, k).T
        super().__init__(field, n, gen, label=label or f"RS({n},{k})")
        self.points = points
        self.rs_dim = k


def rs_code(F: Field, n: int, k: int, points: np.ndarray | None = None) -> ReedSolomon:
    if points is None:
        points = canonical_points(F, n)
    return ReedSolomon(F, n, k, points)


@dataclass
class EvalCode:
    """Multivariate evaluation code ev_S(F[X_1..X_t]^A) with its metadata."""

    base: LinearCode
    points: np.ndarray          # (n, t)
    exponent_set: tuple[tuple[int, ...], ...]
    vars: int

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def dim(self) -> int:
        return self.base.k

    @property
    def requested_dim(self) -> int:
        return len(self.exponent_set)


def eval_code(F: Field, points: np.ndarray,
              exponents: Iterable[tuple[int, ...]], label: str = "") -> EvalCode:
    points = np.atleast_2d(np.asarray(points, dtype=np.int64))
    exponents = tuple(tuple(int(x) for x in e) for e in exponents)
    t = points.shape[1]
    if any(len(e) != t for e in exponents):
        raise ValueError("exponent arity does not match point arity")
    gen = monomial_eval_matrix(F, points, exponents)
    code = LinearCode(F, points.shape[0], gen, label=label or f"ev[{len(exponents)} monomials]")
    return EvalCode(code, points, exponents, t)


def box_exponents(lo: int, hi: int, u: int) -> tuple[tuple[int, ...], ...]:
    """The exponent box [lo, hi)^u in lexicographic order."""
    return tuple(itertools.product(range(lo, hi), repeat=u))


def punctured_tensor_rs(F: Field, m: int, u: int, k: int,
                        points: np.ndarray | None = None,
                        seed: int | None = None) -> EvalCode:
    """Evaluation code of the box [0, k)^u on n = m^u points of F^u.

    Points default to a uniformly random subset without replacement drawn
    from the given seed (Fisher-Yates over an enumeration of F^u when that
    fits in memory, otherwise independent draws with collision rejection).
    """
    if not 1 <= k < m <= F.q:
        raise ValueError("need 1 <= k < m <= q")
    n = m ** u
    if points is None:
        if seed is None:
            raise ValueError("either points or seed must be given")
        rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
        if F.q ** u <= 1 << 22:
            grid = np.array(list(itertools.product(range(F.q), repeat=u)), dtype=np.int64)
            sel = rng.permutation(grid.shape[0])[:n]
            points = grid[sel]
        else:
            seen: set[tuple[int, ...]] = set()
            rows = []
            while len(rows) < n:
                cand = tuple(int(x) for x in rng.integers(0, F.q, size=u))
                if cand not in seen:
                    seen.add(cand)
                    rows.append(cand)
            points = np.array(rows, dtype=np.int64)
    else:
        points = np.atleast_2d(np.asarray(points, dtype=np.int64))
        if points.shape[0] != n:
            raise ValueError(f"|E| = {points.shape[0]} != m^u = {n}")
    return eval_code(F, points, box_exponents(0, k, u),
                     label=f"ptRS(m={m},u={u},k={k})")


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------


def tensor(C1: LinearCode, C2: LinearCode) -> LinearCode:
    """Tensor code: generator = Kronecker product of the generators.

    The Kronecker product of two rref matrices is again rref (pivot columns
    pair up), so no re-reduction is needed.
    """
    if C1.field != C2.field:
        raise ValueError("field mismatch")
    F = C1.field
    if C1.k == 0 or C2.k == 0:
        return zero_code(F, C1.n * C2.n)
    gen = la.kron(F, C1.gen, C2.gen)
    return LinearCode(F, C1.n * C2.n, gen, label=f"{C1.label}(x){C2.label}",
                      assume_reduced=True)


def dual_tensor(C1: LinearCode, C2: LinearCode) -> LinearCode:
    """C1 [+] C2 = (C1_dual tensor C2_dual)_dual."""
    out = tensor(C1.dual(), C2.dual()).dual()
    out.label = f"{C1.label}[+]{C2.label}"
    return out


def dual_tensor_contains(F: Field, H1: np.ndarray, H2: np.ndarray,
                         cmat: np.ndarray) -> bool:
    """Membership c in C1 [+] C2 via H1 c H2^T = 0 (c as an n1 x n2 matrix)."""
    if H1.shape[0] == 0 or H2.shape[0] == 0:
        return True
    return not np.any(la.matmul(F, la.matmul(F, H1, cmat), H2.T))


def star_product(A: LinearCode, B: LinearCode, cap: int | None = None) -> LinearCode:
    """Span of component-wise products of all generator-row pairs."""
    if A.field != B.field:
        raise ValueError("field mismatch")
    if A.n != B.n:
        raise ValueError("length mismatch")
    F = A.field
    if A.k == 0 or B.k == 0:
        return zero_code(F, A.n)
    if cap is not None and A.k * B.k > cap:
        raise BudgetExceeded(f"star product with {A.k * B.k} generator pairs exceeds cap {cap}")
    rows = F.mul(A.gen[:, None, :], B.gen[None, :, :]).reshape(A.k * B.k, A.n)
    return LinearCode(F, A.n, rows, label=f"{A.label}*{B.label}")


@dataclass(frozen=True)
class TensorIndex:
    """Bijection between flat indices and coordinate tuples of a t-axis grid."""

    lengths: tuple[int, ...]

    @property
    def arity(self) -> int:
        return len(self.lengths)

    @property
    def size(self) -> int:
        return int(np.prod(self.lengths))

    def ravel(self, coords: np.ndarray) -> np.ndarray:
        return np.ravel_multi_index(tuple(np.asarray(coords).T), self.lengths)

    def unravel(self, flat: np.ndarray) -> np.ndarray:
        return np.stack(np.unravel_index(np.asarray(flat), self.lengths), axis=-1)

    def columns(self, i: int) -> np.ndarray:
        """Flat indices of every direction-i column, shape (#columns, n_i)."""
        grid = np.arange(self.size).reshape(self.lengths)
        moved = np.moveaxis(grid, i, -1)
        return moved.reshape(-1, self.lengths[i])


# ---------------------------------------------------------------------------
# local testability estimator
# ---------------------------------------------------------------------------


@dataclass
class SoundnessEstimate:
    rho_hat: float
    trials: int
    used_exact_coset_min: bool
    methodology: str
    samples: list = dfield(default_factory=list)


def ltc_soundness_estimate(F: Field, H: np.ndarray, trials: int, seed: int,
                           coset_budget: int = 200_000) -> SoundnessEstimate:
    """Empirical upper estimate of the soundness rho of the check matrix H.

    rho <= (|He|/m) / (|e*|/n) for the minimal-weight e* in e + ker(H); the
    minimum is taken over sampled errors.  The coset minimum is computed
    exactly when q^dim(ker H) fits the budget, otherwise the injected weight
    stands in (making the estimate an upper bound only for coset-minimal
    injections; flagged in the methodology note).
    """
    H = np.atleast_2d(np.asarray(H, dtype=np.int64))
    m, n = H.shape
    ker = la.right_kernel(F, H)
    exact = F.q ** ker.shape[0] <= coset_budget
    ker_words = None
    if exact and ker.shape[0]:
        ker_words = np.concatenate([w for _, w in la.enumerate_span(F, ker)], axis=0)
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))
    best = math.inf
    samples = []
    done = 0
    while done < trials:
        w = int(rng.integers(1, n + 1))
        support = rng.permutation(n)[:w]
        e = np.zeros(n, dtype=np.int64)
        e[support] = F.random(rng, w, nonzero=True)
        s = la.matvec(F, H, e)
        syn_w = la.weight(s)
        if syn_w == 0:
            continue  # e lies in the code: coset minimum is 0, ratio undefined
        if exact:
            if ker_words is not None:
                ew = int(np.count_nonzero(F.sub(e[None, :], ker_words), axis=1).min())
            else:
                ew = la.weight(e)
        else:
            ew = la.weight(e)
        ratio = (syn_w / m) / (ew / n)
        samples.append((ew, syn_w, ratio))
        best = min(best, ratio)
        done += 1
    note = ("exact coset minimization" if exact
            else "injected-weight approximation (upper bound only for coset-minimal errors)")
    return SoundnessEstimate(best, trials, exact, note, samples)


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------


def dump_code(C: LinearCode, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(C.to_json(), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_code(path: str) -> LinearCode:
    with open(path) as fh:
        return LinearCode.from_json(json.load(fh))
