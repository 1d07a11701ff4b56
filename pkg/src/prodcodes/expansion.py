"""Product-expansion toolkit: exact brute-force computation at desk scale,
Monte-Carlo upper estimates, epsilon-closures of cell sets, and the
canonical-generator rank test for inner-generated sets.

The product-expansion of codes (C_1, ..., C_t) is the largest rho with: every
dual-tensor codeword c admits a decomposition c = c_1 + ... + c_t, c_i in
C^(i), with |c| >= rho * sum_i n_i |c_i|_i.  All exact values are reported
as Fractions of counts, never floats.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .gf import Field
from . import linalg as la
from .codes import BudgetExceeded, LinearCode

DEFAULT_PE_BUDGET = 2_000_000


# ---------------------------------------------------------------------------
# direction-weight and C^(i)/C^(i,j) plumbing
# ---------------------------------------------------------------------------


def dir_weight(c: np.ndarray, i: int, lengths: tuple[int, ...]) -> int:
    """Number of nonzero direction-i columns of the flat tensor c."""
    arr = np.asarray(c).reshape(lengths)
    has = np.any(arr != 0, axis=i)
    return int(np.count_nonzero(has))


def dir_weights_batch(cs: np.ndarray, i: int, lengths: tuple[int, ...]) -> np.ndarray:
    arr = np.asarray(cs).reshape((-1,) + lengths)
    has = np.any(arr != 0, axis=i + 1)
    return np.count_nonzero(has.reshape(arr.shape[0], -1), axis=1)


def axis_space(F: Field, codes: list[LinearCode], constrained: dict[int, LinearCode]) -> np.ndarray:
    """Basis of the tensor space with the given axes constrained to their
    codes and the remaining axes free."""
    mats = []
    for axis, C in enumerate(codes):
        mats.append(constrained[axis].gen if axis in constrained else la.identity(C.n))
    return reduce(lambda a, b: la.kron(F, a, b), mats)


def ci_basis(F: Field, codes: list[LinearCode], i: int) -> np.ndarray:
    return axis_space(F, codes, {i: codes[i]})


def cij_basis(F: Field, codes: list[LinearCode], i: int, j: int) -> np.ndarray:
    return axis_space(F, codes, {i: codes[i], j: codes[j]})


def canonical_generator(F: Field, codes: list[LinearCode]) -> tuple[np.ndarray, list[tuple[int, int]]]:
    """Canonical generator matrix of the dual tensor code: the stacked
    direction-i blocks I (x) .. G_i .. (x) I.  Returns (G, row block spans)."""
    blocks = [ci_basis(F, codes, i) for i in range(len(codes))]
    spans = []
    row = 0
    for b in blocks:
        spans.append((row, row + b.shape[0]))
        row += b.shape[0]
    return np.concatenate(blocks, axis=0), spans


@dataclass
class Decomposition:
    """One decomposition c = sum of parts, parts[i] in C^(i)."""

    parts: list[np.ndarray]
    lengths: tuple[int, ...]

    @property
    def column_weights(self) -> list[int]:
        return [dir_weight(p, i, self.lengths) for i, p in enumerate(self.parts)]

    def cost(self) -> int:
        return sum(n * w for n, w in zip(self.lengths, self.column_weights))

    def total(self, F: Field) -> np.ndarray:
        return reduce(F.add, self.parts)

    def to_json(self) -> dict:
        return {"parts": [[int(x) for x in p] for p in self.parts],
                "lengths": list(self.lengths),
                "column_weights": self.column_weights}


def base_decompositions(F: Field, codes: list[LinearCode],
                        cwords: np.ndarray) -> list[list[np.ndarray]]:
    """A particular decomposition for each row of cwords, found by solving
    against the canonical generator matrix."""
    G, spans = canonical_generator(F, codes)
    X = la.solve_left(F, G, cwords)
    if X is None:
        raise ValueError("word outside the dual tensor code")
    out = []
    for r in range(cwords.shape[0]):
        parts = [la.matmul(F, X[r, a:b][None, :], G[a:b])[0] for a, b in spans]
        out.append(parts)
    return out


# ---------------------------------------------------------------------------
# exact product-expansion
# ---------------------------------------------------------------------------


@dataclass
class PeResult:
    rho: Fraction              # exact, or an upper estimate for Monte-Carlo
    exact: bool
    witness_word: np.ndarray | None
    witness: Decomposition | None
    codewords_scanned: int

    def to_json(self) -> dict:
        return {"rho": [self.rho.numerator, self.rho.denominator],
                "exact": self.exact,
                "witness_word": None if self.witness_word is None
                else [int(x) for x in self.witness_word],
                "witness": None if self.witness is None else self.witness.to_json(),
                "codewords_scanned": self.codewords_scanned}


def _lattice_words(F: Field, codes: list[LinearCode]) -> list[tuple[tuple[int, int], np.ndarray]]:
    """All elements of each C^(i,j) lattice, i < j: any two decompositions
    of the same word differ exactly by such pairwise adjustments."""
    t = len(codes)
    out = []
    for i in range(t):
        for j in range(i + 1, t):
            B = cij_basis(F, codes, i, j)
            words = (np.concatenate([w for _, w in la.enumerate_span(F, B)], axis=0)
                     if B.shape[0] else np.zeros((1, int(np.prod([c.n for c in codes]))),
                                                 dtype=np.int64))
            out.append(((i, j), words))
    return out


def _apply_lattice(F: Field, parts: list[np.ndarray],
                   choice: dict[tuple[int, int], np.ndarray]) -> list[np.ndarray]:
    t = len(parts)
    new = [p.copy() for p in parts]
    for (i, j), z in choice.items():
        # c_i picks up +z, c_j picks up -z; the total is unchanged
        new[i] = F.add(new[i], z)
        new[j] = F.sub(new[j], z)
    return new


def pe_exact(codes: list[LinearCode], budget: int = DEFAULT_PE_BUDGET) -> PeResult:
    """Exact product-expansion by exhausting codewords and decompositions.

    Raises BudgetExceeded instead of silently estimating.
    """
    F = codes[0].field
    t = len(codes)
    lengths = tuple(c.n for c in codes)
    N = int(np.prod(lengths))
    dt_dim = N - int(np.prod([c.n - c.k for c in codes]))
    if any(c.k == c.n for c in codes):
        # a full-space factor admits zero-cost column covers only when the
        # tuple is a single full code; the definition still applies
        pass
    lattices = _lattice_words(F, codes) if t > 1 else []
    lattice_size = int(np.prod([w.shape[0] for _, w in lattices])) if lattices else 1
    n_codewords = F.q ** dt_dim
    if n_codewords * lattice_size > budget:
        raise BudgetExceeded(
            f"pe_exact needs {n_codewords} codewords x {lattice_size} decompositions "
            f"> budget {budget}")

    if t == 1:
        d = codes[0].min_distance(budget)
        if math.isinf(d.value):
            return PeResult(Fraction(0), True, None, None, 0)
        return PeResult(Fraction(int(d.value), lengths[0]), True, None, None,
                        F.q ** codes[0].k)

    dt_gen = la.row_space(F, np.concatenate([ci_basis(F, codes, i) for i in range(t)], axis=0))
    assert dt_gen.shape[0] == dt_dim
    best: Fraction | None = None
    best_word = None
    best_dec = None
    scanned = 0
    for _, words in la.enumerate_span(F, dt_gen, chunk=512):
        nz = np.any(words, axis=1)
        words = words[nz]
        if words.shape[0] == 0:
            continue
        bases = base_decompositions(F, codes, words)
        wts = np.count_nonzero(words, axis=1)
        for r in range(words.shape[0]):
            scanned += 1
            min_cost = None
            min_parts = None
            for combo in itertools.product(*[range(w.shape[0]) for _, w in lattices]):
                choice = {pair: w[idx] for ((pair, w), idx) in zip(lattices, combo)}
                parts = _apply_lattice(F, bases[r], choice)
                cost = sum(lengths[i] * dir_weight(parts[i], i, lengths) for i in range(t))
                if min_cost is None or cost < min_cost:
                    min_cost = cost
                    min_parts = parts
            ratio = Fraction(int(wts[r]), min_cost)
            if best is None or ratio < best:
                best = ratio
                best_word = words[r].copy()
                best_dec = Decomposition(min_parts, lengths)
    if best is None:
        return PeResult(Fraction(0), True, None, None, scanned)
    return PeResult(best, True, best_word, best_dec, scanned)


def pe_monte_carlo(codes: list[LinearCode], trials: int, seed: int,
                   lattice_budget: int = 4096) -> PeResult:
    """Upper estimate of the product-expansion from sampled codewords.

    Every sampled witness ratio upper-bounds rho.  Decompositions are
    minimized exactly when the adjustment lattice is small, otherwise by
    greedy coordinate descent over lattice generators.  The sample always
    includes the cheap single-column witnesses built from minimum-weight
    factor codewords.
    """
    F = codes[0].field
    t = len(codes)
    lengths = tuple(c.n for c in codes)
    N = int(np.prod(lengths))
    rng = np.random.default_rng(np.random.Philox(key=np.uint64(seed)))

    gens = [ci_basis(F, codes, i) for i in range(t)]
    dt_gen = la.row_space(F, np.concatenate(gens, axis=0))
    if dt_gen.shape[0] == 0:
        return PeResult(Fraction(0), False, None, None, 0)

    pair_bases = [((i, j), cij_basis(F, codes, i, j))
                  for i in range(t) for j in range(i + 1, t)]
    lattice_size = int(np.prod([F.q ** b.shape[0] for _, b in pair_bases])) if pair_bases else 1
    exact_lattice = lattice_size <= lattice_budget
    lattices = _lattice_words(F, codes) if exact_lattice and t > 1 else None

    samples: list[np.ndarray] = []
    # cheap witnesses: a min-weight codeword of C_i on a single direction-i column
    for i, C in enumerate(codes):
        if C.k == 0:
            continue
        w, word = N + 1, None
        for _, chunk in la.enumerate_span(F, C.gen):
            ws = np.count_nonzero(chunk, axis=1)
            pos = np.nonzero(ws > 0)[0]
            if pos.size and ws[pos].min() < w:
                w = int(ws[pos].min())
                word = chunk[pos[np.argmin(ws[pos])]]
        if word is None:
            continue
        emb = np.zeros(lengths, dtype=np.int64)
        sl = [0] * t
        sl[i] = slice(None)
        emb[tuple(sl)] = word
        samples.append(emb.ravel())
    for _ in range(trials):
        coef = F.random(rng, dt_gen.shape[0])
        if not coef.any():
            continue
        samples.append(la.matmul(F, coef[None, :], dt_gen)[0])

    best: Fraction | None = None
    best_word, best_dec = None, None
    for word in samples:
        if not word.any():
            continue
        parts = base_decompositions(F, codes, word[None, :])[0]
        if lattices is not None:
            min_cost, min_parts = None, None
            for combo in itertools.product(*[range(w.shape[0]) for _, w in lattices]):
                choice = {pair: w[idx] for ((pair, w), idx) in zip(lattices, combo)}
                cand = _apply_lattice(F, parts, choice)
                cost = sum(lengths[i] * dir_weight(cand[i], i, lengths) for i in range(t))
                if min_cost is None or cost < min_cost:
                    min_cost, min_parts = cost, cand
        else:
            min_parts = _descend_decomposition(F, parts, pair_bases, lengths, rng)
            min_cost = sum(lengths[i] * dir_weight(min_parts[i], i, lengths)
                           for i in range(t))
        ratio = Fraction(int(np.count_nonzero(word)), min_cost)
        if best is None or ratio < best:
            best, best_word = ratio, word
            best_dec = Decomposition(min_parts, lengths)
    return PeResult(best if best is not None else Fraction(0), False,
                    best_word, best_dec, len(samples))


def _descend_decomposition(F: Field, parts, pair_bases, lengths, rng,
                           sweeps: int = 3):
    t = len(parts)
    cur = [p.copy() for p in parts]

    def cost(ps):
        return sum(lengths[i] * dir_weight(ps[i], i, lengths) for i in range(t))

    cur_cost = cost(cur)
    for _ in range(sweeps):
        improved = False
        for (i, j), B in pair_bases:
            for row in B:
                for scalar in range(1, F.q):
                    z = F.mul(np.int64(scalar), row)
                    cand = [p.copy() for p in cur]
                    cand[i] = F.add(cand[i], z)
                    cand[j] = F.sub(cand[j], z)
                    cc = cost(cand)
                    if cc < cur_cost:
                        cur, cur_cost = cand, cc
                        improved = True
        if not improved:
            break
    return cur


# ---------------------------------------------------------------------------
# epsilon-closure and inner-generated sets
# ---------------------------------------------------------------------------


def epsilon_closure(lengths: tuple[int, ...], cells: np.ndarray, eps: float) -> np.ndarray:
    """Minimal superset of the boolean cell array in which every direction-i
    column is either fully contained or meets it in < eps * n_i cells."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    A = np.asarray(cells, dtype=bool).reshape(lengths).copy()
    t = len(lengths)
    base = int(A.sum())
    changed = True
    while changed:
        changed = False
        for i in range(t):
            count = A.sum(axis=i)
            grow = (count >= eps * lengths[i]) & (count < lengths[i])
            if np.any(grow):
                expand = np.expand_dims(grow, axis=i)
                A |= np.broadcast_to(expand, A.shape)
                changed = True
    assert A.sum() <= closure_size_bound(t, eps, base) or base == 0
    return A


def closure_size_bound(t: int, eps: float, base_size: int) -> float:
    return ((2 ** t + 1) / eps) ** t * base_size


def inner_generated_test(codes: list[LinearCode], cells: np.ndarray) -> bool:
    """Canonical-generator rank test: the cell set is inner-generated iff
    rank(G|_{B(A) x A}) = rank(G) - rank(G restricted off A)."""
    F = codes[0].field
    lengths = tuple(c.n for c in codes)
    A = np.asarray(cells, dtype=bool).reshape(lengths)
    flatA = A.ravel()
    G, spans = canonical_generator(F, codes)
    # rows whose direction-i column lies entirely inside A
    row_mask = np.zeros(G.shape[0], dtype=bool)
    for i, (a, b) in enumerate(spans):
        col_full = np.all(A, axis=i)
        k_i = codes[i].k
        # row order of block i matches I x .. G_i .. x I: axes in order with
        # the generator index replacing axis i
        shape = list(lengths)
        shape[i] = k_i
        block_mask = np.broadcast_to(np.expand_dims(col_full, axis=i), shape)
        row_mask[a:b] = block_mask.ravel()
    r_full = la.rank(F, G)
    r_off = la.rank(F, G[:, ~flatA]) if np.any(~flatA) else 0
    sub = G[np.ix_(row_mask, flatA)] if np.any(row_mask) and np.any(flatA) else \
        np.zeros((0, int(flatA.sum())), dtype=np.int64)
    r_sub = la.rank(F, sub) if sub.size else 0
    return r_sub == r_full - r_off


def decomposition_difference_witness(F: Field, codes: list[LinearCode],
                                     parts_a: list[np.ndarray],
                                     parts_b: list[np.ndarray]):
    """Solve for c_{i,j} in C^(i,j) expressing the difference of two
    decompositions of the same word; returns {(i,j): vector} or None."""
    t = len(codes)
    N = int(np.prod([c.n for c in codes]))
    pair_bases = [((i, j), cij_basis(F, codes, i, j))
                  for i in range(t) for j in range(i + 1, t)]
    cols = []
    for (i, j), B in pair_bases:
        block = np.zeros((B.shape[0], t * N), dtype=np.int64)
        block[:, i * N:(i + 1) * N] = B
        block[:, j * N:(j + 1) * N] = F.neg(B)
        cols.append(block)
    M = np.concatenate(cols, axis=0) if cols else np.zeros((0, t * N), dtype=np.int64)
    d = np.concatenate([F.sub(parts_a[i], parts_b[i]) for i in range(t)])
    x = la.solve_left(F, M, d)
    if x is None:
        return None
    out = {}
    ofs = 0
    for (i, j), B in pair_bases:
        coef = x[ofs:ofs + B.shape[0]]
        out[(i, j)] = la.matmul(F, coef[None, :], B)[0] if B.shape[0] else \
            np.zeros(N, dtype=np.int64)
        ofs += B.shape[0]
    return out
