"""CSS pairs, subsystem products, distance accounting, check matrices."""

import math

import numpy as np
import pytest

from prodcodes.gf import GF
from prodcodes import linalg as la
from prodcodes.codes import rs_code
from prodcodes.subsystem import (CheckMatrices, CssPair, check_matrices,
                                 logical_coset_equal, quantum_rs,
                                 subsystem_distance, subsystem_product)


def test_quantum_rs_validation(gf8):
    with pytest.raises(ValueError):
        quantum_rs(gf8, 8, 3, 4)  # kx + kz < n
    Q = quantum_rs(gf8, 8, 8, 8)
    assert Q.dimension == 8  # trivial encode
    Q2 = quantum_rs(gf8, 8, 6, 6)
    assert Q2.dimension == 4


def test_transrs_factor_dimension():
    # second factor of the r=3, q=37 construction: dimension 31 + 12 - 37 = 6
    F = GF(37)
    Q = quantum_rs(F, 37, 31, 12)
    assert Q.dimension == 6
    # dual relation Q_X^perp = RS(n - kx)
    assert Q.qx.dual().same_subspace(rs_code(F, 37, 6))


def test_dimension_identity_both_forms(gf8):
    rng = np.random.default_rng(4)
    for _ in range(20):
        kx = int(rng.integers(4, 9))
        kz = int(rng.integers(8 - kx, 9)) if kx < 8 else int(rng.integers(1, 9))
        if kx + kz < 8:
            continue
        Q = quantum_rs(gf8, 8, kx, kz)
        F = Q.field
        qxp = Q.qx.dual().gen
        lhs = la.rank(F, np.concatenate([Q.qz.gen, qxp], axis=0)) - Q.qx.dual().k
        rhs = Q.qz.k - la.row_space_intersection(F, Q.qz.gen, qxp).shape[0]
        assert lhs == rhs == Q.dimension


def test_css_condition_enforced(gf8):
    qx = rs_code(gf8, 8, 2)
    qz = rs_code(gf8, 8, 2)
    with pytest.raises(ValueError):
        CssPair(qx, qz, subsystem=False)
    # the same pair is admissible as a subsystem pair; RS(2) lies inside
    # RS(6) = Q_X^perp, so the whole Z space is stabilizer and k = 0
    pair = CssPair(qx, qz, subsystem=True)
    assert pair.dimension == 0


def test_product_dimension_multiplies(gf4, gf8):
    Q1 = quantum_rs(gf4, 4, 3, 3)   # k = 2
    Q2 = quantum_rs(gf4, 3, 2, 2)   # k = 1
    P = subsystem_product([Q1, Q2])
    assert P.dimension == 2
    assert P.subsystem
    Q3 = quantum_rs(gf8, 8, 6, 6)
    Q4 = quantum_rs(gf8, 8, 5, 6)
    P2 = subsystem_product([Q3, Q4])
    assert P2.dimension == Q3.dimension * Q4.dimension == 4 * 3


def test_product_single_factor_identity(gf4):
    Q = quantum_rs(gf4, 4, 3, 3)
    assert subsystem_product([Q]) is Q


def test_product_rejects_subsystem_factor(gf4):
    Q = quantum_rs(gf4, 4, 3, 3)
    S = CssPair(Q.qx, Q.qz, subsystem=True)
    with pytest.raises(ValueError):
        subsystem_product([S, Q])


def test_subsystem_distance_swap_symmetry(gf4):
    Q1 = quantum_rs(gf4, 3, 2, 2)
    P = subsystem_product([Q1, Q1])
    d = subsystem_distance(P)
    dsw = subsystem_distance(subsystem_product([Q1.swap(), Q1.swap()]))
    assert d.exact and dsw.exact and d.value == dsw.value


def test_subsystem_distance_zero_dim_infinite(gf4):
    # product dimension 0: both logical classes are empty
    Q1 = quantum_rs(gf4, 4, 3, 3)   # k = 2
    Q2 = quantum_rs(gf4, 4, 2, 2)   # k = 0
    P = subsystem_product([Q1, Q2])
    assert P.dimension == 0
    assert math.isinf(subsystem_distance(P).value)


def test_nonsubsystem_distance_matches_css_definition(gf8):
    # when gauge = stabilizer (dim equals), subsystem distance = CSS distance
    Q = quantum_rs(gf8, 8, 6, 6)
    d = subsystem_distance(Q, budget=2_000_000)
    F = Q.field
    best = math.inf
    for (logical, gauge_dual) in [(Q.qz.gen, Q.qx.dual().gen),
                                  (Q.qx.gen, Q.qz.dual().gen)]:
        par = la.right_kernel(F, gauge_dual)
        for _, words in la.enumerate_span(F, logical):
            syn = la.matmul(F, words, par.T)
            outside = np.any(syn, axis=1)
            wts = np.count_nonzero(words[outside], axis=1)
            if wts.size:
                best = min(best, int(wts.min()))
    assert d.value == best


def test_check_matrices_tensor_style(gf4):
    Q1 = quantum_rs(gf4, 3, 2, 2)
    P = subsystem_product([Q1, Q1])
    cm = check_matrices(P, "tensor")
    F = P.field
    assert la.row_space_equal(F, la.right_kernel(F, cm.hx), P.qx.gen)
    assert la.row_space_equal(F, la.right_kernel(F, cm.hz), P.qz.gen)
    # two factors of length n: locality <= 2n
    assert cm.locality <= 2 * 3


def test_check_matrices_amplified(gf8):
    Qa = quantum_rs(gf8, 8, 6, 6)
    Qb = quantum_rs(gf8, 8, 4, 5)
    P = subsystem_product([Qa, Qb])
    cm = check_matrices(P, "amplified")
    F = P.field
    assert la.row_space_equal(F, la.right_kernel(F, cm.hx), P.qx.gen)
    assert la.row_space_equal(F, la.right_kernel(F, cm.hz), P.qz.gen)
    # every single-qudit error produces a syndrome of weight >= m_i + 1 in
    # the block whose factor column is hit (outer RS distance), checked
    # exhaustively over all (q-1) * N single errors
    m1 = Qa.qz.parity_check().shape[0]
    m2 = Qb.qz.parity_check().shape[0]
    N = P.n
    errors = np.zeros((7 * N, N), dtype=np.int64)
    for j in range(N):
        errors[7 * j:7 * (j + 1), j] = np.arange(1, 8)
    syn = la.matmul(F, errors, cm.hz.T)
    blk1 = syn[:, : 2 * m1 * 8]
    blk2 = syn[:, 2 * m1 * 8:]
    w1 = np.count_nonzero(blk1, axis=1)
    w2 = np.count_nonzero(blk2, axis=1)
    assert np.all((w1 == 0) | (w1 >= m1 + 1))
    assert np.all((w2 == 0) | (w2 >= m2 + 1))


def test_check_matrices_requires_product(gf4):
    Q = quantum_rs(gf4, 4, 3, 3)
    with pytest.raises(ValueError):
        check_matrices(Q, "tensor")


def test_logical_coset_equal(gf4):
    Q1 = quantum_rs(gf4, 3, 2, 2)
    P = subsystem_product([Q1, Q1])
    F = P.field
    rng = np.random.default_rng(2)
    z = la.matmul(F, F.random(rng, P.qz.k)[None, :], P.qz.gen)[0]
    gauge = P.qx.dual().gen
    g = la.matmul(F, F.random(rng, gauge.shape[0])[None, :], gauge)[0]
    assert logical_coset_equal(P, "z", z, F.add(z, g))
    probe = np.zeros(P.n, dtype=np.int64)
    probe[0] = 1
    if not la.in_row_space(F, gauge, probe):
        assert not logical_coset_equal(P, "z", z, F.add(z, probe))


def test_csspair_serialization(gf8):
    Q = quantum_rs(gf8, 8, 6, 5)
    doc = Q.to_json()
    Q2 = CssPair.from_json(doc)
    assert Q2.qx.same_subspace(Q.qx) and Q2.qz.same_subspace(Q.qz)
    assert Q2.subsystem == Q.subsystem


def test_checkmatrices_json(gf4):
    Q1 = quantum_rs(gf4, 3, 2, 2)
    P = subsystem_product([Q1, Q1])
    cm = check_matrices(P, "tensor")
    doc = cm.to_json()
    assert doc["n"] == 9 and doc["locality"] == cm.locality
    assert len(doc["hx"]) == cm.hx.size


def test_amplified_product_checks_have_positive_soundness(gf8):
    """Monte-Carlo soundness of the stacked amplified product checks at n=8
    stays bounded away from zero over ten thousand seeded trials."""
    from prodcodes.codes import ltc_soundness_estimate
    Qa = quantum_rs(gf8, 8, 6, 6)
    Qb = quantum_rs(gf8, 8, 4, 5)
    P = subsystem_product([Qa, Qb])
    cm = check_matrices(P, "amplified")
    est = ltc_soundness_estimate(gf8, cm.hz, trials=10_000, seed=91)
    assert est.rho_hat > 0
    assert not est.used_exact_coset_min  # flagged approximation regime
    assert "approximation" in est.methodology


def test_product_locality_record_adds(gf8):
    Qa = quantum_rs(gf8, 8, 6, 6)
    Qb = quantum_rs(gf8, 8, 4, 5)
    P = subsystem_product([Qa, Qb])
    w1 = CheckMatrices._locality(Qa.qx.parity_check(), Qa.qz.parity_check())
    w2 = CheckMatrices._locality(Qb.qx.parity_check(), Qb.qz.parity_check())
    assert P.locality_record == w1 + w2
    assert check_matrices(P, "tensor").locality <= P.locality_record
