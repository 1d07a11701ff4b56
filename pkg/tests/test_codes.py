"""Classical code constructions: duality, products, distances, MDS,
puncturing, the soundness estimator, and serialization."""

import math

import numpy as np
import pytest

from prodcodes.gf import GF
from prodcodes import linalg as la
from prodcodes.codes import (BudgetExceeded, LinearCode, TensorIndex,
                             canonical_points, dual_tensor,
                             dual_tensor_contains, eval_code, full_code,
                             ltc_soundness_estimate, monomial_eval_matrix,
                             punctured_tensor_rs, rs_code, star_product,
                             tensor, vandermonde, zero_code)
from prodcodes.poly import Poly, uni_eval
from prodcodes.subsystem import quantum_rs, subsystem_product, check_matrices


def test_rs_distance_exhaustive():
    F = GF(7)
    d = rs_code(F, 7, 3).min_distance()
    assert (d.value, d.exact) == (5, True)
    d2 = rs_code(GF(5), 5, 2).min_distance()
    assert (d2.value, d2.exact) == (4, True)


def test_rs_extremes(gf8):
    assert rs_code(gf8, 8, 0).k == 0
    assert rs_code(gf8, 8, 8).k == 8
    assert math.isinf(rs_code(gf8, 8, 0).min_distance().value)
    assert full_code(gf8, 8).min_distance().value == 1


def test_rs_validation(gf8):
    with pytest.raises(ValueError):
        rs_code(gf8, 8, 9)
    with pytest.raises(ValueError):
        rs_code(gf8, 9, 2)
    with pytest.raises(ValueError):
        rs_code(gf8, 3, 1, points=np.array([1, 1, 2]))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 11, 13, 16])
def test_rs_duality_full_field(q):
    F = GF(q)
    for k in range(q + 1):
        assert rs_code(F, q, k).dual().same_subspace(rs_code(F, q, q - k))


def test_dual_involution_seeded():
    F = GF(4)
    rng = np.random.default_rng(77)
    for _ in range(100):
        k, n = int(rng.integers(0, 7)), 8
        C = LinearCode(F, n, F.random(rng, (k, n)))
        assert C.dual().dual().same_subspace(C)
        assert C.k + C.dual().k == n
        if C.k and C.dual().k:
            assert not np.any(la.matmul(F, C.gen, C.dual().gen.T))


def test_dual_tensor_dimension_formula():
    F = GF(5)
    C1, C2 = rs_code(F, 5, 2), rs_code(F, 5, 3)
    assert dual_tensor(C1, C2).k == 25 - 3 * 2


def test_tensor_adjunction_seeded():
    for q in (2, 3, 4):
        F = GF(q)
        rng = np.random.default_rng(q * 5)
        for _ in range(20):
            n1, n2 = int(rng.integers(2, 5)), int(rng.integers(2, 5))
            C1 = LinearCode(F, n1, F.random(rng, (int(rng.integers(1, n1 + 1)), n1)))
            C2 = LinearCode(F, n2, F.random(rng, (int(rng.integers(1, n2 + 1)), n2)))
            lhs = tensor(C1, C2).dual()
            rhs = dual_tensor(C1.dual(), C2.dual())
            assert lhs.same_subspace(rhs)


def test_tensor_zero_and_full(gf4):
    C = rs_code(gf4, 4, 2)
    assert tensor(C, zero_code(gf4, 3)).k == 0
    assert dual_tensor(C, full_code(gf4, 3)).k == 12


def test_dual_tensor_membership_cross_validation(gf5):
    C1, C2 = rs_code(gf5, 5, 2), rs_code(gf5, 5, 3)
    DT = dual_tensor(C1, C2)
    H1, H2 = C1.parity_check(), C2.parity_check()
    G, spans = _canonical_sum_form(gf5, C1, C2)
    rng = np.random.default_rng(3)
    hits = 0
    for _ in range(100):
        if rng.random() < 0.5:
            c = DT.codeword(gf5.random(rng, DT.k))
        else:
            c = gf5.random(rng, 25)
        parity_member = dual_tensor_contains(gf5, H1, H2, c.reshape(5, 5))
        sum_member = la.solve_left(gf5, G, c) is not None
        assert parity_member == sum_member
        hits += parity_member
    assert 0 < hits < 100


def _canonical_sum_form(F, C1, C2):
    from prodcodes.expansion import canonical_generator
    return canonical_generator(F, [C1, C2])


def test_star_product_basics(gf5):
    A = rs_code(gf5, 5, 2)
    ones = LinearCode(gf5, 5, np.ones((1, 5), dtype=np.int64))
    assert star_product(A, ones).same_subspace(A)
    assert star_product(zero_code(gf5, 5), A).k == 0
    # RS(k1) * RS(k2) <= RS(k1 + k2 - 1)
    S = star_product(rs_code(gf5, 5, 2), rs_code(gf5, 5, 3))
    assert la.row_space_contains(gf5, rs_code(gf5, 5, 4).gen, S.gen)
    with pytest.raises(ValueError):
        star_product(A, rs_code(gf5, 4, 2))
    with pytest.raises(BudgetExceeded):
        star_product(A, A, cap=1)


def test_rs_multiplicativity_seeded(gf8):
    pts = canonical_points(gf8, 8)
    rng = np.random.default_rng(8)
    for _ in range(1000):
        f = gf8.random(rng, 3)
        g = gf8.random(rng, 4)
        ef = uni_eval(gf8, f, pts)
        eg = uni_eval(gf8, g, pts)
        fg = Poly.from_univariate(gf8, f) * Poly.from_univariate(gf8, g)
        efg = fg.eval_grid(pts[:, None])
        assert np.array_equal(gf8.mul(ef, eg), efg)


def test_is_mds():
    assert rs_code(GF(7), 7, 3).is_mds()
    rep = LinearCode(GF(2), 3, np.ones((1, 3), dtype=np.int64))
    assert rep.is_mds()  # d = 3 = n - k + 1
    # binary Hamming(7,4): d = 3 < 4, exhaustive-distance oracle agrees
    gen = np.array([[1, 0, 0, 0, 0, 1, 1],
                    [0, 1, 0, 0, 1, 0, 1],
                    [0, 0, 1, 0, 1, 1, 0],
                    [0, 0, 0, 1, 1, 1, 1]], dtype=np.int64)
    ham = LinearCode(GF(2), 7, gen)
    assert ham.min_distance().value == 3
    assert not ham.is_mds()


def test_min_distance_budget_fallback(gf16):
    C = rs_code(gf16, 16, 8)
    d = C.min_distance(budget=1000)
    assert not d.exact and d.method == "sampling-upper-bound"
    assert d.value >= 16 - 8 + 1  # the estimate upper-bounds from above


def test_punctured_tensor_rs():
    F = GF(1 << 17)
    ec = punctured_tensor_rs(F, 3, 2, 2, seed=11)
    assert ec.n == 9 and ec.dim == 4 == ec.requested_dim
    assert ec.base.is_mds()
    assert ec.base.dual().is_mds()
    # u = 1 reduces to an RS code on arbitrary points
    ec1 = punctured_tensor_rs(F, 5, 1, 3, seed=4)
    rs = rs_code(F, 5, 3, points=ec1.points[:, 0])
    assert ec1.base.same_subspace(rs)
    # k = m on explicit points gives the full space
    full_pts = np.array([[0], [1], [2]], dtype=np.int64)
    with pytest.raises(ValueError):
        punctured_tensor_rs(F, 3, 1, 3, points=full_pts)
    # dim monotone under puncturing: dim <= parent box size
    assert ec.dim <= 4


def test_eval_code_arity_checks(gf4):
    with pytest.raises(ValueError):
        eval_code(gf4, np.array([[0, 1], [1, 0]]), [(1,)])


def test_tensor_index():
    ti = TensorIndex((3, 4, 2))
    assert ti.size == 24 and ti.arity == 3
    coords = ti.unravel(np.arange(24))
    assert np.array_equal(ti.ravel(coords), np.arange(24))
    for i in range(3):
        cols = ti.columns(i)
        assert cols.shape == (24 // ti.lengths[i], ti.lengths[i])
        assert np.array_equal(np.sort(cols.ravel()), np.arange(24))


def test_ltc_estimator_unit_vector(gf8):
    C = rs_code(gf8, 8, 3)
    H = C.parity_check()
    m, n = H.shape
    est = ltc_soundness_estimate(gf8, H, trials=60, seed=9)
    assert est.rho_hat > 0
    # hand-check the unit-vector ratio on one sample
    e = np.zeros(n, dtype=np.int64)
    e[2] = 1
    ratio = (np.count_nonzero(la.matvec(gf8, H, e)) / m) / (1 / n)
    assert ratio == np.count_nonzero(H[:, 2]) / m * n


def test_ltc_estimator_excludes_codewords(gf8):
    C = rs_code(gf8, 6, 2)
    H = C.parity_check()
    est = ltc_soundness_estimate(gf8, H, trials=40, seed=1)
    assert all(s[1] > 0 for s in est.samples)


def test_serialization_roundtrip(gf16):
    C = rs_code(gf16, 16, 5)
    doc = C.to_json()
    C2 = LinearCode.from_json(doc)
    assert np.array_equal(C2.gen, C.gen) and C2.field == C.field
    assert C2.to_json() == doc
