"""Quantum decoding: coefficient-stripe cleanup, subsystem and CSS product
decoders, syndrome formulation, bounded coset search, single-shot decoding."""

from fractions import Fraction

import numpy as np
import pytest

from prodcodes.gf import GF
from prodcodes import linalg as la
from prodcodes.codes import tensor
from prodcodes.decoder import bivariate_coeffs
from prodcodes.qdecoder import (CssProductInstance, InconsistentInput,
                                QdecParams, SubsystemProductInstance,
                                bounded_syndrome_search, coset_min_weight,
                                css_decode, dec_quantum, single_shot_decode,
                                subsystem_decode, syndrome_decode,
                                syndrome_to_word)
from prodcodes.rng import stream
from prodcodes.subsystem import (check_matrices, logical_coset_equal,
                                 quantum_rs, subsystem_product)


@pytest.fixture(scope="module")
def sub16():
    F = GF(16)
    return SubsystemProductInstance(
        [quantum_rs(F, 16, 12, 12), quantum_rs(F, 16, 8, 9)],
        QdecParams(Fraction(3, 16), Fraction(1, 8), gamma=20))


@pytest.fixture(scope="module")
def sub16_explore():
    F = GF(16)
    return SubsystemProductInstance(
        [quantum_rs(F, 16, 12, 12), quantum_rs(F, 16, 8, 9)],
        QdecParams(Fraction(3, 16), Fraction(1, 1), gamma=2))


def _sample_logical(inst, rng, side):
    F = inst.field
    space = inst.product.logical_z_space() if side == "z" else \
        inst.product.logical_x_space()
    return la.matmul(F, F.random(rng, space.shape[0])[None, :], space)[0]


def test_rate_conditions_enforced():
    F = GF(16)
    with pytest.raises(ValueError):
        SubsystemProductInstance(
            [quantum_rs(F, 16, 12, 12), quantum_rs(F, 16, 8, 11)],
            QdecParams(Fraction(3, 16)))


def test_dec_quantum_identity_on_clean(sub16):
    inst = sub16
    F = inst.field
    rng = stream(1, 0)
    cz = _sample_logical(inst, rng, "z")
    f1, f2 = inst.factors
    n = inst.n
    out = dec_quantum(F, f1.qx.points, f2.qz.points,
                      n - f1.qx.k, f1.qz.k, n - f2.qx.k, f2.qz.k,
                      cz.reshape(n, n), 0)
    assert np.array_equal(out.ravel(), cz)


def test_dec_quantum_confinement(sub16_explore):
    """The cleanup only changes coefficient columns j2 in [k2, k2'), so the
    difference interpolates to a polynomial supported on those columns."""
    inst = sub16_explore
    F = inst.field
    f1, f2 = inst.factors
    n = inst.n
    rng = stream(2, 3)
    cz = _sample_logical(inst, rng, "z").reshape(n, n)
    e = np.zeros((n, n), dtype=np.int64)
    e[3, 5] = 2
    word = F.add(cz, e)
    from prodcodes.decoder import alpha_decode
    res = alpha_decode(inst.z_dt, word)
    out = dec_quantum(F, f1.qx.points, f2.qz.points,
                      n - f1.qx.k, f1.qz.k, n - f2.qx.k, f2.qz.k,
                      res.word, inst.params.stripe_radius(n, f1.qz.k))
    diff = F.sub(out, res.word)
    coeffs = bivariate_coeffs(F, f1.qx.points, f2.qz.points, diff)
    k2, k2p = n - f2.qx.k, f2.qz.k
    mask = np.zeros((n, n), dtype=bool)
    mask[:, k2:k2p] = True
    assert not np.any(coeffs[~mask])


def test_subsystem_decode_zero_error(sub16):
    inst = sub16
    F = inst.field
    prod = inst.product
    for trial in range(10):
        rng = stream(11, trial)
        cz = _sample_logical(inst, rng, "z")
        cx = _sample_logical(inst, rng, "x")
        res = subsystem_decode(inst, cx, cz)
        assert not res.fallback
        assert logical_coset_equal(prod, "z", res.coset_z.representative, cz)
        assert logical_coset_equal(prod, "x", res.coset_x.representative, cx)


def test_subsystem_decode_real_errors_explore(sub16_explore):
    """Exploratory scaled configuration where the promise radius is honest:
    weight-2 errors on both sides recover the logical cosets."""
    inst = sub16_explore
    F = inst.field
    prod = inst.product
    N = prod.n
    assert inst.z_dt.d0 >= 1
    ok = 0
    for trial in range(10):
        rng = stream(12, trial)
        cz = _sample_logical(inst, rng, "z")
        cx = _sample_logical(inst, rng, "x")
        ez = np.zeros(N, dtype=np.int64)
        ez[rng.permutation(N)[:2]] = F.random(rng, 2, nonzero=True)
        ex = np.zeros(N, dtype=np.int64)
        ex[rng.permutation(N)[:2]] = F.random(rng, 2, nonzero=True)
        res = subsystem_decode(inst, F.add(cx, ex), F.add(cz, ez))
        if (logical_coset_equal(prod, "z", res.coset_z.representative, cz)
                and logical_coset_equal(prod, "x", res.coset_x.representative, cx)):
            ok += 1
    assert ok == 10


def test_swap_symmetry(sub16):
    """X-side decoding equals Z-side decoding of the swapped instance."""
    inst = sub16
    F = inst.field
    swapped = SubsystemProductInstance(
        [f.swap() for f in inst.factors], inst.params)
    rng = stream(21, 0)
    cx = _sample_logical(inst, rng, "x")
    cz = _sample_logical(inst, rng, "z")
    res = subsystem_decode(inst, cx, cz)
    res_sw = subsystem_decode(swapped, cz, cx)
    assert np.array_equal(res.coset_x.representative, res_sw.coset_z.representative)
    assert np.array_equal(res.coset_z.representative, res_sw.coset_x.representative)


def test_syndrome_to_word_and_inconsistency(sub16):
    inst = sub16
    F = inst.field
    cm = check_matrices(inst.product, "tensor")
    rng = stream(31, 0)
    e = F.random(rng, inst.product.n)
    s_x = la.matvec(F, cm.hx, e)
    s_z = la.matvec(F, cm.hz, e)
    c_x, c_z = syndrome_to_word(F, cm, s_x, s_z)
    assert np.array_equal(la.matvec(F, cm.hx, c_x), s_x)
    assert np.array_equal(la.matvec(F, cm.hz, c_z), s_z)
    # preimage differs from e by an element of the kernel
    assert la.in_row_space(F, inst.product.qx.gen, F.sub(c_x, e))
    # inconsistent syndromes are rejected as such
    bad = s_x.copy()
    par = la.left_kernel(F, cm.hx.T)
    outside = None
    for i in range(s_x.size):
        cand = s_x.copy()
        cand[i] = F.add(cand[i], np.int64(1))
        if la.solve_right(F, cm.hx, cand) is None:
            outside = cand
            break
    if outside is not None:
        with pytest.raises(InconsistentInput):
            syndrome_to_word(F, cm, outside, s_z)


def test_syndrome_word_path_agreement(sub16):
    inst = sub16
    F = inst.field
    prod = inst.product
    cm = check_matrices(prod, "tensor")
    for trial in range(100):
        rng = stream(41, trial)
        cz = _sample_logical(inst, rng, "z")
        cx = _sample_logical(inst, rng, "x")
        res_w = subsystem_decode(inst, cx, cz)
        s_x = la.matvec(F, cm.hx, cx)
        s_z = la.matvec(F, cm.hz, cz)
        res_s = syndrome_decode(inst, cm, s_x, s_z)
        assert logical_coset_equal(prod, "x", F.sub(cx, res_s.coset_x.representative),
                                   res_w.coset_x.representative)
        assert logical_coset_equal(prod, "z", F.sub(cz, res_s.coset_z.representative),
                                   res_w.coset_z.representative)


@pytest.fixture(scope="module")
def css16():
    F = GF(16)
    return CssProductInstance(
        [quantum_rs(F, 16, 12, 12), quantum_rs(F, 16, 9, 9)],
        QdecParams(Fraction(3, 16), Fraction(1, 8), gamma=20))


def test_css_decode_zero_error(css16):
    inst = css16
    F = inst.field
    code = inst.code
    assert code.dimension == (2 * 12 - 16) * (2 * 9 - 16)
    for trial in range(5):
        rng = stream(51, trial)
        cz = code.qz.codeword(F.random(rng, code.qz.k))
        cx = code.qx.codeword(F.random(rng, code.qx.k))
        res = css_decode(inst, cx, cz)
        assert logical_coset_equal(code, "z", res.coset_z.representative, cz)
        assert logical_coset_equal(code, "x", res.coset_x.representative, cx)
        # outputs are genuine code vectors, not just coset data
        assert code.qz.contains(res.coset_z.representative)
        assert code.qx.contains(res.coset_x.representative)


def test_css_kunneth_inclusions(css16):
    """Q_Z <= (Q_Z^1 x Q_Z^2) + (Q_X^1 x Q_X^2)^perp, the inclusion the
    cleanup stage relies on."""
    inst = css16
    F = inst.field
    code = inst.code
    f1, f2 = inst.factors
    big = np.concatenate([tensor(f1.qz, f2.qz).gen,
                          tensor(f1.qx, f2.qx).dual().gen], axis=0)
    assert la.row_space_contains(F, big, code.qz.gen)


# ---------------------------------------------------------------------------
# bounded search and single-shot decoding
# ---------------------------------------------------------------------------


def test_bounded_syndrome_search(gf8, rng):
    H = gf8.random(rng, (6, 12))
    e = np.zeros(12, dtype=np.int64)
    e[[2, 7]] = gf8.random(rng, 2, nonzero=True)
    t = la.matvec(gf8, H, e)
    found = bounded_syndrome_search(gf8, H, t, 2)
    assert found is not None
    assert np.array_equal(la.matvec(gf8, H, found), t)
    assert np.count_nonzero(found) <= 2
    assert bounded_syndrome_search(gf8, H, t, 0) is None
    zero = bounded_syndrome_search(gf8, H, np.zeros(6, dtype=np.int64), 2)
    assert zero is not None and not zero.any()


def test_coset_min_weight(gf4):
    space = np.array([[1, 1, 0, 0]], dtype=np.int64)
    v = np.array([1, 1, 1, 0], dtype=np.int64)
    assert coset_min_weight(gf4, space, v, cap=3) == 1


@pytest.fixture(scope="module")
def ss8():
    F = GF(8)
    inst = SubsystemProductInstance(
        [quantum_rs(F, 8, 6, 6), quantum_rs(F, 8, 4, 5)],
        QdecParams(Fraction(1, 8), Fraction(1, 8), gamma=20))
    cm = check_matrices(inst.product, "amplified")
    return inst, cm


def test_single_shot_noiseless_reduces(ss8):
    inst, cm = ss8
    F = inst.field
    prod = inst.product
    gauge = prod.qx.dual().gen
    for trial in range(10):
        rng = stream(61, trial)
        e = np.zeros(prod.n, dtype=np.int64)
        e[int(rng.integers(prod.n))] = int(F.random(rng, None, nonzero=True))
        g = la.matmul(F, F.random(rng, gauge.shape[0])[None, :], gauge)[0]
        s = la.matvec(F, cm.hz, F.add(e, g))
        res = single_shot_decode(inst, cm, s, distance=4)
        assert res.correction is not None
        diff = F.sub(res.correction.representative, e)
        assert not diff.any() or la.in_row_space(F, gauge, diff)


def test_single_shot_with_syndrome_noise(ss8):
    inst, cm = ss8
    F = inst.field
    prod = inst.product
    gauge = prod.qx.dual().gen
    ok = 0
    for trial in range(20):
        rng = stream(62, trial)
        e = np.zeros(prod.n, dtype=np.int64)
        e[int(rng.integers(prod.n))] = int(F.random(rng, None, nonzero=True))
        g = la.matmul(F, F.random(rng, gauge.shape[0])[None, :], gauge)[0]
        s = la.matvec(F, cm.hz, F.add(e, g))
        v = np.zeros(s.size, dtype=np.int64)
        v[int(rng.integers(s.size))] = int(F.random(rng, None, nonzero=True))
        noiseless = single_shot_decode(inst, cm, s, distance=4)
        noisy = single_shot_decode(inst, cm, F.add(s, v), distance=4)
        assert noisy.correction is not None and noiseless.correction is not None
        diff = F.sub(noisy.correction.representative,
                     noiseless.correction.representative)
        if not diff.any() or la.in_row_space(F, gauge, diff):
            ok += 1
    assert ok == 20


def test_single_shot_two_round_stability(ss8):
    inst, cm = ss8
    F = inst.field
    prod = inst.product
    gauge = prod.qx.dual().gen
    for trial in range(10):
        rng = stream(63, trial)
        e = np.zeros(prod.n, dtype=np.int64)
        e[int(rng.integers(prod.n))] = int(F.random(rng, None, nonzero=True))
        g1 = la.matmul(F, F.random(rng, gauge.shape[0])[None, :], gauge)[0]
        v1 = np.zeros(cm.hz.shape[0], dtype=np.int64)
        v1[int(rng.integers(cm.hz.shape[0]))] = int(F.random(rng, None, nonzero=True))
        r1 = single_shot_decode(inst, cm, F.add(la.matvec(F, cm.hz, F.add(e, g1)), v1),
                                distance=4)
        assert r1.correction is not None
        resid = F.sub(e, r1.correction.representative)
        g2 = la.matmul(F, F.random(rng, gauge.shape[0])[None, :], gauge)[0]
        v2 = np.zeros(cm.hz.shape[0], dtype=np.int64)
        v2[int(rng.integers(cm.hz.shape[0]))] = int(F.random(rng, None, nonzero=True))
        r2 = single_shot_decode(inst, cm, F.add(la.matvec(F, cm.hz, F.add(resid, g2)), v2),
                                distance=4)
        assert r2.correction is not None
        total = F.add(r1.correction.representative, r2.correction.representative)
        diff = F.sub(total, e)
        assert not diff.any() or la.in_row_space(F, gauge, diff)


def test_single_shot_requires_amplified(ss8):
    inst, _ = ss8
    cm_plain = check_matrices(inst.product, "tensor")
    with pytest.raises(ValueError):
        single_shot_decode(inst, cm_plain, np.zeros(cm_plain.hz.shape[0],
                                                    dtype=np.int64), distance=4)


def test_instance_json_roundtrip(sub16):
    doc = sub16.to_json()
    inst2 = SubsystemProductInstance.from_json(doc)
    assert inst2.n == sub16.n and inst2.params.delta == sub16.params.delta


def test_single_shot_coset_soundness(ss8):
    """The returned representative reproduces the denoised syndrome exactly,
    modulo gauge syndromes: s' - H_Z e-hat lies in im(H_Z restricted to the
    gauge space)."""
    inst, cm = ss8
    F = inst.field
    prod = inst.product
    gauge = prod.qx.dual().gen
    gauge_syndromes = la.matmul(F, gauge, cm.hz.T)
    for trial in range(5):
        rng = stream(71, trial)
        e = np.zeros(prod.n, dtype=np.int64)
        e[int(rng.integers(prod.n))] = int(F.random(rng, None, nonzero=True))
        g = la.matmul(F, F.random(rng, gauge.shape[0])[None, :], gauge)[0]
        v = np.zeros(cm.hz.shape[0], dtype=np.int64)
        v[int(rng.integers(cm.hz.shape[0]))] = int(F.random(rng, None, nonzero=True))
        s = F.add(la.matvec(F, cm.hz, F.add(e, g)), v)
        res = single_shot_decode(inst, cm, s, distance=4)
        assert res.correction is not None and res.syndrome_consistent
        leftover = F.sub(res.denoised_syndrome,
                         la.matvec(F, cm.hz, res.correction.representative))
        assert la.in_row_space(F, gauge_syndromes, leftover) or not leftover.any()
