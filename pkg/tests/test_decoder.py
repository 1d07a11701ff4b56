"""Dual-tensor decoder: Berlekamp-Welch baseline, the three subroutines on
planted instances, the total alpha-decoder contract, and determinism."""

from fractions import Fraction

import numpy as np
import pytest

from prodcodes.gf import GF
from prodcodes import linalg as la
from prodcodes.codes import rs_code
from prodcodes.decoder import (AlphaResult, DualTensorInstance, alpha_decode,
                               berlekamp_welch, dec_close, dec_finish,
                               dec_init, random_codeword, random_error)
from prodcodes.rng import stream


# ---------------------------------------------------------------------------
# Berlekamp-Welch
# ---------------------------------------------------------------------------


def test_bw_zero_errors_identity(gf8, rng):
    C = rs_code(gf8, 8, 3)
    cw = C.codeword(gf8.random(rng, 3))
    got = berlekamp_welch(gf8, C.points, 3, cw, 2)
    assert got is not None and np.array_equal(got, cw)


def test_bw_against_exhaustive_nearest():
    F = GF(7)
    C = rs_code(F, 7, 3)
    allcw = np.concatenate([w for _, w in la.enumerate_span(F, C.gen)], axis=0)
    rng = np.random.default_rng(1)
    for _ in range(50):
        cw = C.codeword(F.random(rng, 3))
        w = int(rng.integers(0, 3))
        e = np.zeros(7, dtype=np.int64)
        if w:
            e[rng.permutation(7)[:w]] = F.random(rng, w, nonzero=True)
        word = F.add(cw, e)
        got = berlekamp_welch(F, C.points, 3, word, 2)
        dists = np.count_nonzero(F.sub(allcw, word[None, :]), axis=1)
        assert got is not None
        assert np.count_nonzero(F.sub(got, word)) == int(dists.min())
        assert np.array_equal(got, cw)


def test_bw_failure_beyond_radius(gf8, rng):
    C = rs_code(gf8, 8, 3)
    cw = C.codeword(gf8.random(rng, 3))
    e = np.zeros(8, dtype=np.int64)
    e[:4] = gf8.random(rng, 4, nonzero=True)
    got = berlekamp_welch(gf8, C.points, 3, gf8.add(cw, e), 1)
    # never a wrong-radius claim: either failure or a codeword within radius
    if got is not None:
        assert np.count_nonzero(gf8.sub(got, gf8.add(cw, e))) <= 1


# ---------------------------------------------------------------------------
# instance bookkeeping
# ---------------------------------------------------------------------------


def test_instance_constants_reference_gamma():
    F = GF(64)
    inst = DualTensorInstance.build(F, 64, 8, 16, Fraction(1, 2),
                                    Fraction(1, 8), gamma=1000)
    # at the reference scale the classic constants appear
    assert inst.alpha == (1000 / (Fraction(1, 8) * Fraction(1, 2))) ** 2
    assert inst.stage1_bound == Fraction(1, 8) * Fraction(1, 2) * 64 ** 2 / 50
    assert inst.stripe_bound == Fraction(1, 2) * 64 / 25
    assert inst.s == 1 and inst.d0 < 1


def test_instance_rate_validation():
    F = GF(64)
    with pytest.raises(ValueError):
        DualTensorInstance.build(F, 64, 20, 16, Fraction(1, 2))


def test_instance_json_roundtrip():
    F = GF(32)
    inst = DualTensorInstance.build(F, 32, 4, 8, Fraction(1, 2), Fraction(1, 8), 2)
    doc = inst.to_json()
    inst2 = DualTensorInstance.from_json(doc)
    assert inst2.n == 32 and inst2.s == inst.s and inst2.d0 == inst.d0
    assert np.array_equal(inst2.E1, inst.E1)


# ---------------------------------------------------------------------------
# planted pipeline, n = 32 (scaled constants gamma = 2: s = 1, d0 = 1)
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def inst32():
    return DualTensorInstance.build(GF(32), 32, 4, 8, Fraction(1, 2),
                                    Fraction(1, 8), gamma=2)


def test_planted_trials_n32(inst32):
    F = inst32.field
    for trial in range(8):
        rng = stream(32, trial)
        a = random_codeword(inst32, rng)
        b = random_error(F, 32, int(inst32.d0), rng)
        res = alpha_decode(inst32, F.add(a, b))
        assert not res.fallback
        assert inst32.member(res.word)
        assert res.residual <= inst32.alpha * np.count_nonzero(b)
        assert res.stages["stage1_residual"] <= inst32.stage1_bound
        assert res.stages["stage3_weight"] <= 8 * np.count_nonzero(b) / inst32.eps
        assert res.stages["peel_iterations"] <= 32 * 32


def test_membership_path(inst32, rng):
    a = random_codeword(inst32, rng)
    res = alpha_decode(inst32, a)
    assert not res.fallback and res.residual == 0
    assert np.array_equal(res.word, a)
    assert res.stages["path"] == "membership"


def test_fallback_only_off_promise(inst32, rng):
    # far outside the promise: a random word; the decoder must still output a
    # codeword, flagging FALLBACK only if the pipeline gave up
    w = inst32.field.random(rng, (32, 32))
    res = alpha_decode(inst32, w)
    assert inst32.member(res.word)


def test_determinism(inst32):
    F = inst32.field
    rng1 = stream(9, 0)
    a = random_codeword(inst32, rng1)
    b = random_error(F, 32, 1, rng1)
    c = F.add(a, b)
    r1 = alpha_decode(inst32, c)
    r2 = alpha_decode(inst32, c)
    assert np.array_equal(r1.word, r2.word)
    assert r1.stages == r2.stages


def test_stagewise_contracts_n32(inst32):
    F = inst32.field
    rng = stream(77, 1)
    a = random_codeword(inst32, rng)
    b = random_error(F, 32, 1, rng)
    c = F.add(a, b)
    cp = dec_init(inst32, c)
    assert inst32.member_enlarged(cp)
    assert np.count_nonzero(F.sub(cp, c)) <= inst32.stage1_bound
    cpp = dec_close(inst32, cp)
    assert inst32.member(cpp)
    y = F.sub(cpp, c)
    yp, iters = dec_finish(inst32, y)
    assert iters <= 32 * 32
    # y' stays in y + C1 [+] C2
    assert inst32.member(F.sub(yp, y))
    assert np.count_nonzero(yp) <= 8 * np.count_nonzero(b) / inst32.eps


def test_dec_init_already_codeword(inst32, rng):
    a = random_codeword(inst32, rng)
    cp = dec_init(inst32, a)
    # e0 = 1 is admissible, so the stage must agree with a everywhere it kept
    assert inst32.member_enlarged(cp)
    assert np.count_nonzero(inst32.field.sub(cp, a)) <= inst32.stage1_bound


def test_dec_finish_trivial_cases(inst32):
    F = inst32.field
    z = np.zeros((32, 32), dtype=np.int64)
    out, iters = dec_finish(inst32, z)
    assert not out.any() and iters == 0
    # a pure column codeword peels away completely in one pass
    c1 = inst32.C1.codeword(F.random(stream(5, 5), inst32.k1))
    y = np.zeros((32, 32), dtype=np.int64)
    y[:, 7] = c1
    out, iters = dec_finish(inst32, y)
    assert not out.any()
    assert iters == 1


# ---------------------------------------------------------------------------
# n = 64 planted suite and the structured rational-function error
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def inst64():
    return DualTensorInstance.build(GF(64), 64, 8, 16, Fraction(1, 2),
                                    Fraction(1, 8), gamma=2)


def test_planted_trials_n64(inst64):
    F = inst64.field
    assert inst64.s == 2 and inst64.d0 == 4
    for trial in range(2):
        rng = stream(64, trial)
        a = random_codeword(inst64, rng)
        b = random_error(F, 64, 4, rng)
        res = alpha_decode(inst64, F.add(a, b))
        assert not res.fallback and inst64.member(res.word)
        assert res.residual <= 8 * 4 / inst64.eps


def test_rational_function_error_stage1():
    """A reciprocal-pattern error confined to one column is absorbed by the
    error-locator stage: e0 = X1 clears it, so c' matches the clean codeword
    on all but a vanishing fraction of cells."""
    F = GF(64)
    inst = DualTensorInstance.build(F, 64, 8, 16, Fraction(1, 2),
                                    Fraction(1, 8), gamma=4)
    rng = stream(123, 0)
    a = random_codeword(inst, rng)
    b = np.zeros((64, 64), dtype=np.int64)
    nz = np.nonzero(inst.E1)[0]
    b[nz, 5] = F.inv(inst.E1[nz])
    c = F.add(a, b)
    cp = dec_init(inst, c)
    diff = int(np.count_nonzero(F.sub(cp, c)))
    assert diff <= inst.stage1_bound
    agree_a = int(np.count_nonzero(F.sub(cp, a) == 0))
    assert agree_a >= 64 * 64 - float(inst.stage1_bound) - 64
