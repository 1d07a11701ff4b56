"""Field arithmetic: axioms, trace/Frobenius behavior, canonical moduli."""

import numpy as np
import pytest

from prodcodes.gf import GF, Field, FieldElement, canonical_modulus, is_irreducible

PRIME_POWERS_64 = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29,
                   31, 32, 37, 41, 43, 47, 49, 53, 59, 61, 64]


def test_canonical_modulus_gf4_is_standard():
    assert canonical_modulus(2, 2) == (1, 1, 1)  # X^2 + X + 1


def test_trace_gf4_values(gf4):
    # direct Frobenius-conjugate oracle: tr(x) = x + x^2
    xs = gf4.elements()
    direct = gf4.add(xs, gf4.mul(xs, xs))
    assert np.array_equal(gf4.trace(xs), direct)
    assert gf4.trace(np.int64(0)) == 0
    assert gf4.trace(np.int64(1)) == 0  # 1 + 1 in characteristic 2
    assert gf4.trace(np.int64(gf4.generator)) == 1


@pytest.mark.parametrize("q", PRIME_POWERS_64)
def test_field_axioms(q):
    F = GF(q)
    xs = F.elements()
    nz = xs[1:]
    assert np.all(F.mul(nz, F.inv(nz)) == 1)
    assert np.all(F.sub(xs, xs) == 0)
    rng = np.random.default_rng(q)
    a, b, c = (F.random(rng, 64) for _ in range(3))
    assert np.all(F.add(a, b) == F.add(b, a))
    assert np.all(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)))
    assert np.all(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)))


@pytest.mark.parametrize("q", PRIME_POWERS_64)
def test_trace_properties(q):
    F = GF(q)
    xs = F.elements()
    tr = F.trace(xs)
    # lands in the prime subfield and is onto it
    assert np.all(tr < F.p)
    assert set(int(t) for t in np.unique(tr)) == set(range(F.p))
    # additive, Frobenius-invariant
    pairs = np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1).reshape(-1, 2)
    a, b = pairs[:, 0], pairs[:, 1]
    assert np.all(F.trace(F.add(a, b)) == F.add(F.trace(a), F.trace(b)))
    assert np.all(F.trace(F.frobenius(xs)) == tr)


def test_power_edge_cases(gf8):
    xs = gf8.elements()
    assert np.all(gf8.power(xs, 0) == 1)        # includes 0^0 = 1
    assert np.all(gf8.power(xs, 1) == xs)
    assert gf8.power(np.int64(0), 5) == 0
    assert np.all(gf8.power(xs, gf8.q - 1)[1:] == 1)


def test_element_order_is_a_permutation():
    for q in (7, 9, 16):
        F = GF(q)
        order = F.element_order()
        assert order[0] == 0 and order[1] == 1
        assert sorted(int(x) for x in order) == list(range(q))


def test_field_element_wrapper(gf4):
    w = gf4.element(gf4.generator)
    assert (w * w + w).code == 1  # w^2 + w = 1 for X^2 + X + 1
    assert (w / w).code == 1
    assert (-w).code == w.code  # characteristic 2
    assert w.coeffs == (0, 1)
    assert w.trace() == gf4.element(1)
    with pytest.raises(ZeroDivisionError):
        _ = w / gf4.element(0)


def test_user_supplied_modulus_checked():
    with pytest.raises(ValueError):
        Field.get(2, 2, (1, 0, 1))  # X^2 + 1 = (X+1)^2 is reducible
    other = Field.get(2, 3, (1, 1, 0, 1))  # X^3 + X + 1 irreducible
    assert other.q == 8
    assert is_irreducible((1, 1, 0, 1), 2)


def test_odd_extension_field_digits():
    F = GF(9)
    x = F.from_coeffs((2, 1))  # 2 + t
    y = F.from_coeffs((1, 2))
    s = x + y
    assert s.coeffs == (0, 0)  # digitwise mod 3
    assert (x - x).code == 0


def test_field_order_validation():
    with pytest.raises(ValueError):
        GF(6)
    with pytest.raises(ValueError):
        GF(1)
    with pytest.raises(ValueError):
        Field.get(4, 1)
