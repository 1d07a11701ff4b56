"""Exact arithmetic in GF(p^e) with vectorized numpy element operations.

Elements are encoded as integers in [0, q): the coefficient vector
(c_0, ..., c_{e-1}) of the residue class modulo the field modulus is packed
in mixed radix as sum(c_i * p^i).  All bulk operations act on numpy int64
arrays of such codes.

Fields with q = p^e <= 2^20 are supported; multiplication goes through
discrete log/antilog tables built from a primitive modulus, so the canonical
modulus for each (p, e) is the first *primitive* monic polynomial in a fixed
enumeration order (for e = 1 this is X - g with g the smallest primitive
root mod p).  The canonical ordering of field elements is 0, 1, g, g^2, ...
for the generator g = X mod modulus.
"""

from __future__ import annotations

import functools
from typing import Iterable, Sequence

import numpy as np

MAX_ORDER = 1 << 20


# ---------------------------------------------------------------------------
# polynomial helpers over GF(p), coefficients as python tuples (low to high)
# ---------------------------------------------------------------------------

def _ptrim(a: Sequence[int]) -> tuple[int, ...]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def _pmulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _prem(out, mod, p)


def _prem(a, mod, p):
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    while len(a) - 1 >= dm and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - 1 - dm
        factor = (a[-1] * inv_lead) % p
        for i, mi in enumerate(mod):
            a[shift + i] = (a[shift + i] - factor * mi) % p
        while a and a[-1] == 0:
            a.pop()
    return _ptrim(a)


def _ppowmod(a, n, mod, p):
    result = (1,)
    base = _prem(a, mod, p)
    while n:
        if n & 1:
            result = _pmulmod(result, base, mod, p)
        base = _pmulmod(base, base, mod, p)
        n >>= 1
    return result


def _pgcd(a, b, p):
    a, b = _ptrim(a), _ptrim(b)
    while b:
        a, b = b, _prem(a, b, p)
    return a


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Rabin irreducibility test for a monic polynomial over GF(p)."""
    f = _ptrim(coeffs)
    e = len(f) - 1
    if e < 1:
        return False
    if e == 1:
        return True
    x = (0, 1)
    # x^(p^e) == x mod f
    t = x
    for _ in range(e):
        t = _ppowmod(t, p, f, p)
    if t != x:
        return False
    for ell in _prime_factors(e):
        t = x
        for _ in range(e // ell):
            t = _ppowmod(t, p, f, p)
        diff = list(t) + [0] * (2 - len(t))
        diff[1] = (diff[1] - 1) % p
        g = _pgcd(diff, f, p)
        if len(g) - 1 != 0:
            return False
    return True


def _x_is_primitive(f, p, q) -> bool:
    if q == 2:
        return True
    for ell in _prime_factors(q - 1):
        t = _ppowmod((0, 1), (q - 1) // ell, f, p)
        if t == (1,):
            return False
    return True


@functools.lru_cache(maxsize=None)
def canonical_modulus(p: int, e: int) -> tuple[int, ...]:
    """First primitive monic degree-e polynomial over GF(p), in a fixed
    enumeration of the non-leading coefficient vector (mixed-radix order)."""
    q = p ** e
    for code in range(q):
        coeffs = []
        c = code
        for _ in range(e):
            coeffs.append(c % p)
            c //= p
        f = tuple(coeffs) + (1,)
        if f[0] == 0:
            continue  # divisible by X
        if not is_irreducible(f, p):
            continue
        if _x_is_primitive(f, p, q):
            return f
    raise RuntimeError(f"no primitive polynomial found for GF({p}^{e})")


# ---------------------------------------------------------------------------
# the field itself
# ---------------------------------------------------------------------------

_FIELD_CACHE: dict[tuple, "Field"] = {}


class Field:
    """The finite field GF(p^e), with vectorized arithmetic on element codes."""

    def __init__(self, p: int, e: int, modulus: tuple[int, ...] | None = None):
        if not _is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if e < 1:
            raise ValueError("extension degree must be >= 1")
        q = p ** e
        if q > MAX_ORDER:
            raise ValueError(f"field order {q} exceeds supported bound 2^20")
        if modulus is None:
            modulus = canonical_modulus(p, e)
        else:
            modulus = _ptrim(modulus)
            if len(modulus) - 1 != e or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree e")
            if not all(0 <= c < p for c in modulus):
                raise ValueError("modulus coefficients must lie in [0, p)")
            if not is_irreducible(modulus, p):
                raise ValueError("modulus is reducible over GF(p)")
        self.p = p
        self.e = e
        self.q = q
        self.modulus = tuple(modulus)
        self._powers = np.array([p ** i for i in range(e)], dtype=np.int64)
        if p == 2:
            self._modmask = sum(c << i for i, c in enumerate(modulus))
        self._build_tables()

    # construction ---------------------------------------------------------

    @staticmethod
    def of_order(q: int) -> "Field":
        """GF(q) with the canonical modulus; q any prime power <= 2^20."""
        n, p = q, None
        for d in range(2, q + 1):
            if n % d == 0:
                p = d
                break
        if p is None:
            raise ValueError("q must be >= 2")
        e = 0
        while n > 1:
            if n % p:
                raise ValueError(f"{q} is not a prime power")
            n //= p
            e += 1
        return Field.get(p, e)

    @staticmethod
    def get(p: int, e: int = 1, modulus: Sequence[int] | None = None) -> "Field":
        key = (p, e, tuple(modulus) if modulus is not None else None)
        if key not in _FIELD_CACHE:
            _FIELD_CACHE[key] = Field(p, e, tuple(modulus) if modulus else None)
        return _FIELD_CACHE[key]

    def _mul_raw(self, a: int, b: int) -> int:
        """Table-free multiply of two element codes (used to build tables)."""
        p, e = self.p, self.e
        if p == 2:
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
                if a >> e & 1:
                    a ^= self._modmask
            return r
        da = [(a // p ** i) % p for i in range(e)]
        db = [(b // p ** i) % p for i in range(e)]
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        red = _prem(prod, self.modulus, p)
        return sum(c * p ** i for i, c in enumerate(red))

    def _find_generator(self) -> int:
        # canonical modulus is primitive, so X (code p) generates; for a
        # user-supplied modulus search the smallest generating code instead
        q = self.q
        if q == 2:
            return 1
        factors = _prime_factors(q - 1)
        for cand in range(2, q):
            if self.e == 1 and cand == 0:
                continue
            ok = True
            for ell in factors:
                t, n = 1, (q - 1) // ell
                b = cand
                while n:
                    if n & 1:
                        t = self._mul_raw(t, b)
                    b = self._mul_raw(b, b)
                    n >>= 1
                if t == 1:
                    ok = False
                    break
            if ok:
                return cand
        raise RuntimeError("no multiplicative generator found")

    def _build_tables(self) -> None:
        p, e, q = self.p, self.e, self.q
        if e == 1:
            self._gen = min_primitive_root(p)
        else:
            # X is a generator when the modulus is primitive
            self._gen = p if _x_is_primitive(self.modulus, p, q) else None
            if self._gen is None:
                self._gen = self._find_generator()
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        v = 1
        for i in range(q - 1):
            exp[i] = v
            log[v] = i
            v = self._mul_raw(v, self._gen)
        exp[q - 1:] = exp[: q - 1]
        self._exp = exp
        self._log = log
        if p != 2 and e > 1 and q <= 1 << 12:
            codes = np.arange(q, dtype=np.int64)
            dig = (codes[:, None] // self._powers[None, :]) % p
            s = (dig[:, None, :] + dig[None, :, :]) % p
            self._add_table = (s * self._powers[None, None, :]).sum(axis=2)
        else:
            self._add_table = None

    # scalar conveniences ----------------------------------------------------

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.e})" if self.e > 1 else f"GF({self.p})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, Field)
                and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus))

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    @property
    def generator(self) -> int:
        return self._gen

    def element(self, code: int) -> "FieldElement":
        return FieldElement(self, int(code))

    def from_coeffs(self, coeffs: Iterable[int]) -> "FieldElement":
        code = sum((c % self.p) * self.p ** i for i, c in enumerate(coeffs))
        return FieldElement(self, code)

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def element_order(self) -> np.ndarray:
        """Canonical point ordering 0, 1, g, g^2, ... (length q)."""
        return np.concatenate(([0], self._exp[: self.q - 1]))

    # vectorized arithmetic on int64 code arrays -----------------------------

    def _digits(self, a: np.ndarray) -> np.ndarray:
        return (np.asarray(a, dtype=np.int64)[..., None] // self._powers) % self.p

    def _undigits(self, d: np.ndarray) -> np.ndarray:
        return (d * self._powers).sum(axis=-1)

    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.e == 1:
            return (a + b) % self.p
        if self._add_table is not None:
            return self._add_table[a, b]
        return self._undigits((self._digits(a) + self._digits(b)) % self.p)

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a.copy()
        if self.e == 1:
            return (-a) % self.p
        return self._undigits((-self._digits(a)) % self.p)

    def sub(self, a, b):
        if self.p == 2:
            return np.asarray(a, dtype=np.int64) ^ np.asarray(b, dtype=np.int64)
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a * b) % self.p
        la, lb = self._log[a], self._log[b]
        out = self._exp[np.maximum(la, 0) + np.maximum(lb, 0)]
        zero = (la < 0) | (lb < 0)
        return np.where(zero, 0, out)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, k):
        """Elementwise a**k for integer k >= 0 (0**0 == 1)."""
        a = np.asarray(a, dtype=np.int64)
        k = np.asarray(k, dtype=np.int64)
        if np.any(k < 0):
            raise ValueError("negative exponent")
        la = self._log[a]
        idx = (np.maximum(la, 0) * (k % (self.q - 1) if self.q > 2 else 0)) % max(self.q - 1, 1)
        out = self._exp[idx]
        out = np.where((la < 0) & (k > 0), 0, out)
        out = np.where(k == 0, 1, out)
        return out

    def frobenius(self, a):
        return self.power(a, self.p)

    def trace(self, a):
        """Trace to the prime subfield; result codes lie in [0, p)."""
        acc = np.asarray(a, dtype=np.int64)
        t = acc
        for _ in range(self.e - 1):
            t = self.frobenius(t)
            acc = self.add(acc, t)
        return acc

    def random(self, rng: np.random.Generator, shape=None, nonzero: bool = False):
        lo = 1 if nonzero else 0
        return rng.integers(lo, self.q, size=shape, dtype=np.int64)


def min_primitive_root(p: int) -> int:
    if p == 2:
        return 1
    factors = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // ell, p) != 1 for ell in factors):
            return g
    raise RuntimeError("no primitive root")


class FieldElement:
    """Scalar element of a Field, wrapping an integer code."""

    __slots__ = ("field", "code")

    def __init__(self, field: Field, code: int):
        if not 0 <= code < field.q:
            raise ValueError(f"code {code} out of range for {field}")
        self.field = field
        self.code = int(code)

    @property
    def coeffs(self) -> tuple[int, ...]:
        p = self.field.p
        return tuple((self.code // p ** i) % p for i in range(self.field.e))

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements from different fields")
            return other
        return FieldElement(self.field, int(other) % self.field.q)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, int(self.field.add(self.code, o.code)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, int(self.field.sub(self.code, o.code)))

    def __neg__(self):
        return FieldElement(self.field, int(self.field.neg(self.code)))

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, int(self.field.mul(self.code, o.code)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, int(self.field.div(self.code, o.code)))

    def __pow__(self, k: int):
        return FieldElement(self.field, int(self.field.power(self.code, k)))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, int):
            return self.code == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.code))

    def __bool__(self):
        return self.code != 0

    def trace(self) -> "FieldElement":
        return FieldElement(self.field, int(self.field.trace(self.code)))

    def __repr__(self):
        return f"{self.field}:{self.code}"


def GF(q: int) -> Field:
    """Shorthand for the canonical field of order q."""
    return Field.of_order(q)
