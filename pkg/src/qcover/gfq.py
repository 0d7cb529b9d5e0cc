"""Exact arithmetic in GF(q), q = p^e, and in extension fields GF(q^m).

Elements are integer codes.  The base-``b`` digits of a code (least
significant first) are the polynomial coefficients of the element, where
``b`` is the order of the coefficient field (``p`` for GF(p^e), ``q`` for
GF(q^m)).
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import FieldError

TABLE_LIMIT = 1 << 12  # log/exp tables up to this order
NUMPY_TABLE_LIMIT = 256  # dense q x q tables for vectorised arithmetic


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def to_digits(x: int, base: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        x, d = divmod(x, base)
        out.append(d)
    return tuple(out)


def from_digits(digits, base: int) -> int:
    x = 0
    for d in reversed(tuple(digits)):
        x = x * base + int(d)
    return x


# -- polynomials over a coefficient field --------------------------------
# Polynomials are coefficient lists, lowest degree first.  ``cf`` is any
# object with add/sub/mul/inv on integer codes.


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, cf) -> list[int]:
    a = _trim(list(a))
    m = _trim(list(m))
    inv_lead = cf.inv(m[-1])
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = cf.mul(a[-1], inv_lead)
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = cf.sub(a[shift + i], cf.mul(c, mi))
        _trim(a)
    return a


def _poly_mulmod(a, b, m, cf) -> list[int]:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj:
                out[i + j] = cf.add(out[i + j], cf.mul(ai, bj))
    return _poly_mod(out, m, cf)


def _monic_polys(cf, degree: int):
    """Monic polynomials of the given degree, ordered by the code of their
    lower coefficients."""
    for code in range(cf.q**degree):
        yield list(to_digits(code, cf.q, degree)) + [1]


def is_irreducible(poly, cf) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _trim(list(poly))
    d = len(poly) - 1
    if d < 1:
        return False
    for dg in range(1, d // 2 + 1):
        for g in _monic_polys(cf, dg):
            if not _poly_mod(poly, g, cf):
                return False
    return True


class _Field:
    """Shared machinery for :class:`FieldSpec` and :class:`ExtFieldSpec`."""

    q: int
    p: int
    _coeff: "_Field | None"
    _degree: int
    modulus: tuple[int, ...]

    def _setup(self) -> None:
        q = self.q
        if self._coeff is None:
            self._exp = self._log = None
            return
        if q > TABLE_LIMIT:
            self._exp = self._log = None
            return
        cf = self._coeff
        one = [1]
        gen = None
        for cand in range(2, q) if q > 2 else [1]:
            poly = list(to_digits(cand, cf.q, self._degree))
            exp = [1]
            cur = one
            for _ in range(q - 2):
                cur = _poly_mulmod(cur, poly, self.modulus, cf)
                code = from_digits(cur, cf.q)
                if code == 1:
                    break
                exp.append(code)
            if len(exp) == q - 1:
                gen = cand
                break
        if gen is None:
            raise FieldError("no primitive element found; modulus reducible?")
        self._exp = exp + exp
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        self._log = log
        self.primitive_element = gen

    # scalar operations ---------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self._coeff is None:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        cf = self._coeff
        out, base, mult = 0, cf.q, 1
        while a or b:
            a, da = divmod(a, base)
            b, db = divmod(b, base)
            out += cf.add(da, db) * mult
            mult *= base
        return out

    def neg(self, a: int) -> int:
        if self._coeff is None:
            return (-a) % self.p
        if self.p == 2:
            return a
        cf = self._coeff
        out, base, mult = 0, cf.q, 1
        while a:
            a, da = divmod(a, base)
            out += cf.neg(da) * mult
            mult *= base
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self._coeff is None:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return self._exp[self._log[a] + self._log[b]]
        cf = self._coeff
        pa = list(to_digits(a, cf.q, self._degree))
        pb = list(to_digits(b, cf.q, self._degree))
        return from_digits(_poly_mulmod(pa, pb, self.modulus, cf), cf.q)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        if self._coeff is None:
            return pow(a, self.p - 2, self.p)
        if self._log is not None:
            return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            return self.pow(self.inv(a), -k)
        if a == 0:
            return 0 if k else 1
        if self._log is not None:
            return self._exp[(self._log[a] * k) % (self.q - 1)]
        out, base = 1, a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        n = self.q - 1
        k = n
        for f in _prime_factors(n):
            while k % f == 0 and self.pow(a, k // f) == 1:
                k //= f
        return k

    def elements(self) -> range:
        return range(self.q)


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _least_modulus(cf, degree: int, primitive: bool) -> tuple[int, ...]:
    n = cf.q**degree - 1
    for poly in _monic_polys(cf, degree):
        if poly[0] == 0 and degree > 1:
            continue
        if not is_irreducible(poly, cf):
            continue
        if primitive and not _x_is_primitive(poly, cf, n):
            continue
        return tuple(poly)
    raise FieldError(f"no {'primitive' if primitive else 'irreducible'} polynomial of degree {degree}")


def _x_is_primitive(poly, cf, n: int) -> bool:
    def xpow(k):
        out, base = [1], [0, 1]
        while k:
            if k & 1:
                out = _poly_mulmod(out, base, poly, cf)
            base = _poly_mulmod(base, base, poly, cf)
            k >>= 1
        return out

    if len(poly) == 2:  # degree 1: x = -c0
        root = cf.neg(poly[0])
        return root != 0 and cf.order(root) == n
    if xpow(n) != [1]:
        return False
    return all(xpow(n // f) != [1] for f in _prime_factors(n))


class FieldSpec(_Field):
    """GF(p^e) with a fixed monic irreducible modulus over GF(p).

    Instances are immutable and compared by ``(p, e, modulus)``.
    """

    def __init__(self, p: int, e: int = 1, modulus=None):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if e < 1:
            raise FieldError(f"extension degree {e} < 1")
        self.p, self.e, self.q = p, e, p**e
        self._degree = e
        if e == 1:
            self._coeff = None
            self.modulus = (0, 1) if modulus is None else tuple(modulus)
        else:
            self._coeff = field_make(p, 1)
            if modulus is None:
                modulus = _least_modulus(self._coeff, e, primitive=False)
            modulus = tuple(int(c) for c in modulus)
            if len(modulus) != e + 1 or modulus[-1] != 1:
                raise FieldError("modulus must be monic of degree e")
            if not is_irreducible(modulus, self._coeff):
                raise FieldError(f"modulus {modulus} is reducible over GF({p})")
            self.modulus = modulus
        self._setup()
        self._np_tables()

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldSpec) and (self.p, self.e, self.modulus) == (
            other.p,
            other.e,
            other.modulus,
        )

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def __reduce__(self):
        return (FieldSpec, (self.p, self.e, self.modulus))

    @property
    def is_prime_field(self) -> bool:
        return self.e == 1

    @property
    def dtype(self):
        return np.uint8 if self.q <= 256 else np.uint16

    # vectorised arithmetic ------------------------------------------------
    def _np_tables(self) -> None:
        q = self.q
        self.np_inv = np.array([0] + [self.inv(a) for a in range(1, q)], dtype=np.int64)
        self.np_neg = np.array([self.neg(a) for a in range(q)], dtype=np.int64)
        if self.is_prime_field or q > NUMPY_TABLE_LIMIT:
            self.np_add_tab = self.np_mul_tab = None
            return
        self.np_add_tab = np.array([[self.add(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)
        self.np_mul_tab = np.array([[self.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)

    def _check_vectorised(self) -> None:
        if not self.is_prime_field and self.np_add_tab is None:
            raise FieldError(f"vectorised arithmetic unsupported for q={self.q}")

    def vadd(self, a, b):
        if self.is_prime_field:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        self._check_vectorised()
        return self.np_add_tab[a, b]

    def vsub(self, a, b):
        if self.is_prime_field:
            return (np.asarray(a, dtype=np.int64) - b) % self.p
        return self.vadd(a, self.np_neg[b])

    def vmul(self, a, b):
        if self.is_prime_field:
            return (np.asarray(a, dtype=np.int64) * b) % self.p
        self._check_vectorised()
        return self.np_mul_tab[a, b]

    def matmul(self, a, b):
        """Batched matrix product over GF(q) with numpy broadcasting rules."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.is_prime_field:
            return np.matmul(a, b) % self.p
        self._check_vectorised()
        inner = a.shape[-1]
        acc = None
        for t in range(inner):
            term = self.np_mul_tab[a[..., :, t, None], b[..., None, t, :]]
            acc = term if acc is None else self.vadd(acc, term)
        return acc


class ExtFieldSpec(_Field):
    """GF(q^m) built as GF(q)[y]/(f) with the polynomial basis 1, y, ..., y^{m-1}."""

    def __init__(self, base: FieldSpec, m: int, modulus=None, primitive: bool = False):
        if m < 1:
            raise FieldError("extension degree must be >= 1")
        self.base, self.m = base, m
        self.p, self.q = base.p, base.q**m
        self._coeff = base
        self._degree = m
        if modulus is None:
            modulus = _least_modulus(base, m, primitive=primitive)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree m")
        if not is_irreducible(modulus, base):
            raise FieldError(f"modulus {modulus} is reducible over {base}")
        self.modulus = modulus
        if m == 1:
            # GF(q) over itself: fall back to the base tables.
            self._exp = self._log = None
            self.mul = base.mul  # type: ignore[method-assign]
            self.inv = base.inv  # type: ignore[method-assign]
        else:
            self._setup()

    def __repr__(self) -> str:
        return f"GF({self.base.q}^{self.m})"

    @property
    def basis(self) -> list[int]:
        """Codes of 1, y, ..., y^{m-1}."""
        return [self.base.q**i for i in range(self.m)]

    def expand(self, x: int) -> tuple[int, ...]:
        """Coordinates of ``x`` in the polynomial basis, as GF(q) codes."""
        return to_digits(x, self.base.q, self.m)

    def compress(self, vec) -> int:
        return from_digits(vec, self.base.q)

    def frobenius(self, x: int, times: int = 1) -> int:
        return self.pow(x, self.base.q**times)

    def mul_matrix(self, a: int) -> np.ndarray:
        """Matrix of ``x -> a*x`` acting on column coordinate vectors."""
        cols = [self.expand(self.mul(a, b)) for b in self.basis]
        return np.array(cols, dtype=np.int64).T


@lru_cache(maxsize=None)
def field_make(p: int, e: int = 1) -> FieldSpec:
    """GF(p^e) with the least monic irreducible modulus.

    Candidates are ordered by the integer whose base-p digits are the
    lower coefficients (constant term least significant).
    """
    return FieldSpec(p, e)


@lru_cache(maxsize=None)
def ext_field(base: FieldSpec, m: int, primitive: bool = False) -> ExtFieldSpec:
    return ExtFieldSpec(base, m, primitive=primitive)


def field_of_order(q: int) -> FieldSpec:
    for p in range(2, q + 1):
        if q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1 or not is_prime(p):
                break
            return field_make(p, e)
    raise FieldError(f"{q} is not a prime power")


def ext_expand(F: ExtFieldSpec, x: int) -> tuple[int, ...]:
    return F.expand(x)


def all_vectors(q: int, length: int):
    return itertools.product(range(q), repeat=length)
