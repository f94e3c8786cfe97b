"""Exact arithmetic in small finite fields F_p and F_{p^k}.

A field is described by a FieldSpec: the prime p and, for extensions, a
monic irreducible modulus over F_p (coefficients listed low degree first).
Elements are residue classes stored as a single integer code in [0, p^k):
the base-p digits of the code are the coordinates in the power basis
1, w, w^2, ... of the residue class w of the extension generator.

Everything here is immutable and pure; fields stay small by design
(the irreducibility check is exhaustive trial division).
"""

from __future__ import annotations

import functools

TABLE_LIMIT = 4096  # extension fields carry full add/mul tables


class NonPrimeCharacteristic(ValueError):
    pass


class ReducibleModulus(ValueError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


class FieldMismatch(ValueError):
    pass


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_mod(num, den, p):
    """Remainder of num by monic den in F_p[t]; both low-first coefficient lists."""
    num = list(num)
    dn = len(den) - 1
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i] % p
        if c:
            for j in range(dn + 1):
                num[i - dn + j] = (num[i - dn + j] - c * den[j]) % p
    return [c % p for c in num[:dn]]


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return out


def _monic_polys(p, deg):
    """All monic polynomials of the given degree over F_p, low-first."""
    def rec(prefix, rest):
        if rest == 0:
            yield prefix + [1]
            return
        for c in range(p):
            yield from rec(prefix + [c], rest - 1)
    yield from rec([], deg)


def _is_irreducible(modulus, p):
    # Exhaustive trial division; fields here never exceed a few hundred elements.
    k = len(modulus) - 1
    for deg in range(1, k // 2 + 1):
        for div in _monic_polys(p, deg):
            rem = _poly_mod(modulus, div, p)
            if not any(rem):
                return False
    return True


class FieldSpec:
    """Immutable description of F_{p^k} with code-level arithmetic.

    Codes are integers in [0, q); arithmetic on codes is exact.  For k >= 2
    full lookup tables are precomputed (q is capped at TABLE_LIMIT).
    """

    __slots__ = ("p", "k", "modulus", "q", "_add", "_mul", "_neg", "_inv")

    def __init__(self, p, modulus=None):
        if not isinstance(p, int) or not _is_prime(p):
            raise NonPrimeCharacteristic(f"characteristic {p!r} is not prime")
        self.p = p
        if modulus is None:
            self.k = 1
            self.modulus = None
            self.q = p
            self._add = self._mul = self._neg = self._inv = None
            return
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) < 3 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree >= 2 (low-first coefficients)")
        if not _is_irreducible(modulus, p):
            raise ReducibleModulus(f"modulus {list(modulus)} factors over F_{p}")
        self.k = len(modulus) - 1
        self.modulus = modulus
        self.q = p ** self.k
        if self.q > TABLE_LIMIT:
            raise ValueError(f"extension field with {self.q} elements exceeds supported size")
        self._build_tables()

    def _coeffs_of(self, code):
        p = self.p
        return tuple((code // p**i) % p for i in range(self.k))

    def _code_of(self, coeffs):
        code = 0
        for i, c in enumerate(coeffs):
            code += (c % self.p) * self.p**i
        return code

    def _build_tables(self):
        p, q = self.p, self.q
        coeffs = [self._coeffs_of(c) for c in range(q)]
        self._add = [[self._code_of([x + y for x, y in zip(coeffs[a], coeffs[b])])
                      for b in range(q)] for a in range(q)]
        self._neg = [self._code_of([-x for x in coeffs[a]]) for a in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(a, q):
                prod = _poly_mul(list(coeffs[a]), list(coeffs[b]), p)
                code = self._code_of(_poly_mod(prod, self.modulus, p))
                mul[a][b] = mul[b][a] = code
        self._mul = mul
        inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if mul[a][b] == 1:
                    inv[a] = b
                    break
            else:
                raise ReducibleModulus(f"no inverse for code {a}; modulus not irreducible")
        self._inv = inv

    # -- code-level arithmetic -------------------------------------------
    def add(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        return self._add[a][b]

    def neg(self, a):
        if self.k == 1:
            return (-a) % self.p
        return self._neg[a]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.k == 1:
            return (a * b) % self.p
        return self._mul[a][b]

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("division by zero field element")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        return self._inv[a]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        out, base = 1, a
        e = int(e)
        if e < 0:
            base = self.inv(a)
            e = -e
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    # -- element constructors --------------------------------------------
    def zero(self):
        return FieldElement(self, 0)

    def one(self):
        return FieldElement(self, 1)

    def scalar(self, c):
        """Embed an integer as a prime-subfield constant."""
        return FieldElement(self, int(c) % self.p)

    def gen(self):
        """Residue class of the extension generator (k >= 2)."""
        if self.k == 1:
            raise ValueError("prime field has no extension generator")
        return FieldElement(self, self.p)

    def element(self, coeffs):
        """Element from F_p coordinates in the power basis, low degree first."""
        if isinstance(coeffs, int):
            return self.scalar(coeffs)
        coeffs = list(coeffs)
        if len(coeffs) > self.k:
            if any(c % self.p for c in coeffs[self.k:]):
                raise ValueError(f"coefficient vector longer than extension degree {self.k}")
            coeffs = coeffs[: self.k]
        coeffs += [0] * (self.k - len(coeffs))
        return FieldElement(self, self._code_of(coeffs))

    def from_code(self, code):
        return FieldElement(self, int(code))

    def elements(self):
        return [FieldElement(self, c) for c in range(self.q)]

    # ----------------------------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, FieldSpec)
                and self.p == other.p and self.modulus == other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k}; mod {list(self.modulus)})"


@functools.lru_cache(maxsize=None)
def _cached_spec(p, modulus):
    return FieldSpec(p, modulus)


def field_create(p, modulus=None):
    """Validated field specification; modulus omitted gives the prime field."""
    key = None if modulus is None else tuple(int(c) for c in modulus)
    return _cached_spec(p, key)


class FieldElement:
    """A canonical residue class: equal elements have identical codes."""

    __slots__ = ("spec", "code")

    def __init__(self, spec, code):
        self.spec = spec
        self.code = int(code)
        if not 0 <= self.code < spec.q:
            raise ValueError(f"code {code} out of range for {spec!r}")

    @property
    def coeffs(self):
        if self.spec.k == 1:
            return (self.code,)
        return self.spec._coeffs_of(self.code)

    def is_zero(self):
        return self.code == 0

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatch(f"elements of {self.spec!r} and {other.spec!r}")
            return other.code
        if isinstance(other, int):
            return other % self.spec.p
        return NotImplemented

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.spec, self.spec.add(self.code, c))

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.spec, self.spec.sub(self.code, c))

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.spec, self.spec.sub(c, self.code))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.code))

    def __mul__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.spec, self.spec.mul(self.code, c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.spec, self.spec.div(self.code, c))

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        return FieldElement(self.spec, self.spec.div(c, self.code))

    def __pow__(self, e):
        return FieldElement(self.spec, self.spec.pow(self.code, e))

    def inverse(self):
        return FieldElement(self.spec, self.spec.inv(self.code))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.spec == other.spec and self.code == other.code
        if isinstance(other, int):
            # prime-subfield constants embed with code == value mod p
            return self.code == other % self.spec.p
        return NotImplemented

    def __hash__(self):
        return hash((self.spec.p, self.spec.modulus, self.code))

    def __repr__(self):
        return f"FieldElement({self})"

    def __str__(self):
        if self.spec.k == 1:
            return str(self.code)
        parts = []
        for i in reversed(range(self.spec.k)):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                v = "w" if i == 1 else f"w^{i}"
                parts.append(v if c == 1 else f"{c}*{v}")
        return "+".join(parts) if parts else "0"
