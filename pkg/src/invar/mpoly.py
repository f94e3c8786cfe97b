"""Sparse multivariate polynomials over F_{p^k}.

Polynomials are finite maps from exponent tuples (one entry per variable)
to nonzero field-element codes; the zero polynomial has no terms.  The
canonical term order for display and serialization is graded reverse
lexicographic with the trailing variable dominant: x_n > x_{n-1} > ... > x_1.
That orientation matches the divided-power reduction machinery, where
trailing variables are eliminated largest-first.

Hasse derivatives are computed termwise through binomial coefficients mod p
(Lucas); their defining substitution x_j -> x_j + t is kept as a test oracle.
"""

from __future__ import annotations

import functools
import math
from math import comb

from .ffield import FieldElement, FieldMismatch

GT, EQ, LT = 1, 0, -1


class RingMismatch(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class LengthMismatch(ValueError):
    pass


def binom_mod_p(a, b, p):
    """C(a, b) mod p by Lucas' digit rule."""
    if b < 0 or b > a:
        return 0
    out = 1
    while a or b:
        ad, bd = a % p, b % p
        if bd > ad:
            return 0
        out = out * comb(ad, bd) % p
        a //= p
        b //= p
    return out


def degrevlex_key(exps):
    """Sort key: ascending == ascending in degrevlex (x_n dominant)."""
    return (sum(exps), tuple(-e for e in exps))


def lex_key(exps):
    """Sort key for lex with x_n dominant."""
    return tuple(reversed(exps))


class RingSpec:
    """A polynomial ring F[x_1, ..., x_n]; variable order is structural."""

    __slots__ = ("field", "n", "names")

    def __init__(self, field, n, names=None):
        if n < 1:
            raise ValueError("ring needs at least one variable")
        self.field = field
        self.n = n
        self.names = tuple(names) if names else tuple(f"x{i}" for i in range(1, n + 1))
        if len(self.names) != n or len(set(self.names)) != n:
            raise ValueError("variable names must be distinct and match n")

    def __eq__(self, other):
        return (isinstance(other, RingSpec) and self.field == other.field
                and self.n == other.n and self.names == other.names)

    def __hash__(self):
        return hash((self.field, self.n, self.names))

    def __repr__(self):
        return f"RingSpec({self.field!r}, vars={','.join(self.names)})"

    # -- constructors -------------------------------------------------------
    def zero(self):
        return Polynomial(self, {})

    def one(self):
        return Polynomial(self, {(0,) * self.n: 1})

    def scalar(self, c):
        code = c.code if isinstance(c, FieldElement) else int(c) % self.field.p
        return Polynomial(self, {(0,) * self.n: code} if code else {})

    def variable(self, i):
        """x_i, 1-based."""
        if not 1 <= i <= self.n:
            raise IndexOutOfRange(f"variable index {i} outside 1..{self.n}")
        e = [0] * self.n
        e[i - 1] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self):
        return [self.variable(i) for i in range(1, self.n + 1)]

    def monomial(self, exps, coeff=1):
        exps = tuple(int(e) for e in exps)
        if len(exps) != self.n or any(e < 0 for e in exps):
            raise ValueError(f"bad exponent vector {exps}")
        code = self._coeff_code(coeff)
        return Polynomial(self, {exps: code} if code else {})

    def from_terms(self, terms):
        d = {}
        for exps, coeff in terms:
            exps = tuple(int(e) for e in exps)
            code = self._coeff_code(coeff)
            if code:
                cur = d.get(exps, 0)
                s = self.field.add(cur, code)
                if s:
                    d[exps] = s
                else:
                    d.pop(exps, None)
        return Polynomial(self, d)

    def linear_form(self, codes):
        """sum codes[i] * x_{i+1}."""
        d = {}
        for i, c in enumerate(codes):
            c = int(c)
            if c:
                e = [0] * self.n
                e[i] = 1
                d[tuple(e)] = c
        return Polynomial(self, d)

    def _coeff_code(self, coeff):
        if isinstance(coeff, FieldElement):
            if coeff.spec != self.field:
                raise FieldMismatch("coefficient from a different field")
            return coeff.code
        return int(coeff) % self.field.p


class Polynomial:
    """Immutable-by-convention sparse polynomial; no zero coefficients stored."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # -- basic queries --------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def degree(self):
        if not self.terms:
            raise ValueError("degree of the zero polynomial is undefined")
        return max(sum(e) for e in self.terms)

    def is_homogeneous(self):
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def coefficient(self, exps):
        return self.ring.field.from_code(self.terms.get(tuple(exps), 0))

    def support(self):
        return sorted(self.terms, key=degrevlex_key, reverse=True)

    def items(self):
        """Terms in canonical (descending degrevlex) order as FieldElements."""
        f = self.ring.field
        return [(e, f.from_code(self.terms[e])) for e in self.support()]

    def supported_on_first(self, j):
        """True when no variable beyond x_j occurs."""
        return all(not any(e[j:]) for e in self.terms)

    def same_ring(self, other):
        if self.ring != other.ring:
            raise RingMismatch("polynomials from different rings")

    # -- arithmetic ------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        self.same_ring(other)
        field = self.ring.field
        d = dict(self.terms)
        for e, c in other.terms.items():
            s = field.add(d.get(e, 0), c)
            if s:
                d[e] = s
            else:
                d.pop(e, None)
        return Polynomial(self.ring, d)

    def __neg__(self):
        field = self.ring.field
        return Polynomial(self.ring, {e: field.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        self.same_ring(other)
        field = self.ring.field
        d = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                prod = field.mul(c1, c2)
                if not prod:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                s = field.add(d.get(e, 0), prod)
                if s:
                    d[e] = s
                else:
                    d.pop(e, None)
        return Polynomial(self.ring, d)

    __rmul__ = __mul__

    def scale(self, c):
        code = self.ring._coeff_code(c)
        if not code:
            return self.ring.zero()
        field = self.ring.field
        return Polynomial(self.ring, {e: field.mul(code, v) for e, v in self.terms.items()})

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative polynomial power")
        out = self.ring.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, FieldElement)):
            return self.ring.scalar(other)
        raise TypeError(f"cannot combine polynomial with {type(other)!r}")

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        return format_poly(self)


# -- Hasse derivations ---------------------------------------------------------

def hasse_derivative(f, j, l):
    """Order-l Hasse derivative in x_j: x_j^d contributes C(d, l) x_j^{d-l}."""
    ring = f.ring
    if not 1 <= j <= ring.n:
        raise IndexOutOfRange(f"variable index {j} outside 1..{ring.n}")
    if l < 0:
        raise ValueError("derivative order must be >= 0")
    if l == 0:
        return f
    p = ring.field.p
    field = ring.field
    d = {}
    for e, c in f.terms.items():
        deg = e[j - 1]
        if deg < l:
            continue
        b = binom_mod_p(deg, l, p)
        if not b:
            continue
        coeff = field.mul(c, b)
        if not coeff:
            continue
        ne = list(e)
        ne[j - 1] = deg - l
        ne = tuple(ne)
        s = field.add(d.get(ne, 0), coeff)
        if s:
            d[ne] = s
        else:
            d.pop(ne, None)
    return Polynomial(ring, d)


def hasse_composite(f, alpha):
    """Composite Hasse derivative: apply order alpha[i] in x_{i+1} for each i.

    alpha is a full-length exponent vector; the individual derivatives
    commute, and the composite is applied highest index first.
    """
    if len(alpha) != f.ring.n:
        raise IndexOutOfRange(f"alpha has length {len(alpha)}, expected {f.ring.n}")
    out = f
    for i in reversed(range(len(alpha))):
        if alpha[i]:
            out = hasse_derivative(out, i + 1, alpha[i])
    return out


def trailing_revlex_compare(a, b):
    """Total order on exponent vectors: decide at the largest differing index.

    Unit vectors sort as (0,...,0,1) > (0,...,1,0) > ... > (1,0,...,0).
    """
    if len(a) != len(b):
        raise LengthMismatch(f"vectors of length {len(a)} and {len(b)}")
    for i in reversed(range(len(a))):
        if a[i] != b[i]:
            return GT if a[i] > b[i] else LT
    return EQ


def monomial_ideal_member(f, j):
    """True iff every term of f is divisible by some x_i with i <= j."""
    if not 0 <= j <= f.ring.n:
        raise ValueError(f"index {j} outside 0..{f.ring.n}")
    return all(any(e[:j]) for e in f.terms)


# -- graded monomial enumeration -------------------------------------------------

@functools.lru_cache(maxsize=None)
def monomials_of_degree(n, d):
    """All exponent tuples of total degree d, descending degrevlex."""
    out = []

    def rec(prefix, rest, slots):
        if slots == 1:
            out.append(prefix + (rest,))
            return
        for e in range(rest + 1):
            rec(prefix + (e,), rest - e, slots - 1)

    rec((), d, n)
    out.sort(key=degrevlex_key, reverse=True)
    return tuple(out)


@functools.lru_cache(maxsize=None)
def monomial_index(n, d):
    return {e: i for i, e in enumerate(monomials_of_degree(n, d))}


def monomial_count(n, d):
    return math.comb(d + n - 1, n - 1)


def vector_of(f, d):
    """Coefficient codes of a homogeneous degree-d polynomial over the canonical basis."""
    idx = monomial_index(f.ring.n, d)
    vec = [0] * len(idx)
    for e, c in f.terms.items():
        vec[idx[e]] = c
    return vec


def poly_from_vector(ring, d, vec):
    monos = monomials_of_degree(ring.n, d)
    return Polynomial(ring, {monos[i]: int(c) for i, c in enumerate(vec) if c})


# -- text form -------------------------------------------------------------------

def _coeff_str(field, code):
    el = field.from_code(code)
    s = str(el)
    if field.k > 1 and ("+" in s or "*" in s):
        return f"({s})"
    return s


def format_poly(f):
    """Render as `2*x1^3*x2 + x3`; extension coefficients are parenthesized."""
    if f.is_zero():
        return "0"
    parts = []
    for e in f.support():
        c = f.terms[e]
        factors = []
        for i, ei in enumerate(e):
            if ei == 1:
                factors.append(f.ring.names[i])
            elif ei > 1:
                factors.append(f"{f.ring.names[i]}^{ei}")
        cs = _coeff_str(f.ring.field, c)
        if not factors:
            parts.append(cs)
        elif cs == "1":
            parts.append("*".join(factors))
        else:
            parts.append("*".join([cs] + factors))
    return " + ".join(parts)


def parse_poly(ring, text):
    """Parse the text form produced by format_poly."""
    text = text.replace("-", "+-").replace(" ", "")
    # split on '+' outside parentheses
    chunks, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            if cur:
                chunks.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if cur:
        chunks.append("".join(cur))
    result = ring.zero()
    for chunk in chunks:
        if not chunk:
            continue
        result = result + _parse_term(ring, chunk)
    return result


def _parse_term(ring, chunk):
    field = ring.field
    neg = chunk.startswith("-")
    if neg:
        chunk = chunk[1:]
    coeff = field.one()
    exps = [0] * ring.n
    for factor in _split_factors(chunk):
        if factor.startswith("("):
            coeff = coeff * _parse_ext(field, factor[1:-1])
        elif factor[0].isdigit():
            coeff = coeff * field.scalar(int(factor))
        elif factor.startswith("w"):
            coeff = coeff * _parse_ext(field, factor)
        else:
            name, _, power = factor.partition("^")
            try:
                i = ring.names.index(name)
            except ValueError:
                raise ValueError(f"unknown variable {name!r}") from None
            exps[i] += int(power) if power else 1
    if neg:
        coeff = -coeff
    return ring.monomial(exps, coeff)


def _split_factors(chunk):
    factors, depth, cur = [], 0, []
    for ch in chunk:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            factors.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if cur:
        factors.append("".join(cur))
    return factors


def _parse_ext(field, body):
    out = field.zero()
    for piece in body.replace("-", "+-").split("+"):
        if not piece:
            continue
        neg = piece.startswith("-")
        if neg:
            piece = piece[1:]
        c = field.one()
        for fac in piece.split("*"):
            if fac.startswith("w"):
                _, _, power = fac.partition("^")
                c = c * field.gen() ** (int(power) if power else 1)
            else:
                c = c * field.scalar(int(fac))
        out = out + (-c if neg else c)
    return out
