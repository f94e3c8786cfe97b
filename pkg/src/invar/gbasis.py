"""Buchberger Groebner engine over F_{p^k}.

Supports the two orders used throughout (lex and degrevlex, trailing
variable dominant), normal forms, colength by staircase enumeration,
ideal equality, and the complete-intersection test (minimal generator
count by graded Nakayama vs height from the leading-term staircase).

Inputs here are tiny, so the plain pair-queue Buchberger with the
coprimality and chain criteria is plenty; the reduced basis is unique
per order, which makes every downstream consumer deterministic.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .linalg import Echelon, GFLinAlg
from .mpoly import (Polynomial, RingMismatch, degrevlex_key, lex_key,
                    monomial_index, monomials_of_degree, vector_of)


class ZeroGenerator(ValueError):
    pass


class NonHomogeneousInput(ValueError):
    pass


class MonomialOrder:
    """Total multiplicative monomial order with 1 minimal."""

    KINDS = ("degrevlex", "lex")

    def __init__(self, ring, kind="degrevlex"):
        if kind not in self.KINDS:
            raise ValueError(f"unknown order {kind!r}")
        self.ring = ring
        self.kind = kind
        self.key = degrevlex_key if kind == "degrevlex" else lex_key

    def leading(self, f):
        """(exponents, coefficient code) of the leading term."""
        if f.is_zero():
            raise ValueError("zero polynomial has no leading term")
        e = max(f.terms, key=self.key)
        return e, f.terms[e]

    def __repr__(self):
        return f"MonomialOrder({self.kind}, n={self.ring.n})"


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _monic(f, order):
    _, c = order.leading(f)
    if c == 1:
        return f
    return f.scale(f.ring.field.from_code(f.ring.field.inv(c)))


def _reduce_full(f, basis, order):
    """Remainder of f modulo basis: no remainder term divisible by any LT."""
    ring = f.ring
    field = ring.field
    rem = {}
    work = dict(f.terms)
    lts = [(order.leading(g)[0], g) for g in basis]
    while work:
        e = max(work, key=order.key)
        c = work[e]
        for lt, g in lts:
            if _divides(lt, e):
                shift = tuple(a - b for a, b in zip(e, lt))
                # work -= c * x^shift * g; g is monic so the term at e cancels
                for ge, gc in g.terms.items():
                    te = tuple(a + b for a, b in zip(ge, shift))
                    s = field.sub(work.get(te, 0), field.mul(c, gc))
                    if s:
                        work[te] = s
                    else:
                        work.pop(te, None)
                break
        else:
            rem[e] = work.pop(e)
    return Polynomial(ring, rem)


def _spoly(f, g, order):
    ring = f.ring
    ef, _ = order.leading(f)
    eg, _ = order.leading(g)
    lcm = tuple(max(a, b) for a, b in zip(ef, eg))
    mf = ring.monomial(tuple(a - b for a, b in zip(lcm, ef)))
    mg = ring.monomial(tuple(a - b for a, b in zip(lcm, eg)))
    return mf * f - mg * g


def groebner(gens, order=None):
    """Reduced Groebner basis of the ideal generated by gens."""
    gens = list(gens)
    if not gens:
        raise ZeroGenerator("empty generator list")
    ring = gens[0].ring
    for g in gens:
        if g.is_zero():
            raise ZeroGenerator("zero polynomial among generators")
        if g.ring != ring:
            raise RingMismatch("generators from different rings")
    if order is None:
        order = MonomialOrder(ring)

    basis = []
    for g in gens:
        h = _reduce_full(g, basis, order) if basis else g
        if not h.is_zero():
            basis.append(_monic(h, order))
    lts = [order.leading(g)[0] for g in basis]

    def lcm_of(i, j):
        return tuple(max(a, b) for a, b in zip(lts[i], lts[j]))

    pairs = {(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))}
    treated = set()
    while pairs:
        # normal strategy: lowest lcm degree, ties broken by the order, then indices
        i, j = min(pairs, key=lambda p: (sum(lcm_of(*p)), order.key(lcm_of(*p)), p))
        pairs.discard((i, j))
        treated.add((i, j))
        lcm = lcm_of(i, j)
        # coprime leading terms: S-polynomial reduces to zero
        if all(a + b == c for a, b, c in zip(lts[i], lts[j], lcm)):
            continue
        # chain criterion: lcm divisible by a third LT whose pairs are done
        chained = False
        for k in range(len(basis)):
            if k in (i, j) or not _divides(lts[k], lcm):
                continue
            pik = (min(i, k), max(i, k))
            pjk = (min(j, k), max(j, k))
            if pik not in pairs and pjk not in pairs:
                chained = True
                break
        if chained:
            continue
        h = _reduce_full(_spoly(basis[i], basis[j], order), basis, order)
        if h.is_zero():
            continue
        h = _monic(h, order)
        basis.append(h)
        lts.append(order.leading(h)[0])
        new = len(basis) - 1
        pairs.update((k, new) for k in range(new))

    # interreduce to the unique reduced basis
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            others = basis[:i] + basis[i + 1:]
            if not others:
                continue
            h = _reduce_full(basis[i], others, order)
            if h.is_zero():
                basis.pop(i)
                changed = True
                break
            h = _monic(h, order)
            if h.terms != basis[i].terms:
                basis[i] = h
                changed = True
    basis.sort(key=lambda g: order.key(order.leading(g)[0]))
    return GroebnerBasis(tuple(basis), order, tuple(gens))


class GroebnerBasis:
    __slots__ = ("generators", "order", "source")

    def __init__(self, generators, order, source):
        self.generators = generators
        self.order = order
        self.source = source

    def leading_exponents(self):
        return [self.order.leading(g)[0] for g in self.generators]

    def __iter__(self):
        return iter(self.generators)

    def __repr__(self):
        return f"GroebnerBasis({len(self.generators)} gens, {self.order.kind})"


def normal_form(f, gb):
    if f.ring != gb.order.ring:
        raise RingMismatch("polynomial not in the basis ring")
    if f.is_zero():
        return f
    return _reduce_full(f, list(gb.generators), gb.order)


def colength(gb):
    """Number of standard monomials; math.inf when the staircase is unbounded."""
    lts = gb.leading_exponents()
    n = gb.order.ring.n
    if any(not any(e) for e in lts):
        return 0  # unit ideal
    bounds = []
    for i in range(n):
        pure = [e[i] for e in lts if e[i] and not any(e[:i]) and not any(e[i + 1:])]
        if not pure:
            return math.inf
        bounds.append(min(pure))
    count = 0
    for mono in itertools.product(*(range(b) for b in bounds)):
        if not any(_divides(lt, mono) for lt in lts):
            count += 1
    return count


def staircase_dimension(gb):
    """Krull dimension of S/I from the leading-term ideal.

    dim = size of the largest variable subset touching no leading term.
    """
    lts = gb.leading_exponents()
    n = gb.order.ring.n
    supports = [frozenset(i for i in range(n) if e[i]) for e in lts]
    if any(not s for s in supports):
        return -1  # unit ideal: empty variety
    for size in range(n, 0, -1):
        for T in itertools.combinations(range(n), size):
            Tset = set(T)
            if all(not s <= Tset for s in supports):
                return size
    return 0


def ideal_equal(I, J, order=None):
    """Generator lists define the same ideal (mutual reduction to zero)."""
    I, J = list(I), list(J)
    ring = (I or J)[0].ring
    for f in I + J:
        if f.ring != ring:
            raise RingMismatch("generators from different rings")
    I = [f for f in I if not f.is_zero()]
    J = [f for f in J if not f.is_zero()]
    if not I or not J:
        return I == J
    if order is None:
        order = MonomialOrder(ring)
    gb_I = groebner(I, order)
    gb_J = groebner(J, order)
    return (all(normal_form(f, gb_J).is_zero() for f in I)
            and all(normal_form(f, gb_I).is_zero() for f in J))


# -- graded minimal generator count (Nakayama) -----------------------------------

def _mult_maps(n, d):
    """For each variable l: index map from degree d-1 monomials to their x_l multiples."""
    idx = monomial_index(n, d)
    prev = monomials_of_degree(n, d - 1)
    maps = []
    for l in range(n):
        maps.append([idx[tuple(e + (1 if i == l else 0) for i, e in enumerate(m))]
                     for m in prev])
    return maps


def minimal_generator_degrees(gens):
    """Degrees of a minimal homogeneous generating set of the ideal (gens).

    Graded Nakayama: at each degree d the fresh generators are a basis of
    I_d modulo S_1 * I_{d-1}; the count is independent of choices.
    """
    gens = list(gens)
    ring = gens[0].ring
    for g in gens:
        if g.is_zero():
            raise ZeroGenerator("zero polynomial among generators")
        if not g.is_homogeneous():
            raise NonHomogeneousInput(f"non-homogeneous generator {g}")
    lin = GFLinAlg(ring.field)
    n = ring.n
    by_degree = {}
    for g in gens:
        by_degree.setdefault(g.degree(), []).append(g)
    dmax = max(by_degree)
    degrees = []
    prev = None  # echelon of I_{d-1}
    for d in range(1, dmax + 1):
        ncols = len(monomials_of_degree(n, d))
        ech = Echelon(lin, ncols)
        if prev is not None and prev.rank:
            maps = _mult_maps(n, d)
            for l in range(n):
                block = lin.zeros((prev.rank, ncols))
                block[:, np.array(maps[l])] = prev.rows
                ech.add_rows(block)
        for g in by_degree.get(d, []):
            if ech.add_row(lin.asarray(vector_of(g, d))[0]):
                degrees.append(d)
        prev = ech
    return degrees


def is_complete_intersection(gens):
    """Minimal homogeneous generator count equals the ideal's height."""
    gens = [g for g in gens]
    if not gens:
        raise ZeroGenerator("empty generator list")
    for g in gens:
        if g.is_zero():
            raise ZeroGenerator("zero polynomial among generators")
        if not g.is_homogeneous():
            raise NonHomogeneousInput(f"non-homogeneous generator {g}")
    ring = gens[0].ring
    mu = len(minimal_generator_degrees(gens))
    gb = groebner(gens)
    dim = staircase_dimension(gb)
    if dim < 0:
        return False  # unit ideal is not a proper CI here
    height = ring.n - dim
    return mu == height
