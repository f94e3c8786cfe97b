"""Invariants and Hilbert ideals of triangular p-group actions.

Two independent routes to the Hilbert ideal live here:

* hilbert_ideal_bruteforce - degreewise linear algebra.  Invariant slices
  are joined into the graded ideal until its degree-d slice fills all of
  S_d; past that point no minimal generator can exist, so the result is
  certified complete.  A hard ceiling sum_j(orbit_j - 1) + 1 guarantees
  the certificate fires (orbit products have pure-power leading terms, so
  the coinvariant staircase dies inside that box).

* ci_generators - the constructive route along a layered structure: for
  each index j pick a minimal-degree invariant of the working subgroup
  that lives in (x_1..x_j)S but not (x_1..x_{j-1})S, then strip its
  trailing-variable part with composite Hasse derivatives, largest
  trailing exponent first.  The output is n generators f_j in
  k[x_1..x_j] with x_j^(deg f_j) present and deg f_j bounded by the
  working subgroup's order.

The verification pass (on by default) re-checks the invariance and
membership of every derivative taken during reduction, and at each layer
boundary compares against an independently computed Hilbert ideal of the
restricted action.
"""

from __future__ import annotations

import functools
import numpy as np

from .ffield import FieldElement
from .gaction import GroupTable, act, orbit_size
from .gbasis import MonomialOrder, groebner, ideal_equal, normal_form
from .linalg import Echelon, GFLinAlg
from .mpoly import (Polynomial, RingSpec, hasse_composite, monomial_ideal_member,
                    monomial_index, monomials_of_degree, poly_from_vector,
                    trailing_revlex_compare, vector_of)


class NoCandidate(RuntimeError):
    pass


class ReductionEscape(RuntimeError):
    pass


class StructureInvalid(ValueError):
    pass


class InvariantBasis:
    __slots__ = ("degree", "basis")

    def __init__(self, degree, basis):
        self.degree = degree
        self.basis = tuple(basis)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __repr__(self):
        return f"InvariantBasis(degree={self.degree}, dim={len(self.basis)})"


@functools.lru_cache(maxsize=None)
def _mult_maps(n, d):
    """Per variable l: numpy index map from degree d-1 monomials to x_{l+1} multiples."""
    idx = monomial_index(n, d)
    prev = monomials_of_degree(n, d - 1)
    maps = []
    for l in range(n):
        maps.append(np.array(
            [idx[tuple(e + (1 if i == l else 0) for i, e in enumerate(m))] for m in prev],
            dtype=np.int64))
    return tuple(maps)


@functools.lru_cache(maxsize=None)
def _parents(n, d):
    """For each degree-d monomial: (last nonzero variable, index of m / x_l in degree d-1)."""
    idx_prev = monomial_index(n, d - 1)
    par_var, par_idx = [], []
    for m in monomials_of_degree(n, d):
        l = max(i for i, e in enumerate(m) if e)
        parent = tuple(e - (1 if i == l else 0) for i, e in enumerate(m))
        par_var.append(l)
        par_idx.append(idx_prev[parent])
    return np.array(par_var, dtype=np.int64), np.array(par_idx, dtype=np.int64)


class DegreewiseEngine:
    """Cached action matrices and canonical invariant bases for one group."""

    def __init__(self, G):
        self.G = G
        self.ring = G.ring
        self.lin = GFLinAlg(G.field)
        self.gens = generating_subset(G)
        self._action = {}      # degree -> list of matrices, one per generator
        self._invariants = {}  # degree -> canonical RREF rows

    def action_matrices(self, d):
        """Row r of the matrix = coordinates of g(m_r) over the degree-d basis."""
        if d in self._action:
            return self._action[d]
        n = self.ring.n
        lin = self.lin
        if d == 1:
            idx = monomial_index(n, 1)
            mats = []
            for g in self.gens:
                A = lin.zeros((n, n))
                for r, mono in enumerate(monomials_of_degree(n, 1)):
                    i = mono.index(1)
                    for jv, c in enumerate(g.matrix[i]):
                        if c:
                            unit = tuple(1 if t == jv else 0 for t in range(n))
                            A[r, idx[unit]] = c
                mats.append(A)
        else:
            prev = self.action_matrices(d - 1)
            par_var, par_idx = _parents(n, d)
            maps = _mult_maps(n, d)
            N = len(monomials_of_degree(n, d))
            mats = []
            for gi, g in enumerate(self.gens):
                A = lin.zeros((N, N))
                for l in range(n):
                    rows = np.nonzero(par_var == l)[0]
                    if rows.size == 0:
                        continue
                    src = prev[gi][par_idx[rows]]
                    for jv, c in enumerate(g.matrix[l]):
                        if c:
                            cols = maps[jv]
                            block = A[np.ix_(rows, cols)]
                            A[np.ix_(rows, cols)] = lin.addv(block, lin.scale(c, src))
                mats.append(A)
        self._action[d] = mats
        # parents only ever look one degree back
        self._action.pop(d - 2, None)
        return mats

    def invariant_rows(self, d):
        """Canonical (RREF) basis rows of the degree-d invariants."""
        if d in self._invariants:
            return self._invariants[d]
        lin = self.lin
        N = len(monomials_of_degree(self.ring.n, d))
        mats = self.action_matrices(d)
        eye = lin.zeros((N, N))
        eye[np.arange(N), np.arange(N)] = 1
        B = None  # rows spanning the current candidate space
        for A in mats:
            M = lin.subv(A.T.copy(), eye)
            if B is None:
                B = lin.kernel(M)
            else:
                if B.shape[0] == 0:
                    break
                restricted = lin.matmul(M, B.T.copy())
                Y = lin.kernel(restricted)
                B = lin.matmul(Y, B)
        if B is None:  # trivial group: everything is invariant
            B = eye
        rows, _ = lin.rref(B)
        self._invariants[d] = rows
        return rows

    def invariant_slice(self, d, j):
        """Invariant rows supported on monomials divisible by some x_i, i <= j."""
        rows = self.invariant_rows(d)
        if rows.shape[0] == 0:
            return rows
        monos = monomials_of_degree(self.ring.n, d)
        outside = [i for i, m in enumerate(monos) if not any(m[:j])]
        inside = [i for i, m in enumerate(monos) if any(m[:j])]
        perm = np.array(outside + inside, dtype=np.int64)
        reordered = rows[:, perm]
        R, pivots = self.lin.rref(reordered)
        keep = [r for r, pc in enumerate(pivots) if pc >= len(outside)]
        sliced = R[keep]
        unperm = np.empty_like(perm)
        unperm[perm] = np.arange(len(perm))
        return sliced[:, unperm]


def generating_subset(G):
    """Small generating subset of an enumerated group (greedy over elements)."""
    if G.order == 1:
        return [G.elements[G.identity_index()]]
    ident = G.identity_index()
    chosen = []
    have = frozenset([ident])
    for i in range(G.order):
        if i in have:
            continue
        chosen.append(i)
        have = G.subgroup_closure(chosen)
        if len(have) == G.order:
            break
    return [G.elements[i] for i in chosen]


def engine_for(G):
    eng = getattr(G, "_degreewise_engine", None)
    if eng is None:
        eng = DegreewiseEngine(G)
        G._degreewise_engine = eng
    return eng


def invariants_of_degree(G, d):
    """Basis of the degree-d invariants (empty when the fixed space is zero)."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    eng = engine_for(G)
    rows = eng.invariant_rows(d)
    basis = [poly_from_vector(G.ring, d, rows[i]) for i in range(rows.shape[0])]
    return InvariantBasis(d, basis)


class HilbertIdealResult:
    """Generators of the Hilbert ideal with per-generator provenance."""

    __slots__ = ("generators", "degrees", "method", "provenance", "group_order",
                 "saturated_at", "degree_bound", "heuristic", "verification")

    def __init__(self, generators, method, provenance, group_order,
                 saturated_at=None, degree_bound=None, heuristic=False,
                 verification=None):
        self.generators = tuple(generators)
        self.degrees = tuple(g.degree() for g in self.generators)
        self.method = method
        self.provenance = tuple(provenance)
        self.group_order = group_order
        self.saturated_at = saturated_at
        self.degree_bound = degree_bound
        self.heuristic = heuristic
        self.verification = dict(verification or {})

    def degree_product(self):
        out = 1
        for d in self.degrees:
            out *= d
        return out

    def __repr__(self):
        return (f"HilbertIdealResult({self.method}, degrees={list(self.degrees)}, "
                f"|G|={self.group_order})")


def degree_ceiling(G):
    """Certified cutoff: coinvariants vanish beyond sum_j (orbit_j - 1)."""
    return sum(orbit_size(j, G) - 1 for j in range(1, G.n + 1)) + 1


def hilbert_ideal_bruteforce(G, degree_bound=None):
    """Minimal homogeneous generators of the Hilbert ideal, degree by degree.

    Stops as soon as the ideal's slice fills the whole graded piece (no
    further minimal generators possible).  An explicit degree_bound that
    truncates before that certificate marks the result heuristic.
    """
    ring = G.ring
    n = ring.n
    lin = GFLinAlg(ring.field)
    eng = engine_for(G)
    ceiling = degree_ceiling(G)
    limit = ceiling if degree_bound is None else min(int(degree_bound), ceiling)

    gens, prov = [], []
    prev = None
    saturated_at = None
    for d in range(1, limit + 1):
        ncols = len(monomials_of_degree(n, d))
        ech = Echelon(lin, ncols)
        if prev is not None and prev.rank:
            maps = _mult_maps(n, d)
            for l in range(n):
                block = lin.zeros((prev.rank, ncols))
                block[:, maps[l]] = prev.rows
                ech.add_rows(block)
        rows = eng.invariant_rows(d)
        for i in range(rows.shape[0]):
            if ech.add_row(rows[i]):
                gens.append(poly_from_vector(ring, d, rows[i]))
                prov.append({"j": None, "degree": d, "source": "invariant",
                             "new_at_degree": d})
        prev = ech
        if ech.rank == ncols:
            saturated_at = d
            break
    heuristic = saturated_at is None and degree_bound is not None and limit < ceiling
    return HilbertIdealResult(gens, "bruteforce", prov, G.order,
                              saturated_at=saturated_at,
                              degree_bound=degree_bound, heuristic=heuristic)


# -- constructive pipeline ------------------------------------------------------------

def _prior_slice_echelon(lin, prior, n, d):
    """Echelon of the degree-d slice of the ideal generated by prior."""
    ech = None
    by_deg = {}
    for g in prior:
        by_deg.setdefault(g.degree(), []).append(g)
    if not by_deg:
        return Echelon(lin, len(monomials_of_degree(n, d)))
    start = min(by_deg)
    for e in range(start, d + 1):
        ncols = len(monomials_of_degree(n, e))
        cur = Echelon(lin, ncols)
        if ech is not None and ech.rank:
            maps = _mult_maps(n, e)
            for l in range(n):
                block = lin.zeros((ech.rank, ncols))
                block[:, maps[l]] = ech.rows
                cur.add_rows(block)
        for g in by_deg.get(e, []):
            cur.add_row(lin.asarray(vector_of(g, e))[0])
        ech = cur
    return ech


def _check_depth_bound(group, j):
    from .nakajima import depth
    bad = [g for g in group.elements if depth(g) > j - 1]
    if bad:
        raise StructureInvalid(
            f"subgroup perturbs variables beyond x_{j-1}; step at j={j} not applicable")


def find_step_invariant(group, j, prior):
    """Minimal-degree homogeneous invariant in (x_1..x_j)S but outside
    (x_1..x_{j-1})S plus the degree slice of the prior ideal.

    Among minimal-degree candidates picks the echelon row with the
    smallest leading monomial, monic.  The orbit product of x_j bounds
    the search, so the loop always terminates.
    """
    _check_depth_bound(group, j)
    ring = group.ring
    n = ring.n
    lin = GFLinAlg(ring.field)
    eng = engine_for(group)
    bound = orbit_size(j, group)
    for d in range(1, bound + 1):
        V = eng.invariant_slice(d, j)
        if V.shape[0] == 0:
            continue
        excl = _prior_slice_echelon(lin, prior, n, d)
        for row in eng.invariant_slice(d, j - 1):
            excl.add_row(row)
        candidates = [i for i in range(V.shape[0]) if not excl.contains(V[i])]
        if not candidates:
            continue
        # RREF rows are monic with distinct pivot columns; larger pivot
        # column = smaller leading monomial in the descending enumeration
        best = max(candidates, key=lambda i: int(np.nonzero(V[i])[0][0]))
        return poly_from_vector(ring, d, V[best]), {"degree": d, "search_bound": bound}
    raise NoCandidate(f"no step invariant found for j={j} up to degree {bound}")


def _trailing_parts(F, j):
    """Distinct trailing exponent vectors (entries beyond x_j) in F's support."""
    parts = {}
    for e in F.terms:
        parts.setdefault(e[j:], None)
    return list(parts)


def reduce_to_small_ring(F, j, group, verify=True, log=None):
    """Strip the trailing-variable part of F, largest trailing exponent first.

    Each round subtracts (composite Hasse derivative) * (trailing monomial);
    the subtracted coefficients must be invariants inside (x_1..x_{j-1})S,
    which the verification pass checks round by round.  Returns the
    truncated generator and the list of trailing exponents processed.
    """
    if F.is_zero() or not F.is_homogeneous():
        raise ReductionEscape("reduction input must be homogeneous and nonzero")
    _check_depth_bound(group, j)
    ring = F.ring
    n = ring.n
    deg = F.degree()
    parts = sorted(_trailing_parts(F, j),
                   key=functools.cmp_to_key(trailing_revlex_compare), reverse=True)
    trace = []
    cur = F
    gens = generating_subset(group)
    for alpha in parts[:-1]:
        full = (0,) * j + alpha
        delta = hasse_composite(cur, full)
        if verify:
            for g in gens:
                if act(g, delta) != delta:
                    raise ReductionEscape(
                        f"derivative coefficient not invariant at trailing exponent {alpha}")
            if log is not None:
                log["delta_invariance_checks"] = log.get("delta_invariance_checks", 0) + len(gens)
            if not monomial_ideal_member(delta, j - 1):
                raise ReductionEscape(
                    f"derivative coefficient escapes (x_1..x_{j-1}) at {alpha}")
            if log is not None:
                log["delta_membership_checks"] = log.get("delta_membership_checks", 0) + 1
        z_alpha = ring.monomial(full)
        cur = cur - delta * z_alpha
        trace.append(alpha)
    if not cur.supported_on_first(j):
        raise ReductionEscape("reduction left trailing variables behind")
    pure = tuple(deg if t == j - 1 else 0 for t in range(n))
    if cur.terms.get(pure, 0) == 0:
        raise ReductionEscape(f"x_{j}^{deg} term missing after reduction")
    if cur.degree() != deg:
        raise ReductionEscape("reduction changed the degree")
    return cur, trace


def restrict_group(G, j):
    """Image of the action on k[x_1..x_j]: top-left blocks, deduplicated."""
    from .gaction import GroupElement
    ring = G.ring
    small_ring = RingSpec(ring.field, j, ring.names[:j])
    seen = {}
    for g in G.elements:
        block = tuple(row[:j] for row in g.matrix[:j])
        seen.setdefault(block, GroupElement(ring.field, block))
    elements = [seen[b] for b in sorted(seen)]
    gen_blocks = {tuple(row[:j] for row in g.matrix[:j]) for g in G.gens}
    gens = [seen[b] for b in sorted(gen_blocks)]
    return GroupTable(elements, gens, small_ring)


def truncate_poly(f, j, small_ring):
    return Polynomial(small_ring, {e[:j]: c for e, c in f.terms.items()})


def ci_generators(G, structure, verify=True):
    """Generators f_1..f_n of the Hilbert ideal along a layered structure.

    f_1..f_{i_0} are the globally fixed variables; the layer-k block
    (i_{k-1}, i_k] runs against the chain subgroup G_k, indices past i_r
    against the full group.  Every generator satisfies f_j in k[x_1..x_j],
    deg f_j <= |G|, with the pure power x_j^(deg f_j) present.
    """
    from .nakajima import NakajimaStructure, verify_structure
    if not isinstance(structure, NakajimaStructure):
        raise StructureInvalid("no layered structure available for this group")
    checked = verify_structure(G, structure.sequence)
    if not isinstance(checked, NakajimaStructure):
        raise StructureInvalid(f"structure rejected on re-verification: {checked.reason}")
    structure = checked

    ring = G.ring
    n = ring.n
    seq = structure.sequence
    log = {}
    gens, prov = [], []

    for j in range(1, seq[0] + 1):
        xj = ring.variable(j)
        for g in G.gens:
            if act(g, xj) != xj:
                raise StructureInvalid(f"x_{j} not fixed by the group; structure broken")
        gens.append(xj)
        prov.append({"j": j, "degree": 1, "source": "fixed-variable",
                     "layer": 0, "subgroup_order": 1, "trace_length": 0})

    plan = []
    for k in range(1, len(seq)):
        subgroup = structure.chain[k - 1]
        for j in range(seq[k - 1] + 1, seq[k] + 1):
            plan.append((j, k, subgroup))
    for j in range(seq[-1] + 1, n + 1):
        plan.append((j, len(seq), G))

    for j, layer, subgroup in plan:
        F, search = find_step_invariant(subgroup, j, gens)
        fj, trace = reduce_to_small_ring(F, j, subgroup, verify=verify, log=log)
        if fj.degree() > subgroup.order:
            raise ReductionEscape(
                f"degree {fj.degree()} exceeds subgroup order {subgroup.order} at j={j}")
        gens.append(fj)
        prov.append({"j": j, "degree": fj.degree(), "source": "layer-step",
                     "layer": layer, "subgroup_order": subgroup.order,
                     "search_degree": search["degree"], "trace_length": len(trace)})
        if verify:
            _verify_stage(G, subgroup, j, gens, log)

    if verify:
        _verify_layer_boundaries(G, structure, gens, log)
    return HilbertIdealResult(gens, "constructive", prov, G.order, verification=log)


def _verify_stage(G, subgroup, j, gens, log):
    """The ideal of subgroup-invariants inside (x_1..x_j)S agrees with (f_1..f_j)
    in all degrees up to the largest generator degree."""
    gb = groebner(gens)
    eng = engine_for(subgroup)
    cap = max(g.degree() for g in gens)
    ring = G.ring
    for d in range(1, cap + 1):
        sliced = eng.invariant_slice(d, j)
        for i in range(sliced.shape[0]):
            f = poly_from_vector(ring, d, sliced[i])
            if not normal_form(f, gb).is_zero():
                raise ReductionEscape(
                    f"invariant of degree {d} in (x_1..x_{j}) escapes the computed ideal")
            log["stage_membership_checks"] = log.get("stage_membership_checks", 0) + 1


def _verify_layer_boundaries(G, structure, gens, log):
    """Layer-boundary cross-checks against independently computed restrictions.

    At j = i_k the chain subgroup fixes every later variable, so its
    Hilbert ideal is extended from k[x_1..x_j]; compare (f_1..f_j) against
    hilbert_ideal_bruteforce of the restricted action, and check that the
    next chain subgroup restricts to the same matrix group.
    """
    seq = structure.sequence
    for k in range(1, len(seq)):
        jk = seq[k]
        if jk >= G.n:
            continue  # final comparison happens against the full-ring oracle
        subgroup = structure.chain[k - 1]
        restricted = restrict_group(subgroup, jk)
        small = restricted.ring
        oracle = hilbert_ideal_bruteforce(restricted)
        ours = [truncate_poly(f, jk, small) for f in gens[:jk]]
        if not ideal_equal(ours, list(oracle.generators)):
            raise ReductionEscape(
                f"layer boundary at j={jk}: restricted Hilbert ideal mismatch")
        log["boundary_ideal_checks"] = log.get("boundary_ideal_checks", 0) + 1
        nxt = structure.chain[k] if k < len(structure.chain) else None
        if nxt is not None:
            blocks_a = {tuple(row[:jk] for row in g.matrix[:jk]) for g in subgroup.elements}
            blocks_b = {tuple(row[:jk] for row in g.matrix[:jk]) for g in nxt.elements}
            if blocks_a != blocks_b:
                raise ReductionEscape(
                    f"chain subgroups act differently on k[x_1..x_{jk}]")
            log["chain_restriction_checks"] = log.get("chain_restriction_checks", 0) + 1


class PolynomialityReport:
    __slots__ = ("verdict", "degree_product", "group_order", "ci")

    def __init__(self, verdict, degree_product, group_order, ci):
        self.verdict = verdict
        self.degree_product = degree_product
        self.group_order = group_order
        self.ci = ci

    def as_dict(self):
        return {"verdict": self.verdict, "degree_product": self.degree_product,
                "group_order": self.group_order, "complete_intersection": self.ci}

    def __repr__(self):
        return f"PolynomialityReport({self.verdict}, product={self.degree_product})"


def polynomiality_report(G, result):
    """Degree-product criterion on a complete-intersection Hilbert ideal.

    product == |G| certifies a polynomial invariant ring; product > |G|
    certifies it is not (the coinvariants are too big).  Anything else is
    undetermined; the converse directions are never asserted.
    """
    from .gbasis import is_complete_intersection
    ci = is_complete_intersection(list(result.generators))
    product = result.degree_product()
    if not ci:
        verdict = "undetermined"
    elif product == G.order:
        verdict = "polynomial"
    elif product > G.order:
        verdict = "not_polynomial"
    else:
        verdict = "undetermined"
    return PolynomialityReport(verdict, product, G.order, ci)
