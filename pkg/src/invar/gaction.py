"""Matrix p-groups acting on the dual space and on polynomials.

A group element stores the n x n matrix of its action on the variable
basis: row i holds the coefficients of g(x_i).  With that convention the
matrix of a composite g*h (apply h's substitution, then g's) is
M_h . M_g, which the composition unit test pins down.

Closure is frontier breadth-first search; failed subgroup closures stay
cheap because a proper subgroup has index at least p.
"""

from __future__ import annotations

from .ffield import FieldElement
from .mpoly import IndexOutOfRange, Polynomial, RingSpec

DEFAULT_CLOSURE_CAP = 2_000_000


class CapExceeded(RuntimeError):
    pass


class NotAPGroup(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class NotUnipotent(ValueError):
    pass


class NotInvertible(ValueError):
    pass


# -- small dense matrix helpers over field codes ----------------------------------

def mat_identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(field, A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = [0] * n
        Ai = A[i]
        for k in range(n):
            a = Ai[k]
            if a:
                Bk = B[k]
                for j in range(n):
                    if Bk[j]:
                        row[j] = field.add(row[j], field.mul(a, Bk[j]))
        out.append(tuple(row))
    return tuple(out)


def mat_inv(field, A):
    n = len(A)
    M = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise NotInvertible("singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = field.inv(M[col][col])
        M[col] = [field.mul(inv, v) for v in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                c = M[r][col]
                M[r] = [field.sub(v, field.mul(c, w)) for v, w in zip(M[r], M[col])]
    return tuple(tuple(row[n:]) for row in M)


def mat_rank(field, A):
    M = [list(row) for row in A]
    rank = 0
    ncols = len(A[0]) if A else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = field.inv(M[rank][col])
        M[rank] = [field.mul(inv, v) for v in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col]:
                c = M[r][col]
                M[r] = [field.sub(v, field.mul(c, w)) for v, w in zip(M[r], M[rank])]
        rank += 1
    return rank


class GroupElement:
    """Invertible matrix over F_{p^k}, rows giving the images of x_1..x_n."""

    __slots__ = ("field", "n", "matrix")

    def __init__(self, field, matrix):
        self.field = field
        self.matrix = tuple(tuple(int(c) for c in row) for row in matrix)
        self.n = len(self.matrix)
        if any(len(row) != self.n for row in self.matrix):
            raise DimensionMismatch("matrix must be square")
        mat_inv(field, self.matrix)  # raises NotInvertible

    @classmethod
    def identity(cls, field, n):
        return cls(field, mat_identity(n))

    @classmethod
    def from_rows(cls, field, rows):
        """Rows of FieldElements / ints / coefficient lists."""
        mat = []
        for row in rows:
            mat.append([field.element(v).code if not isinstance(v, FieldElement)
                        else v.code for v in row])
        return cls(field, mat)

    def is_identity(self):
        return self.matrix == mat_identity(self.n)

    def __mul__(self, other):
        """Composite: (self * other) substitutes other first, then self."""
        if self.field != other.field or self.n != other.n:
            raise DimensionMismatch("elements from different representations")
        return GroupElement(self.field, mat_mul(self.field, other.matrix, self.matrix))

    def inverse(self):
        return GroupElement(self.field, mat_inv(self.field, self.matrix))

    def is_unipotent(self):
        """All eigenvalues 1, i.e. (g - 1)^n = 0."""
        field = self.field
        A = tuple(tuple(field.sub(v, 1 if i == j else 0) for j, v in enumerate(row))
                  for i, row in enumerate(self.matrix))
        P = A
        for _ in range(self.n - 1):
            P = mat_mul(field, P, A)
        return all(all(v == 0 for v in row) for row in P)

    def is_lower_unitriangular(self):
        M = self.matrix
        return all(M[i][i] == 1 and all(M[i][j] == 0 for j in range(i + 1, self.n))
                   for i in range(self.n))

    def __eq__(self, other):
        return (isinstance(other, GroupElement) and self.field == other.field
                and self.matrix == other.matrix)

    def __hash__(self):
        return hash((self.field.p, self.field.modulus, self.matrix))

    def __repr__(self):
        rows = "; ".join(",".join(str(self.field.from_code(c)) for c in row)
                         for row in self.matrix)
        return f"GroupElement[{rows}]"


class GroupTable:
    """Fully enumerated finite matrix group with index-level products."""

    def __init__(self, elements, gens, ring):
        self.elements = tuple(elements)
        self.gens = tuple(gens)
        self.ring = ring
        self.index = {g.matrix: i for i, g in enumerate(self.elements)}
        self._prod = {}

    @property
    def order(self):
        return len(self.elements)

    @property
    def field(self):
        return self.ring.field

    @property
    def n(self):
        return self.ring.n

    def identity_index(self):
        return self.index[mat_identity(self.n)]

    def prod_index(self, i, j):
        key = (i, j)
        out = self._prod.get(key)
        if out is None:
            m = mat_mul(self.field, self.elements[j].matrix, self.elements[i].matrix)
            out = self.index[m]
            self._prod[key] = out
        return out

    def subgroup_closure(self, indices):
        """Indices of <elements[i] for i in indices>; BFS over the index table."""
        seen = {self.identity_index()}
        frontier = [self.identity_index()]
        gens = sorted(set(indices))
        while frontier:
            nxt = []
            for i in frontier:
                for j in gens:
                    k = self.prod_index(i, j)
                    if k not in seen:
                        seen.add(k)
                        nxt.append(k)
            if len(seen) == self.order:
                break
            frontier = nxt
        return frozenset(seen)

    def subgroup_table(self, indices):
        """GroupTable for the subgroup generated by the given element indices."""
        closure = sorted(self.subgroup_closure(indices))
        els = [self.elements[i] for i in closure]
        gens = [self.elements[i] for i in sorted(set(indices))]
        return GroupTable(els, gens or [self.elements[self.identity_index()]], self.ring)

    def __repr__(self):
        return f"GroupTable(order={self.order}, n={self.n})"


def group_closure(gens, cap=DEFAULT_CLOSURE_CAP, ring=None):
    """Breadth-first closure of the generating set under multiplication."""
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    field, n = gens[0].field, gens[0].n
    for g in gens:
        if g.field != field or g.n != n:
            raise DimensionMismatch("generators from different representations")
    if ring is None:
        ring = RingSpec(field, n)
    ident = GroupElement.identity(field, n)
    seen = {ident.matrix: ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                prod = a * g
                if prod.matrix not in seen:
                    if len(seen) >= cap:
                        raise CapExceeded(f"group closure exceeded cap {cap}")
                    seen[prod.matrix] = prod
                    nxt.append(prod)
        frontier = nxt
    elements = list(seen.values())
    order = len(elements)
    p = field.p
    while order % p == 0:
        order //= p
    if order != 1:
        raise NotAPGroup(f"group order {len(elements)} is not a power of {p}")
    return GroupTable(elements, gens, ring)


# -- action on polynomials ---------------------------------------------------------

def act(g, f):
    """Substitute row i of g for x_i; a graded algebra endomorphism."""
    ring = f.ring
    if ring.field != g.field or ring.n != g.n:
        raise DimensionMismatch("group element and polynomial dimensions differ")
    if g.is_identity() or f.is_zero():
        return f
    rows = [ring.linear_form(g.matrix[i]) for i in range(ring.n)]
    pow_cache = [{0: ring.one(), 1: rows[i]} for i in range(ring.n)]

    def row_pow(i, e):
        cache = pow_cache[i]
        if e not in cache:
            half = row_pow(i, e // 2)
            sq = half * half
            cache[e] = sq if e % 2 == 0 else sq * rows[i]
        return cache[e]

    out = ring.zero()
    field = ring.field
    for exps, c in f.terms.items():
        term = ring.scalar(field.from_code(c))
        for i, e in enumerate(exps):
            if e:
                term = term * row_pow(i, e)
        out = out + term
    return out


def trace(f, G):
    """Transfer map: sum of g(f) over the whole group."""
    out = f.ring.zero()
    for g in G.elements:
        out = out + act(g, f)
    return out


def orbit_product(j, G):
    """Product of the distinct images of x_j; invariant of degree = orbit size."""
    ring = G.ring
    if not 1 <= j <= ring.n:
        raise IndexOutOfRange(f"variable index {j} outside 1..{ring.n}")
    orbit = {}
    for g in G.elements:
        img = ring.linear_form(g.matrix[j - 1])
        orbit[tuple(sorted(img.terms.items()))] = img
    out = ring.one()
    for key in sorted(orbit):
        out = out * orbit[key]
    return out


def orbit_size(j, G):
    return len({tuple(g.matrix[j - 1]) for g in G.elements})


# -- triangularization --------------------------------------------------------------

def triangularize(gens):
    """Basis change making every generator lower unitriangular.

    Builds the flag one variable at a time: at each stage collect the
    vectors moved into the current span by every generator, prefer the
    first standard basis vector that qualifies (so already-triangular
    input returns the identity), otherwise take the first echelon row.
    Returns (change_matrix, conjugated_generators); new variables are
    y_i = sum_j C[i][j] x_j and conjugated matrices are C M C^{-1}.
    """
    gens = list(gens)
    field, n = gens[0].field, gens[0].n
    for g in gens:
        if not g.is_unipotent():
            raise NotUnipotent(f"generator is not unipotent: {g!r}")

    deltas = []
    for g in gens:
        deltas.append(tuple(tuple(field.sub(v, 1 if i == j else 0)
                                  for j, v in enumerate(row))
                            for i, row in enumerate(g.matrix)))

    chosen = []  # rows of the change matrix, echelonized copy alongside
    ech = []

    def reduce_vec(v):
        v = list(v)
        for row, piv in ech:
            c = v[piv]
            if c:
                v = [field.sub(a, field.mul(c, b)) for a, b in zip(v, row)]
        return v

    def add_chosen(v):
        chosen.append(tuple(v))
        w = reduce_vec(v)
        piv = next(i for i, c in enumerate(w) if c)
        inv = field.inv(w[piv])
        w = [field.mul(inv, c) for c in w]
        ech.append((w, piv))

    def in_span(v):
        return not any(reduce_vec(v))

    def vec_mat(v, M):
        out = [0] * n
        for i, c in enumerate(v):
            if c:
                for j in range(n):
                    if M[i][j]:
                        out[j] = field.add(out[j], field.mul(c, M[i][j]))
        return out

    for _ in range(n):
        # K = { w : w (g - 1) lies in the current span, for every generator }
        cols = []
        for t in range(n):
            e_t = [0] * n
            e_t[t] = 1
            stacked = []
            for D in deltas:
                stacked.extend(reduce_vec(vec_mat(e_t, D)))
            cols.append(stacked)
        K = _kernel_cols(field, cols)
        pick = None
        for t in range(n):
            e_t = tuple(1 if i == t else 0 for i in range(n))
            if _vec_in_rowspan(field, K, e_t) and not in_span(e_t):
                pick = e_t
                break
        if pick is None:
            for row in K:
                if not in_span(row):
                    pick = row
                    break
        if pick is None:
            raise NotUnipotent("no fixed vector on the quotient; action not unipotent")
        add_chosen(pick)

    C = tuple(chosen)
    Cinv = mat_inv(field, C)
    new_gens = []
    for g in gens:
        M = mat_mul(field, mat_mul(field, C, g.matrix), Cinv)
        h = GroupElement(field, M)
        if not h.is_lower_unitriangular():
            raise NotUnipotent("conjugated generator failed triangularity")
        new_gens.append(h)
    return C, new_gens


def _kernel_cols(field, cols):
    """Rows spanning {w : sum_t w_t cols[t] = 0}; cols indexed by coordinate."""
    n = len(cols)
    m = len(cols[0]) if cols else 0
    # RREF of the m x n matrix whose columns are the constraints on w
    M = [[cols[t][r] for t in range(n)] for r in range(m)]
    rank = 0
    pivots = []
    for col in range(n):
        piv = next((r for r in range(rank, len(M)) if M[r][col]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = field.inv(M[rank][col])
        M[rank] = [field.mul(inv, v) for v in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col]:
                c = M[r][col]
                M[r] = [field.sub(v, field.mul(c, w)) for v, w in zip(M[r], M[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = field.neg(M[r][fc])
        basis.append(tuple(v))
    return basis


def _vec_in_rowspan(field, rows, v):
    work = [list(r) for r in rows]
    v = list(v)
    rank = 0
    n = len(v)
    for col in range(n):
        piv = next((r for r in range(rank, len(work)) if work[r][col]), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = field.inv(work[rank][col])
        work[rank] = [field.mul(inv, a) for a in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                c = work[r][col]
                work[r] = [field.sub(a, field.mul(c, b)) for a, b in zip(work[r], work[rank])]
        if v[col]:
            c = v[col]
            v = [field.sub(a, field.mul(c, b)) for a, b in zip(v, work[rank])]
        rank += 1
    return not any(v)


# -- pseudo-reflections ---------------------------------------------------------------

class PseudoReflectionReport:
    __slots__ = ("reflection_indices", "generated_by_reflections")

    def __init__(self, reflection_indices, generated_by_reflections):
        self.reflection_indices = tuple(reflection_indices)
        self.generated_by_reflections = generated_by_reflections

    def __repr__(self):
        return (f"PseudoReflectionReport({len(self.reflection_indices)} reflections, "
                f"generates={self.generated_by_reflections})")


def pseudo_reflections(G):
    """Flag rank-one elements and test whether they generate the group."""
    field = G.field
    flagged = []
    for i, g in enumerate(G.elements):
        A = tuple(tuple(field.sub(v, 1 if r == c else 0) for c, v in enumerate(row))
                  for r, row in enumerate(g.matrix))
        if mat_rank(field, A) == 1:
            flagged.append(i)
    if flagged:
        closure = G.subgroup_closure(flagged)
        verdict = len(closure) == G.order
    else:
        verdict = G.order == 1
    return PseudoReflectionReport(flagged, verdict)
