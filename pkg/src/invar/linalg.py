"""Dense exact linear algebra over small finite fields, numpy-backed.

Internal plumbing for the invariant-space and graded-ideal computations:
matrices hold field element codes (int16 residues for prime fields,
uint16 table indices for extensions).  Row reduction is vectorized; for
prime fields matrix products go through float64 BLAS (entries < p and
accumulation lengths keep everything well inside exact float range).
"""

from __future__ import annotations

import numpy as np


class GFLinAlg:
    """Row-reduction, kernels and products over one FieldSpec."""

    def __init__(self, spec):
        self.spec = spec
        self.prime = spec.k == 1
        if not self.prime:
            q = spec.q
            self._add_t = np.array(spec._add, dtype=np.uint16)
            self._mul_t = np.array(spec._mul, dtype=np.uint16)
            self._neg_t = np.array(spec._neg, dtype=np.uint16)
            self._inv_t = np.array(spec._inv, dtype=np.uint16)
            assert self._add_t.shape == (q, q)

    @property
    def dtype(self):
        return np.int16 if self.prime else np.uint16

    def zeros(self, shape):
        return np.zeros(shape, dtype=self.dtype)

    def asarray(self, rows):
        a = np.array(rows, dtype=self.dtype)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        return a

    # -- elementwise helpers -----------------------------------------------
    def addv(self, a, b):
        if self.prime:
            return (a + b) % self.spec.p
        return self._add_t[a, b]

    def subv(self, a, b):
        if self.prime:
            return (a - b) % self.spec.p
        return self._add_t[a, self._neg_t[b]]

    def scale(self, c, a):
        if self.prime:
            return (int(c) * a) % self.spec.p
        return self._mul_t[np.uint16(c), a]

    def mulv(self, a, b):
        if self.prime:
            return (a * b) % self.spec.p
        return self._mul_t[a, b]

    def inv_scalar(self, c):
        return self.spec.inv(int(c))

    # -- row reduction -------------------------------------------------------
    def rref(self, M):
        """Reduced row echelon form.  Returns (R, pivot column list).

        Zero rows are dropped; pivot entries are 1 and their columns are
        cleared above and below.  Deterministic: first nonzero column, first
        qualifying row.
        """
        M = M.copy()
        nrows, ncols = M.shape
        pivots = []
        r = 0
        for c in range(ncols):
            if r >= nrows:
                break
            col = M[r:, c]
            nz = np.nonzero(col)[0]
            if nz.size == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                M[[r, i]] = M[[i, r]]
            pv = int(M[r, c])
            if pv != 1:
                M[r] = self.scale(self.inv_scalar(pv), M[r])
            rows = np.nonzero(M[:, c])[0]
            rows = rows[rows != r]
            if rows.size:
                M[rows] = self.subv(M[rows], self._outer(M[rows, c], M[r]))
            pivots.append(c)
            r += 1
        return M[:r], pivots

    def _outer(self, col, row):
        if self.prime:
            return (col.astype(np.int64)[:, None] * row.astype(np.int64)[None, :]) % self.spec.p
        return self._mul_t[col[:, None], row[None, :]]

    def kernel(self, M):
        """Basis (as rows) of the right null space {x : M x = 0}."""
        ncols = M.shape[1]
        R, pivots = self.rref(M)
        free = [c for c in range(ncols) if c not in set(pivots)]
        if not free:
            return self.zeros((0, ncols))
        K = self.zeros((len(free), ncols))
        for idx, fc in enumerate(free):
            K[idx, fc] = 1
            for i, pc in enumerate(pivots):
                K[idx, pc] = self.spec.neg(int(R[i, fc]))
        return K

    def matmul(self, A, B):
        if self.prime:
            p = self.spec.p
            # exact: entries < p, inner dim * (p-1)^2 stays far below 2^53
            C = np.dot(A.astype(np.float64), B.astype(np.float64))
            return np.rint(C).astype(np.int64).__mod__(p).astype(self.dtype)
        n, m = A.shape
        m2, k = B.shape
        assert m == m2
        C = self.zeros((n, k))
        for j in range(m):
            col = A[:, j]
            nz = np.nonzero(col)[0]
            if nz.size == 0:
                continue
            C[nz] = self.addv(C[nz], self._mul_t[col[nz][:, None], B[j][None, :]])
        return C

    def rank(self, M):
        return self.rref(M)[0].shape[0]


class Echelon:
    """Incrementally maintained RREF row space over one GFLinAlg.

    add_row / add_rows report whether the rank grew, which is how callers
    detect genuinely new generators while keeping the originals intact.
    """

    def __init__(self, lin, ncols):
        self.lin = lin
        self.ncols = ncols
        self.rows = lin.zeros((0, ncols))
        self.pivots = []

    @property
    def rank(self):
        return self.rows.shape[0]

    def reduce(self, v):
        """Remainder of v against the current row space (v unchanged)."""
        lin = self.lin
        w = v.copy()
        for i, pc in enumerate(self.pivots):
            c = w[pc]
            if c:
                w = lin.subv(w, lin.scale(c, self.rows[i]))
        return w

    def contains(self, v):
        return not np.any(self.reduce(v))

    def add_row(self, v):
        """Insert v; returns True when the rank grew."""
        lin = self.lin
        w = self.reduce(v)
        nz = np.nonzero(w)[0]
        if nz.size == 0:
            return False
        pc = int(nz[0])
        c = int(w[pc])
        if c != 1:
            w = lin.scale(lin.inv_scalar(c), w)
        # clear the new pivot column in the existing rows
        col = self.rows[:, pc]
        hit = np.nonzero(col)[0]
        if hit.size:
            self.rows[hit] = lin.subv(self.rows[hit], lin._outer(col[hit], w))
        pos = 0
        while pos < len(self.pivots) and self.pivots[pos] < pc:
            pos += 1
        self.rows = np.vstack([self.rows[:pos], w[None, :], self.rows[pos:]])
        self.pivots.insert(pos, pc)
        return True

    def add_rows(self, M):
        grew = 0
        for i in range(M.shape[0]):
            if self.add_row(M[i]):
                grew += 1
        return grew
