"""Sparse LDL^T factorization for symmetric quasi-definite KKT systems.

Static-pattern left-looking factorization with 1x1 pivots and no
numerical pivoting: the interior-point caller keeps the matrix
factorizable through primal/dual regularization and uses the returned
inertia (sign counts of D) to decide when to regularize.  The
fill-reducing ordering (reverse Cuthill-McKee) and the symbolic pattern
are computed once per sparsity structure; numeric refactorization reuses
them, which keeps repeated solves deterministic and fast (hot loops are
numba-compiled).
"""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy import sparse
from scipy.sparse.csgraph import reverse_cuthill_mckee

__all__ = ["SymbolicLDLT"]


@njit(cache=True)
def _etree_counts(n, Bp, Bi):
    """Elimination tree and L column counts from lower-triangle CSC pattern."""
    parent = np.full(n, -1, dtype=np.int64)
    flag = np.full(n, -1, dtype=np.int64)
    lnz = np.zeros(n, dtype=np.int64)
    for j in range(n):
        flag[j] = j
        for p in range(Bp[j], Bp[j + 1]):
            i = Bi[p]  # strictly-upper entry: i < j
            while flag[i] != j:
                if parent[i] == -1:
                    parent[i] = j
                lnz[i] += 1
                flag[i] = j
                i = parent[i]
    return parent, lnz


@njit(cache=True)
def _fill_pattern(n, Bp, Bi, parent, Lp):
    flag = np.full(n, -1, dtype=np.int64)
    fill = Lp[:-1].copy()
    Li = np.zeros(Lp[n], dtype=np.int64)
    for j in range(n):
        flag[j] = j
        for p in range(Bp[j], Bp[j + 1]):
            i = Bi[p]
            while flag[i] != j:
                Li[fill[i]] = j
                fill[i] += 1
                flag[i] = j
                i = parent[i]
    return Li


@njit(cache=True)
def _factor(n, Bp, Bi, Bx, Lp, Li, Lx, D, zero_tol):
    """Left-looking LDLT; Bp/Bi/Bx = lower-triangle CSC incl. diagonal first."""
    w = np.zeros(n)
    first = np.zeros(n, dtype=np.int64)
    head = np.full(n, -1, dtype=np.int64)
    nxt = np.full(n, -1, dtype=np.int64)
    n_pos = 0
    n_neg = 0
    for j in range(n):
        dj = 0.0
        for p in range(Bp[j], Bp[j + 1]):
            i = Bi[p]
            if i == j:
                dj = Bx[p]
            else:
                w[i] = Bx[p]
        k = head[j]
        head[j] = -1
        while k != -1:
            nk = nxt[k]
            p = first[k]
            ljk = Lx[p]
            alpha = ljk * D[k]
            dj -= alpha * ljk
            for p2 in range(p + 1, Lp[k + 1]):
                w[Li[p2]] -= alpha * Lx[p2]
            first[k] = p + 1
            if p + 1 < Lp[k + 1]:
                r = Li[p + 1]
                nxt[k] = head[r]
                head[r] = k
            k = nk
        D[j] = dj
        if abs(dj) <= zero_tol:
            # zero the rest so a retry starts clean
            for p in range(Lp[j], Lp[j + 1]):
                w[Li[p]] = 0.0
            return -(j + 1), n_pos, n_neg
        if dj > 0.0:
            n_pos += 1
        else:
            n_neg += 1
        inv = 1.0 / dj
        for p in range(Lp[j], Lp[j + 1]):
            i = Li[p]
            Lx[p] = w[i] * inv
            w[i] = 0.0
        first[j] = Lp[j]
        if Lp[j] < Lp[j + 1]:
            r = Li[Lp[j]]
            nxt[j] = head[r]
            head[r] = j
    return 0, n_pos, n_neg


@njit(cache=True)
def _solve(n, Lp, Li, Lx, D, b):
    x = b.copy()
    for j in range(n):
        xj = x[j]
        for p in range(Lp[j], Lp[j + 1]):
            x[Li[p]] -= Lx[p] * xj
    for j in range(n):
        x[j] /= D[j]
    for j in range(n - 1, -1, -1):
        s = x[j]
        for p in range(Lp[j], Lp[j + 1]):
            s -= Lx[p] * x[Li[p]]
        x[j] = s
    return x


class SymbolicLDLT:
    """Reusable symbolic factorization of a fixed symmetric pattern.

    Parameters
    ----------
    rows, cols : int arrays naming the nonzero positions of the symmetric
        matrix (any mix of upper/lower/duplicates; diagonal entries are
        added automatically).  ``factor`` later consumes a data vector
        aligned with these triplets.
    n : matrix dimension.
    """

    def __init__(self, rows, cols, n: int, use_rcm: bool = True):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        self.n = n
        pattern = sparse.coo_matrix(
            (np.ones(rows.size + n), (np.r_[rows, np.arange(n)], np.r_[cols, np.arange(n)])),
            shape=(n, n),
        ).tocsr()
        pattern = pattern + pattern.T
        perm = reverse_cuthill_mckee(pattern, symmetric_mode=True).astype(np.int64) if use_rcm else np.arange(n, dtype=np.int64)
        self.perm = perm
        self.iperm = np.empty(n, dtype=np.int64)
        self.iperm[perm] = np.arange(n)

        # canonical upper triplets in the permuted ordering, with a map
        # from input triplets (plus implicit diagonal) onto unique slots
        pr = self.iperm[np.r_[rows, np.arange(n)]]
        pc = self.iperm[np.r_[cols, np.arange(n)]]
        hi = np.maximum(pr, pc)
        lo = np.minimum(pr, pc)
        order = np.lexsort((lo, hi))  # sort by column=hi, then row=lo
        lo_s, hi_s = lo[order], hi[order]
        new_entry = np.ones(order.size, dtype=bool)
        new_entry[1:] = (lo_s[1:] != lo_s[:-1]) | (hi_s[1:] != hi_s[:-1])
        slot_of_sorted = np.cumsum(new_entry) - 1
        self.nnz_unique = int(slot_of_sorted[-1]) + 1
        self._map = np.empty(order.size, dtype=np.int64)
        self._map[order] = slot_of_sorted
        self._map_input = self._map[: rows.size]
        self._map_diag = self._map[rows.size:]
        self._u_lo = lo_s[new_entry]
        self._u_hi = hi_s[new_entry]

        # upper CSC of unique pattern: columns = hi, rows = lo (lo <= hi)
        counts = np.bincount(self._u_hi, minlength=n)
        Up = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        # entries are already sorted by (hi, lo): rows ascending per column
        Ui = self._u_lo.astype(np.int64)

        # strictly-upper pattern for the etree walks
        Sp = np.zeros(n + 1, dtype=np.int64)
        Si_list = []
        for j in range(n):
            seg = Ui[Up[j]: Up[j + 1]]
            seg = seg[seg != j]
            Si_list.append(seg)
            Sp[j + 1] = Sp[j] + seg.size
        Si = np.concatenate(Si_list) if Si_list else np.zeros(0, dtype=np.int64)

        parent, lnz = _etree_counts(n, Sp, Si.astype(np.int64))
        self.Lp = np.concatenate([[0], np.cumsum(lnz)]).astype(np.int64)
        self.Li = _fill_pattern(n, Sp, Si.astype(np.int64), parent, self.Lp)
        # sort row indices within each L column (fill order is by j, already ascending)
        self.Lx = np.zeros(self.Lp[-1])
        self.D = np.zeros(n)

        # lower-CSC layout of the assembled matrix for the numeric phase:
        # column j holds the diagonal first, then rows > j
        lo_l, hi_l = self._u_lo, self._u_hi  # entry at (row=lo, col=hi) upper
        # lower CSC: column = lo, row = hi, diagonal entry first
        order_l = np.lexsort((np.where(hi_l == lo_l, -1, hi_l), lo_l))
        self._lower_order = order_l
        counts_l = np.bincount(lo_l, minlength=n)
        self.Bp = np.concatenate([[0], np.cumsum(counts_l)]).astype(np.int64)
        self.Bi = hi_l[order_l].astype(np.int64)
        self._flops = float(np.sum((lnz + 1.0) ** 2))
        self._factored = False

    @property
    def flops_per_factor(self) -> float:
        return self._flops

    @property
    def nnz_l(self) -> int:
        return int(self.Lp[-1])

    def factor(self, data: np.ndarray, diag_add: np.ndarray | None = None, zero_tol: float = 1e-30):
        """Numeric factorization.

        data: values aligned with the constructor triplets (duplicates sum).
        diag_add: optional extra diagonal (original ordering).
        Returns (ok, n_pos, n_neg); ok=False flags a zero pivot.
        """
        vals = np.zeros(self.nnz_unique)
        np.add.at(vals, self._map_input, data)
        if diag_add is not None:
            np.add.at(vals, self._map_diag, diag_add)
        bx = vals[self._lower_order]
        status, n_pos, n_neg = _factor(
            self.n, self.Bp, self.Bi, bx, self.Lp, self.Li, self.Lx, self.D, zero_tol
        )
        self._factored = status == 0
        return self._factored, int(n_pos), int(n_neg)

    def solve(self, b: np.ndarray) -> np.ndarray:
        if not self._factored:
            raise RuntimeError("factorization is not available")
        x = _solve(self.n, self.Lp, self.Li, self.Lx, self.D, np.asarray(b, dtype=float)[self.perm])
        return x[self.iperm]
