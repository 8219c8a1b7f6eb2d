"""Smooth NLP container with derivative evaluation.

An Nlp bundles callbacks plus bounds:

    min f(z)   s.t.  cl <= g(z) <= cu,   lb <= z <= ub

Equality rows are those with cl == cu.  Callbacks are written against the
ad module, so gradients and Jacobians fall out of dual-number forward
sweeps through the very same code that computes values; structured
problems may install specialized derivative callbacks with a fixed
sparsity pattern (the values still come from dual propagation inside).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import sparse

from . import ad

__all__ = ["Nlp", "evaluate", "dense_lagrangian_hessian", "TripletAssembler"]


class TripletAssembler:
    """Fixed-pattern CSR assembly from repeated triplet contributions.

    Construct once from (rows, cols); afterwards ``csr(data)`` maps a data
    vector aligned with those triplets onto a CSR matrix with a stable
    pattern (duplicate positions are summed).
    """

    def __init__(self, rows, cols, shape):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        self.shape = shape
        order = np.lexsort((cols, rows))
        r_s, c_s = rows[order], cols[order]
        new = np.ones(order.size, dtype=bool)
        if order.size:
            new[1:] = (r_s[1:] != r_s[:-1]) | (c_s[1:] != c_s[:-1])
        slot = np.cumsum(new) - 1
        self.nnz = int(slot[-1]) + 1 if order.size else 0
        self._map = np.empty(order.size, dtype=np.int64)
        self._map[order] = slot
        u_rows = r_s[new]
        self.indices = c_s[new].astype(np.int32)
        counts = np.bincount(u_rows, minlength=shape[0])
        self.indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int32)

    def csr(self, data) -> sparse.csr_matrix:
        vals = np.zeros(self.nnz)
        np.add.at(vals, self._map, np.asarray(data, dtype=float))
        return sparse.csr_matrix((vals, self.indices.copy(), self.indptr.copy()), shape=self.shape)


@dataclass
class Nlp:
    n: int
    lb: np.ndarray
    ub: np.ndarray
    cl: np.ndarray
    cu: np.ndarray
    f: Callable
    g: Callable | None = None
    grad_f: Callable | None = None          # z -> (n,)
    jac_g: Callable | None = None           # z -> csr_matrix, fixed pattern
    hess_lag: Callable | None = None        # (z, lam_g) -> symmetric matrix (csr or dense)
    hess_kind: str = "exact"                # 'exact' | 'gauss-newton'
    name: str = "nlp"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lb = np.asarray(self.lb, dtype=float)
        self.ub = np.asarray(self.ub, dtype=float)
        self.cl = np.asarray(self.cl, dtype=float)
        self.cu = np.asarray(self.cu, dtype=float)
        if self.lb.shape != (self.n,) or self.ub.shape != (self.n,):
            raise ValueError("bound vectors must have length n")
        if self.cl.shape != self.cu.shape:
            raise ValueError("cl and cu must have equal length")
        if np.any(self.lb > self.ub) or np.any(self.cl > self.cu):
            raise ValueError("lower bounds must not exceed upper bounds")

    @property
    def m(self) -> int:
        return self.cl.size

    # -- defaulted derivative evaluation ------------------------------------

    def eval_f(self, z) -> float:
        return float(ad.value_of(self.f(z)))

    def eval_g(self, z) -> np.ndarray:
        if self.g is None:
            return np.zeros(0)
        return np.asarray(ad.value_of(self.g(z)), dtype=float).reshape(-1)

    def eval_grad_f(self, z) -> np.ndarray:
        if self.grad_f is not None:
            return np.asarray(self.grad_f(z), dtype=float)
        return ad.gradient(self.f, z)

    def eval_jac_g(self, z) -> sparse.csr_matrix:
        if self.m == 0:
            return sparse.csr_matrix((0, self.n))
        if self.jac_g is not None:
            return self.jac_g(z)
        return sparse.csr_matrix(ad.jacobian(self.g, z))

    def eval_hess_lag(self, z, lam_g) -> sparse.csr_matrix:
        if self.hess_lag is not None:
            h = self.hess_lag(z, lam_g)
        else:
            h = dense_lagrangian_hessian(self, z, lam_g)
        if sparse.issparse(h):
            return h.tocsr()
        return sparse.csr_matrix(h)


def dense_lagrangian_hessian(nlp: Nlp, z, lam_g) -> np.ndarray:
    """sigma=1 Lagrangian Hessian via second-order duals (small problems)."""

    lam_g = np.asarray(lam_g, dtype=float)

    def lagr(zz):
        out = nlp.f(zz)
        if nlp.m > 0 and np.any(lam_g != 0.0):
            gz = nlp.g(zz)
            if isinstance(gz, (ad.Dual, ad.Dual2)):
                if gz.val.ndim == 0:
                    out = out + gz * float(lam_g[0])
                else:
                    out = out + (gz * lam_g).sum(axis=0)
            else:
                out = out + float(lam_g @ np.atleast_1d(np.asarray(gz, dtype=float)))
        return out

    return ad.hessian(lagr, np.asarray(z, dtype=float))


def evaluate(nlp: Nlp, z) -> dict:
    """Objective, constraints and first derivatives at z, with finite checks."""
    z = np.asarray(z, dtype=float)
    if z.shape != (nlp.n,):
        raise ValueError(f"point has length {z.size}, expected {nlp.n}")
    if not np.isfinite(z).all():
        bad = int(np.flatnonzero(~np.isfinite(z))[0])
        raise ValueError(f"non-finite entry in decision vector at index {bad}")
    out = {
        "f": nlp.eval_f(z),
        "g": nlp.eval_g(z),
        "grad_f": nlp.eval_grad_f(z),
        "jac_g": nlp.eval_jac_g(z),
    }
    if not np.isfinite(out["f"]):
        raise ValueError("non-finite objective value")
    for key in ("g", "grad_f"):
        arr = out[key]
        if arr.size and not np.isfinite(arr).all():
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise ValueError(f"non-finite {key} entry at index {bad}")
    if out["jac_g"].nnz and not np.isfinite(out["jac_g"].data).all():
        coo = out["jac_g"].tocoo()
        bad = int(np.flatnonzero(~np.isfinite(coo.data))[0])
        raise ValueError(
            f"non-finite Jacobian entry at row {coo.row[bad]}, variable {coo.col[bad]}"
        )
    return out
