"""Vectorized forward-mode automatic differentiation on dual numbers.

``Dual`` carries a value array of shape ``S`` and a derivative array of
shape ``S + (p,)`` holding partials along ``p`` seed directions.  All
arithmetic propagates both parts, so any function written with the
operators below (plus the module-level ``sqrt``/``exp``/... wrappers and
``concatenate``/``matvec`` for array plumbing) can be evaluated on plain
numpy arrays or on duals without modification.

``Dual2`` adds dense second-order propagation (value, gradient, Hessian)
and is meant for small problems where an exact Lagrangian Hessian is
worth its O(p^2) cost per operation.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Dual",
    "Dual2",
    "seed",
    "seed2",
    "jacobian",
    "gradient",
    "hessian",
    "sqrt",
    "exp",
    "log",
    "concatenate",
    "matvec",
    "value_of",
]


class Dual:
    """First-order dual: ``val`` shape S, ``der`` shape S + (p,)."""

    __slots__ = ("val", "der")
    # Keep numpy from consuming us in mixed expressions; defer to __r*__.
    __array_ufunc__ = None

    def __init__(self, val, der):
        self.val = np.asarray(val, dtype=float)
        self.der = np.asarray(der, dtype=float)

    @property
    def ndirs(self) -> int:
        return self.der.shape[-1]

    # -- helpers ---------------------------------------------------------

    def _split(self, other):
        if isinstance(other, Dual):
            return other.val, other.der
        return np.asarray(other, dtype=float), None

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        ov, od = self._split(other)
        val = self.val + ov
        der = self.der if od is None else self.der + od
        return Dual(val, _expand(der, val.shape))

    __radd__ = __add__

    def __sub__(self, other):
        ov, od = self._split(other)
        val = self.val - ov
        der = self.der if od is None else self.der - od
        return Dual(val, _expand(der, val.shape))

    def __rsub__(self, other):
        ov, _ = self._split(other)
        return Dual(ov - self.val, _expand(-self.der, (ov - self.val).shape))

    def __mul__(self, other):
        ov, od = self._split(other)
        val = self.val * ov
        der = self.der * ov[..., None]
        if od is not None:
            der = der + od * self.val[..., None]
        return Dual(val, _expand(der, val.shape))

    __rmul__ = __mul__

    def __truediv__(self, other):
        ov, od = self._split(other)
        val = self.val / ov
        der = self.der / ov[..., None]
        if od is not None:
            der = der - od * (val / ov)[..., None]
        return Dual(val, _expand(der, val.shape))

    def __rtruediv__(self, other):
        ov, _ = self._split(other)
        val = ov / self.val
        der = -self.der * (val / self.val)[..., None]
        return Dual(val, _expand(der, val.shape))

    def __pow__(self, k):
        if not isinstance(k, (int, float)):
            raise TypeError("dual ** dual is not supported")
        val = self.val**k
        der = self.der * (k * self.val ** (k - 1))[..., None]
        return Dual(val, der)

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __matmul__(self, other):
        raise TypeError("use matvec(A, x) with a constant matrix A")

    def __rmatmul__(self, other):
        return matvec(np.asarray(other, dtype=float), self)

    # -- structure -------------------------------------------------------

    def __getitem__(self, idx):
        return Dual(self.val[idx], self.der[idx])

    def sum(self, axis=0):
        return Dual(self.val.sum(axis=axis), self.der.sum(axis=axis))

    def __repr__(self):
        return f"Dual(val={self.val!r}, ndirs={self.ndirs})"


def _expand(der, val_shape):
    """Broadcast a derivative array up to val_shape + (p,)."""
    target = tuple(val_shape) + (der.shape[-1],)
    if der.shape == target:
        return der
    return np.broadcast_to(der, target).copy()


# -- elementary functions ------------------------------------------------


def sqrt(x):
    if isinstance(x, Dual):
        v = np.sqrt(x.val)
        return Dual(v, x.der * (0.5 / v)[..., None])
    if isinstance(x, Dual2):
        v = np.sqrt(x.val)
        return x._chain(v, 0.5 / v, -0.25 / v**3)
    return np.sqrt(x)


def exp(x):
    if isinstance(x, Dual):
        v = np.exp(x.val)
        return Dual(v, x.der * v[..., None])
    if isinstance(x, Dual2):
        v = np.exp(x.val)
        return x._chain(v, v, v)
    return np.exp(x)


def log(x):
    if isinstance(x, Dual):
        return Dual(np.log(x.val), x.der / x.val[..., None])
    if isinstance(x, Dual2):
        return x._chain(np.log(x.val), 1.0 / x.val, -1.0 / x.val**2)
    return np.log(x)


def concatenate(parts, axis=0):
    """Concatenate a mix of Dual/Dual2 and ndarray parts (zero derivatives filled in)."""
    if any(isinstance(p, Dual2) for p in parts):
        ndir = next(q.grad.shape[-1] for q in parts if isinstance(q, Dual2))
        vals, grads, hesses = [], [], []
        for q in parts:
            if isinstance(q, Dual2):
                vals.append(q.val)
                grads.append(q.grad)
                hesses.append(q.hess)
            else:
                a = np.asarray(q, dtype=float)
                vals.append(a)
                grads.append(np.zeros(a.shape + (ndir,)))
                hesses.append(np.zeros(a.shape + (ndir, ndir)))
        return Dual2(
            np.concatenate(vals, axis=axis),
            np.concatenate(grads, axis=axis),
            np.concatenate(hesses, axis=axis),
        )
    if not any(isinstance(p, Dual) for p in parts):
        return np.concatenate(parts, axis=axis)
    p = next(q.ndirs for q in parts if isinstance(q, Dual))
    vals, ders = [], []
    for q in parts:
        if isinstance(q, Dual):
            vals.append(q.val)
            ders.append(q.der)
        else:
            a = np.asarray(q, dtype=float)
            vals.append(a)
            ders.append(np.zeros(a.shape + (p,)))
    return Dual(np.concatenate(vals, axis=axis), np.concatenate(ders, axis=axis))


def stack_scalars(parts):
    """Stack scalar-like entries (Dual, Dual2 or float) into a 1-d value."""
    if any(isinstance(p, Dual2) for p in parts):
        ref = next(q for q in parts if isinstance(q, Dual2))
        p_n = ref.grad.shape[-1]
        vals, grads, hesses = [], [], []
        for q in parts:
            if isinstance(q, Dual2):
                vals.append(np.asarray(q.val, dtype=float))
                grads.append(q.grad)
                hesses.append(q.hess)
            else:
                vals.append(np.asarray(float(q)))
                grads.append(np.zeros(p_n))
                hesses.append(np.zeros((p_n, p_n)))
        return Dual2(np.stack(vals), np.stack(grads), np.stack(hesses))
    if not any(isinstance(p, Dual) for p in parts):
        return np.stack([np.asarray(p, dtype=float) for p in parts])
    ref = next(q for q in parts if isinstance(q, Dual))
    vals, ders = [], []
    for q in parts:
        if isinstance(q, Dual):
            vals.append(np.asarray(q.val, dtype=float))
            ders.append(q.der)
        else:
            v = np.broadcast_to(np.asarray(q, dtype=float), ref.val.shape)
            vals.append(v)
            ders.append(np.zeros(v.shape + (ref.ndirs,)))
    return Dual(np.stack(vals), np.stack(ders))


def matvec(a, x):
    """Constant matrix times (Dual or ndarray) vector, along the leading axis."""
    a = np.asarray(a, dtype=float)
    if isinstance(x, Dual):
        return Dual(np.tensordot(a, x.val, axes=(1, 0)), np.tensordot(a, x.der, axes=(1, 0)))
    return np.tensordot(a, x, axes=(1, 0))


def value_of(x):
    if isinstance(x, (Dual, Dual2)):
        return x.val
    return np.asarray(x, dtype=float)


# -- seeding and extraction ----------------------------------------------


def seed(x):
    """Seed a 1-d array with the identity: returns Dual tracking d/dx_i."""
    x = np.asarray(x, dtype=float)
    return Dual(x, np.eye(x.size))


def jacobian(f, x):
    """Dense Jacobian of f at x via one vector-mode forward sweep."""
    out = f(seed(x))
    if isinstance(out, Dual):
        return out.der.reshape(out.val.size, x.size) if out.val.ndim else out.der[None, :]
    return np.zeros((np.asarray(out).size, np.asarray(x).size))


def gradient(f, x):
    out = f(seed(x))
    if isinstance(out, Dual):
        return np.asarray(out.der, dtype=float).reshape(-1)
    return np.zeros(np.asarray(x).size)


# -- second order ---------------------------------------------------------


class Dual2:
    """Second-order dual: scalar-shaped val, grad (p,), hess (p, p).

    Supports the operations needed for Lagrangian Hessians of small dense
    problems.  Shapes: val S, grad S+(p,), hess S+(p,p).
    """

    __slots__ = ("val", "grad", "hess")
    __array_ufunc__ = None

    def __init__(self, val, grad, hess):
        self.val = np.asarray(val, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    def _split(self, other):
        if isinstance(other, Dual2):
            return other.val, other.grad, other.hess
        return np.asarray(other, dtype=float), None, None

    def _chain(self, v, d1, d2):
        """Apply a scalar function with value v, first/second derivative d1, d2."""
        g = self.grad * d1[..., None]
        outer = self.grad[..., :, None] * self.grad[..., None, :]
        h = self.hess * d1[..., None, None] + outer * d2[..., None, None]
        return Dual2(v, g, h)

    def __add__(self, other):
        ov, og, oh = self._split(other)
        if og is None:
            return Dual2(self.val + ov, _expand(self.grad, (self.val + ov).shape), _expand2(self.hess, (self.val + ov).shape))
        return Dual2(self.val + ov, self.grad + og, self.hess + oh)

    __radd__ = __add__

    def __sub__(self, other):
        ov, og, oh = self._split(other)
        if og is None:
            return Dual2(self.val - ov, _expand(self.grad, (self.val - ov).shape), _expand2(self.hess, (self.val - ov).shape))
        return Dual2(self.val - ov, self.grad - og, self.hess - oh)

    def __rsub__(self, other):
        ov, _, _ = self._split(other)
        return Dual2(ov - self.val, -self.grad, -self.hess)

    def __mul__(self, other):
        ov, og, oh = self._split(other)
        val = self.val * ov
        if og is None:
            return Dual2(val, self.grad * ov[..., None], self.hess * ov[..., None, None])
        g = self.grad * ov[..., None] + og * self.val[..., None]
        cross = self.grad[..., :, None] * og[..., None, :]
        h = (
            self.hess * ov[..., None, None]
            + oh * self.val[..., None, None]
            + cross
            + np.swapaxes(cross, -1, -2)
        )
        return Dual2(val, g, h)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual2):
            return self * other ** (-1)
        ov = np.asarray(other, dtype=float)
        return self * (1.0 / ov)

    def __rtruediv__(self, other):
        return np.asarray(other, dtype=float) * self ** (-1)

    def __pow__(self, k):
        v = self.val**k
        return self._chain(v, k * self.val ** (k - 1), k * (k - 1) * self.val ** (k - 2))

    def __neg__(self):
        return Dual2(-self.val, -self.grad, -self.hess)

    def __getitem__(self, idx):
        return Dual2(self.val[idx], self.grad[idx], self.hess[idx])

    def sum(self, axis=0):
        return Dual2(self.val.sum(axis=axis), self.grad.sum(axis=axis), self.hess.sum(axis=axis))

    def __rmatmul__(self, other):
        a = np.asarray(other, dtype=float)
        return Dual2(
            np.tensordot(a, self.val, axes=(1, 0)),
            np.tensordot(a, self.grad, axes=(1, 0)),
            np.tensordot(a, self.hess, axes=(1, 0)),
        )


def _expand2(hess, val_shape):
    target = tuple(val_shape) + hess.shape[-2:]
    if hess.shape == target:
        return hess
    return np.broadcast_to(hess, target).copy()


def seed2(x):
    x = np.asarray(x, dtype=float)
    n = x.size
    return Dual2(x, np.eye(n), np.zeros((n, n, n)))


def hessian(f, x):
    """Dense Hessian of a scalar function via second-order duals."""
    out = f(seed2(x))
    if isinstance(out, Dual2):
        return np.asarray(out.hess, dtype=float)
    return np.zeros((np.asarray(x).size,) * 2)
