"""Radau collocation: nodes, differentiation matrix, quadrature weights.

Nodes are the right-Radau points on (0, 1] (last node exactly 1), i.e.
the roots of P_d(2t-1) - P_{d-1}(2t-1) with P_k the Legendre polynomials.
The induced quadrature is exact for polynomials up to degree 2d-2, and
collocation with these nodes is the stiffly accurate Radau IIA scheme of
order 2d-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre

__all__ = ["radau_points", "CollocationScheme", "Grid", "mpc_grid"]

MAX_DEGREE = 5


def radau_points(d: int) -> np.ndarray:
    """Collocation nodes tau_1 < ... < tau_d = 1 on (0, 1]."""
    if not 1 <= d <= MAX_DEGREE:
        raise ValueError(f"collocation degree must be in 1..{MAX_DEGREE}, got {d}")
    if d == 1:
        return np.array([1.0])
    # coefficients of P_d - P_{d-1} in the Legendre basis, roots in [-1, 1]
    coeffs = np.zeros(d + 1)
    coeffs[d] = 1.0
    coeffs[d - 1] = -1.0
    roots = legendre.legroots(coeffs)
    nodes = np.sort((np.real(roots) + 1.0) / 2.0)
    nodes[-1] = 1.0
    return nodes


def _lagrange_basis(points: np.ndarray):
    """Return the Lagrange polynomials over the given points as poly1d."""
    polys = []
    for j in range(points.size):
        pj = np.poly1d([1.0])
        for m in range(points.size):
            if m == j:
                continue
            pj = pj * np.poly1d([1.0, -points[m]]) / (points[j] - points[m])
        polys.append(pj)
    return polys


@dataclass
class CollocationScheme:
    """Matrices for one normalized interval [0, 1] at degree d.

    With node states X_0 (interval start) and X_1..X_d, the collocation
    equations are  sum_r dmat[j, r] * X_r = h * f(X_j)  for j = 1..d, and
    the quadrature rule integrates g over the interval as
    h * sum_j quad[j] * g(X_j).
    """

    d: int
    nodes: np.ndarray = field(init=False)
    dmat: np.ndarray = field(init=False)     # (d, d+1) derivative of basis at nodes
    quad: np.ndarray = field(init=False)     # (d,) Radau quadrature weights

    def __post_init__(self):
        self.nodes = radau_points(self.d)
        pts = np.concatenate([[0.0], self.nodes])
        basis = _lagrange_basis(pts)
        self.dmat = np.array([
            [np.polyder(basis[r])(self.nodes[j]) for r in range(self.d + 1)]
            for j in range(self.d)
        ])
        node_basis = _lagrange_basis(self.nodes)
        self.quad = np.array([np.polyint(bj)(1.0) - np.polyint(bj)(0.0) for bj in node_basis])

    def interp_weights(self, tau: float) -> np.ndarray:
        """Weights over (X_0, X_1..X_d) evaluating the state polynomial at tau."""
        pts = np.concatenate([[0.0], self.nodes])
        return np.array([bj(tau) for bj in _lagrange_basis(pts)])


@dataclass
class Grid:
    """Nonuniform control grid of the 24 h horizon."""

    n_short: int = 6
    dt_short: float = 600.0
    n_long: int = 23
    dt_long: float = 3600.0
    degree: int = 3

    def __post_init__(self):
        self.dt = np.concatenate([
            np.full(self.n_short, self.dt_short),
            np.full(self.n_long, self.dt_long),
        ])
        self.n = self.dt.size
        self.t_edges = np.concatenate([[0.0], np.cumsum(self.dt)])
        self.horizon = float(self.t_edges[-1])
        self.scheme = CollocationScheme(self.degree)

    def node_times(self) -> np.ndarray:
        """(n, d) absolute collocation node times."""
        return self.t_edges[:-1, None] + self.dt[:, None] * self.scheme.nodes[None, :]


def mpc_grid(degree: int = 3) -> Grid:
    """The controller horizon: 24 h as 6 x 10 min + 23 x 1 h."""
    return Grid(degree=degree)
