"""Direct-collocation transcription of the 24 h control problem.

Decision vector (all states scaled by ``state_scale``, controls by
``control_scale`` so powers live in kW units inside the NLP):

    z = [ x_0 | block_0 | ... | block_{N-1} ]
    block_k = [ X_k1 .. X_kd | u_k | b_k | s_k ]

The interval-end state is the last collocation node (Radau), so no extra
continuity variables exist.  Constraint rows, in order:

    collocation equations        N*d*nx   (equalities)
    mass-flow couplings          2*N      (0 <= sum <= max)
    soft state bounds            N*d*ns*2 (lb - s <= x, x <= ub + s)

Slack variables are per-interval constants shared by that interval's
collocation points; states carry wide hard bounds that never activate in
normal operation but keep iterates inside the model's domain.  The
Gauss-Newton Lagrangian Hessian (exact for this objective, constraint
curvature dropped) is a constant diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from . import ad
from .collocation import Grid
from .model_mpc import MpcModel
from .nlp import Nlp, TripletAssembler
from .params import SystemParams
from .structure import MpcControls, soft_bound_vectors

__all__ = ["OcpWeights", "Transcription", "build_ocp"]

N_SLACK = 33
WIDE_STATE_LO = -60.0
WIDE_STATE_HI = 120.0
AUX_LOAD_LO = -500.0   # [kW] scaled auxiliary load correction bounds
AUX_LOAD_HI = 500.0


@dataclass
class OcpWeights:
    """Objective weights: integral of s'Ws s + ws's + wu'u (time in hours)."""

    w_s_quad: np.ndarray = field(default_factory=lambda: np.full(N_SLACK, 1e2))
    w_s_lin: np.ndarray = field(default_factory=lambda: np.full(N_SLACK, 1e3))
    # per physical unit: flows/ratios at 1e-2 per (kg/s | -), powers at 1 per kW
    w_u: np.ndarray = field(default_factory=lambda: np.array([1e-2, 1e-2, 1e-2, 1e-2, 1e-2, 1e-3, 1e-3]))

    def __post_init__(self):
        self.w_s_quad = np.asarray(self.w_s_quad, dtype=float)
        self.w_s_lin = np.asarray(self.w_s_lin, dtype=float)
        self.w_u = np.asarray(self.w_u, dtype=float)
        if self.w_s_quad.shape != (N_SLACK,) or self.w_s_lin.shape != (N_SLACK,):
            raise ValueError(f"slack weights must have length {N_SLACK}")
        if min(self.w_s_quad.min(), self.w_s_lin.min(), self.w_u.min()) < 0:
            raise ValueError("objective weights must be nonnegative")


class Transcription:
    """Shared geometry of the OCP decision vector and constraint rows."""

    def __init__(self, model: MpcModel, grid: Grid, weights: OcpWeights | None = None):
        self.model = model
        self.grid = grid
        self.weights = weights if weights is not None else OcpWeights()
        p = model.p
        self.nx = model.n_states
        self.nu = 7
        self.ns = self.nx - model.lay.n_aux
        if self.ns != N_SLACK:
            raise ValueError(f"expected {N_SLACK} soft-bounded channels, layout has {self.ns}")
        self.d = grid.degree
        self.N = grid.n

        self.state_scale = np.ones(self.nx)
        self.state_scale[model.lay.aux.start] = 1e3      # load corrections in kW
        self.state_scale[model.lay.aux.start + 1] = 1e3
        self.control_scale = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1e3, 1e3])

        self.block = self.d * self.nx + self.nu + 1 + self.ns
        self.n = self.nx + self.N * self.block
        self.m_coll = self.N * self.d * self.nx
        self.m_cpl = 2 * self.N
        self.m_soft = self.N * self.d * self.ns * 2
        self.m = self.m_coll + self.m_cpl + self.m_soft

        self.t_lb, self.t_ub = soft_bound_vectors(p, model.lay)

    # -- variable index helpers ------------------------------------------------

    def x0_cols(self) -> np.ndarray:
        return np.arange(self.nx)

    def node_cols(self, k: int, j: int) -> np.ndarray:
        """Columns of X_kj, j in 1..d."""
        base = self.nx + k * self.block + (j - 1) * self.nx
        return np.arange(base, base + self.nx)

    def start_cols(self, k: int) -> np.ndarray:
        """Columns of the state at the start of interval k."""
        return self.x0_cols() if k == 0 else self.node_cols(k - 1, self.d)

    def u_cols(self, k: int) -> np.ndarray:
        base = self.nx + k * self.block + self.d * self.nx
        return np.arange(base, base + self.nu)

    def b_col(self, k: int) -> int:
        return self.nx + k * self.block + self.d * self.nx + self.nu

    def s_cols(self, k: int) -> np.ndarray:
        base = self.nx + k * self.block + self.d * self.nx + self.nu + 1
        return np.arange(base, base + self.ns)

    def coll_row(self, k: int, j: int) -> int:
        return (k * self.d + (j - 1)) * self.nx

    # -- decoding ---------------------------------------------------------------

    def states_at_nodes(self, z) -> np.ndarray:
        """(N, d, nx) physical state at every collocation node."""
        out = np.empty((self.N, self.d, self.nx))
        for k in range(self.N):
            for j in range(1, self.d + 1):
                out[k, j - 1] = z[self.node_cols(k, j)] * self.state_scale
        return out

    def controls(self, z) -> np.ndarray:
        return np.stack([z[self.u_cols(k)] * self.control_scale for k in range(self.N)])

    def binaries(self, z) -> np.ndarray:
        return np.array([z[self.b_col(k)] for k in range(self.N)])

    def slacks(self, z) -> np.ndarray:
        return np.stack([z[self.s_cols(k)] for k in range(self.N)])

    def edge_states(self, z) -> np.ndarray:
        """(N+1, nx) physical states at interval edges."""
        out = [z[self.x0_cols()] * self.state_scale]
        for k in range(self.N):
            out.append(z[self.node_cols(k, self.d)] * self.state_scale)
        return np.stack(out)

    def first_controls(self, z) -> MpcControls:
        u = z[self.u_cols(0)] * self.control_scale
        return MpcControls.from_array(u, float(z[self.b_col(0)]))

    def state_at_time(self, z, t: float) -> np.ndarray:
        """Physical state at horizon time t via the collocation polynomials."""
        g = self.grid
        t = float(np.clip(t, 0.0, g.horizon))
        k = int(np.clip(np.searchsorted(g.t_edges, t, side="right") - 1, 0, self.N - 1))
        tau = (t - g.t_edges[k]) / g.dt[k]
        w = g.scheme.interp_weights(tau)
        xs = [z[self.start_cols(k)]] + [z[self.node_cols(k, j)] for j in range(1, self.d + 1)]
        return sum(wi * xi for wi, xi in zip(w, xs)) * self.state_scale

    def control_at_time(self, z, t: float) -> tuple[np.ndarray, float]:
        g = self.grid
        k = int(np.clip(np.searchsorted(g.t_edges, t, side="right") - 1, 0, self.N - 1))
        return z[self.u_cols(k)] * self.control_scale, float(z[self.b_col(k)])


def build_ocp(
    x0,
    forecast_nodes,
    model: MpcModel,
    grid: Grid | None = None,
    weights: OcpWeights | None = None,
    b_fixed=None,
) -> tuple[Nlp, Transcription]:
    """Assemble the relaxed (or binary-fixed) NLP for initial state x0.

    forecast_nodes: (N, d, 3) exogenous forecast at every collocation node,
    or a callable t -> (3,) evaluated on the horizon clock (0 at x0).
    b_fixed: optional length-N 0/1 array freezing the machine switch.
    """
    tr = Transcription(model, grid if grid is not None else Grid(), weights)
    g, p = tr.grid, model.p
    sch = g.scheme
    nx, nu, ns, d, N = tr.nx, tr.nu, tr.ns, tr.d, tr.N

    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (nx,):
        raise ValueError(f"x0 has length {x0.size}, expected {nx}")
    if not np.isfinite(x0).all():
        raise ValueError("x0 must be finite")

    node_t = g.node_times()
    if callable(forecast_nodes):
        cf = np.array([[forecast_nodes(t) for t in row] for row in node_t])
    else:
        cf = np.asarray(forecast_nodes, dtype=float)
    if cf.shape != (N, d, 3):
        raise ValueError(f"forecast grid must cover the horizon with shape {(N, d, 3)}")

    sx, su = tr.state_scale, tr.control_scale
    dmat = sch.dmat

    # -- bounds ------------------------------------------------------------------
    lb = np.full(tr.n, -np.inf)
    ub = np.full(tr.n, np.inf)
    lb[tr.x0_cols()] = ub[tr.x0_cols()] = x0 / sx
    state_lo = np.full(nx, WIDE_STATE_LO)
    state_hi = np.full(nx, WIDE_STATE_HI)
    aux = model.lay.aux
    state_lo[aux.start: aux.start + 2] = AUX_LOAD_LO
    state_hi[aux.start: aux.start + 2] = AUX_LOAD_HI
    u_lo = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, p.p_hp_el_min]) / su
    u_hi = np.array([p.mdot_rt_max, p.mdot_rt_max, p.mdot_rt_max, p.mdot_cs_max, 1.0, p.p_hr_max, p.p_hp_el_max]) / su
    if b_fixed is not None:
        b_fixed = np.asarray(b_fixed, dtype=float)
        if b_fixed.shape != (N,):
            raise ValueError("b_fixed must give one value per interval")
    for k in range(N):
        for j in range(1, d + 1):
            lb[tr.node_cols(k, j)] = state_lo
            ub[tr.node_cols(k, j)] = state_hi
        lb[tr.u_cols(k)] = u_lo
        ub[tr.u_cols(k)] = u_hi
        lb[tr.b_col(k)] = 0.0 if b_fixed is None else b_fixed[k]
        ub[tr.b_col(k)] = 1.0 if b_fixed is None else b_fixed[k]
        lb[tr.s_cols(k)] = 0.0

    # -- constraint bounds --------------------------------------------------------
    cl = np.zeros(tr.m)
    cu = np.zeros(tr.m)
    r = tr.m_coll
    for k in range(N):
        # lower side is implied by the nonnegative branch-flow boxes
        cl[r], cu[r] = -np.inf, p.mdot_rt_max
        cl[r + 1], cu[r + 1] = -np.inf, p.mdot_cs_max
        r += 2
    soft0 = tr.m_coll + tr.m_cpl
    for k in range(N):
        for j in range(d):
            base = soft0 + (k * d + j) * 2 * ns
            cl[base: base + ns] = tr.t_lb
            cu[base: base + ns] = np.inf
            cl[base + ns: base + 2 * ns] = -np.inf
            cu[base + ns: base + 2 * ns] = tr.t_ub
    # -- fixed sparsity bookkeeping ------------------------------------------------
    mask_i, mask_q = _rhs_pattern(model)
    n_mask = mask_i.size

    rows, cols, const_data, const_mask = [], [], [], []

    # collocation: D-matrix part (constant)
    for k in range(N):
        start = tr.start_cols(k)
        for j in range(1, d + 1):
            rr = tr.coll_row(k, j) + np.arange(nx)
            for rnode in range(d + 1):
                cc = start if rnode == 0 else tr.node_cols(k, rnode)
                rows.append(rr)
                cols.append(cc)
                const_data.append(np.full(nx, dmat[j - 1, rnode]))
    # collocation: -h * df pattern (variable), node-major then mask order
    for k in range(N):
        for j in range(1, d + 1):
            rr = tr.coll_row(k, j) + mask_i
            cc = np.where(
                mask_q < nx,
                tr.node_cols(k, 1)[0] + (j - 1) * nx + mask_q,
                np.where(mask_q < nx + nu, tr.u_cols(k)[0] + (mask_q - nx), tr.b_col(k)),
            )
            rows.append(rr)
            cols.append(cc)
            const_data.append(np.zeros(n_mask))
    # couplings (constant)
    r = tr.m_coll
    for k in range(N):
        uc = tr.u_cols(k)
        rows.append(np.full(3, r)); cols.append(uc[0:3]); const_data.append(np.ones(3))
        rows.append(np.full(2, r + 1)); cols.append(np.array([uc[2], uc[3]])); const_data.append(np.ones(2))
        r += 2
    # soft bounds (constant)
    for k in range(N):
        sc = tr.s_cols(k)
        for j in range(d):
            base = soft0 + (k * d + j) * 2 * ns
            xc = tr.node_cols(k, j + 1)[:ns]
            rows.append(base + np.arange(ns)); cols.append(xc); const_data.append(np.ones(ns))
            rows.append(base + np.arange(ns)); cols.append(sc); const_data.append(np.ones(ns))
            rows.append(base + ns + np.arange(ns)); cols.append(xc); const_data.append(np.ones(ns))
            rows.append(base + ns + np.arange(ns)); cols.append(sc); const_data.append(-np.ones(ns))

    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    const_data = np.concatenate(const_data)
    assembler = TripletAssembler(rows, cols, (tr.m, tr.n))
    nvar_start = N * d * nx * (d + 1)          # where the -h*df block begins
    nvar_len = N * d * n_mask

    h_nodes = np.repeat(g.dt, d)               # (N*d,) seconds per node's interval
    b_nodes = np.repeat(np.arange(N), d)

    # scale factors mapping model Jacobian onto scaled decision variables
    sfac = np.where(mask_q < nx, sx[np.minimum(mask_q, nx - 1)], 1.0)
    sfac = np.where((mask_q >= nx) & (mask_q < nx + nu), su[np.clip(mask_q - nx, 0, nu - 1)], sfac)
    sfac = sfac / sx[mask_i]

    def unpack(z):
        """Node states (nx, N*d), controls (nu, N*d), b (N*d,) in model units."""
        xs = np.empty((nx, N * d))
        us = np.empty((nu, N * d))
        bs = np.empty(N * d)
        for k in range(N):
            for j in range(1, d + 1):
                idx = k * d + (j - 1)
                xs[:, idx] = z[tr.node_cols(k, j)] * sx
                us[:, idx] = z[tr.u_cols(k)] * su
                bs[idx] = z[tr.b_col(k)]
        return xs, us, bs

    c_nodes = cf.reshape(N * d, 3).T           # (3, N*d)

    def eval_g(z):
        z = np.asarray(z, dtype=float)
        xs, us, bs = unpack(z)
        fvals = model.rhs(xs, us, bs, c_nodes)         # (nx, N*d)
        out = np.empty(tr.m)
        # collocation residuals
        for k in range(N):
            xall = np.empty((d + 1, nx))
            xall[0] = z[tr.start_cols(k)]
            for j in range(1, d + 1):
                xall[j] = z[tr.node_cols(k, j)]
            lin = dmat @ xall                           # (d, nx) scaled units
            for j in range(1, d + 1):
                idx = k * d + (j - 1)
                out[tr.coll_row(k, j): tr.coll_row(k, j) + nx] = (
                    lin[j - 1] - g.dt[k] * fvals[:, idx] / sx
                )
        # couplings
        r = tr.m_coll
        for k in range(N):
            u = z[tr.u_cols(k)] * su
            out[r] = u[0] + u[1] + u[2]
            out[r + 1] = u[2] + u[3]
            r += 2
        # soft rows
        for k in range(N):
            s = z[tr.s_cols(k)]
            for j in range(d):
                base = soft0 + (k * d + j) * 2 * ns
                xph = z[tr.node_cols(k, j + 1)][:ns]    # sx = 1 on bounded channels
                out[base: base + ns] = xph + s
                out[base + ns: base + 2 * ns] = xph - s
        return out

    def jac_g(z):
        z = np.asarray(z, dtype=float)
        xs, us, bs = unpack(z)
        B = N * d
        xd = ad.Dual(xs, _seed_block(nx, B, nx + nu + 1, 0))
        ud = ad.Dual(us, _seed_block(nu, B, nx + nu + 1, nx))
        bd = ad.Dual(bs, np.broadcast_to(_unit(nx + nu + 1, nx + nu), (B, nx + nu + 1)).copy())
        der = model.rhs(xd, ud, bd, c_nodes).der        # (nx, B, nx+nu+1)
        sel = der[mask_i, :, mask_q]                    # (n_mask, B)
        contrib = (-(h_nodes[None, :]) * sel * sfac[:, None]).T.ravel()
        data = const_data.copy()
        data[nvar_start: nvar_start + nvar_len] = contrib
        return assembler.csr(data)

    # -- objective -------------------------------------------------------------------
    w = tr.weights
    h_hours = g.dt / 3600.0
    wu_scaled = w.w_u * su                      # per scaled control unit

    def eval_f(z):
        total = 0.0
        for k in range(N):
            s = z[tr.s_cols(k)]
            u = z[tr.u_cols(k)]
            total = total + h_hours[k] * (
                (s * s * w.w_s_quad).sum(axis=0)
                + (s * w.w_s_lin).sum(axis=0)
                + (u * wu_scaled).sum(axis=0)
            )
        return total

    def grad_f(z):
        out = np.zeros(tr.n)
        for k in range(N):
            s = z[tr.s_cols(k)]
            out[tr.s_cols(k)] = h_hours[k] * (2.0 * w.w_s_quad * s + w.w_s_lin)
            out[tr.u_cols(k)] = h_hours[k] * wu_scaled
        return out

    # exact objective curvature plus a small proximal diagonal on the
    # otherwise curvature-free directions (controls, switch, node states);
    # the collocation rows contribute their exact lambda-weighted curvature
    # through a cached second-order sweep of the model
    hess_diag = np.zeros(tr.n)
    prox_diag = np.zeros(tr.n)
    for k in range(N):
        hess_diag[tr.s_cols(k)] = 2.0 * h_hours[k] * w.w_s_quad
        prox_diag[tr.u_cols(k)] = 2.0 * h_hours[k] * 1e-2
        prox_diag[tr.b_col(k)] = 2.0 * h_hours[k] * 1e-2
        for j in range(1, d + 1):
            prox_diag[tr.node_cols(k, j)] = 2.0 * h_hours[k] * 1e-4

    hessian = _OcpHessian(tr, model, c_nodes, unpack, hess_diag, prox_diag, h_nodes, eval_g)

    nlp = Nlp(
        n=tr.n, lb=lb, ub=ub, cl=cl, cu=cu,
        f=eval_f, g=eval_g, grad_f=grad_f, jac_g=jac_g,
        hess_lag=hessian,
        hess_kind="exact-frozen",
        name="ocp",
        meta={"transcription": tr, "x0": x0, "forecast_nodes": cf},
    )
    return nlp, tr


class _OcpHessian:
    """Lagrangian Hessian with exact collocation curvature, lazily refreshed.

    Values are recomputed through a batched second-order dual sweep when
    the multipliers or the point drift beyond a threshold; between
    refreshes the node curvature is frozen (modified-Newton behavior).
    """

    def __init__(self, tr: Transcription, model: MpcModel, c_nodes, unpack, diag, prox, h_nodes, eval_g):
        self.tr = tr
        self.model = model
        self.c_nodes = c_nodes
        self.unpack = unpack
        self.diag = diag
        self.prox = prox
        self.h_nodes = h_nodes
        self.eval_g = eval_g
        self._exact_active = False
        nx, nu, d, N = tr.nx, tr.nu, tr.d, tr.N
        self.nloc = nx + nu + 1
        self.svec = np.concatenate([tr.state_scale, tr.control_scale, [1.0]])
        rows, cols = [np.arange(tr.n)], [np.arange(tr.n)]
        for k in range(N):
            for j in range(1, d + 1):
                loc = np.concatenate([tr.node_cols(k, j), tr.u_cols(k), [tr.b_col(k)]])
                rows.append(np.repeat(loc, self.nloc))
                cols.append(np.tile(loc, self.nloc))
        self.asm = TripletAssembler(np.concatenate(rows), np.concatenate(cols), (tr.n, tr.n))
        self._block_data = np.zeros(N * d * self.nloc * self.nloc)
        self._lam_ref: np.ndarray | None = None
        self._z_ref: np.ndarray | None = None
        self._calls_since = 0

    def _needs_refresh(self, z, lam_c) -> bool:
        if self._lam_ref is None:
            return True
        if self._calls_since >= (3 if self._exact_active else 15):
            return True
        dl = np.max(np.abs(lam_c - self._lam_ref))
        if dl > 0.1 * (1.0 + np.max(np.abs(self._lam_ref))):
            return True
        return bool(np.max(np.abs(z - self._z_ref)) > 0.5)

    def _refresh(self, z, lam_c):
        tr, nloc = self.tr, self.nloc
        nx, d, N = tr.nx, tr.d, tr.N
        # far from dynamic feasibility the exact curvature misleads the
        # globalization; fall back to the Gauss-Newton model there
        theta_coll = float(np.abs(self.eval_g(z)[: tr.m_coll]).max())
        self._exact_active = theta_coll <= 0.1 and bool(np.any(lam_c))
        if not self._exact_active:
            self._block_data = np.zeros_like(self._block_data)
        else:
            B = N * d
            xs, us, bs = self.unpack(z)
            xd = ad.Dual2(xs, _seed_block(nx, B, nloc, 0), np.zeros((nx, B, nloc, nloc)))
            ud = ad.Dual2(us, _seed_block(tr.nu, B, nloc, nx), np.zeros((tr.nu, B, nloc, nloc)))
            bg = np.zeros((B, nloc))
            bg[:, nloc - 1] = 1.0
            bd = ad.Dual2(bs, bg, np.zeros((B, nloc, nloc)))
            hess = self.model.rhs(xd, ud, bd, self.c_nodes).hess  # (nx, B, nloc, nloc)
            lam_nodes = lam_c.reshape(N * d, nx).T / tr.state_scale[:, None]
            blocks = -np.einsum("in,inqr->nqr", lam_nodes, hess)
            blocks *= self.h_nodes[:, None, None]
            blocks *= self.svec[None, :, None] * self.svec[None, None, :]
            self._block_data = blocks.reshape(-1)
        self._lam_ref = lam_c.copy()
        self._z_ref = np.asarray(z, dtype=float).copy()
        self._calls_since = 0

    def __call__(self, z, lam):
        lam_c = np.asarray(lam, dtype=float)[: self.tr.m_coll]
        if self._needs_refresh(z, lam_c):
            self._refresh(z, lam_c)
        else:
            self._calls_since += 1
        diag = self.diag + (0.01 if self._exact_active else 1.0) * self.prox
        return self.asm.csr(np.concatenate([diag, self._block_data]))


def initial_guess(tr: Transcription, x0, u_steady=None, b0: float = 0.0) -> np.ndarray:
    """Hold-state initial point with slacks opened just past any violation."""
    x0 = np.asarray(x0, dtype=float)
    sx, su = tr.state_scale, tr.control_scale
    if u_steady is None:
        u_steady = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, tr.model.p.p_hp_el_min])
    z = np.zeros(tr.n)
    z[tr.x0_cols()] = x0 / sx
    viol = np.maximum.reduce([
        tr.t_lb - x0[: tr.ns],
        x0[: tr.ns] - tr.t_ub,
        np.zeros(tr.ns),
    ])
    s0 = viol + 1e-3
    for k in range(tr.N):
        for j in range(1, tr.d + 1):
            z[tr.node_cols(k, j)] = x0 / sx
        z[tr.u_cols(k)] = u_steady / su
        z[tr.b_col(k)] = b0
        z[tr.s_cols(k)] = s0
    return z


def shift_guess(tr: Transcription, z_prev, shift_s: float = 600.0):
    """Warm start for the next step: advance the previous plan by shift_s."""
    g = tr.grid
    z = np.array(z_prev, dtype=float)
    out = np.zeros(tr.n)
    out[tr.x0_cols()] = tr.state_at_time(z_prev, shift_s) / tr.state_scale
    for k in range(tr.N):
        for j in range(1, tr.d + 1):
            t_new = g.t_edges[k] + g.scheme.nodes[j - 1] * g.dt[k] + shift_s
            out[tr.node_cols(k, j)] = tr.state_at_time(z_prev, min(t_new, g.horizon)) / tr.state_scale
        t_mid = min(g.t_edges[k] + 0.5 * g.dt[k] + shift_s, g.horizon - 1.0)
        k_old = int(np.clip(np.searchsorted(g.t_edges, t_mid, side="right") - 1, 0, tr.N - 1))
        out[tr.u_cols(k)] = z[tr.u_cols(k_old)]
        out[tr.b_col(k)] = z[tr.b_col(k_old)]
        out[tr.s_cols(k)] = z[tr.s_cols(k_old)]
    return out


def _unit(n, i):
    v = np.zeros(n)
    v[i] = 1.0
    return v


def _seed_block(nch, nbatch, ndirs, offset):
    der = np.zeros((nch, nbatch, ndirs))
    for i in range(nch):
        der[i, :, offset + i] = 1.0
    return der


_PATTERN_CACHE: dict = {}


def _rhs_pattern(model: MpcModel):
    """Structural nonzeros of d(rhs)/d(x, u, b), unioned over generic points."""
    key = id(model)
    if key in _PATTERN_CACHE:
        return _PATTERN_CACHE[key]
    nx, nu = model.n_states, 7
    rng = np.random.default_rng(1234)
    mask = np.zeros((nx, nx + nu + 1), dtype=bool)
    for _ in range(3):
        x = np.concatenate([
            rng.uniform(6.0, 16.0, 5), rng.uniform(33.0, 39.0, 5),
            rng.uniform(8.0, 20.0, 1), rng.uniform(6.0, 30.0, nx - 14),
            rng.uniform(-2.0, 2.0, 3),
        ])
        u = np.array([
            rng.uniform(5, 50), rng.uniform(5, 50), rng.uniform(5, 30),
            rng.uniform(5, 40), rng.uniform(0.2, 0.9),
            rng.uniform(1e4, 3e5), rng.uniform(5e3, 5e4),
        ])
        b = rng.uniform(0.3, 0.9)
        c = np.array([rng.uniform(0, 25), rng.uniform(1e4, 1e5), rng.uniform(1e4, 2e5)])
        xd = ad.Dual(x, _seed_block(nx, 1, nx + nu + 1, 0)[:, 0, :])
        ud = ad.Dual(u, _seed_block(nu, 1, nx + nu + 1, nx)[:, 0, :])
        bd = ad.Dual(np.asarray(b), _unit(nx + nu + 1, nx + nu))
        mask |= np.abs(model.rhs(xd, ud, bd, c).der) > 0.0
    out = tuple(np.nonzero(mask))
    _PATTERN_CACHE[key] = out
    return out
