"""Primal-dual interior-point solver for sparse smooth NLPs.

Inequality rows carry internal slacks (g_I(z) - t = 0 with bounds on t),
bounds enter through a logarithmic barrier with monotone Fiacco-McCormick
reduction of the barrier parameter, and the Newton step condenses the
slack block analytically so the factorized KKT system is

    [ H + Sigma_z + J_I' Sigma_t J_I + delta*I   J_E' ] [dz ]   [ -r_z ]
    [ J_E                                       -gamma*I ] [dlam] = [ -r_E ]

solved with the sparse LDL^T of ldlt.py; delta (and gamma on zero pivots)
grow until the inertia is (n, m_E), the standard inertia-correction rule.
A backtracking line search on an l1 merit function with fraction-to-
boundary safeguards globalizes the iteration.  Everything is
deterministic: fixed ordering, fixed pattern, no randomization.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .ldlt import SymbolicLDLT
from .nlp import Nlp, TripletAssembler

__all__ = ["SolveResult", "solve"]

_S_MAX = 100.0
_KAPPA_EPS = 10.0
_KAPPA_MU = 0.2
_THETA_MU = 1.5
_TAU_MIN = 0.99
_KAPPA_SIGMA = 1e10


@dataclass
class SolveResult:
    z: np.ndarray
    f: float
    status: str                      # 'optimal' | 'max_iter' | 'restoration_failed'
    iterations: int
    wall_time: float
    mult_g: np.ndarray               # constraint multipliers, grad f = J' mult_g + ... convention
    mult_lb: np.ndarray
    mult_ub: np.ndarray
    kkt: dict                        # stationarity / feasibility / complementarity (scaled, mu=0)
    mu: float
    n_factorizations: int = 0
    slack_t: np.ndarray | None = None
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def solve(
    nlp: Nlp,
    z_init,
    tol: float = 1e-6,
    max_iter: int = 300,
    warm: SolveResult | None = None,
    log_path=None,
) -> SolveResult:
    t_start = time.perf_counter()
    n = nlp.n
    z = np.array(z_init, dtype=float)
    if z.shape != (n,):
        raise ValueError("initial point has wrong length")

    lb, ub = nlp.lb, nlp.ub
    fixed = lb == ub
    free = ~fixed
    z[fixed] = lb[fixed]
    bl = np.isfinite(lb) & free
    bu = np.isfinite(ub) & free

    # interior projection of the free variables (gentle when warm-started)
    push = 1e-9 if warm is not None else 1e-2
    width = np.where(np.isfinite(ub - lb), ub - lb, np.inf)
    pad_l = np.where(bl, np.minimum(push * np.maximum(1.0, np.abs(lb)), push * width), 0.0)
    pad_u = np.where(bu, np.minimum(push * np.maximum(1.0, np.abs(ub)), push * width), 0.0)
    z = np.clip(z, np.where(bl, lb + pad_l, -np.inf), np.where(bu, ub - pad_u, np.inf))

    # row classification
    cl, cu = nlp.cl, nlp.cu
    m = cl.size
    eq = np.isfinite(cl) & (cl == cu)
    ineq = ~eq & ~(np.isinf(cl) & np.isinf(cu) & (cl < 0) & (cu > 0))
    eq_idx = np.flatnonzero(eq)
    in_idx = np.flatnonzero(ineq)
    mE, mI = eq_idx.size, in_idx.size
    ce = cl[eq_idx]
    icl, icu = cl[in_idx], cu[in_idx]
    il = np.isfinite(icl)
    iu = np.isfinite(icu)

    g = nlp.eval_g(z)
    grad = nlp.eval_grad_f(z)
    fval = nlp.eval_f(z)
    jac = nlp.eval_jac_g(z).tocsr()
    jac.sort_indices()

    # slacks for inequality rows, strictly interior
    t = g[in_idx].copy()
    iwidth = np.where(il & iu, icu - icl, np.inf)
    tpad_l = np.where(il, np.minimum(np.maximum(push, push * np.abs(icl)), push * iwidth), 0.0)
    tpad_u = np.where(iu, np.minimum(np.maximum(push, push * np.abs(icu)), push * iwidth), 0.0)
    t = np.clip(t, np.where(il, icl + tpad_l, -np.inf), np.where(iu, icu - tpad_u, np.inf))

    # duals
    lam = np.zeros(mE)
    y = np.zeros(mI)
    mu = 0.1
    if warm is not None:
        lam = -np.asarray(warm.mult_g, dtype=float)[eq_idx]
        y = -np.asarray(warm.mult_g, dtype=float)[in_idx]
        zl = np.where(bl, np.maximum(warm.mult_lb, 1e-8), 0.0)
        zu = np.where(bu, np.maximum(warm.mult_ub, 1e-8), 0.0)
        if warm.slack_t is not None and warm.slack_t.size == mI:
            t = np.clip(warm.slack_t, np.where(il, icl + 1e-10, -np.inf), np.where(iu, icu - 1e-10, np.inf))
        # split the row multiplier onto the active side's slack dual
        tl = np.where(il, np.maximum(-y, 1e-8), 0.0)
        tu = np.where(iu, np.maximum(y, 1e-8), 0.0)
        comps = []
        if bl.any():
            comps.append((z - lb)[bl] * zl[bl])
        if bu.any():
            comps.append((ub - z)[bu] * zu[bu])
        if il.any():
            comps.append((t - icl)[il] * tl[il])
        if iu.any():
            comps.append((icu - t)[iu] * tu[iu])
        if comps:
            mu = float(np.clip(np.mean(np.concatenate(comps)), max(1e-9, tol / 100.0), 0.1))
    else:
        zl = np.where(bl, 1.0, 0.0)
        zu = np.where(bu, 1.0, 0.0)
        tl = np.where(il, np.maximum(mu / np.maximum(t - icl, 1e-8), 1e-10), 0.0)
        tu = np.where(iu, np.maximum(mu / np.maximum(icu - t, 1e-8), 1e-10), 0.0)

    has_barrier = bl.any() or bu.any() or il.any() or iu.any()
    if not has_barrier:
        mu = max(tol / 11.0, 1e-12)

    # fixed-pattern KKT assembly bookkeeping ---------------------------------
    jac_indptr = jac.indptr.copy()
    jac_nnz = jac.nnz

    def split_positions(rows):
        pos, rr, cc = [], [], []
        for r in rows:
            sl = slice(jac_indptr[r], jac_indptr[r + 1])
            pos.append(np.arange(sl.start, sl.stop))
            cc.append(jac.indices[sl])
            rr.append(np.full(sl.stop - sl.start, r))
        if pos:
            return np.concatenate(pos), np.concatenate(rr), np.concatenate(cc)
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0, np.int64)

    e_pos, e_row, e_col = split_positions(eq_idx)
    e_row_local = np.searchsorted(eq_idx, e_row)
    i_pos, i_row, i_col = split_positions(in_idx)
    i_row_local = np.searchsorted(in_idx, i_row)

    # pairs for J_I' Sigma_t J_I
    pr_row, pr_a, pr_b = [], [], []
    for rloc, r in enumerate(in_idx):
        sl = np.arange(jac_indptr[r], jac_indptr[r + 1])
        for a in range(sl.size):
            for b in range(a, sl.size):
                pr_row.append(rloc)
                pr_a.append(sl[a])
                pr_b.append(sl[b])
    pr_row = np.asarray(pr_row, dtype=np.int64)
    pr_a = np.asarray(pr_a, dtype=np.int64)
    pr_b = np.asarray(pr_b, dtype=np.int64)
    pair_i = jac.indices[pr_a]
    pair_j = jac.indices[pr_b]

    h0 = nlp.eval_hess_lag(z, _assemble_mult(m, eq_idx, in_idx, lam, y)).tocsr()
    h0.sort_indices()
    h_coo = h0.tocoo()
    h_mask = h_coo.row <= h_coo.col
    h_rows = h_coo.row[h_mask]
    h_cols = h_coo.col[h_mask]
    h_pattern_nnz = h0.nnz

    kk_rows = np.concatenate([h_rows, pair_i, e_col])
    kk_cols = np.concatenate([h_cols, pair_j, n + e_row_local])
    nK = n + mE
    sym = SymbolicLDLT(kk_rows, kk_cols, nK)
    kkt_asm = TripletAssembler(
        np.concatenate([kk_rows, np.arange(nK)]),
        np.concatenate([kk_cols, np.arange(nK)]),
        (nK, nK),
    )

    def kkt_data(hdata, sigma_t_vec, jdata):
        hd = hdata * (free[h_rows] & free[h_cols])
        pd = sigma_t_vec[pr_row] * jdata[pr_a] * jdata[pr_b] * (free[pair_i] & free[pair_j])
        ed = jdata[e_pos] * free[e_col]
        return np.concatenate([hd, pd, ed])

    log_rows = []
    tau = max(_TAU_MIN, 1.0 - mu)
    filt: list[tuple[float, float]] = []
    theta_ref = None
    delta_last = 0.0
    n_fact = 0
    fail_streak = 0
    status = "max_iter"
    message = ""
    it = 0

    for it in range(1, max_iter + 1):
        gE = g[eq_idx] - ce
        gI = g[in_idx]
        rI = gI - t
        sl_lo = np.where(bl, z - lb, 1.0)
        sl_hi = np.where(bu, ub - z, 1.0)
        st_lo = np.where(il, t - icl, 1.0)
        st_hi = np.where(iu, icu - t, 1.0)

        jt_lam = _rows_t_vec(jac, eq_idx, e_pos, e_row_local, e_col, lam, n)
        jt_y = _rows_t_vec(jac, in_idx, i_pos, i_row_local, i_col, y, n)
        r_stat_z = grad + jt_lam + jt_y - zl + zu
        r_stat_t = -y - tl + tu
        comp = _comp_residuals(sl_lo, sl_hi, st_lo, st_hi, zl, zu, tl, tu, bl, bu, il, iu)

        s_d, s_c = _scalings(lam, y, zl, zu, tl, tu, mE + mI, int(bl.sum() + bu.sum() + il.sum() + iu.sum()))
        err_stat = max(
            _inf_norm(np.where(free, r_stat_z, 0.0)),
            _inf_norm(r_stat_t),
        )
        err_feas = max(_inf_norm(gE), _inf_norm(rI))
        e0 = max(err_stat / s_d, err_feas, _inf_norm(comp) / s_c)
        e_mu = max(err_stat / s_d, err_feas, _inf_norm(_comp_shift(comp, mu)) / s_c)

        if log_path is not None:
            log_rows.append((it - 1, fval, err_feas, err_stat / s_d, mu, 0.0))
        if e0 <= tol:
            status = "optimal"
            break

        # monotone barrier reduction (the filter restarts with each new mu)
        while has_barrier and e_mu <= _KAPPA_EPS * mu and mu > max(tol / 11.0, 1e-12):
            mu = max(tol / 11.0, min(_KAPPA_MU * mu, mu**_THETA_MU))
            tau = max(_TAU_MIN, 1.0 - mu)
            filt.clear()
            if theta_ref is not None:
                filt.append((1e4 * theta_ref, -np.inf))
            comp_mu = _comp_shift(comp, mu)
            e_mu = max(err_stat / s_d, err_feas, _inf_norm(comp_mu) / s_c)

        # Newton assembly
        sigma_z = np.zeros(n)
        sigma_z[bl] += zl[bl] / sl_lo[bl]
        sigma_z[bu] += zu[bu] / sl_hi[bu]
        sigma_t = np.zeros(mI)
        sigma_t[il] += tl[il] / st_lo[il]
        sigma_t[iu] += tu[iu] / st_hi[iu]

        hmat = nlp.eval_hess_lag(z, _assemble_mult(m, eq_idx, in_idx, lam, y)).tocsr()
        hmat.sort_indices()
        if hmat.nnz != h_pattern_nnz:
            raise RuntimeError("Hessian sparsity pattern changed between iterations")
        hdata_u = hmat.tocoo().data[h_mask]

        mu_zl = np.where(bl, mu / sl_lo, 0.0)
        mu_zu = np.where(bu, mu / sl_hi, 0.0)
        mu_tl = np.where(il, mu / st_lo, 0.0)
        mu_tu = np.where(iu, mu / st_hi, 0.0)
        rbar_t = y + mu_tl - mu_tu
        # the J_I' y term of r_stat cancels against rbar_t, leaving barrier terms
        rhs_z = -(grad + jt_lam) + mu_zl - mu_zu - _rows_t_vec(
            jac, in_idx, i_pos, i_row_local, i_col, sigma_t * rI - (mu_tl - mu_tu), n
        )
        rhs_z[fixed] = 0.0
        rhs = np.concatenate([rhs_z, -gE])

        base_data = kkt_data(hdata_u, sigma_t, jac.data)
        data_scale = max(1.0, float(np.abs(base_data).max()) if base_data.size else 1.0)
        diag0 = np.concatenate([np.where(fixed, 1.0, sigma_z), np.zeros(mE)])
        kmat = kkt_asm.csr(np.concatenate([base_data, diag0]))
        kdiag = kmat.diagonal()
        rhs_norm = max(1.0, _inf_norm(rhs))
        delta, gamma = 0.0, 1e-8
        step = None
        for trial in range(60):
            diag_add = np.concatenate([
                np.where(fixed, 1.0, sigma_z + delta),
                np.full(mE, -gamma),
            ])
            ok, npos, nneg = sym.factor(base_data, diag_add, zero_tol=1e-18 * data_scale)
            n_fact += 1
            if ok and npos == n and nneg == mE:
                step = sym.solve(rhs)
                if delta == 0.0:
                    # refine against the unregularized system to cancel the gamma bias
                    for _ in range(5):
                        resid = rhs - (kmat @ step + kmat.T @ step - kdiag * step)
                        if _inf_norm(resid) <= 1e-10 * rhs_norm:
                            break
                        step = step + sym.solve(resid)
                if np.isfinite(step).all():
                    break
                ok = False
            if not ok and npos + nneg < nK:
                gamma = gamma * 100.0      # zero pivot: strengthen the dual block
            else:
                delta = (
                    (1e-4 if delta_last == 0.0 else max(1e-20, delta_last / 3.0))
                    if delta == 0.0 else delta * 8.0
                )
        if step is None:
            status = "restoration_failed"
            message = "KKT system could not be regularized"
            break
        if delta > 0.0:
            delta_last = delta

        dz = step[:n]
        dlam = step[n:]
        dt = jac[in_idx] @ dz + rI if mI else np.zeros(0)
        dy = sigma_t * dt - rbar_t
        dzl = np.where(bl, -zl + mu_zl - (zl / sl_lo) * dz, 0.0)
        dzu = np.where(bu, -zu + mu_zu + (zu / sl_hi) * dz, 0.0)
        dtl = np.where(il, -tl + mu_tl - (tl / st_lo) * dt, 0.0)
        dtu = np.where(iu, -tu + mu_tu + (tu / st_hi) * dt, 0.0)

        # fraction-to-boundary step limits
        a_pri = _ftb(sl_lo[bl], dz[bl], tau)
        a_pri = min(a_pri, _ftb(sl_hi[bu], -dz[bu], tau))
        a_pri = min(a_pri, _ftb(st_lo[il], dt[il], tau))
        a_pri = min(a_pri, _ftb(st_hi[iu], -dt[iu], tau))
        a_dual = _ftb(zl[bl], dzl[bl], tau)
        a_dual = min(a_dual, _ftb(zu[bu], dzu[bu], tau))
        a_dual = min(a_dual, _ftb(tl[il], dtl[il], tau))
        a_dual = min(a_dual, _ftb(tu[iu], dtu[iu], tau))

        # filter line search (feasibility theta vs barrier objective phi)
        theta0 = _inf_norm(gE) if gE.size else 0.0
        theta0 = max(theta0, _inf_norm(rI))
        phi0 = _merit(fval, sl_lo, sl_hi, st_lo, st_hi, bl, bu, il, iu, mu, 0.0, 0.0)
        dphi = float(grad @ dz) - mu * (
            _safe_div_sum(dz[bl], sl_lo[bl]) - _safe_div_sum(dz[bu], sl_hi[bu])
            + _safe_div_sum(dt[il], st_lo[il]) - _safe_div_sum(dt[iu], st_hi[iu])
        )
        if theta_ref is None:
            theta_ref = max(1.0, theta0)
            filt.append((1e4 * theta_ref, -np.inf))
        theta_min = 1e-4 * theta_ref
        theta_cap = 1e4 * theta_ref
        g_th, g_ph = 1e-5, 1e-5

        alpha = a_pri
        accepted = False
        for _ in range(30):
            z_try = z + alpha * dz
            t_try = t + alpha * dt
            try:
                f_try = nlp.eval_f(z_try)
                g_try = nlp.eval_g(z_try)
            except (ValueError, FloatingPointError):
                alpha *= 0.5
                continue
            if not np.isfinite(f_try) or (g_try.size and not np.isfinite(g_try).all()):
                alpha *= 0.5
                continue
            gE_try = g_try[eq_idx] - ce
            rI_try = g_try[in_idx] - t_try
            theta_try = max(_inf_norm(gE_try), _inf_norm(rI_try))
            phi_try = _merit(
                f_try,
                np.where(bl, z_try - lb, 1.0), np.where(bu, ub - z_try, 1.0),
                np.where(il, t_try - icl, 1.0), np.where(iu, icu - t_try, 1.0),
                bl, bu, il, iu, mu, 0.0, 0.0,
            )
            if any(theta_try >= th and phi_try >= ph for th, ph in filt):
                alpha *= 0.5
                continue
            armijo_case = theta0 <= theta_min and dphi < 0 and (
                alpha * (-dphi) ** 2.3 > 1.0 * theta0**1.1
            )
            if armijo_case:
                ok_step = phi_try <= phi0 + 1e-4 * alpha * dphi
            else:
                ok_step = (theta_try <= (1.0 - g_th) * theta0) or (
                    phi_try <= phi0 - g_ph * theta0
                )
            if ok_step:
                if not armijo_case:
                    filt.append(((1.0 - g_th) * theta0, phi0 - g_ph * theta0))
                accepted = True
                break
            alpha *= 0.5
        if accepted:
            # second-order correction: simplified Newton passes on the
            # constraint residual with the frozen factorization, curing the
            # quadratic feasibility error the Gauss-Newton step leaves behind
            for _ in range(3):
                gE_c = g_try[eq_idx] - ce
                rI_c = g_try[in_idx] - t_try
                th_c = max(_inf_norm(gE_c), _inf_norm(rI_c))
                if th_c <= max(0.02 * theta0, tol * 1e-2):
                    break
                rhs_cz = -_rows_t_vec(jac, in_idx, i_pos, i_row_local, i_col, sigma_t * rI_c, n)
                rhs_cz[fixed] = 0.0
                rhs_c = np.concatenate([rhs_cz, -gE_c])
                step_c = sym.solve(rhs_c)
                dz_c = step_c[:n]
                dt_c = (jac[in_idx] @ dz_c + rI_c) if mI else np.zeros(0)
                a_c = _ftb(np.where(bl, z_try - lb, 1.0)[bl], dz_c[bl], tau)
                a_c = min(a_c, _ftb(np.where(bu, ub - z_try, 1.0)[bu], -dz_c[bu], tau))
                a_c = min(a_c, _ftb(np.where(il, t_try - icl, 1.0)[il], dt_c[il], tau))
                a_c = min(a_c, _ftb(np.where(iu, icu - t_try, 1.0)[iu], -dt_c[iu], tau))
                z_c = z_try + a_c * dz_c
                t_c = t_try + a_c * dt_c
                try:
                    f_c = nlp.eval_f(z_c)
                    g_c = nlp.eval_g(z_c)
                except (ValueError, FloatingPointError):
                    break
                if not np.isfinite(f_c) or (g_c.size and not np.isfinite(g_c).all()):
                    break
                th_new = max(_inf_norm(g_c[eq_idx] - ce), _inf_norm(g_c[in_idx] - t_c))
                if th_new >= th_c:
                    break
                z_try, t_try, f_try, g_try = z_c, t_c, f_c, g_c
                lam = lam + a_c * step_c[n:]

        if not accepted:
            fail_streak += 1
            if fail_streak >= 3:
                status = "restoration_failed"
                message = "line search failed repeatedly"
                break
            alpha = min(a_pri, 1e-3)
            try:
                z_try = z + alpha * dz
                t_try = t + alpha * dt
                f_try = nlp.eval_f(z_try)
                g_try = nlp.eval_g(z_try)
            except (ValueError, FloatingPointError):
                status = "restoration_failed"
                message = "could not evaluate a fallback step"
                break
            if not np.isfinite(f_try) or (g_try.size and not np.isfinite(g_try).all()):
                status = "restoration_failed"
                message = "fallback step left the function domain"
                break
            delta_last = max(delta_last, 1e-4)
        else:
            fail_streak = 0

        z, t, fval, g = z_try, t_try, f_try, g_try
        lam = lam + alpha * dlam
        y = y + alpha * dy
        zl = np.where(bl, zl + a_dual * dzl, 0.0)
        zu = np.where(bu, zu + a_dual * dzu, 0.0)
        tl = np.where(il, tl + a_dual * dtl, 0.0)
        tu = np.where(iu, tu + a_dual * dtu, 0.0)
        # keep every slack a hair inside its bound (repeated near-boundary
        # steps can otherwise underflow a slack to exactly zero)
        eps_b = 1e-14
        if bl.any():
            z[bl] = np.maximum(z[bl], lb[bl] + eps_b * np.maximum(1.0, np.abs(lb[bl])))
        if bu.any():
            z[bu] = np.minimum(z[bu], ub[bu] - eps_b * np.maximum(1.0, np.abs(ub[bu])))
        if il.any():
            t[il] = np.maximum(t[il], icl[il] + eps_b * np.maximum(1.0, np.abs(icl[il])))
        if iu.any():
            t[iu] = np.minimum(t[iu], icu[iu] - eps_b * np.maximum(1.0, np.abs(icu[iu])))
        # Ipopt's kappa-sigma safeguard keeps duals commensurate with mu
        sl_lo = np.where(bl, z - lb, 1.0)
        sl_hi = np.where(bu, ub - z, 1.0)
        st_lo = np.where(il, t - icl, 1.0)
        st_hi = np.where(iu, icu - t, 1.0)
        zl = np.where(bl, np.clip(zl, mu / (_KAPPA_SIGMA * sl_lo), _KAPPA_SIGMA * mu / sl_lo), 0.0)
        zu = np.where(bu, np.clip(zu, mu / (_KAPPA_SIGMA * sl_hi), _KAPPA_SIGMA * mu / sl_hi), 0.0)
        tl = np.where(il, np.clip(tl, mu / (_KAPPA_SIGMA * st_lo), _KAPPA_SIGMA * mu / st_lo), 0.0)
        tu = np.where(iu, np.clip(tu, mu / (_KAPPA_SIGMA * st_hi), _KAPPA_SIGMA * mu / st_hi), 0.0)

        grad = nlp.eval_grad_f(z)
        jac_new = nlp.eval_jac_g(z).tocsr()
        jac_new.sort_indices()
        if jac_new.nnz != jac_nnz:
            raise RuntimeError("Jacobian sparsity pattern changed between iterations")
        jac = jac_new
        if log_rows:
            log_rows[-1] = log_rows[-1][:5] + (alpha,)

    wall = time.perf_counter() - t_start
    mult_g = -_assemble_mult(m, eq_idx, in_idx, lam, y)
    gE = g[eq_idx] - ce
    rI = g[in_idx] - t
    kkt = {
        "stationarity": float(err_stat / s_d) if it else np.inf,
        "feasibility": float(max(_inf_norm(gE), _inf_norm(rI))),
        "complementarity": float(_inf_norm(comp) / s_c) if it else np.inf,
    }
    if log_path is not None:
        with open(log_path, "w") as fh:
            fh.write("iter,objective,inf_pr,inf_du,mu,step\n")
            for row in log_rows:
                fh.write(",".join(repr(v) for v in row) + "\n")
    return SolveResult(
        z=z, f=fval, status=status, iterations=it, wall_time=wall,
        mult_g=mult_g, mult_lb=zl, mult_ub=zu, kkt=kkt, mu=mu,
        n_factorizations=n_fact, slack_t=t, message=message,
    )


# -- helpers ---------------------------------------------------------------


def _assemble_mult(m, eq_idx, in_idx, lam, y):
    out = np.zeros(m)
    out[eq_idx] = lam
    out[in_idx] = y
    return out


def _rows_t_vec(jac, row_idx, pos, row_local, col, vec, n):
    """J_rows' @ vec without materializing the row submatrix."""
    out = np.zeros(n)
    if pos.size:
        np.add.at(out, col, jac.data[pos] * vec[row_local])
    return out


def _comp_residuals(sl_lo, sl_hi, st_lo, st_hi, zl, zu, tl, tu, bl, bu, il, iu):
    parts = []
    if bl.any():
        parts.append(sl_lo[bl] * zl[bl])
    if bu.any():
        parts.append(sl_hi[bu] * zu[bu])
    if il.any():
        parts.append(st_lo[il] * tl[il])
    if iu.any():
        parts.append(st_hi[iu] * tu[iu])
    return np.concatenate(parts) if parts else np.zeros(0)


def _comp_shift(comp, mu):
    return comp - mu if comp.size else comp


def _scalings(lam, y, zl, zu, tl, tu, m_rows, n_bounds):
    total = np.abs(lam).sum() + np.abs(y).sum() + zl.sum() + zu.sum() + tl.sum() + tu.sum()
    count = max(1, m_rows + n_bounds)
    s_d = max(_S_MAX, total / count) / _S_MAX
    nb = max(1, n_bounds)
    s_c = max(_S_MAX, (zl.sum() + zu.sum() + tl.sum() + tu.sum()) / nb) / _S_MAX
    return s_d, s_c


def _inf_norm(v):
    return float(np.max(np.abs(v))) if v.size else 0.0


def _ftb(slack, dstep, tau):
    """Largest alpha <= 1 with slack + alpha*(-dstep backing?) kept positive."""
    if slack.size == 0:
        return 1.0
    neg = dstep < 0
    if not neg.any():
        return 1.0
    return float(min(1.0, np.min(-tau * slack[neg] / dstep[neg])))


def _safe_div_sum(num, den):
    if num.size == 0:
        return 0.0
    return float(np.sum(num / den))


def _merit(f, sl_lo, sl_hi, st_lo, st_hi, bl, bu, il, iu, mu, nu, theta):
    bar = 0.0
    if bl.any():
        bar += float(np.log(sl_lo[bl]).sum())
    if bu.any():
        bar += float(np.log(sl_hi[bu]).sum())
    if il.any():
        bar += float(np.log(st_lo[il]).sum())
    if iu.any():
        bar += float(np.log(st_hi[iu]).sum())
    return f - mu * bar + nu * theta
