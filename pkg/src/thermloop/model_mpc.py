"""Reduced smooth plant model for optimization and estimation.

Same balance structure as model_sim but with the non-smooth pieces
reformulated for derivative-based solvers:

* storage inter-layer flows use sqrt(m^2 + eps) instead of max(0, m),
* the recooling-tower branch flows are independent controls
  (mdot_rt_hts, mdot_rt_lts, mdot_rt_cs) instead of valve ratios,
* the tower is a single volume, the cage cross-section grid is coarse,
* three auxiliary first-order states additively correct the forecast
  ambient temperature and both loads, decaying with time constant tau_c.

Every operation is written against the ad module so the right-hand side
accepts plain arrays or ad.Dual batches transparently; it is twice
continuously differentiable on the admissible box (the heat-pump lift is
smoothly floored far outside normal operation to keep the Carnot ratio
well defined at arbitrary iterates).
"""

from __future__ import annotations

import numpy as np

from . import ad
from .params import KELVIN_OFFSET, SystemParams
from .structure import (
    StateLayout,
    V_MDOT_CS,
    V_MDOT_RT_CS,
    V_MDOT_RT_HTS,
    V_MDOT_RT_LTS,
    V_P_HP_EL,
    V_P_HR,
    V_R_RT_OP,
    mpc_layout,
    plant_layout,
    reduction_matrix,
)

__all__ = ["MpcModel"]

HP_LIFT_FLOOR = 1.0    # [K] smooth floor on the heat-pump temperature lift
HP_LIFT_KAPPA = 0.25   # [K^2] smoothing width of the floor


def _smooth_max(a, floor: float, kappa: float):
    return 0.5 * (a + floor + ad.sqrt((a - floor) * (a - floor) + kappa))


class MpcModel:
    """f_mpc right-hand side plus reduction from the plant state."""

    def __init__(self, p: SystemParams | None = None):
        self.p = p if p is not None else SystemParams()
        self.lay: StateLayout = mpc_layout(self.p)
        g = self.lay.grid
        self.grid = g
        self._v_lts_layer = self.p.v_lts / self.p.n_layers
        self._v_hts_layer = self.p.v_hts / self.p.n_layers
        # host scatter matrix: tube heat release into host concrete cells
        s = np.zeros((g.n_stack, g.n_w))
        for j, h in enumerate(g.host):
            s[h, j] = 1.0
        self._host_scatter = s
        self._reduction: np.ndarray | None = None

    @property
    def n_states(self) -> int:
        return self.lay.n

    def reduction(self) -> np.ndarray:
        if self._reduction is None:
            self._reduction = reduction_matrix(plant_layout(self.p), self.lay)
        return self._reduction

    def reduce_plant(self, x_sim) -> np.ndarray:
        return self.reduction() @ np.asarray(x_sim, dtype=float)

    # -- dynamics ------------------------------------------------------------

    def rhs(self, x, u, b_hp, c):
        """Time derivative of the MPC state.

        x: (36,[B]) state, u: (7,[B]) continuous controls, b_hp: scalar/[B]
        relaxed binary, c: (3,[B]) forecast [t_amb, q_lt, q_ht].  Any of
        x, u, b_hp may be ad.Dual; c is numeric.
        """
        p, lay, g = self.p, self.lay, self.grid
        if isinstance(x, np.ndarray) and not np.isfinite(x).all():
            idx = int(np.flatnonzero(~np.isfinite(x))[0])
            raise ValueError(f"non-finite state: {lay.names[idx]}")
        bshape = ad.value_of(x).shape[1:]

        def col(a):
            return a.reshape(a.shape + (1,) * len(bshape))

        lts = x[lay.lts]
        hts = x[lay.hts]
        t_rt = x[lay.rt.start]
        csw = x[lay.cs_w]
        css = x[lay.cs_solid]
        c_q_lt = x[lay.aux.start]
        c_q_ht = x[lay.aux.start + 1]
        c_t_amb = x[lay.aux.start + 2]

        c = np.asarray(c, dtype=float)
        t_amb = c[0] + c_t_amb
        q_lt = c[1] + c_q_lt
        q_ht = c[2] + c_q_ht

        m_rt_hts = u[V_MDOT_RT_HTS]
        m_rt_lts = u[V_MDOT_RT_LTS]
        m_rt_cs = u[V_MDOT_RT_CS]
        mdot_cs = u[V_MDOT_CS]
        r_rt_op = u[V_R_RT_OP]
        p_hr = u[V_P_HR]
        p_hp_el = u[V_P_HP_EL]

        # heat pump (all effects scale with the possibly fractional b_hp)
        lift = _smooth_max(hts[-1] - lts[-1] + 2.0 * p.dt_hp, HP_LIFT_FLOOR, HP_LIFT_KAPPA)
        t_hp_ht = hts[-1] + p.dt_hp
        t_hp_lt = lts[-1] - p.dt_hp
        cop = p.eta_hp * (t_hp_ht + KELVIN_OFFSET) / lift
        q_hp_ht = cop * p_hp_el
        q_hp_lt = q_hp_ht - p_hp_el
        m_hp_lt = b_hp * q_hp_lt / (p.c_w * p.dt_hp)
        m_hp_ht = b_hp * q_hp_ht / (p.c_w * p.dt_hp)

        # load circuits
        m_l_lt = q_lt / (p.c_w * p.dt_l)
        m_l_ht = q_ht / (p.c_w * p.dt_l)
        t_ret_lt = lts[0] + p.dt_l
        t_ret_ht = hts[0] - p.dt_l

        # -- slab -----------------------------------------------------------
        mdot_t = (mdot_cs + m_rt_cs) * (1.0 / p.n_cs)
        q_wc = g.ua_w * (csw - css[g.host])
        d0 = (
            (mdot_cs * (1.0 / p.n_cs)) * (lts[-1] - csw[0])
            + (m_rt_cs * (1.0 / p.n_cs)) * (t_rt - csw[0])
            - q_wc[0] * (1.0 / p.c_w)
        ) * (1.0 / (p.rho_w * g.v_w))
        drest = (mdot_t * (csw[:-1] - csw[1:]) - q_wc[1:] * (1.0 / p.c_w)) * (
            1.0 / (p.rho_w * g.v_w)
        )
        dcsw = ad.concatenate([_as_row(d0, bshape), drest], axis=0)
        t_cs_out = csw[-1]

        dcss = (g.cond @ css + self._host_scatter @ q_wc) / col(g.rho_v_c)

        # -- storages ---------------------------------------------------------
        eps = p.epsilon_smooth

        def stack_flux(temps, m_s):
            m_bar = ad.sqrt(m_s * m_s + eps)
            return 0.5 * m_s * (temps[:-1] + temps[1:]) + 0.5 * m_bar * (temps[:-1] - temps[1:])

        m_s_l = m_rt_lts + mdot_cs + m_hp_lt - m_l_lt
        phi_l = stack_flux(lts, m_s_l)
        bot = (
            mdot_cs * t_cs_out + m_rt_lts * t_rt + m_hp_lt * t_hp_lt
            - m_l_lt * lts[0] - phi_l[0]
        )
        top = m_l_lt * t_ret_lt + phi_l[-1] - (mdot_cs + m_rt_lts + m_hp_lt) * lts[-1]
        dlts = ad.concatenate(
            [_as_row(bot, bshape), phi_l[:-1] - phi_l[1:], _as_row(top, bshape)], axis=0
        ) * (1.0 / (p.rho_w * self._v_lts_layer))

        m_s_h = m_hp_ht + m_rt_hts - m_l_ht
        phi_h = stack_flux(hts, m_s_h)
        top_h = (
            m_hp_ht * t_hp_ht + m_rt_hts * t_rt - m_l_ht * hts[0]
            + p_hr * (1.0 / p.c_w) - phi_h[0]
        )
        bot_h = m_l_ht * t_ret_ht + phi_h[-1] - (m_hp_ht + m_rt_hts) * hts[-1]
        dhts = ad.concatenate(
            [_as_row(top_h, bshape), phi_h[:-1] - phi_h[1:], _as_row(bot_h, bshape)], axis=0
        ) * (1.0 / (p.rho_w * self._v_hts_layer))

        # -- recooling tower (single volume, full area) -------------------------
        q_rt = r_rt_op * (p.alpha_rt * p.a_rt) * (t_rt - t_amb)
        drt = (
            m_rt_hts * (hts[-1] - t_rt) + m_rt_lts * (lts[-1] - t_rt)
            + m_rt_cs * (t_cs_out - t_rt) - q_rt * (1.0 / p.c_w)
        ) * (1.0 / (p.rho_w * p.v_rt))

        # -- forecast-correction states ----------------------------------------
        daux = ad.stack_scalars([
            c_q_lt * (-1.0 / p.tau_c),
            c_q_ht * (-1.0 / p.tau_c),
            c_t_amb * (-1.0 / p.tau_c),
        ])

        return ad.concatenate(
            [dlts, dhts, _as_row(drt, bshape), dcsw, dcss, daux], axis=0
        )


def _as_row(v, bshape):
    """Reshape a scalar-like (possibly batched) value to a length-1 leading axis."""
    if isinstance(v, ad.Dual):
        return ad.Dual(np.asarray(v.val)[None, ...], np.asarray(v.der)[None, ...])
    if isinstance(v, ad.Dual2):
        return ad.Dual2(
            np.asarray(v.val)[None, ...],
            np.asarray(v.grad)[None, ...],
            np.asarray(v.hess)[None, ...],
        )
    return np.asarray(v, dtype=float)[None, ...]
