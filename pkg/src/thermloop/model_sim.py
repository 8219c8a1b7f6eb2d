"""Simulation plant model: stratified storages, slab cage, recooling tower.

Mass and energy balances on incompressible water with constant material
properties; losses to the surroundings are neglected except through the
modeled recooling-tower exchange.  Storage inter-layer flows use the
upwind max(0, .) form, which makes this right-hand side non-smooth (the
MPC variant in model_mpc smooths it).

Plumbing conventions (index 0 first in each block):
  LTS   bottom -> top;  circuits return at the bottom, draw at the top,
        the cooling load draws at the bottom and returns at the top.
  HTS   top -> bottom;  heat pump and recooling return at the top, draw
        at the bottom, the heating load draws at the top; the heating
        rods act directly on the top volume.
  RT    inlet -> outlet chain of n_rt volumes.
  CS    tube water cells in series (pipe layer by pipe layer, each layer
        running through the length slices); solids as a vertical stack
        soil -> concrete -> air per slice.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .components import hp_outputs, load_interface
from .params import SystemParams
from .structure import (
    StateLayout,
    U_B_HP,
    U_MDOT_CS,
    U_MDOT_RT,
    U_P_HP_EL,
    U_Q_HR,
    U_R_LT_HT,
    U_R_LTS_CS,
    U_R_RT_OP,
    plant_layout,
)

__all__ = ["PlantModel"]


def _require_finite(arr, names, what):
    arr = np.asarray(arr, dtype=float)
    if np.isfinite(arr).all():
        return
    idx = int(np.flatnonzero(~np.isfinite(arr))[0])
    label = names[idx] if names is not None and idx < len(names) else f"component {idx}"
    raise ValueError(f"non-finite {what}: {label}")


class PlantModel:
    """f_sim right-hand side and bookkeeping helpers."""

    def __init__(self, p: SystemParams | None = None):
        self.p = p if p is not None else SystemParams()
        self.lay: StateLayout = plant_layout(self.p)
        g = self.lay.grid
        self.grid = g
        self._v_lts_layer = self.p.v_lts / self.p.n_layers
        self._v_hts_layer = self.p.v_hts / self.p.n_layers
        self._v_rt_cell = self.p.v_rt / self.p.n_rt
        self._a_rt_cell = self.p.a_rt / self.p.n_rt
        self._rho_v_c_solid = g.rho_v_c  # (n_stack,), one slice

    @property
    def n_states(self) -> int:
        return self.lay.n

    # -- dynamics ----------------------------------------------------------

    def rhs(self, x, u, c) -> np.ndarray:
        """Time derivative of the plant state.

        x: state vector (lay.n,), u: 8 controls (structure.SIM_* order),
        c: measured exogenous [t_amb, q_lt, q_ht].
        """
        p, lay, g = self.p, self.lay, self.grid
        _require_finite(x, lay.names, "state")
        _require_finite(u, ["mdot_rt", "mdot_cs", "r_rt_op", "r_lt_ht", "r_lts_cs", "b_hp", "p_hp_el", "q_hr"], "control")
        _require_finite(c, ["t_amb", "q_lt", "q_ht"], "exogenous input")
        x = np.asarray(x, dtype=float)
        lts = x[lay.lts]
        hts = x[lay.hts]
        rt = x[lay.rt]
        csw = x[lay.cs_w].reshape(g.n_w, g.n_slices)
        css = x[lay.cs_solid].reshape(g.n_stack, g.n_slices)
        t_amb, q_lt, q_ht = float(c[0]), float(c[1]), float(c[2])

        b_hp = float(u[U_B_HP])
        if b_hp > 0.0:
            hp = hp_outputs(lts[-1], hts[-1], float(u[U_P_HP_EL]), p)
            m_hp_lt = b_hp * hp["mdot_hp_lt"]
            m_hp_ht = b_hp * hp["mdot_hp_ht"]
            t_hp_lt, t_hp_ht = hp["t_hp_lt"], hp["t_hp_ht"]
        else:
            m_hp_lt = m_hp_ht = 0.0
            t_hp_lt = t_hp_ht = 0.0

        t_ret_lt, m_l_lt = load_interface(q_lt, lts[0], p, "cooling")
        t_ret_ht, m_l_ht = load_interface(q_ht, hts[0], p, "heating")

        mdot_rt = float(u[U_MDOT_RT])
        m_rt_lt = float(u[U_R_LT_HT]) * mdot_rt
        m_rt_lts = float(u[U_R_LTS_CS]) * m_rt_lt
        m_rt_cs = m_rt_lt - m_rt_lts
        m_rt_hts = mdot_rt - m_rt_lt
        mdot_cs = float(u[U_MDOT_CS])

        dx = np.zeros_like(x)

        # -- concrete slab (one representative cage) -----------------------
        mdot_t = (mdot_cs + m_rt_cs) / p.n_cs
        rho_v_w = p.rho_w * g.v_w
        q_wc = g.ua_w * (csw - css[g.host, :])  # (n_w, n_slices) [W]
        dcsw = np.empty_like(csw)
        flat_prev = np.concatenate([[0.0], csw.ravel()[:-1]])  # series predecessor
        adv = mdot_t * (flat_prev.reshape(g.n_w, g.n_slices) - csw)
        # inlet cell mixes the two feeds instead of a predecessor cell
        adv[0, 0] = (mdot_cs / p.n_cs) * (lts[-1] - csw[0, 0]) + (m_rt_cs / p.n_cs) * (rt[-1] - csw[0, 0])
        dcsw[:] = (adv - q_wc / p.c_w) / rho_v_w
        t_cs_out = csw[-1, -1]

        dcss = g.cond @ css
        for j in range(g.n_w):
            dcss[g.host[j], :] += q_wc[j, :]
        dcss /= self._rho_v_c_solid[:, None]

        # -- low-temperature storage ---------------------------------------
        m_in_bot = mdot_cs + m_rt_lts + m_hp_lt
        m_s = m_in_bot - m_l_lt
        m_up = max(0.0, m_s)
        m_dn = max(0.0, -m_s)
        rho_v = p.rho_w * self._v_lts_layer
        dlts = np.empty_like(lts)
        dlts[0] = (
            mdot_cs * t_cs_out + m_rt_lts * rt[-1] + m_hp_lt * t_hp_lt
            - m_l_lt * lts[0] + m_dn * lts[1] - m_up * lts[0]
        ) / rho_v
        dlts[1:-1] = (m_up * (lts[:-2] - lts[1:-1]) + m_dn * (lts[2:] - lts[1:-1])) / rho_v
        dlts[-1] = (m_l_lt * t_ret_lt + m_up * lts[-2] - (m_in_bot + m_dn) * lts[-1]) / rho_v

        # -- high-temperature storage (index 0 = top) ------------------------
        m_in_top = m_hp_ht + m_rt_hts
        m_s_h = m_in_top - m_l_ht
        m_dn_h = max(0.0, m_s_h)   # downward = toward the bottom
        m_up_h = max(0.0, -m_s_h)
        rho_v_h = p.rho_w * self._v_hts_layer
        dhts = np.empty_like(hts)
        dhts[0] = (
            m_hp_ht * t_hp_ht + m_rt_hts * rt[-1] - m_l_ht * hts[0]
            + m_up_h * hts[1] - m_dn_h * hts[0] + float(u[U_Q_HR]) / p.c_w
        ) / rho_v_h
        dhts[1:-1] = (m_dn_h * (hts[:-2] - hts[1:-1]) + m_up_h * (hts[2:] - hts[1:-1])) / rho_v_h
        dhts[-1] = (m_l_ht * t_ret_ht + m_dn_h * hts[-2] - (m_in_top + m_up_h) * hts[-1]) / rho_v_h

        # -- recooling tower -------------------------------------------------
        q_rt = float(u[U_R_RT_OP]) * p.alpha_rt * self._a_rt_cell * (rt - t_amb)
        rho_v_rt = p.rho_w * self._v_rt_cell
        drt = np.empty_like(rt)
        drt[0] = (
            m_rt_hts * (hts[-1] - rt[0]) + m_rt_lts * (lts[-1] - rt[0])
            + m_rt_cs * (t_cs_out - rt[0]) - q_rt[0] / p.c_w
        ) / rho_v_rt
        drt[1:] = (mdot_rt * (rt[:-1] - rt[1:]) - q_rt[1:] / p.c_w) / rho_v_rt

        dx[lay.lts] = dlts
        dx[lay.hts] = dhts
        dx[lay.rt] = drt
        dx[lay.cs_w] = dcsw.ravel()
        dx[lay.cs_solid] = dcss.ravel()
        return dx

    # -- bookkeeping --------------------------------------------------------

    def internal_energy(self, x) -> float:
        """Total internal energy [J] over all balance volumes (cage scaled by n_cs)."""
        p, lay, g = self.p, self.lay, self.grid
        x = np.asarray(x, dtype=float)
        e = p.rho_w * p.c_w * self._v_lts_layer * x[lay.lts].sum()
        e += p.rho_w * p.c_w * self._v_hts_layer * x[lay.hts].sum()
        e += p.rho_w * p.c_w * self._v_rt_cell * x[lay.rt].sum()
        e += p.n_cs * p.rho_w * p.c_w * g.v_w * x[lay.cs_w].sum()
        css = x[lay.cs_solid].reshape(g.n_stack, g.n_slices)
        e += p.n_cs * float(np.sum(g.rho_v_c[:, None] * css))
        return float(e)

    def default_state(self) -> np.ndarray:
        """Mid-range profile used when no warm-start file is given."""
        lay = self.lay
        x = np.empty(lay.n)
        x[lay.lts] = np.linspace(12.0, 14.0, self.p.n_layers)
        x[lay.hts] = np.linspace(35.0, 33.0, self.p.n_layers)
        x[lay.rt] = 15.0
        x[lay.cs_w] = 14.0
        x[lay.cs_solid] = 14.0
        g = self.grid
        air = np.flatnonzero(g.material == 2)
        css = x[lay.cs_solid].reshape(g.n_stack, g.n_slices)
        css[air, :] = 16.0
        x[lay.cs_solid] = css.ravel()
        return x

    def save_state(self, x, path: str | Path) -> None:
        Path(path).write_text(json.dumps({
            "n": int(self.lay.n),
            "names": self.lay.names,
            "values": [float(v) for v in np.asarray(x, dtype=float)],
        }, indent=0) + "\n")

    def load_state(self, path: str | Path) -> np.ndarray:
        doc = json.loads(Path(path).read_text())
        x = np.asarray(doc["values"], dtype=float)
        if x.size != self.lay.n:
            raise ValueError(f"state file holds {x.size} values, model expects {self.lay.n}")
        return x
