"""State layouts, slab discretization grids, and control vector types.

The slab (CS) is modeled as one representative reinforcement cage: a 1-d
vertical stack of solid cells (soil below, concrete, car-park air above)
with the embedded tube water cells attached to host concrete cells.  The
simulation variant additionally slices the cage along its length; the MPC
variant uses a single slice.  Heat flows vertically between stack
neighbors; lengthwise conduction in solids is neglected (gradients along
the 9 m cage are small compared to the cross-section gradients).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .params import SystemParams

log = logging.getLogger(__name__)

# simulation-model control vector indices
U_MDOT_RT, U_MDOT_CS, U_R_RT_OP, U_R_LT_HT, U_R_LTS_CS, U_B_HP, U_P_HP_EL, U_Q_HR = range(8)
SIM_CONTROL_NAMES = ["mdot_rt", "mdot_cs", "r_rt_op", "r_lt_ht", "r_lts_cs", "b_hp", "p_hp_el", "q_hr"]

# MPC-model continuous control indices (binary b_hp is carried separately)
V_MDOT_RT_HTS, V_MDOT_RT_LTS, V_MDOT_RT_CS, V_MDOT_CS, V_R_RT_OP, V_P_HR, V_P_HP_EL = range(7)
MPC_CONTROL_NAMES = ["mdot_rt_hts", "mdot_rt_lts", "mdot_rt_cs", "mdot_cs", "r_rt_op", "p_hr", "p_hp_el"]

# material tags for stack cells
SOIL, CONCRETE, AIR = 0, 1, 2


@dataclass
class CsGrid:
    """Discretized representative cage plus its soil/air surroundings."""

    n_slices: int
    material: np.ndarray       # (n_stack,) SOIL/CONCRETE/AIR, bottom to top
    heights: np.ndarray        # (n_stack,) [m]
    rho_v_c: np.ndarray        # (n_stack,) [J/K] heat capacity per cell (one slice)
    cond: np.ndarray           # (n_stack, n_stack) conduction matrix [W/K]: Qdot = cond @ T
    host: np.ndarray           # (n_w,) stack index hosting each water cell
    n_w: int
    v_w: float                 # [m^3] water volume per water cell (one slice)
    ua_w: float                # [W/K] tube-wall conductance per water cell (one slice)

    @property
    def n_stack(self) -> int:
        return self.material.size

    @property
    def n_water_states(self) -> int:
        return self.n_w * self.n_slices

    @property
    def n_solid_states(self) -> int:
        return self.n_stack * self.n_slices


def _stack_conduction(material, heights, width, length, p: SystemParams) -> np.ndarray:
    lam = np.where(material == SOIL, p.lam_s, np.where(material == CONCRETE, p.lam_c, p.lam_a))
    n = material.size
    cond = np.zeros((n, n))
    area = width * length
    for i in range(n - 1):
        la, lb = lam[i], lam[i + 1]
        da, db = heights[i] / 2.0, heights[i + 1] / 2.0
        k = area * la * lb / (da * lb + db * la)
        cond[i, i] -= k
        cond[i, i + 1] += k
        cond[i + 1, i] += k
        cond[i + 1, i + 1] -= k
    return cond


def build_cs_grid(p: SystemParams, variant: str) -> CsGrid:
    """variant: 'sim' (n_l slices) or 'mpc' (single slice, coarse stack)."""
    if variant == "sim":
        n_c, n_s, n_a, n_slices = p.sim_n_concrete, p.sim_n_soil, p.sim_n_air, p.n_l
    elif variant == "mpc":
        n_c, n_s, n_a, n_slices = p.mpc_n_concrete, p.mpc_n_soil, p.mpc_n_air, 1
    else:
        raise ValueError(f"unknown grid variant {variant!r}")

    material = np.concatenate([
        np.full(n_s, SOIL), np.full(n_c, CONCRETE), np.full(n_a, AIR),
    ])
    heights = np.concatenate([
        np.full(n_s, p.soil_depth / n_s),
        np.full(n_c, p.h_rc / n_c),
        np.full(n_a, p.air_height / n_a),
    ])
    slice_len = p.l_rc / n_slices
    volume = p.w_rc * heights * slice_len
    rho_c_vec = np.where(material == SOIL, p.rho_s * p.c_s,
                         np.where(material == CONCRETE, p.rho_c * p.c_c, p.rho_a * p.c_a))
    rho_v_c = rho_c_vec * volume
    # subtract the embedded tube water from the host concrete volume
    n_w = p.n_pipe_layers
    host = np.array([n_s + int((2 * j + 1) * n_c / (2 * n_w)) for j in range(n_w)])
    v_w = p.tube_volume / (n_w * n_slices)
    for h in host:
        rho_v_c[h] -= p.rho_c * p.c_c * v_w

    cond = _stack_conduction(material, heights, p.w_rc, slice_len, p)
    ua_w = p.alpha_cs_w_c * p.tube_area / (n_w * n_slices)
    return CsGrid(
        n_slices=n_slices, material=material, heights=heights, rho_v_c=rho_v_c,
        cond=cond, host=host, n_w=n_w, v_w=v_w, ua_w=ua_w,
    )


@dataclass
class StateLayout:
    """Offsets and labels of one flat temperature-state vector."""

    variant: str
    n_layers: int
    n_rt: int
    grid: CsGrid
    n_aux: int = 0

    def __post_init__(self):
        n = 0
        self.lts = slice(n, n + self.n_layers); n += self.n_layers
        self.hts = slice(n, n + self.n_layers); n += self.n_layers
        self.rt = slice(n, n + self.n_rt); n += self.n_rt
        self.cs_w = slice(n, n + self.grid.n_water_states); n += self.grid.n_water_states
        self.cs_solid = slice(n, n + self.grid.n_solid_states); n += self.grid.n_solid_states
        self.aux = slice(n, n + self.n_aux); n += self.n_aux
        self.n = n
        self.names = self._names()

    def _names(self) -> list[str]:
        names = [f"t_lts_{i + 1}" for i in range(self.n_layers)]
        names += [f"t_hts_{i + 1}" for i in range(self.n_layers)]
        names += [f"t_rt_{i + 1}" for i in range(self.n_rt)]
        g = self.grid
        names += [f"t_cs_w_l{j}_s{s}" for j in range(g.n_w) for s in range(g.n_slices)]
        mat = {SOIL: "soil", CONCRETE: "conc", AIR: "air"}
        names += [f"t_cs_{mat[g.material[i]]}_{i}_s{s}" for i in range(g.n_stack) for s in range(g.n_slices)]
        names += ["c_q_lt", "c_q_ht", "c_t_amb"][: self.n_aux]
        return names

    # convenience index getters -------------------------------------------------

    @property
    def i_lts_bottom(self) -> int:
        return self.lts.start

    @property
    def i_lts_top(self) -> int:
        return self.lts.stop - 1

    @property
    def i_hts_top(self) -> int:
        # index 0 of the HTS block is the constrained top volume
        return self.hts.start

    @property
    def i_hts_bottom(self) -> int:
        return self.hts.stop - 1

    @property
    def i_rt_out(self) -> int:
        return self.rt.stop - 1

    @property
    def i_cs_w_in(self) -> int:
        return self.cs_w.start

    @property
    def i_cs_w_out(self) -> int:
        return self.cs_w.stop - 1


def plant_layout(p: SystemParams) -> StateLayout:
    lay = StateLayout("sim", p.n_layers, p.n_rt, build_cs_grid(p, "sim"), n_aux=0)
    log.info("simulation model: %d states", lay.n)
    return lay


def mpc_layout(p: SystemParams) -> StateLayout:
    lay = StateLayout("mpc", p.n_layers, 1, build_cs_grid(p, "mpc"), n_aux=3)
    log.info("MPC model: %d states", lay.n)
    return lay


def _overlap_weights(h_fine: np.ndarray, h_coarse: np.ndarray) -> np.ndarray:
    """(n_coarse, n_fine) row-stochastic averaging by interval overlap."""
    ef = np.concatenate([[0.0], np.cumsum(h_fine)])
    scale = ef[-1] / np.sum(h_coarse)  # tolerate differing totals
    ec = np.concatenate([[0.0], np.cumsum(h_coarse) * scale])
    w = np.zeros((h_coarse.size, h_fine.size))
    for i in range(h_coarse.size):
        lo, hi = ec[i], ec[i + 1]
        for j in range(h_fine.size):
            w[i, j] = max(0.0, min(hi, ef[j + 1]) - max(lo, ef[j]))
        w[i] /= w[i].sum()
    return w


def reduction_matrix(sim: StateLayout, mpc: StateLayout) -> np.ndarray:
    """(n_mpc, n_sim) volume-weighted projection of plant states onto MPC states."""
    r = np.zeros((mpc.n, sim.n))
    for i in range(mpc.n_layers):
        r[mpc.lts.start + i, sim.lts.start + i] = 1.0
        r[mpc.hts.start + i, sim.hts.start + i] = 1.0
    r[mpc.rt.start, sim.rt] = 1.0 / sim.n_rt
    # water cells: average over slices per pipe layer
    gs, gm = sim.grid, mpc.grid
    for j in range(gm.n_w):
        cols = sim.cs_w.start + j * gs.n_slices + np.arange(gs.n_slices)
        r[mpc.cs_w.start + j, cols] = 1.0 / gs.n_slices
    # solid stack: overlap-average per material group, then over slices
    for mat in (SOIL, CONCRETE, AIR):
        rows_m = np.flatnonzero(gm.material == mat)
        rows_s = np.flatnonzero(gs.material == mat)
        w = _overlap_weights(gs.heights[rows_s], gm.heights[rows_m])
        for a, i_m in enumerate(rows_m):
            for b, i_s in enumerate(rows_s):
                if w[a, b] == 0.0:
                    continue
                cols = sim.cs_solid.start + i_s * gs.n_slices + np.arange(gs.n_slices)
                r[mpc.cs_solid.start + i_m, cols] = w[a, b] / gs.n_slices
    # aux states have no plant counterpart and reduce to zero
    return r


# -- control vector types -------------------------------------------------


@dataclass
class ExogenousInput:
    """External drivers at one time instant."""

    t_amb: float               # [degC]
    q_lt: float                # [W] cooling demand
    q_ht: float                # [W] heating demand
    measured: bool = True

    def as_array(self) -> np.ndarray:
        return np.array([self.t_amb, self.q_lt, self.q_ht])

    def validate(self) -> None:
        if self.q_lt < 0 or self.q_ht < 0:
            raise ValueError("thermal loads must be nonnegative")


@dataclass
class SimControls:
    mdot_rt: float = 0.0
    mdot_cs: float = 0.0
    r_rt_op: float = 0.0
    r_lt_ht: float = 0.0
    r_lts_cs: float = 0.0
    b_hp: int = 0
    p_hp_el: float = 0.0
    q_hr: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([
            self.mdot_rt, self.mdot_cs, self.r_rt_op, self.r_lt_ht,
            self.r_lts_cs, float(self.b_hp), self.p_hp_el, self.q_hr,
        ])

    @classmethod
    def from_array(cls, u) -> "SimControls":
        u = np.asarray(u, dtype=float)
        return cls(u[0], u[1], u[2], u[3], u[4], int(round(u[5])), u[6], u[7])

    def validate(self, p: SystemParams) -> None:
        checks = [
            ("mdot_rt", 0.0, p.mdot_rt_max),
            ("mdot_cs", 0.0, p.mdot_cs_max),
            ("r_rt_op", 0.0, 1.0),
            ("r_lt_ht", 0.0, 1.0),
            ("r_lts_cs", 0.0, 1.0),
            ("p_hp_el", p.p_hp_el_min, p.p_hp_el_max),
            ("q_hr", 0.0, p.p_hr_max),
        ]
        for name, lo, hi in checks:
            v = getattr(self, name)
            if not lo - 1e-9 <= v <= hi + 1e-9:
                raise ValueError(f"{name}={v} outside [{lo}, {hi}]")
        if self.b_hp not in (0, 1):
            raise ValueError("b_hp must be 0 or 1")


@dataclass
class MpcControls:
    mdot_rt_hts: float = 0.0
    mdot_rt_lts: float = 0.0
    mdot_rt_cs: float = 0.0
    mdot_cs: float = 0.0
    r_rt_op: float = 0.0
    p_hr: float = 0.0
    p_hp_el: float = 0.0
    b_hp: float = 0.0          # may be fractional in the relaxed problem

    def as_array(self) -> np.ndarray:
        return np.array([
            self.mdot_rt_hts, self.mdot_rt_lts, self.mdot_rt_cs, self.mdot_cs,
            self.r_rt_op, self.p_hr, self.p_hp_el,
        ])

    @classmethod
    def from_array(cls, u, b_hp: float) -> "MpcControls":
        u = np.asarray(u, dtype=float)
        return cls(u[0], u[1], u[2], u[3], u[4], u[5], u[6], b_hp)

    def validate(self, p: SystemParams) -> None:
        checks = [
            ("mdot_rt_hts", 0.0, p.mdot_rt_max),
            ("mdot_rt_lts", 0.0, p.mdot_rt_max),
            ("mdot_rt_cs", 0.0, p.mdot_rt_max),
            ("mdot_cs", 0.0, p.mdot_cs_max),
            ("r_rt_op", 0.0, 1.0),
            ("p_hr", 0.0, p.p_hr_max),
            ("p_hp_el", p.p_hp_el_min, p.p_hp_el_max),
            ("b_hp", 0.0, 1.0),
        ]
        for name, lo, hi in checks:
            v = getattr(self, name)
            if not lo - 1e-9 <= v <= hi + 1e-9:
                raise ValueError(f"{name}={v} outside [{lo}, {hi}]")
        if self.mdot_rt_hts + self.mdot_rt_lts + self.mdot_rt_cs > p.mdot_rt_max + 1e-6:
            raise ValueError("recooling-tower branch flows exceed mdot_rt_max")
        if self.mdot_rt_cs + self.mdot_cs > p.mdot_cs_max + 1e-6:
            raise ValueError("slab through-flow exceeds mdot_cs_max")

    def to_sim(self) -> SimControls:
        """Map branch flows back onto the physical pump/valve controls."""
        mdot_rt = self.mdot_rt_hts + self.mdot_rt_lts + self.mdot_rt_cs
        lt_part = self.mdot_rt_lts + self.mdot_rt_cs
        r_lt_ht = lt_part / mdot_rt if mdot_rt > 1e-9 else 0.0
        r_lts_cs = self.mdot_rt_lts / lt_part if lt_part > 1e-9 else 0.0
        return SimControls(
            mdot_rt=mdot_rt, mdot_cs=self.mdot_cs, r_rt_op=self.r_rt_op,
            r_lt_ht=r_lt_ht, r_lts_cs=r_lts_cs, b_hp=int(round(self.b_hp)),
            p_hp_el=self.p_hp_el, q_hr=self.p_hr,
        )


def soft_bound_vectors(p: SystemParams, lay: StateLayout) -> tuple[np.ndarray, np.ndarray]:
    """Lower/upper soft bounds for every non-auxiliary state of a layout."""
    lo = np.empty(lay.n - lay.n_aux)
    hi = np.empty(lay.n - lay.n_aux)
    lo[lay.lts] = p.t_lts_other_min
    hi[lay.lts] = p.t_lts_other_max
    lo[lay.i_lts_bottom] = p.t_lts_bottom_min
    hi[lay.i_lts_bottom] = p.t_lts_bottom_max
    lo[lay.hts] = p.t_hts_other_min
    hi[lay.hts] = p.t_hts_other_max
    lo[lay.i_hts_top] = p.t_hts_top_min
    hi[lay.i_hts_top] = p.t_hts_top_max
    lo[lay.rt] = p.t_rt_min
    hi[lay.rt] = p.t_rt_max
    lo[lay.cs_w] = p.t_cs_min
    hi[lay.cs_w] = p.t_cs_max
    lo[lay.cs_solid] = p.t_cs_min
    hi[lay.cs_solid] = p.t_cs_max
    return lo, hi
