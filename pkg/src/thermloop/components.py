"""Component-level relations shared by both plant models.

All functions are pure and accept floats, numpy arrays, or ad.Dual values
unless stated otherwise, so the MPC model can differentiate through them.
"""

from __future__ import annotations

import numpy as np

from . import ad
from .params import KELVIN_OFFSET, SystemParams

__all__ = ["smooth_abs", "solid_heat_flow", "hp_carnot", "hp_outputs", "load_interface"]


def smooth_abs(s, eps: float):
    """sqrt(s^2 + eps): twice differentiable stand-in for |s| (eps > 0)."""
    return ad.sqrt(s * s + eps)


def solid_heat_flow(t_x, t_y, area: float, lam_x: float, lam_y: float, d_x: float, d_y: float):
    """Heat flow [W] from volume x to volume y through their shared face.

    Series conduction over the two half-cells: the face sits d_x from the
    center of x (conductivity lam_x) and d_y from the center of y.
    """
    if min(area, lam_x, lam_y, d_x, d_y) <= 0:
        raise ValueError("area, conductivities and distances must be positive")
    return area * lam_x * lam_y * (t_x - t_y) / (d_x * lam_y + d_y * lam_x)


def hp_carnot(t_lts_top, t_hts_bottom, p: SystemParams):
    """COP and machine-side temperatures for given storage tap temperatures.

    The internal controller holds a fixed spread dt_hp on both sides; the
    COP is the Carnot ratio on the absolute scale times eta_hp.
    """
    t_hp_lt = t_lts_top - p.dt_hp
    t_hp_ht = t_hts_bottom + p.dt_hp
    lift = t_hp_ht - t_hp_lt
    lift_val = ad.value_of(lift)
    if np.any(lift_val <= 0):
        raise ValueError(
            "heat pump sink must stay above its source: "
            f"t_hp_ht - t_hp_lt = {np.min(lift_val):.3f} K"
        )
    cop = p.eta_hp * (t_hp_ht + KELVIN_OFFSET) / lift
    return cop, t_hp_lt, t_hp_ht


def hp_outputs(t_lts_top, t_hts_bottom, p_hp_el, p: SystemParams) -> dict:
    """Heat flows, mass flows and temperatures of the running machine."""
    cop, t_hp_lt, t_hp_ht = hp_carnot(t_lts_top, t_hts_bottom, p)
    q_ht = cop * p_hp_el
    q_lt = q_ht - p_hp_el
    mdot_lt = q_lt / (p.c_w * p.dt_hp)
    mdot_ht = q_ht / (p.c_w * p.dt_hp)
    return {
        "cop": cop,
        "q_ht": q_ht,
        "q_lt": q_lt,
        "mdot_hp_lt": mdot_lt,
        "mdot_hp_ht": mdot_ht,
        "t_hp_lt": t_hp_lt,
        "t_hp_ht": t_hp_ht,
    }


def load_interface(q_dot, t_tap, p: SystemParams, circuit: str) -> tuple:
    """Return temperature and storage-side mass flow of a load circuit.

    The distribution circuit adds supply flow to hold the spread dt_l, so
    the storage sees mdot = q / (c_w dt_l) with the return shifted by
    +dt_l (cooling) or -dt_l (heating).
    """
    mdot = q_dot / (p.c_w * p.dt_l)
    if circuit == "cooling":
        return t_tap + p.dt_l, mdot
    if circuit == "heating":
        return t_tap - p.dt_l, mdot
    raise ValueError(f"unknown circuit {circuit!r}")
