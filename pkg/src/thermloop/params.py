"""Plant parameters: geometry, materials, machine limits, model grids.

Every number is configurable; defaults are the dimensioning of the studied
plant plus standard handbook material properties.  Units are SI throughout
(temperatures in degC, powers in W, mass flows in kg/s).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["SystemParams", "load_params", "save_params", "KELVIN_OFFSET"]

KELVIN_OFFSET = 273.15


@dataclass
class SystemParams:
    # -- concrete slab geometry -------------------------------------------
    n_cs: int = 306            # parallel reinforcement cages
    w_rc: float = 0.5          # [m] cage width
    h_rc: float = 1.1          # [m] cage height
    l_rc: float = 9.0          # [m] cage length
    d_t_rc: float = 0.0262     # [m] embedded tube diameter
    l_t_rc: float = 58.0       # [m] tube length per cage
    n_pipe_layers: int = 3     # pipe loop layers per cage

    # slab surroundings included in the balance
    soil_depth: float = 2.5    # [m] modeled soil buffer below the slab
    air_height: float = 1.5    # [m] modeled car-park air column above the slab

    # grid resolution, simulation model (per cross-section, times n_l slices)
    sim_n_concrete: int = 27
    sim_n_soil: int = 5
    sim_n_air: int = 2
    n_l: int = 5               # slices along the cage length

    # grid resolution, MPC model (cross-section only, single slice)
    mpc_n_concrete: int = 15
    mpc_n_soil: int = 3
    mpc_n_air: int = 1

    # -- storages -----------------------------------------------------------
    v_lts: float = 10.0        # [m^3] low-temperature storage volume
    v_hts: float = 5.0         # [m^3] high-temperature storage volume
    n_layers: int = 5          # stratification layers per storage

    # -- heat pump / heating rods --------------------------------------------
    p_hp_el_min: float = 2e3   # [W] minimum electric part load when on
    p_hp_el_max: float = 60e3  # [W]
    eta_hp: float = 0.52       # Carnot efficiency factor
    dt_hp: float = 4.0         # [K] inlet/outlet spread on both HP sides
    p_hr_max: float = 400e3    # [W] heating rod backup

    # -- recooling tower -------------------------------------------------------
    a_rt: float = 2145.0       # [m^2] exchange area
    v_rt: float = 0.208        # [m^3] fluid volume
    alpha_rt: float = 21.6     # [W/(m^2 K)] (printed as W/K in the source data;
    #                            treated as area-specific so the lumped UA is alpha_rt*a_rt)
    n_rt: int = 5              # simulation-model volumes (MPC model uses 1)

    # -- pumps / circuits --------------------------------------------------------
    mdot_rt_max: float = 200.0  # [kg/s]
    mdot_cs_max: float = 75.0   # [kg/s]
    dt_l: float = 6.0           # [K] load circuit spread
    alpha_cs_w_c: float = 500.0  # [W/(m^2 K)] tube wall heat transfer

    # -- material properties -------------------------------------------------
    c_w: float = 4186.0        # [J/(kg K)] water
    rho_w: float = 1000.0      # [kg/m^3]
    c_c: float = 880.0         # [J/(kg K)] concrete
    rho_c: float = 2400.0      # [kg/m^3]
    lam_c: float = 2.1         # [W/(m K)]
    c_s: float = 1000.0        # [J/(kg K)] soil
    rho_s: float = 1600.0      # [kg/m^3]
    lam_s: float = 1.5         # [W/(m K)]
    c_a: float = 1005.0        # [J/(kg K)] air
    rho_a: float = 1.2         # [kg/m^3]
    lam_a: float = 0.026       # [W/(m K)]

    # -- MPC model tuning -----------------------------------------------------
    epsilon_smooth: float = 0.5   # [kg^2/s^2] smooth-abs epsilon for storage flows
    tau_c: float = 3.0 * 3600.0   # [s] forecast-correction decay constant

    # -- temperature limits [degC] ----------------------------------------------
    t_lts_bottom_min: float = 3.0
    t_lts_bottom_max: float = 18.0
    t_hts_top_min: float = 32.0
    t_hts_top_max: float = 40.0
    t_cs_min: float = 2.5
    t_cs_max: float = 40.0
    # wide guards for channels without an explicit operational limit
    t_lts_other_min: float = 1.0
    t_lts_other_max: float = 25.0
    t_hts_other_min: float = 5.0
    t_hts_other_max: float = 45.0
    t_rt_min: float = -25.0
    t_rt_max: float = 60.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        positive = [
            "n_cs", "w_rc", "h_rc", "l_rc", "d_t_rc", "l_t_rc", "n_pipe_layers",
            "soil_depth", "air_height", "sim_n_concrete", "sim_n_soil", "sim_n_air",
            "n_l", "mpc_n_concrete", "mpc_n_soil", "mpc_n_air", "v_lts", "v_hts",
            "n_layers", "p_hp_el_min", "p_hp_el_max", "eta_hp", "dt_hp", "p_hr_max",
            "a_rt", "v_rt", "alpha_rt", "n_rt", "mdot_rt_max", "mdot_cs_max",
            "dt_l", "alpha_cs_w_c", "c_w", "rho_w", "c_c", "rho_c", "lam_c",
            "c_s", "rho_s", "lam_s", "c_a", "rho_a", "lam_a", "epsilon_smooth",
            "tau_c",
        ]
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"parameter {name} must be strictly positive")
        pairs = [
            ("t_lts_bottom_min", "t_lts_bottom_max"),
            ("t_hts_top_min", "t_hts_top_max"),
            ("t_cs_min", "t_cs_max"),
            ("t_lts_other_min", "t_lts_other_max"),
            ("t_hts_other_min", "t_hts_other_max"),
            ("t_rt_min", "t_rt_max"),
            ("p_hp_el_min", "p_hp_el_max"),
        ]
        for lo, hi in pairs:
            if not getattr(self, lo) < getattr(self, hi):
                raise ValueError(f"{lo} must be below {hi}")
        if self.mpc_n_air != 1:
            raise ValueError("MPC slab grid expects a single air cell")

    # -- derived quantities -----------------------------------------------------

    @property
    def tube_volume(self) -> float:
        """[m^3] water volume per cage."""
        import math

        return math.pi / 4.0 * self.d_t_rc**2 * self.l_t_rc

    @property
    def tube_area(self) -> float:
        """[m^2] tube surface per cage."""
        import math

        return math.pi * self.d_t_rc * self.l_t_rc

    def replace(self, **kw) -> "SystemParams":
        return dataclasses.replace(self, **kw)


def load_params(path: str | Path, base: SystemParams | None = None) -> SystemParams:
    """Read `name = value` overrides (one per line, # comments) onto base."""
    base = base if base is not None else SystemParams()
    fields = {f.name: f for f in dataclasses.fields(SystemParams)}
    overrides = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'name = value'")
        name, value = (part.strip() for part in line.split("=", 1))
        if name not in fields:
            raise ValueError(f"{path}:{lineno}: unknown parameter {name!r}")
        kind = fields[name].type
        overrides[name] = int(value) if kind == "int" else float(value)
    return base.replace(**overrides)


def save_params(params: SystemParams, path: str | Path) -> None:
    lines = [f"{f.name} = {getattr(params, f.name)!r}" for f in dataclasses.fields(SystemParams)]
    Path(path).write_text("\n".join(lines) + "\n")
