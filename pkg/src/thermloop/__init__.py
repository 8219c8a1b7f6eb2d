"""Closed-loop workbench for mixed-integer MPC of a thermal supply plant."""

__version__ = "0.1.0"

from .params import SystemParams, load_params, save_params
from .structure import ExogenousInput, MpcControls, SimControls

__all__ = [
    "SystemParams",
    "load_params",
    "save_params",
    "ExogenousInput",
    "MpcControls",
    "SimControls",
    "__version__",
]
