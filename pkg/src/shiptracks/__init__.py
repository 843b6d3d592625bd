"""Stochastic simulation of ship-emitted cloud-aerosol tracks."""

from .config import SimConfig, load_config, validate_config
from .engine import SimulationResult, run, step
from .presets import paper_fig3

__all__ = ["SimConfig", "SimulationResult", "load_config", "paper_fig3", "run", "step",
           "validate_config"]
__version__ = "0.1.0"
