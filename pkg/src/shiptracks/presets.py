"""Named scenarios."""

from __future__ import annotations

from .boats import paper_boats
from .config import SimConfig
from .wind import paper_circular

# Window chosen so the four boats enter at distinct times (red at 0 h,
# purple 2 h, yellow 8 h, blue 10 h).
FIG3_WINDOW = (0.0, 0.0, 17.0, 17.0)


def paper_fig3(seed: int = 0, grid=(512, 512)):
    """The four-boat circular-wind scenario: ``(config, wind, boats)``."""
    cfg = SimConfig(
        n_frames=100, dt=0.2, epsilon_lag=5.0, sigma_x=0.01, sigma_beta=0.01,
        lambda_T=80.0, sigma_pd=0.2, window=FIG3_WINDOW, grid=grid, seed=seed,
    )
    return cfg, paper_circular(cfg.n_frames, cfg.dt), paper_boats(cfg.n_frames, cfg.dt)


PRESETS = {"paper-fig3": paper_fig3}
