"""Packet motion and lifetimes.

Within one frame interval the wind is frozen at the packet's start
position, so a step is drawn exactly from
``N(x + mu(x, t) * h, sigma_x**2 * h * I)`` with ``h = t_to - t_from``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NegativeDuration, NonPositiveLifetime, NonPositiveMean
from .wind import WindField


def transition(pos, t_from: float, t_to: float, wind: WindField, sigma_x: float,
               rng: np.random.Generator | None = None, *, noise=None) -> np.ndarray:
    """Advance position(s) from ``t_from`` to ``t_to``.

    ``pos`` is ``(2,)`` or ``(n, 2)``. Standard-normal ``noise`` of the same
    shape may be supplied instead of ``rng``; with ``sigma_x == 0`` neither
    is needed.
    """
    h = t_to - t_from
    if h < 0:
        raise NegativeDuration(f"t_to={t_to} precedes t_from={t_from}")
    p = np.asarray(pos, dtype=float)
    out = p + wind(p, t_from) * h
    if sigma_x == 0 or h == 0:
        return out
    if noise is None:
        if rng is None:
            raise ValueError("transition needs rng or noise when sigma_x > 0")
        noise = rng.standard_normal(p.shape)
    return out + sigma_x * math.sqrt(h) * np.asarray(noise, dtype=float).reshape(p.shape)


def _open_uniform(rng: np.random.Generator, size=None):
    u = rng.random(size)
    return np.where(u == 0.0, 2.0**-54, u) if size is not None else (u or 2.0**-54)


def sample_track_lifetime(lambda_T: float, rng: np.random.Generator | None = None, *, u=None):
    """Exponential track lifetime with MEAN ``lambda_T`` hours.

    Drawn by inversion, ``-lambda_T * log(1 - u)``; pass ``u`` in (0, 1)
    directly or an ``rng``.
    """
    if not lambda_T > 0:
        raise NonPositiveMean(f"lambda_T must be positive, got {lambda_T}")
    if u is None:
        u = _open_uniform(rng)
    out = -lambda_T * np.log1p(-np.asarray(u, dtype=float))
    # u -> 0 gives 0; lifetimes must stay strictly positive
    out = np.maximum(out, np.finfo(float).tiny)
    return float(out) if np.ndim(out) == 0 else out


def lognormal_death_params(T_d: float, sigma_pd: float) -> tuple[float, float]:
    """Log-normal ``(mu, sigma**2)`` with mean ``T_d`` and std ``sigma_pd``."""
    if not T_d > 0:
        raise NonPositiveLifetime(f"T_d must be positive, got {T_d}")
    sigma_d2 = math.log1p((sigma_pd / T_d) ** 2)
    mu_d = math.log(T_d) - 0.5 * sigma_d2
    return mu_d, sigma_d2


def sample_packet_death(birth_time, T_d: float, sigma_pd: float,
                        rng: np.random.Generator | None = None, *, z=None):
    """Death time ``birth_time + LogNormal(mu_d, sigma_d2)``.

    ``z`` (standard normal, broadcastable with ``birth_time``) may be given
    in place of ``rng``. Always strictly later than ``birth_time``.
    """
    mu_d, sigma_d2 = lognormal_death_params(T_d, sigma_pd)
    b = np.asarray(birth_time, dtype=float)
    if sigma_d2 == 0.0:
        life = np.full(b.shape, float(T_d))
    else:
        if z is None:
            z = rng.standard_normal(b.shape)
        life = np.exp(mu_d + math.sqrt(sigma_d2) * np.asarray(z, dtype=float))
    d = b + life
    d = np.where(d > b, d, np.nextafter(b, np.inf))
    return float(d) if d.ndim == 0 else d


def survives(death_time, t_n: float):
    """True while the (pre-sampled) death time lies strictly after ``t_n``.

    Accepts a :class:`~shiptracks.state.Packet` or death time(s).
    """
    d = getattr(death_time, "death_time", death_time)
    out = np.asarray(d) > t_n
    return bool(out) if out.ndim == 0 else out
