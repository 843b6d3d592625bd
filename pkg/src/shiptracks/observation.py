"""Observation process: intensity-gated detection plus age-scaled Gaussian jitter."""

from __future__ import annotations

import numpy as np

from .config import SimConfig
from .errors import NegativeAge
from .rng import CounterRng, Tag
from .state import MultiTargetObservation, MultiTargetState, Observation, Packet


def detection_probability(intensity, cfg: SimConfig):
    """1 where ``iota_low < intensity < iota_high`` (strict), else 0."""
    lo, hi = cfg.thresholds
    i = np.asarray(intensity, dtype=float)
    out = ((i > lo) & (i < hi)).astype(int)
    return int(out) if out.ndim == 0 else out


def intensity_at(image, pos, window) -> np.ndarray:
    """Pixel values of ``image`` at positions ``pos``; 0 outside the window.

    Row 0 of the image is the top edge (``y = ymax``).
    """
    p = np.asarray(pos, dtype=float).reshape(-1, 2)
    if image is None:
        return np.zeros(len(p))
    h, w = image.shape
    x0, y0, x1, y1 = window
    col = np.floor((p[:, 0] - x0) / (x1 - x0) * w).astype(np.int64)
    row = np.floor((y1 - p[:, 1]) / (y1 - y0) * h).astype(np.int64)
    # points on the far edges belong to the last pixel
    col = np.where(p[:, 0] == x1, w - 1, col)
    row = np.where(p[:, 1] == y0, h - 1, row)
    ok = (col >= 0) & (col < w) & (row >= 0) & (row < h)
    out = np.zeros(len(p))
    out[ok] = image[row[ok], col[ok]]
    return out


def observation_scale(age, sigma_x: float):
    """Standard deviation ``sigma_x * sqrt(age)`` of an observation's offset."""
    a = np.asarray(age, dtype=float)
    if np.any(a < 0):
        raise NegativeAge("observation time precedes packet birth")
    return sigma_x * np.sqrt(a)


def observe_packet(packet: Packet, t_n: float, sigma_x: float, rng=None, *,
                   detected: bool = True, noise=None) -> Observation | None:
    """Observe one packet at ``t_n``.

    Returns ``None`` when not ``detected``; otherwise the packet position
    plus ``N(0, sigma_x**2 * (t_n - birth_time) * I)`` jitter.
    """
    age = t_n - packet.birth_time
    scale = float(observation_scale(age, sigma_x))
    if not detected:
        return None
    pos = np.asarray(packet.pos, dtype=float)
    if scale > 0:
        if noise is None:
            noise = rng.standard_normal(2)
        pos = pos + scale * np.asarray(noise, dtype=float)
    return Observation((float(pos[0]), float(pos[1])), packet.id, t_n)


def observe_state(state: MultiTargetState, intensity_frame, cfg: SimConfig,
                  rng: CounterRng) -> MultiTargetObservation:
    """Union of per-packet observations at the state's frame.

    ``intensity_frame`` is the image used for detection (``None`` means zero
    intensity everywhere). With open thresholds every packet is observed.
    """
    if len(state) == 0:
        return MultiTargetObservation.empty(state.frame, state.frame_time)
    if cfg.thresholds_open:
        detected = np.ones(len(state), bool)
    else:
        detected = detection_probability(intensity_at(intensity_frame, state.pos, cfg.window),
                                          cfg).astype(bool)
    ids = state.ids[detected]
    scale = observation_scale(state.ages[detected], cfg.sigma_x)
    z = rng.normal(state.frame, Tag.OBSERVE, ids, 2)
    pos = state.pos[detected] + scale[:, None] * z
    return MultiTargetObservation(state.frame, state.frame_time, pos, ids)


def offset_variance_by_age(ages, offsets, bins) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-age-bin mean age, per-axis offset variance (about zero) and count."""
    ages = np.asarray(ages, float)
    off = np.asarray(offsets, float).reshape(-1, 2)
    idx = np.digitize(ages, bins) - 1
    centers, var, count = [], [], []
    for b in range(len(bins) - 1):
        m = idx == b
        if m.sum() < 2:
            continue
        centers.append(ages[m].mean())
        var.append(float(np.mean(off[m] ** 2)))
        count.append(int(m.sum()))
    return np.array(centers), np.array(var), np.array(count)

