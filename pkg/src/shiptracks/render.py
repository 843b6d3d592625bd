"""Rasterization of observation sets into pixel intensities, and PGM I/O.

Each observation contributes the exact integral of its isotropic Gaussian
over every pixel, computed as a product of 1-d normal CDF differences and
cut off ``truncate`` standard deviations from the mean. Contributions are
accumulated in 2**-40 fixed point so that the per-pixel sum is exact and
independent of summation order; the result is therefore linear in the
observation set bit for bit. Per-pixel totals must stay below 2**13.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from .config import SimConfig
from .errors import AllZeroVideo, InputFileError
from .state import MultiTargetObservation, MultiTargetState

FIXED_BITS = 40
_ONE = float(2**FIXED_BITS)
_INV_ONE = 2.0**-FIXED_BITS
TRUNCATE = 6.0
_CHUNK_ELEMS = 1 << 22


def pixel_geometry(window, grid) -> tuple[float, float]:
    x0, y0, x1, y1 = window
    w, h = grid
    return (x1 - x0) / w, (y1 - y0) / h


def _interval_mass(a, b):
    # P(a < Z < b), evaluated on the side of the mean that keeps precision
    upper = a > 0
    return np.where(upper, ndtr(-a) - ndtr(-b), ndtr(b) - ndtr(a))


def _axis_weights(center, sigma, lo_edge, step, n_pix, half, truncate):
    """``(m, 2*half+1)`` pixel indices and masses along one axis."""
    first = np.floor((center - lo_edge) / step).astype(np.int64) - half
    idx = first[:, None] + np.arange(2 * half + 1)[None, :]
    left = lo_edge + idx * step
    # very small sigma may overflow to +-inf, which ndtr handles exactly
    with np.errstate(over="ignore"):
        a = (left - center[:, None]) / sigma[:, None]
        b = (left + step - center[:, None]) / sigma[:, None]
    wgt = _interval_mass(a, b)
    # each point keeps only its own stencil, whatever the chunk's width
    own = np.minimum(np.ceil(truncate * sigma / step).astype(np.int64) + 1, n_pix)
    off = np.abs(np.arange(2 * half + 1) - half)[None, :]
    ok = (idx >= 0) & (idx < n_pix) & (off <= own[:, None])
    wgt = np.where(ok, wgt, 0.0)
    return np.clip(idx, 0, n_pix - 1), wgt


def accumulate_fixed(pos, sigma, window, grid, truncate: float = TRUNCATE) -> np.ndarray:
    """Fixed-point raster (int64, units of 2**-40) of Gaussian points.

    Output shape is ``(height, width)`` with row 0 at ``y = ymax``. Points
    with zero ``sigma`` put their whole unit mass in the containing pixel.
    """
    pos = np.asarray(pos, dtype=float).reshape(-1, 2)
    sigma = np.broadcast_to(np.asarray(sigma, dtype=float), (len(pos),))
    w, h = grid
    x0, y0, x1, y1 = window
    px, py = pixel_geometry(window, grid)
    acc = np.zeros((h, w), dtype=np.int64)

    point = sigma == 0
    if np.any(point):
        p = pos[point]
        col = np.floor((p[:, 0] - x0) / px).astype(np.int64)
        row = np.floor((y1 - p[:, 1]) / py).astype(np.int64)
        col = np.where(p[:, 0] == x1, w - 1, col)
        row = np.where(p[:, 1] == y0, h - 1, row)
        ok = (col >= 0) & (col < w) & (row >= 0) & (row < h)
        np.add.at(acc, (row[ok], col[ok]), np.int64(2**FIXED_BITS))

    spread = ~point
    if not np.any(spread):
        return acc
    p = pos[spread]
    s = sigma[spread]
    order = np.argsort(s, kind="stable")
    p, s = p[order], s[order]
    start = 0
    while start < len(s):
        # grow the chunk while the shared stencil stays within budget
        stop = start + 1
        while True:
            hx = min(int(math.ceil(truncate * s[stop - 1] / px)) + 1, w)
            hy = min(int(math.ceil(truncate * s[stop - 1] / py)) + 1, h)
            if stop == len(s) or (stop + 1 - start) * (2 * hx + 1) * (2 * hy + 1) > _CHUNK_ELEMS:
                break
            stop += 1
        cx, wx = _axis_weights(p[start:stop, 0], s[start:stop], x0, px, w, hx, truncate)
        # rows count downward from the top edge
        ry, wy = _axis_weights(y1 - p[start:stop, 1], s[start:stop], 0.0, py, h, hy, truncate)
        q = np.rint(wy[:, :, None] * wx[:, None, :] * _ONE).astype(np.int64)
        rows = np.broadcast_to(ry[:, :, None], q.shape)
        cols = np.broadcast_to(cx[:, None, :], q.shape)
        nz = q != 0
        np.add.at(acc, (rows[nz], cols[nz]), q[nz])
        start = stop
    return acc


def from_fixed(acc) -> np.ndarray:
    return np.asarray(acc, dtype=np.int64).astype(np.float64) * _INV_ONE


def rasterize_points(pos, sigma, window, grid, truncate: float = TRUNCATE) -> np.ndarray:
    """Float raster of unit-mass Gaussian points (see :func:`accumulate_fixed`)."""
    return from_fixed(accumulate_fixed(pos, sigma, window, grid, truncate))


def observation_sigmas(obs: MultiTargetObservation, state: MultiTargetState,
                       sigma_x: float) -> np.ndarray:
    """Per-observation std ``sigma_x * sqrt(age)`` from the source packets' ages."""
    if len(obs) == 0:
        return np.empty(0)
    k = np.searchsorted(state.ids, obs.source_ids)
    if np.any(k >= len(state.ids)) or np.any(state.ids[np.minimum(k, len(state.ids) - 1)] != obs.source_ids):
        raise KeyError("observation references a packet missing from the state")
    age = state.frame_time - state.birth_time[k]
    return sigma_x * np.sqrt(age)


def rasterize_frame(obs: MultiTargetObservation, state: MultiTargetState, cfg: SimConfig,
                    background=None, truncate: float = TRUNCATE) -> np.ndarray:
    """Raw (unnormalized) intensity image ``(height, width)`` for one frame."""
    sig = observation_sigmas(obs, state, cfg.sigma_x)
    img = rasterize_points(obs.pos, sig, cfg.window, cfg.grid, truncate)
    if background is not None:
        img = img + background
    return img


def normalize_video(frames):
    """Divide every frame by the single largest pixel value of the video."""
    if len(frames) == 0:
        raise ValueError("no frames to normalize")
    vmax = max(float(np.max(f)) for f in frames)
    if not vmax > 0:
        raise AllZeroVideo("no positive intensity in any frame")
    if isinstance(frames, np.ndarray):
        return frames / vmax
    return [np.asarray(f) / vmax for f in frames]


def to_uint16(normalized) -> np.ndarray:
    return np.clip(np.rint(np.asarray(normalized) * 65535.0), 0, 65535).astype(">u2")


def write_pgm(path, normalized) -> None:
    """Write a [0, 1] image as binary 16-bit PGM (P5, maxval 65535, big-endian)."""
    data = to_uint16(normalized)
    h, w = data.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n65535\n" % (w, h))
        fh.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a binary PGM (8 or 16 bit) scaled to [0, 1]."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputFileError(f"cannot read image {path}: {exc}") from exc
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        if raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] != b"\n":
                pos += 1
            continue
        end = pos
        while end < len(raw) and not raw[end:end + 1].isspace():
            end += 1
        if end == pos:
            raise InputFileError(f"{path}: truncated PGM header")
        tokens.append(raw[pos:end])
        pos = end
    if tokens[0] != b"P5":
        raise InputFileError(f"{path}: not a binary PGM")
    w, h, maxval = (int(t) for t in tokens[1:])
    pos += 1
    dtype = ">u2" if maxval > 255 else "u1"
    n = w * h * np.dtype(dtype).itemsize
    if len(raw) - pos < n:
        raise InputFileError(f"{path}: truncated pixel data")
    img = np.frombuffer(raw[pos:pos + n], dtype=dtype).reshape(h, w)
    return img.astype(float) / maxval


def pixel_centers(window, grid) -> np.ndarray:
    """``(height, width, 2)`` array of pixel-centre coordinates."""
    x0, y0, x1, y1 = window
    w, h = grid
    px, py = pixel_geometry(window, grid)
    xs = x0 + (np.arange(w) + 0.5) * px
    ys = y1 - (np.arange(h) + 0.5) * py
    X, Y = np.meshgrid(xs, ys)
    return np.stack([X, Y], axis=-1)


def advect_background(image, wind, t: float, dt: float, window) -> np.ndarray:
    """Carry a background image forward by ``dt`` hours along the wind.

    Semi-Lagrangian with nearest-neighbour lookup: each pixel takes the value
    found ``wind * dt`` upstream of its centre; upstream points outside the
    window read as 0.
    """
    h, w = image.shape
    centers = pixel_centers(window, (w, h)).reshape(-1, 2)
    src = centers - wind(centers, t) * dt
    x0, y0, x1, y1 = window
    px, py = pixel_geometry(window, (w, h))
    col = np.floor((src[:, 0] - x0) / px).astype(np.int64)
    row = np.floor((y1 - src[:, 1]) / py).astype(np.int64)
    ok = (col >= 0) & (col < w) & (row >= 0) & (row < h)
    out = np.zeros(h * w)
    out[ok] = image[row[ok], col[ok]]
    return out.reshape(h, w)
