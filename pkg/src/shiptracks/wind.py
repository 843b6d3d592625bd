"""Wind (drift) fields: constant, the analytic circular preset, and gridded data."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import InputFileError, OutOfDomain


def _as_points(pos) -> tuple[np.ndarray, bool]:
    p = np.asarray(pos, dtype=float)
    single = p.ndim == 1
    return p.reshape(-1, 2), single


class WindField:
    """Base class. Subclasses implement ``velocity(points, t)`` on ``(n, 2)``."""

    def velocity(self, points: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, pos, t: float) -> np.ndarray:
        pts, single = _as_points(pos)
        v = self.velocity(pts, float(t))
        return v[0] if single else v


@dataclass(frozen=True)
class Uniform(WindField):
    u: float
    v: float

    def velocity(self, points, t):
        out = np.empty_like(points, dtype=float)
        out[:, 0] = self.u
        out[:, 1] = self.v
        return out


@dataclass(frozen=True)
class CircularWind(WindField):
    """Solid-body rotation about a centre drifting at constant velocity.

    Speed at distance ``r`` from the centre is ``rate * r``; the direction
    is tangential, counterclockwise unless ``clockwise`` is set.
    """

    rate: float
    center0: tuple[float, float] = (0.0, 0.0)
    center_velocity: tuple[float, float] = (0.0, 0.0)
    clockwise: bool = False

    def center(self, t: float) -> np.ndarray:
        return np.asarray(self.center0) + t * np.asarray(self.center_velocity)

    def velocity(self, points, t):
        d = points - self.center(t)
        s = -1.0 if self.clockwise else 1.0
        out = np.empty_like(d)
        out[:, 0] = -s * self.rate * d[:, 1]
        out[:, 1] = s * self.rate * d[:, 0]
        return out


def paper_circular(n_frames: int = 100, dt: float = 0.2, clockwise: bool = False) -> CircularWind:
    """The four-boat scenario's wind: speed ``10*pi/(4*N*dt) * |x - c(t)|``
    about the centre ``c(t) = (0.2 t, -0.1 t)``."""
    return CircularWind(
        rate=10.0 * math.pi / (4.0 * n_frames * dt),
        center_velocity=(0.2, -0.1),
        clockwise=clockwise,
    )


@dataclass(frozen=True, eq=False)
class GriddedField(WindField):
    """Velocities on a regular ``(t, x, y)`` lattice.

    Interpolation is linear in time and bilinear in space. Queries outside
    the lattice hull are clamped to it unless ``clamp=False``, in which
    case :class:`OutOfDomain` is raised.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    uv: np.ndarray  # shape (nt, nx, ny, 2)
    clamp: bool = True
    _interp: object = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("t", "x", "y"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.ndim != 1 or a.size < 1 or np.any(np.diff(a) <= 0):
                raise ValueError(f"grid axis {name} must be strictly increasing")
            object.__setattr__(self, name, a)
        uv = np.asarray(self.uv, dtype=float)
        if uv.shape != (self.t.size, self.x.size, self.y.size, 2):
            raise ValueError(f"velocity array has shape {uv.shape}, expected "
                             f"{(self.t.size, self.x.size, self.y.size, 2)}")
        if not np.all(np.isfinite(uv)):
            raise ValueError("gridded velocities must be finite")
        if self.x.size < 2 or self.y.size < 2:
            raise ValueError("gridded field needs at least 2 nodes along x and y")
        object.__setattr__(self, "uv", uv)
        if self.t.size == 1:
            interp = RegularGridInterpolator((self.x, self.y), uv[0], method="linear")
        else:
            interp = RegularGridInterpolator((self.t, self.x, self.y), uv, method="linear")
        object.__setattr__(self, "_interp", interp)

    def velocity(self, points, t):
        x, y = points[:, 0], points[:, 1]
        if not self.clamp:
            outside = ((x < self.x[0]) | (x > self.x[-1]) | (y < self.y[0]) | (y > self.y[-1]))
            if np.any(outside) or (self.t.size > 1 and not self.t[0] <= t <= self.t[-1]):
                raise OutOfDomain(f"wind query at t={t} outside the gridded field")
        x = np.clip(x, self.x[0], self.x[-1])
        y = np.clip(y, self.y[0], self.y[-1])
        if self.t.size == 1:
            q = np.column_stack([x, y])
        else:
            tt = np.full_like(x, min(max(t, self.t[0]), self.t[-1]))
            q = np.column_stack([tt, x, y])
        return self._interp(q)


def eval_wind(field: WindField, pos, t: float) -> np.ndarray:
    """Velocity of ``field`` at ``pos`` (shape ``(2,)`` or ``(n, 2)``) and time ``t``."""
    return field(pos, t)


def load_wind_csv(path, clamp: bool = True) -> GriddedField:
    """Load a gridded field from CSV with header ``t_hours,x,y,u,v``.

    Rows may come in any order but must cover the full lattice exactly once.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["t_hours", "x", "y", "u", "v"]:
                raise InputFileError(f"{path}: header must be t_hours,x,y,u,v")
            rows = [[float(r[k]) for k in ("t_hours", "x", "y", "u", "v")] for r in reader]
    except OSError as exc:
        raise InputFileError(f"cannot read wind file {path}: {exc}") from exc
    except (ValueError, TypeError) as exc:
        raise InputFileError(f"{path}: non-numeric entry ({exc})") from exc
    if not rows:
        raise InputFileError(f"{path}: no data rows")
    a = np.asarray(rows)
    ts, xs, ys = (np.unique(a[:, i]) for i in range(3))
    if len(a) != ts.size * xs.size * ys.size:
        raise InputFileError(
            f"{path}: {len(a)} rows do not form a full {ts.size}x{xs.size}x{ys.size} lattice")
    it = np.searchsorted(ts, a[:, 0])
    ix = np.searchsorted(xs, a[:, 1])
    iy = np.searchsorted(ys, a[:, 2])
    uv = np.full((ts.size, xs.size, ys.size, 2), np.nan)
    seen = np.zeros((ts.size, xs.size, ys.size), dtype=bool)
    seen[it, ix, iy] = True
    if not seen.all():
        raise InputFileError(f"{path}: lattice has duplicate or missing nodes")
    uv[it, ix, iy] = a[:, 3:5]
    try:
        return GriddedField(ts, xs, ys, uv, clamp=clamp)
    except ValueError as exc:
        raise InputFileError(f"{path}: {exc}") from exc


def wind_from_spec(spec: str, n_frames: int, dt: float) -> WindField:
    """Build a wind field from a short text spec.

    ``paper_circular`` / ``paper_circular:cw``, ``uniform:U,V``, or a path
    to a gridded CSV file.
    """
    name, _, arg = spec.partition(":")
    if name == "paper_circular":
        if arg not in ("", "ccw", "cw"):
            raise InputFileError(f"bad rotation {arg!r} for paper_circular (use cw or ccw)")
        return paper_circular(n_frames, dt, clockwise=(arg == "cw"))
    if name == "uniform":
        try:
            u, v = (float(s) for s in arg.split(","))
        except ValueError as exc:
            raise InputFileError(f"bad uniform wind spec {spec!r}") from exc
        return Uniform(u, v)
    return load_wind_csv(spec)
