"""Boat paths: analytic presets, waypoint files, and window entry times."""

from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import EmptyPath, InputFileError

log = logging.getLogger(__name__)

PRESET_NAMES = ("paper_red", "paper_blue", "paper_purple", "paper_yellow")


class BoatPath:
    boat_id: int
    name: str

    def position(self, t) -> np.ndarray:
        """Position at time(s) ``t``; shape ``(2,)`` for scalar ``t`` else ``(n, 2)``."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class AnalyticPath(BoatPath):
    boat_id: int
    name: str
    fn: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

    def position(self, t):
        tt = np.asarray(t, dtype=float)
        x, y = self.fn(tt)
        return np.stack([np.broadcast_to(x, tt.shape), np.broadcast_to(y, tt.shape)], axis=-1)


@dataclass(frozen=True, eq=False)
class WaypointPath(BoatPath):
    """Piecewise-linear path through ``(time, x, y)`` waypoints.

    Queries before the first or after the last waypoint clamp to the
    endpoint; the first such clamp is logged.
    """

    boat_id: int
    times: np.ndarray
    xy: np.ndarray
    name: str = ""
    _warned: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        xy = np.asarray(self.xy, dtype=float).reshape(-1, 2)
        if times.size == 0:
            raise EmptyPath(f"boat {self.boat_id} has no waypoints")
        if times.size != xy.shape[0]:
            raise ValueError("waypoint times and positions differ in length")
        if np.any(np.diff(times) <= 0):
            raise ValueError(f"boat {self.boat_id}: waypoint times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(xy))):
            raise ValueError(f"boat {self.boat_id}: waypoints must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "xy", xy)
        if not self.name:
            object.__setattr__(self, "name", f"boat_{self.boat_id}")

    def position(self, t):
        tt = np.asarray(t, dtype=float)
        if not self._warned and np.any((tt < self.times[0]) | (tt > self.times[-1])):
            self._warned.append(True)
            log.warning("boat %s queried outside [%g, %g] h; clamping to endpoint",
                        self.boat_id, self.times[0], self.times[-1])
        x = np.interp(tt, self.times, self.xy[:, 0])
        y = np.interp(tt, self.times, self.xy[:, 1])
        return np.stack([x, y], axis=-1)


def boat_position(path: BoatPath, t) -> np.ndarray:
    return path.position(t)


def paper_boats(n_frames: int = 100, dt: float = 0.2,
                red_rates: tuple[float, float] = (10.0, 2.0)) -> list[AnalyticPath]:
    """The four boats of the reference scenario, ids 1-4.

    ``red_rates`` are the divisors ``(a, b)`` in the red boat's angular
    rates ``pi t / (a N dt)`` (x) and ``pi t / (b N dt)`` (y).
    """
    span = n_frames * dt
    ra, rb = red_rates
    return [
        AnalyticPath(1, "paper_red", lambda t: (5 * np.cos(np.pi * t / (ra * span)) + 3,
                                                5 * np.sin(np.pi * t / (rb * span)) + 2)),
        AnalyticPath(2, "paper_blue", lambda t: (1 + 5 * t / span, 18 - 2 * t / span)),
        AnalyticPath(3, "paper_purple", lambda t: (1 + 5 * t / span, 18 - 10 * t / span)),
        AnalyticPath(4, "paper_yellow", lambda t: (-4 + 10 * t / span, 10 + 2 * t / span)),
    ]


def preset_boat(name: str, n_frames: int = 100, dt: float = 0.2) -> AnalyticPath:
    for b in paper_boats(n_frames, dt):
        if b.name == name:
            return b
    raise InputFileError(f"unknown boat preset {name!r}; choose from {', '.join(PRESET_NAMES)}")


def load_waypoints_csv(path) -> list[WaypointPath]:
    """Load boats from CSV with header ``boat_id,time_hours,x,y``."""
    path = Path(path)
    groups: dict[int, list[tuple[float, float, float]]] = defaultdict(list)
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["boat_id", "time_hours", "x", "y"]:
                raise InputFileError(f"{path}: header must be boat_id,time_hours,x,y")
            for r in reader:
                groups[int(r["boat_id"])].append((float(r["time_hours"]), float(r["x"]), float(r["y"])))
    except OSError as exc:
        raise InputFileError(f"cannot read boat file {path}: {exc}") from exc
    except (ValueError, TypeError) as exc:
        raise InputFileError(f"{path}: malformed row ({exc})") from exc
    if not groups:
        raise InputFileError(f"{path}: no waypoints")
    boats = []
    for bid in sorted(groups):
        pts = np.asarray(groups[bid])
        try:
            boats.append(WaypointPath(bid, pts[:, 0], pts[:, 1:]))
        except ValueError as exc:
            raise InputFileError(f"{path}: {exc}") from exc
    return boats


def boats_from_spec(spec, n_frames: int, dt: float) -> list[BoatPath]:
    """Preset names and/or waypoint CSV paths -> list of boats with unique ids."""
    items = [spec] if isinstance(spec, str) else list(spec)
    boats: list[BoatPath] = []
    for item in items:
        if item in PRESET_NAMES:
            boats.append(preset_boat(item, n_frames, dt))
        else:
            boats.extend(load_waypoints_csv(item))
    ids = [b.boat_id for b in boats]
    if len(set(ids)) != len(ids):
        raise InputFileError(f"duplicate boat ids in {items}")
    return boats


def inside(pos, window) -> np.ndarray:
    x0, y0, x1, y1 = window
    p = np.asarray(pos, dtype=float)
    return (p[..., 0] >= x0) & (p[..., 0] <= x1) & (p[..., 1] >= y0) & (p[..., 1] <= y1)


def entry_time(path: BoatPath, window, horizon: float, dt: float, tol: float = 1e-6) -> float | None:
    """Earliest time in ``[0, horizon]`` at which the boat is inside ``window``.

    The path is sampled every ``dt / 10`` and the first outside-to-inside
    crossing is refined by bisection to ``tol`` hours. Visits shorter than
    the sampling step can be missed.
    """
    step = dt / 10.0
    n = int(math.ceil(horizon / step - 1e-9))
    ts = np.arange(n + 1) * step
    ts[-1] = min(ts[-1], horizon)
    flags = inside(path.position(ts), window)
    hits = np.flatnonzero(flags)
    if hits.size == 0:
        return None
    k = int(hits[0])
    if k == 0:
        return 0.0
    lo, hi = float(ts[k - 1]), float(ts[k])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if inside(path.position(mid), window):
            hi = mid
        else:
            lo = mid
    return hi
