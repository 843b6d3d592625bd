"""Run summaries: counts, track broadening, lifetimes and intensity."""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from pathlib import Path

import numpy as np

from .errors import MissingLog

# Var(x_i - (x_{i-1} + x_{i+1}) / 2) for independent points whose variance
# is linear along the track
SECOND_DIFF_GAIN = 1.5


def fit_slope(x, y, weights=None) -> float:
    """Weighted least-squares slope of ``y`` on ``x``."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    w = np.ones_like(x) if weights is None else np.asarray(weights, float)
    xm = np.average(x, weights=w)
    ym = np.average(y, weights=w)
    return float(np.sum(w * (x - xm) * (y - ym)) / np.sum(w * (x - xm) ** 2))


def binned_variance(ages, residuals, bin_width: float, min_count: int = 2):
    """Mean-square of zero-mean ``residuals`` in age bins of ``bin_width``.

    Returns ``(mean_age, variance, count)`` arrays over non-sparse bins.
    """
    ages = np.asarray(ages, float)
    r = np.asarray(residuals, float)
    idx = np.floor(ages / bin_width + 1e-9).astype(np.int64)
    out_a, out_v, out_n = [], [], []
    for b in np.unique(idx):
        m = idx == b
        if m.sum() < min_count:
            continue
        out_a.append(ages[m].mean())
        out_v.append(float(np.mean(r[m] ** 2)))
        out_n.append(int(m.sum()))
    return np.array(out_a), np.array(out_v), np.array(out_n)


def cross_track_residuals(pos, ages):
    """Cross-track second-difference residuals along one track.

    ``pos`` holds one track's packets at one frame sorted by age. For each
    interior packet the offset from the midpoint of its neighbours is
    projected on the normal of the neighbour chord. Returns
    ``(ages, residuals)`` for the interior packets.
    """
    p = np.asarray(pos, float)
    a = np.asarray(ages, float)
    if len(p) < 3:
        return np.empty(0), np.empty(0)
    chord = p[2:] - p[:-2]
    norm = np.hypot(chord[:, 0], chord[:, 1])
    ok = norm > 0
    r = p[1:-1] - 0.5 * (p[2:] + p[:-2])
    cross = (chord[:, 0] * r[:, 1] - chord[:, 1] * r[:, 0])
    return a[1:-1][ok], cross[ok] / norm[ok]


def broadening(frames_tracks, bin_width: float = 1.0) -> dict:
    """Age-binned cross-track variance and its fitted slope for one track.

    ``frames_tracks`` is an iterable of ``(pos, ages)`` snapshots of the track.
    """
    ages, res = [], []
    for pos, age in frames_tracks:
        order = np.argsort(age, kind="stable")
        a, r = cross_track_residuals(np.asarray(pos)[order], np.asarray(age)[order])
        ages.append(a)
        res.append(r)
    if not ages:
        return {"bins": [], "slope": None}
    a_all = np.concatenate(ages)
    r_all = np.concatenate(res)
    am, v, n = binned_variance(a_all, r_all, bin_width)
    v = v / SECOND_DIFF_GAIN
    slope = fit_slope(am, v, n) if len(am) >= 2 else None
    return {
        "bins": [{"age": float(x), "variance": float(y), "count": int(c)} for x, y, c in zip(am, v, n)],
        "slope": slope,
    }


def _read_events(path: Path) -> list[dict]:
    with path.open(encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def summarize_run(run_dir, bin_width: float = 1.0) -> dict:
    """Metrics report for a run directory written by the simulator."""
    run_dir = Path(run_dir)
    ev_path = run_dir / "events.jsonl"
    if not ev_path.exists():
        raise MissingLog(f"{ev_path} not found")
    events = _read_events(ev_path)
    meta_path = run_dir / "run.json"
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}

    birth_time: dict[int, float] = {}
    track_boat: dict[int, int] = {}
    track_life: dict[int, float] = {}
    lifetimes = []
    for e in events:
        if e["event"] in ("birth", "spawn"):
            birth_time[e["packet"]] = e["birth_time"]
        if e["event"] == "birth":
            track_boat[e["track"]] = e["boat"]
            track_life[e["track"]] = e["lifetime"]
        elif e["event"] == "death":
            lifetimes.append(e["death_time"] - e["birth_time"])

    counts: dict[int, dict[str, int]] = defaultdict(lambda: {"packets": 0, "observations": 0})
    snaps: dict[int, dict[int, list]] = defaultdict(lambda: defaultdict(list))
    times: dict[int, float] = {}
    pts_path = run_dir / "points.csv"
    if pts_path.exists():
        with pts_path.open(newline="") as fh:
            for row in csv.DictReader(fh):
                f = int(row["frame"])
                times[f] = float(row["t_hours"])
                if row["kind"] == "state":
                    counts[f]["packets"] += 1
                    pid = int(row["packet_id"])
                    snaps[int(row["track_id"])][f].append(
                        (float(row["x"]), float(row["y"]), times[f] - birth_time[pid]))
                else:
                    counts[f]["observations"] += 1
    n_frames = meta.get("n_frames", max(counts) + 1 if counts else 0)

    tracks = {}
    for k in sorted(track_boat):
        per_frame = []
        for f in sorted(snaps[k]):
            arr = np.asarray(snaps[k][f])
            per_frame.append((arr[:, :2], arr[:, 2]))
        b = broadening(per_frame, bin_width)
        tracks[str(k)] = {"boat_id": track_boat[k], "lifetime": track_life[k],
                          "cross_track_variance": b["bins"], "variance_slope": b["slope"]}

    if lifetimes:
        life = {"status": "observed", "count": len(lifetimes), "mean": float(np.mean(lifetimes))}
    else:
        life = {"status": "censored", "count": 0, "mean": None}

    vmax = meta.get("max_intensity")
    intensity = {"max": vmax} if vmax else {"max": None, "error": "AllZeroVideo"}
    return {
        "n_frames": n_frames,
        "frames": [{"frame": f, "t_hours": times.get(f, None), **counts[f]} for f in range(n_frames)],
        "n_tracks": len(track_boat),
        "tracks": tracks,
        "packet_lifetime": life,
        "intensity": intensity,
    }


def format_summary(s: dict) -> str:
    lines = [f"frames: {s['n_frames']}    tracks: {s['n_tracks']}", "", "frame  t_hours  packets  observations"]
    for fr in s["frames"]:
        t = "" if fr["t_hours"] is None else f"{fr['t_hours']:.2f}"
        lines.append(f"{fr['frame']:5d}  {t:>7}  {fr['packets']:7d}  {fr['observations']:12d}")
    lines.append("")
    for k, tr in s["tracks"].items():
        slope = tr["variance_slope"]
        slope_s = "n/a" if slope is None else f"{slope:.4g}"
        lines.append(f"track {k} (boat {tr['boat_id']}, T_d={tr['lifetime']:.3g} h): "
                     f"cross-track variance slope {slope_s} per hour over {len(tr['cross_track_variance'])} age bins")
    life = s["packet_lifetime"]
    if life["status"] == "censored":
        lines.append("packet lifetime: censored (no deaths before the horizon)")
    else:
        lines.append(f"packet lifetime: mean {life['mean']:.4g} h over {life['count']} deaths")
    it = s["intensity"]
    lines.append("max intensity: " + (f"{it['max']:.6g}" if it["max"] else f"error {it['error']}"))
    return "\n".join(lines)
