"""Frame-by-frame simulation of packets, observations and rendered frames.

One step from frame ``n`` to ``n + 1`` applies, in this order:

1. removal of packets whose death time is not after ``t_{n+1}``;
2. motion of the survivors;
3. spawning from the heads of frame ``n`` (packets born at ``t_n``);
4. spontaneous births for boats whose lagged entry falls due;
5. head flags reset so only packets born at ``t_{n+1}`` are heads.

Every random draw comes from a substream keyed by (seed, frame, mechanism,
subject id), so the log and frames depend only on config and seed.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .config import SimConfig, validate_config
from .dynamics import transition
from .errors import AllZeroVideo
from .genesis import NewPackets, birth_frames, spawn_from_heads, spontaneous_births
from .observation import observe_state
from .render import advect_background, normalize_video, rasterize_frame, write_pgm
from .rng import CounterRng, Tag, stream_id
from .state import MultiTargetObservation, MultiTargetState

log = logging.getLogger(__name__)


@dataclass(eq=False)
class StepResult:
    state: MultiTargetState
    survived: np.ndarray
    spawned: NewPackets
    born: NewPackets
    died: MultiTargetState


def _boat_map(boats) -> dict:
    if isinstance(boats, dict):
        return boats
    return {b.boat_id: b for b in boats}


def _merge(state_cols, frame, t, tracks, next_pid, next_tid, *groups) -> MultiTargetState:
    ids, tids, pos, birth, death, head = state_cols
    for g, is_head in groups:
        ids = np.concatenate([ids, g.ids])
        tids = np.concatenate([tids, g.track_ids])
        pos = np.concatenate([pos, g.pos.reshape(-1, 2)])
        birth = np.concatenate([birth, g.birth_time])
        death = np.concatenate([death, g.death_time])
        head = np.concatenate([head, np.full(len(g), is_head)])
    return MultiTargetState(frame, t, ids, tids, pos, birth, death, head, tracks, next_pid, next_tid)


def initial_state(cfg: SimConfig, boats, rng: CounterRng, schedule=None) -> StepResult:
    """Frame 0: spontaneous births only."""
    boats = _boat_map(boats)
    if schedule is None:
        schedule = birth_frames(boats.values(), cfg)
    born = spontaneous_births(0, boats.values(), cfg, rng, schedule, 0, 0)
    tracks = {tr.track_id: tr for tr in born.tracks}
    empty = MultiTargetState.empty(0, 0.0)
    cols = (empty.ids, empty.track_ids, empty.pos, empty.birth_time, empty.death_time, empty.is_head)
    state = _merge(cols, 0, 0.0, tracks, len(born), len(born.tracks), (born, True))
    return StepResult(state, np.empty(0, np.int64), NewPackets(), born, empty)


def step(state: MultiTargetState, cfg: SimConfig, wind, boats, rng: CounterRng,
         schedule=None) -> StepResult:
    """Advance ``state`` by one frame (see module docstring for the order)."""
    boats = _boat_map(boats)
    if schedule is None:
        schedule = birth_frames(boats.values(), cfg)
    n = state.frame
    t0, t1 = cfg.frame_time(n), cfg.frame_time(n + 1)

    alive = state.death_time > t1
    died = state.subset(~alive)
    ids = state.ids[alive]
    z = rng.normal(n + 1, Tag.MOTION, ids, 2)
    moved = transition(state.pos[alive], t0, t1, wind, cfg.sigma_x, noise=z)

    heads = state.is_head
    spawned = spawn_from_heads(state.ids[heads], state.track_ids[heads], n + 1, cfg,
                               state.tracks, boats, rng, state.next_packet_id)
    next_pid = state.next_packet_id + len(spawned)
    born = spontaneous_births(n + 1, boats.values(), cfg, rng, schedule,
                              state.next_track_id, next_pid)
    next_pid += len(born)
    tracks = dict(state.tracks)
    tracks.update({tr.track_id: tr for tr in born.tracks})

    cols = (ids, state.track_ids[alive], moved, state.birth_time[alive],
            state.death_time[alive], np.zeros(ids.size, bool))
    new = _merge(cols, n + 1, t1, tracks, next_pid, state.next_track_id + len(born.tracks),
                 (spawned, True), (born, True))
    return StepResult(new, ids, spawned, born, died)


def _f(x) -> float:
    return float(x)


def _pos(p) -> list:
    return [float(p[0]), float(p[1])]


def _creation_events(frame, t, group: NewPackets, kind: str, tracks) -> list[dict]:
    out = []
    for i in np.argsort(group.ids, kind="stable"):
        pid, tid = int(group.ids[i]), int(group.track_ids[i])
        rec = {"t": _f(t), "frame": frame, "event": kind, "packet": pid, "track": tid,
               "pos": _pos(group.pos[i]), "birth_time": _f(group.birth_time[i]),
               "death_time": _f(group.death_time[i])}
        if kind == "spawn":
            parent = int(group.parent_ids[i])
            rec["parent"] = parent
            rec["stream"] = stream_id(frame, Tag.SPAWN, parent)
        else:
            tr = tracks[tid]
            rec["boat"] = tr.boat_id
            rec["lifetime"] = _f(tr.lifetime)
            rec["stream"] = stream_id(frame, Tag.BIRTH, tr.boat_id)
        out.append(rec)
    return out


def step_events(res: StepResult) -> list[dict]:
    """Death, spawn and birth records of one step, each group in id order."""
    st = res.state
    out = []
    for i in range(len(res.died)):
        d = res.died
        out.append({"t": _f(st.frame_time), "frame": st.frame, "event": "death",
                    "packet": int(d.ids[i]), "track": int(d.track_ids[i]), "pos": _pos(d.pos[i]),
                    "birth_time": _f(d.birth_time[i]), "death_time": _f(d.death_time[i])})
    out += _creation_events(st.frame, st.frame_time, res.spawned, "spawn", st.tracks)
    out += _creation_events(st.frame, st.frame_time, res.born, "birth", st.tracks)
    return out


def observation_events(obs: MultiTargetObservation, state: MultiTargetState) -> list[dict]:
    k = np.searchsorted(state.ids, obs.source_ids)
    return [{"t": _f(obs.frame_time), "frame": obs.frame, "event": "observe", "packet": int(pid),
             "track": int(state.track_ids[j]), "pos": _pos(p),
             "stream": stream_id(obs.frame, Tag.OBSERVE, int(pid))}
            for pid, j, p in zip(obs.source_ids, k, obs.pos)]


@dataclass(eq=False)
class SimulationResult:
    cfg: SimConfig
    states: list
    observations: list
    raw_frames: list
    events: list
    steps: list = field(default_factory=list)
    schedule: dict = field(default_factory=dict)

    @property
    def tracks(self) -> dict:
        return self.states[-1].tracks if self.states else {}

    @property
    def max_intensity(self) -> float:
        return max(float(np.max(f)) for f in self.raw_frames)

    @cached_property
    def frames(self):
        """Frames normalized by the video-wide maximum (raises AllZeroVideo)."""
        return normalize_video(self.raw_frames)

    def write(self, out_dir, frames: bool = True) -> Path:
        return write_run(self, out_dir, frames=frames)


def run(cfg: SimConfig, wind, boats, background=None, strict: bool = True) -> SimulationResult:
    """Simulate ``cfg.n_frames`` frames at ``t_n = n * dt``.

    Detection, when thresholds are set, reads frame ``n - 1`` scaled by the
    largest raw value seen so far (frame 0 sees only the background). With
    ``strict`` an all-zero video raises :class:`AllZeroVideo`.
    """
    cfg = validate_config(cfg)
    boats = _boat_map(boats)
    rng = CounterRng(cfg.seed)
    schedule = birth_frames(boats.values(), cfg)
    log.debug("first emission frames: %s", schedule)

    bg = None if background is None else np.asarray(background, dtype=float)
    if bg is not None and bg.shape != (cfg.grid[1], cfg.grid[0]):
        raise ValueError(f"background shape {bg.shape} does not match grid {cfg.grid}")

    states, observations, raw_frames, events, steps = [], [], [], [], []
    detect_img = bg
    running_max = 0.0
    res = initial_state(cfg, boats, rng, schedule)
    for n in range(cfg.n_frames):
        if n > 0:
            res = step(states[-1], cfg, wind, boats, rng, schedule)
            if bg is not None:
                bg = advect_background(bg, wind, cfg.frame_time(n - 1), cfg.dt, cfg.window)
        state = res.state
        steps.append(res)
        events += step_events(res)
        obs = observe_state(state, detect_img, cfg, rng)
        events += observation_events(obs, state)
        raw = rasterize_frame(obs, state, cfg, background=bg)
        states.append(state)
        observations.append(obs)
        raw_frames.append(raw)
        running_max = max(running_max, float(raw.max()))
        if not cfg.thresholds_open:
            detect_img = raw / running_max if running_max > 0 else np.zeros_like(raw)

    result = SimulationResult(cfg, states, observations, raw_frames, events, steps, schedule)
    if strict and not result.max_intensity > 0:
        raise AllZeroVideo("no positive intensity in any frame")
    return result


def write_events(events, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in events:
            fh.write(json.dumps(rec) + "\n")


def write_points(result: SimulationResult, path) -> None:
    """CSV ``frame,t_hours,kind,track_id,packet_id,x,y`` for states and observations."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame", "t_hours", "kind", "track_id", "packet_id", "x", "y"])
        for st, obs in zip(result.states, result.observations):
            t = repr(float(st.frame_time))
            for pid, tid, p in zip(st.ids, st.track_ids, st.pos):
                w.writerow([st.frame, t, "state", int(tid), int(pid), repr(float(p[0])), repr(float(p[1]))])
            k = np.searchsorted(st.ids, obs.source_ids)
            for pid, j, p in zip(obs.source_ids, k, obs.pos):
                w.writerow([st.frame, t, "obs", int(st.track_ids[j]), int(pid),
                            repr(float(p[0])), repr(float(p[1]))])


def run_metadata(result: SimulationResult) -> dict:
    try:
        vmax = result.max_intensity
    except ValueError:
        vmax = 0.0
    meta = {
        "config": result.cfg.to_dict(),
        "n_frames": len(result.states),
        "tracks": [
            {"track_id": tr.track_id, "boat_id": tr.boat_id, "lifetime": tr.lifetime,
             "origin_time": tr.origin_time}
            for tr in sorted(result.tracks.values(), key=lambda tr: tr.track_id)
        ],
        "first_emission_frame": {str(k): v for k, v in sorted(result.schedule.items())},
        "max_intensity": vmax if vmax > 0 else None,
    }
    if not vmax > 0:
        meta["error"] = "AllZeroVideo"
    return meta


def write_run(result: SimulationResult, out_dir, frames: bool = True) -> Path:
    """Write ``events.jsonl``, ``points.csv``, ``run.json`` and, if requested
    and the video is not all zero, ``frame_%04d.pgm`` files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_events(result.events, out / "events.jsonl")
    write_points(result, out / "points.csv")
    meta = run_metadata(result)
    with open(out / "run.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    if frames and meta["max_intensity"] is not None:
        vmax = meta["max_intensity"]
        for n, raw in enumerate(result.raw_frames):
            write_pgm(out / f"frame_{n:04d}.pgm", raw / vmax)
    return out
