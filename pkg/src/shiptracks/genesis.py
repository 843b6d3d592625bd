"""New packets: one spontaneous birth per boat entry, then spawning from heads."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .boats import BoatPath, entry_time, inside
from .config import SimConfig
from .dynamics import sample_packet_death, sample_track_lifetime
from .errors import UnknownBoat
from .rng import CounterRng, Tag
from .state import Packet, Track

log = logging.getLogger(__name__)


@dataclass
class NewPackets:
    """Packets created in one mechanism at one frame (column-wise)."""

    ids: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    track_ids: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    pos: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    birth_time: np.ndarray = field(default_factory=lambda: np.empty(0))
    death_time: np.ndarray = field(default_factory=lambda: np.empty(0))
    parent_ids: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))
    tracks: list = field(default_factory=list)

    def __len__(self) -> int:
        return int(self.ids.size)

    @property
    def packets(self) -> list[Packet]:
        return [Packet(int(i), int(k), (float(p[0]), float(p[1])), float(b), float(d), True)
                for i, k, p, b, d in zip(self.ids, self.track_ids, self.pos,
                                         self.birth_time, self.death_time)]


def birth_frames(boats, cfg: SimConfig) -> dict[int, int | None]:
    """Frame index at which each boat's first emission becomes visible.

    That is the first ``n`` with ``entry + epsilon <= n * dt``; ``None`` if
    the boat never enters the window or the lagged entry falls past the
    last frame.
    """
    out: dict[int, int | None] = {}
    for b in boats:
        te = entry_time(b, cfg.window, cfg.horizon, cfg.dt)
        if te is None:
            out[b.boat_id] = None
            continue
        n = max(0, math.ceil((te + cfg.epsilon_lag) / cfg.dt - 1e-9))
        out[b.boat_id] = n if n < cfg.n_frames else None
    return out


def emitting(boat: BoatPath, frame: int, cfg: SimConfig) -> bool:
    """Whether ``boat`` feeds its track at ``frame``: within the horizon and
    its lagged position inside the window."""
    t = cfg.frame_time(frame)
    if t > cfg.horizon:
        return False
    return bool(inside(boat.position(t - cfg.epsilon_lag), cfg.window))


def _birth_generator(rng, frame: int, boat_id: int) -> np.random.Generator:
    if isinstance(rng, CounterRng):
        return rng.generator(frame, Tag.BIRTH, boat_id)
    return rng


def spontaneous_births(frame: int, boats, cfg: SimConfig, rng, schedule=None,
                       next_track_id: int = 0, next_packet_id: int = 0) -> NewPackets:
    """Create tracks for every boat whose lagged entry is due at ``frame``.

    Each due boat gets ``N_b`` packets around its position ``epsilon`` hours
    earlier, with ``N_b = 1`` when ``cfg.lambda_gamma`` is ``None`` and
    ``Poisson(lambda_gamma)`` (capped at ``cfg.max_births``) otherwise. A
    boat drawing zero packets creates no track.
    """
    if schedule is None:
        schedule = birth_frames(boats, cfg)
    t = cfg.frame_time(frame)
    out = NewPackets()
    cols: dict[str, list] = {k: [] for k in ("ids", "track_ids", "pos", "birth_time", "death_time")}
    tid, pid = next_track_id, next_packet_id
    for boat in sorted(boats, key=lambda b: b.boat_id):
        if schedule.get(boat.boat_id) != frame:
            continue
        g = _birth_generator(rng, frame, boat.boat_id)
        lifetime = sample_track_lifetime(cfg.lambda_T, u=g.random() or 2.0**-54)
        if cfg.lambda_gamma is None:
            count = 1
        else:
            count = int(g.poisson(cfg.lambda_gamma))
            if count > cfg.max_births:
                log.warning("boat %s drew %d births at frame %d; capped at %d",
                            boat.boat_id, count, frame, cfg.max_births)
                count = cfg.max_births
        if count == 0:
            continue
        center = boat.position(t - cfg.epsilon_lag)
        pos = center + cfg.birth_spread * g.standard_normal((count, 2))
        death = sample_packet_death(np.full(count, t), lifetime, cfg.sigma_pd,
                                    z=g.standard_normal(count))
        out.tracks.append(Track(tid, boat.boat_id, lifetime, t))
        cols["ids"].append(np.arange(pid, pid + count))
        cols["track_ids"].append(np.full(count, tid))
        cols["pos"].append(pos)
        cols["birth_time"].append(np.full(count, t))
        cols["death_time"].append(np.atleast_1d(death))
        tid += 1
        pid += count
    if out.tracks:
        out.ids = np.concatenate(cols["ids"]).astype(np.int64)
        out.track_ids = np.concatenate(cols["track_ids"]).astype(np.int64)
        out.pos = np.concatenate(cols["pos"])
        out.birth_time = np.concatenate(cols["birth_time"])
        out.death_time = np.concatenate(cols["death_time"])
        out.parent_ids = np.full(out.ids.size, -1, np.int64)
    return out


def spawn_from_heads(head_ids, head_track_ids, frame: int, cfg: SimConfig, tracks, boats,
                     rng: CounterRng, next_packet_id: int = 0) -> NewPackets:
    """Bernoulli spawning at ``frame`` from the given heads (vectorized).

    The caller passes only heads, i.e. packets born at ``frame - 1``. A
    head whose boat is emitting spawns with probability ``cfg.p_spawn`` one
    packet placed ``N(boat(t - eps), eps * sigma_beta**2 * I)``. Draws are
    keyed by the head's id.
    """
    head_ids = np.asarray(head_ids, dtype=np.int64)
    head_track_ids = np.asarray(head_track_ids, dtype=np.int64)
    out = NewPackets()
    if head_ids.size == 0:
        return out
    t = cfg.frame_time(frame)
    boat_of = []
    for k in head_track_ids:
        track = tracks.get(int(k))
        if track is None or track.boat_id not in boats:
            raise UnknownBoat(f"track {int(k)} has no boat")
        boat_of.append(track.boat_id)
    boat_of = np.asarray(boat_of)
    centers = np.empty((head_ids.size, 2))
    active = np.zeros(head_ids.size, bool)
    for bid in np.unique(boat_of):
        m = boat_of == bid
        if emitting(boats[int(bid)], frame, cfg):
            active[m] = True
            centers[m] = boats[int(bid)].position(t - cfg.epsilon_lag)
    u = rng.uniform(frame, Tag.SPAWN, head_ids, 1)[:, 0]
    z = rng.normal(frame, Tag.SPAWN, head_ids, 3, start_block=1)
    fire = active & (u < cfg.p_spawn)
    n = int(fire.sum())
    if n == 0:
        return out
    spread = math.sqrt(cfg.epsilon_lag) * cfg.sigma_beta
    lifetimes = np.array([tracks[int(k)].lifetime for k in head_track_ids[fire]])
    out.ids = np.arange(next_packet_id, next_packet_id + n, dtype=np.int64)
    out.parent_ids = head_ids[fire]
    out.track_ids = head_track_ids[fire]
    out.pos = centers[fire] + spread * z[fire, :2]
    out.birth_time = np.full(n, t)
    out.death_time = np.array([
        sample_packet_death(t, T_d, cfg.sigma_pd, z=zd)
        for T_d, zd in zip(lifetimes, z[fire, 2])
    ])
    return out


def spawn(head: Packet, frame: int, cfg: SimConfig, tracks, boats, rng,
          new_id: int | None = None) -> list[Packet]:
    """Spawn from a single packet; returns zero or one new packets.

    ``rng`` is a :class:`CounterRng` (keyed draws) or a numpy Generator.
    Packets that are not heads born in the previous interval spawn nothing.
    """
    track = tracks.get(head.track_id)
    if track is None or track.boat_id not in boats:
        raise UnknownBoat(f"track {head.track_id} has no boat")
    born = round(head.birth_time / cfg.dt)
    if not head.is_head or born != frame - 1:
        return []
    boat = boats[track.boat_id]
    if not emitting(boat, frame, cfg):
        return []
    t = cfg.frame_time(frame)
    new_id = head.id + 1 if new_id is None else new_id
    if isinstance(rng, CounterRng):
        got = spawn_from_heads([head.id], [head.track_id], frame, cfg, tracks, boats, rng, new_id)
        return got.packets
    if rng.random() >= cfg.p_spawn:
        return []
    spread = math.sqrt(cfg.epsilon_lag) * cfg.sigma_beta
    pos = boat.position(t - cfg.epsilon_lag) + spread * rng.standard_normal(2)
    death = sample_packet_death(t, track.lifetime, cfg.sigma_pd, rng)
    return [Packet(new_id, head.track_id, (float(pos[0]), float(pos[1])), t, float(death), True)]
