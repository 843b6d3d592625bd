"""Packets, tracks, multi-target states and observation sets.

States are stored column-wise (one numpy array per attribute) so the
per-frame update stays vectorized; :class:`Packet` and
:class:`Observation` rows are materialized on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Packet:
    id: int
    track_id: int
    pos: tuple[float, float]
    birth_time: float
    death_time: float
    is_head: bool = False

    def __post_init__(self):
        if not self.death_time > self.birth_time:
            raise ValueError(f"packet {self.id}: death_time must exceed birth_time")


@dataclass(frozen=True)
class Track:
    track_id: int
    boat_id: int
    lifetime: float
    origin_time: float

    def __post_init__(self):
        if not self.lifetime > 0:
            raise ValueError(f"track {self.track_id}: lifetime must be positive")


@dataclass(frozen=True)
class Observation:
    pos: tuple[float, float]
    source_packet_id: int
    frame_time: float


def _frozen(a, dtype, shape=None):
    arr = np.array(a, dtype=dtype)
    if shape is not None:
        arr = arr.reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MultiTargetState:
    """The live packets at one frame, sorted by packet id."""

    frame: int
    frame_time: float
    ids: np.ndarray
    track_ids: np.ndarray
    pos: np.ndarray
    birth_time: np.ndarray
    death_time: np.ndarray
    is_head: np.ndarray
    tracks: dict = field(default_factory=dict)
    next_packet_id: int = 0
    next_track_id: int = 0

    def __post_init__(self):
        order = np.argsort(np.asarray(self.ids, dtype=np.int64), kind="stable")
        object.__setattr__(self, "ids", _frozen(np.asarray(self.ids, dtype=np.int64)[order], np.int64))
        for name, dtype, shape in (("track_ids", np.int64, None), ("pos", float, (-1, 2)),
                                   ("birth_time", float, None), ("death_time", float, None),
                                   ("is_head", bool, None)):
            a = np.asarray(getattr(self, name), dtype=dtype)
            if shape is not None:
                a = a.reshape(shape)
            object.__setattr__(self, name, _frozen(a[order], dtype))
        n = self.ids.size
        if any(getattr(self, k).shape[0] != n for k in ("track_ids", "pos", "birth_time",
                                                          "death_time", "is_head")):
            raise ValueError("state columns differ in length")

    @classmethod
    def empty(cls, frame: int, frame_time: float, tracks=None,
              next_packet_id: int = 0, next_track_id: int = 0) -> "MultiTargetState":
        return cls(frame, frame_time, np.empty(0, np.int64), np.empty(0, np.int64),
                   np.empty((0, 2)), np.empty(0), np.empty(0), np.empty(0, bool),
                   dict(tracks or {}), next_packet_id, next_track_id)

    def __len__(self) -> int:
        return int(self.ids.size)

    @property
    def ages(self) -> np.ndarray:
        return self.frame_time - self.birth_time

    @property
    def packets(self) -> list[Packet]:
        return [
            Packet(int(i), int(k), (float(p[0]), float(p[1])), float(b), float(d), bool(h))
            for i, k, p, b, d, h in zip(self.ids, self.track_ids, self.pos,
                                        self.birth_time, self.death_time, self.is_head)
        ]

    def subset(self, mask) -> "MultiTargetState":
        m = np.asarray(mask, dtype=bool)
        return MultiTargetState(self.frame, self.frame_time, self.ids[m], self.track_ids[m],
                                self.pos[m], self.birth_time[m], self.death_time[m],
                                self.is_head[m], self.tracks, self.next_packet_id,
                                self.next_track_id)

    def track_counts(self) -> dict[int, int]:
        ks, counts = np.unique(self.track_ids, return_counts=True)
        return {int(k): int(c) for k, c in zip(ks, counts)}

    def check(self) -> None:
        """Raise ``AssertionError`` if a state invariant is broken."""
        assert np.all(np.isfinite(self.pos)), "non-finite packet position"
        assert set(self.track_ids.tolist()) <= set(self.tracks), "packet references unknown track"
        assert np.all(self.death_time > self.frame_time), "dead packet in state"
        assert np.all(self.birth_time <= self.frame_time + 1e-9), "unborn packet in state"
        assert sum(self.track_counts().values()) == len(self), "cardinality mismatch"


@dataclass(frozen=True, eq=False)
class MultiTargetObservation:
    """Observation points at one frame, sorted by source packet id.

    ``source_ids`` exists for validation logs only.
    """

    frame: int
    frame_time: float
    pos: np.ndarray
    source_ids: np.ndarray

    def __post_init__(self):
        src = np.asarray(self.source_ids, dtype=np.int64)
        order = np.argsort(src, kind="stable")
        object.__setattr__(self, "source_ids", _frozen(src[order], np.int64))
        object.__setattr__(self, "pos", _frozen(np.asarray(self.pos, float).reshape(-1, 2)[order], float))

    @classmethod
    def empty(cls, frame: int, frame_time: float) -> "MultiTargetObservation":
        return cls(frame, frame_time, np.empty((0, 2)), np.empty(0, np.int64))

    def __len__(self) -> int:
        return int(self.source_ids.size)

    @property
    def observations(self) -> list[Observation]:
        return [Observation((float(p[0]), float(p[1])), int(i), self.frame_time)
                for p, i in zip(self.pos, self.source_ids)]

    def union(self, other: "MultiTargetObservation") -> "MultiTargetObservation":
        return MultiTargetObservation(self.frame, self.frame_time,
                                      np.concatenate([self.pos, other.pos]),
                                      np.concatenate([self.source_ids, other.source_ids]))
