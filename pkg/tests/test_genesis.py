import math

import numpy as np
import pytest

from shiptracks.boats import AnalyticPath
from shiptracks.config import SimConfig
from shiptracks.errors import UnknownBoat
from shiptracks.genesis import birth_frames, spawn, spawn_from_heads, spontaneous_births
from shiptracks.rng import CounterRng
from shiptracks.state import Packet, Track

CFG = SimConfig(grid=(32, 32))
STILL = AnalyticPath(1, "still", lambda t: np.array([5.0, 5.0]))


def test_zero_intensity_gives_no_births():
    cfg = CFG.replace(lambda_gamma=0.0)
    out = spontaneous_births(25, [STILL], cfg, np.random.default_rng(0), {1: 25})
    assert len(out) == 0 and out.tracks == []


def test_default_places_one_packet_per_boat():
    out = spontaneous_births(25, [STILL], CFG, CounterRng(0), {1: 25})
    assert len(out) == 1 and len(out.tracks) == 1
    assert out.birth_time[0] == pytest.approx(5.0)


def test_poisson_mean_count():
    cfg = CFG.replace(lambda_gamma=1.0)
    rng = np.random.default_rng(1)
    n = 100_000
    total = sum(len(spontaneous_births(25, [STILL], cfg, rng, {1: 25})) for _ in range(n))
    assert abs(total / n - 1.0) < 3 / math.sqrt(n)


def test_birth_schedule_uses_lag():
    assert birth_frames([STILL], CFG) == {1: 25}
    assert birth_frames([STILL], CFG.replace(n_frames=20)) == {1: None}


def _head(birth_frame, pid=0):
    return Packet(pid, 0, (5.0, 5.0), birth_frame * CFG.dt, 100.0, True)


TRACKS = {0: Track(0, 1, 80.0, 5.0)}


def test_stale_head_does_not_spawn():
    assert spawn(_head(27), 30, CFG, TRACKS, {1: STILL}, CounterRng(0)) == []


def test_eligible_head_spawns_exactly_once():
    for n in range(26, 40):
        got = spawn(_head(n - 1), n, CFG, TRACKS, {1: STILL}, CounterRng(n))
        assert len(got) == 1
        assert got[0].birth_time == pytest.approx(n * CFG.dt)
        assert got[0].is_head


def test_unknown_boat():
    with pytest.raises(UnknownBoat):
        spawn(_head(29), 30, CFG, TRACKS, {}, CounterRng(0))


def test_spawn_offset_covariance():
    n = 100_000
    heads = np.arange(n)
    out = spawn_from_heads(heads, np.zeros(n, np.int64), 30, CFG, TRACKS, {1: STILL},
                           CounterRng(4), n)
    assert len(out) == n
    off = out.pos - np.array([5.0, 5.0])
    var = off.var(axis=0)
    np.testing.assert_allclose(var, 5e-4, rtol=0.05)
    np.testing.assert_array_equal(np.sort(out.parent_ids), heads)


def test_no_spawn_once_boat_left_window():
    gone = AnalyticPath(1, "gone", lambda t: np.array([5.0, 5.0]) if t < 1 else np.array([50.0, 5.0]))
    out = spawn_from_heads([0], [0], 40, CFG, TRACKS, {1: gone}, CounterRng(0), 1)
    assert len(out) == 0
