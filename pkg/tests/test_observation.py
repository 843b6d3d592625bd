import numpy as np
import pytest

from shiptracks.config import SimConfig
from shiptracks.errors import NegativeAge
from shiptracks.observation import (detection_probability, intensity_at, observe_packet,
                                    observe_state)
from shiptracks.rng import CounterRng
from shiptracks.state import MultiTargetState, Packet

CFG = SimConfig(iota_low=0.2, iota_high=0.9, grid=(4, 4), window=(0.0, 0.0, 4.0, 4.0))


def test_detection_thresholds():
    assert detection_probability(0.5, CFG) == 1
    assert detection_probability(0.95, CFG) == 0
    assert detection_probability(0.2, CFG) == 0
    assert detection_probability(0.5, SimConfig()) == 1


def test_age_zero_is_exact():
    p = Packet(3, 0, (1.25, 2.5), 4.0, 9.0)
    obs = observe_packet(p, 4.0, 0.01, np.random.default_rng(0))
    assert obs.pos == (1.25, 2.5) and obs.source_packet_id == 3


def test_negative_age():
    with pytest.raises(NegativeAge):
        observe_packet(Packet(0, 0, (0.0, 0.0), 4.0, 9.0), 3.0, 0.01, np.random.default_rng(0))


def test_undetected_gives_none():
    assert observe_packet(Packet(0, 0, (0.0, 0.0), 0.0, 9.0), 1.0, 0.01, detected=False) is None


def test_offset_covariance_at_age_four():
    rng = np.random.default_rng(8)
    p = Packet(0, 0, (0.0, 0.0), 0.0, 9.0)
    off = np.array([observe_packet(p, 4.0, 0.01, rng).pos for _ in range(100_000)])
    np.testing.assert_allclose(off.var(axis=0), 4e-4, rtol=0.05)


def _state(n):
    return MultiTargetState(5, 1.0, np.arange(n), np.zeros(n, np.int64),
                            np.full((n, 2), 1.5), np.zeros(n), np.full(n, 9.0), np.zeros(n, bool))


def test_all_detected_and_none_detected():
    st = _state(6)
    open_cfg = SimConfig(grid=(4, 4), window=(0.0, 0.0, 4.0, 4.0))
    assert len(observe_state(st, None, open_cfg, CounterRng(0))) == 6
    img = np.full((4, 4), 0.5)
    assert len(observe_state(st, img, CFG, CounterRng(0))) == 6
    high = CFG.replace(iota_low=0.6, iota_high=1.0)
    assert len(observe_state(st, img, high, CounterRng(0))) == 0


def test_intensity_lookup_orientation():
    img = np.zeros((4, 4))
    img[0, 3] = 1.0  # top-right pixel
    assert intensity_at(img, [(3.5, 3.5)], CFG.window)[0] == 1.0
    assert intensity_at(img, [(3.5, 0.5), (9.0, 9.0)], CFG.window).tolist() == [0.0, 0.0]
