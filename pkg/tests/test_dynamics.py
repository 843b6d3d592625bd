import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from shiptracks.dynamics import (lognormal_death_params, sample_packet_death,
                                 sample_track_lifetime, survives, transition)
from shiptracks.errors import NegativeDuration, NonPositiveLifetime, NonPositiveMean
from shiptracks.state import Packet
from shiptracks.wind import Uniform


def test_pure_drift():
    out = transition((0.0, 0.0), 0.0, 0.2, Uniform(1.0, 2.0), 0.0)
    np.testing.assert_allclose(out, [0.2, 0.4])


def test_negative_duration():
    with pytest.raises(NegativeDuration):
        transition((0.0, 0.0), 1.0, 0.5, Uniform(0, 0), 0.01, np.random.default_rng(0))


def test_transition_covariance():
    rng = np.random.default_rng(11)
    out = transition(np.zeros((100_000, 2)), 0.0, 0.2, Uniform(0.0, 0.0), 0.01, rng)
    cov = np.cov(out.T)
    assert cov[0, 0] == pytest.approx(2e-5, rel=0.05)
    assert cov[1, 1] == pytest.approx(2e-5, rel=0.05)
    assert abs(cov[0, 1]) < 0.05 * 2e-5


def test_increments_uncorrelated():
    rng = np.random.default_rng(5)
    w = Uniform(0.3, 0.0)
    x = np.zeros((20_000, 2))
    steps = []
    for k in range(3):
        nxt = transition(x, 0.2 * k, 0.2 * (k + 1), w, 0.01, rng)
        steps.append(nxt - x - w(x, 0) * 0.2)
        x = nxt
    r = np.corrcoef(steps[0][:, 0], steps[1][:, 0])[0, 1]
    assert abs(r) < 4 / math.sqrt(20_000)


def test_lifetime_quantile_and_mean():
    assert sample_track_lifetime(80.0, u=0.5) == pytest.approx(80 * math.log(2), rel=1e-15)
    assert sample_track_lifetime(80.0, u=0.5) == pytest.approx(55.452, abs=1e-3)
    draws = sample_track_lifetime(80.0, np.random.default_rng(0), u=np.random.default_rng(0).random(100_000))
    assert np.all(draws > 0)
    with pytest.raises(NonPositiveMean):
        sample_track_lifetime(0.0, u=0.5)


def test_lognormal_params():
    mu, s2 = lognormal_death_params(80.0, 0.2)
    assert s2 == pytest.approx(6.25e-6, rel=1e-4)
    assert mu == pytest.approx(math.log(80) - s2 / 2, rel=1e-15)
    assert lognormal_death_params(80.0, 0.0) == (math.log(80.0), 0.0)
    with pytest.raises(NonPositiveLifetime):
        lognormal_death_params(0.0, 0.2)


@given(st.floats(0.01, 1e4), st.floats(0.0, 1e3))
def test_lognormal_mean_identity(T_d, sigma_pd):
    mu, s2 = lognormal_death_params(T_d, sigma_pd)
    assert math.exp(mu + s2 / 2) == pytest.approx(T_d, rel=1e-12)


def test_degenerate_death():
    assert sample_packet_death(3.0, 80.0, 0.0) == 83.0


def test_survives_boundary():
    assert survives(10.0, 9.8) is True
    assert survives(10.0, 10.0) is False
    assert survives(Packet(0, 0, (0.0, 0.0), 1.0, 10.0), 9.8) is True


def test_cohort_survival_matches_lognormal():
    T_d, s = 80.0, 0.2
    n = 100_000
    life = sample_packet_death(np.zeros(n), T_d, s, np.random.default_rng(3))
    mu, s2 = lognormal_death_params(T_d, s)
    dist = stats.lognorm(s=math.sqrt(s2), scale=math.exp(mu))
    for a in (T_d - s, T_d, T_d + s):
        p = dist.sf(a)
        frac = np.mean(survives(life, a))
        assert abs(frac - p) < 3 * math.sqrt(p * (1 - p) / n)
