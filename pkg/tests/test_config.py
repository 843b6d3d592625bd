import pytest
from hypothesis import given, strategies as st

from shiptracks.config import (SimConfig, check_config, config_from_mapping, dump_config,
                               load_config, validate_config)
from shiptracks.errors import ConfigError, InputFileError


def codes(cfg):
    return {v.code for v in check_config(cfg)}


def test_defaults_are_valid():
    cfg = SimConfig()
    assert check_config(cfg) == []
    assert (cfg.n_frames, cfg.dt, cfg.epsilon_lag, cfg.sigma_beta, cfg.sigma_x,
            cfg.lambda_T, cfg.sigma_pd) == (100, 0.2, 5.0, 0.01, 0.01, 80.0, 0.2)
    assert cfg.horizon == pytest.approx(20.0)


@pytest.mark.parametrize("changes, code", [
    ({"dt": 0.0}, "NonPositiveDt"),
    ({"n_frames": 0}, "NonPositiveFrames"),
    ({"epsilon_lag": -1.0}, "NegativeLag"),
    ({"sigma_x": -0.1}, "NegativeSigma"),
    ({"lambda_T": 0.0}, "NonPositiveMeanLifetime"),
    ({"lambda_gamma": -1.0}, "NegativeBirthIntensity"),
    ({"iota_low": 0.9, "iota_high": 0.2}, "ThresholdOrder"),
    ({"window": (5.0, 0.0, 1.0, 1.0)}, "EmptyWindow"),
    ({"grid": (0, 10)}, "EmptyGrid"),
    ({"seed": -1}, "SeedRange"),
    ({"p_spawn": 1.5}, "SpawnProbability"),
])
def test_each_violation_is_reported(changes, code):
    assert code in codes(SimConfig().replace(**changes))


def test_all_violations_reported_together():
    with pytest.raises(ConfigError) as err:
        validate_config(SimConfig(dt=0.0, lambda_T=-1.0))
    assert {"NonPositiveDt", "NonPositiveMeanLifetime"} <= set(err.value.codes)


@given(st.integers(1, 500), st.floats(1e-3, 5.0), st.floats(0, 10), st.integers(0, 2**64 - 1))
def test_validate_is_idempotent(n, dt, eps, seed):
    cfg = SimConfig(n_frames=n, dt=dt, epsilon_lag=eps, seed=seed)
    assert validate_config(validate_config(cfg)) == cfg


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as err:
        config_from_mapping({"dt": 0.2, "delta": 0.2})
    assert "UnknownKey" in err.value.codes


def test_toml_roundtrip(tmp_path):
    cfg = SimConfig(n_frames=7, dt=0.1, iota_low=0.1, iota_high=0.9, window=(-1.0, 0.0, 3.0, 4.0),
                    grid=(32, 16), seed=2**63 + 5, lambda_gamma=2.5)
    path = tmp_path / "run.toml"
    path.write_text(dump_config(cfg))
    loaded, inputs = load_config(path)
    assert loaded == cfg
    assert inputs == {}


def test_input_keys_and_relative_paths(tmp_path):
    (tmp_path / "w.csv").write_text("t_hours,x,y,u,v\n")
    path = tmp_path / "c.toml"
    path.write_text('dt = 0.5\nwind = "w.csv"\nboats = ["paper_red"]\n')
    cfg, inputs = load_config(path)
    assert cfg.dt == 0.5
    assert inputs["wind"] == str(tmp_path / "w.csv")
    assert inputs["boats"] == ["paper_red"]


def test_unreadable_config(tmp_path):
    with pytest.raises(InputFileError):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("dt = = 3")
    with pytest.raises(InputFileError):
        load_config(bad)
