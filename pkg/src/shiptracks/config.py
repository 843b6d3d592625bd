"""Simulation configuration: schema, validation and file loading.

Config files are flat TOML. Every key of :class:`SimConfig` may appear, plus
the run-input keys ``wind``, ``boats`` and ``background`` which name the
drift field, boat paths and optional background image. Any other key is an
error.
"""

from __future__ import annotations

import math
import sys
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, NamedTuple

from .errors import ConfigError, InputFileError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

UINT64_MAX = 2**64 - 1
INPUT_KEYS = ("wind", "boats", "background")


class Violation(NamedTuple):
    code: str
    field: str
    message: str


@dataclass(frozen=True)
class SimConfig:
    """All scalars driving one simulation.

    Times are in hours, positions in abstract planar units. ``sigma_b=None``
    falls back to ``sigma_beta``; ``lambda_gamma=None`` places exactly one
    packet per boat entry instead of a Poisson count. Missing detection
    thresholds mean the corresponding bound is open.
    """

    n_frames: int = 100
    dt: float = 0.2
    epsilon_lag: float = 5.0
    sigma_x: float = 0.01
    sigma_beta: float = 0.01
    sigma_b: float | None = None
    lambda_T: float = 80.0
    sigma_pd: float = 0.2
    lambda_gamma: float | None = None
    iota_low: float | None = None
    iota_high: float | None = None
    window: tuple[float, float, float, float] = (0.0, 0.0, 17.0, 17.0)
    grid: tuple[int, int] = (512, 512)
    seed: int = 0
    p_spawn: float = 1.0
    max_births: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "window", tuple(float(v) for v in self.window))
        object.__setattr__(self, "grid", tuple(int(v) for v in self.grid))

    @property
    def birth_spread(self) -> float:
        return self.sigma_beta if self.sigma_b is None else self.sigma_b

    @property
    def horizon(self) -> float:
        return self.n_frames * self.dt

    @property
    def thresholds(self) -> tuple[float, float]:
        lo = -math.inf if self.iota_low is None else self.iota_low
        hi = math.inf if self.iota_high is None else self.iota_high
        return lo, hi

    @property
    def thresholds_open(self) -> bool:
        lo, hi = self.thresholds
        return lo == -math.inf and hi == math.inf

    def frame_time(self, n: int) -> float:
        return n * self.dt

    def replace(self, **changes) -> "SimConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["window"] = list(self.window)
        d["grid"] = list(self.grid)
        return d


def _finite(x) -> bool:
    try:
        return math.isfinite(x)
    except TypeError:
        return False


def check_config(cfg: SimConfig) -> list[Violation]:
    """Return every invariant violation of ``cfg`` (empty when valid)."""
    out: list[Violation] = []

    def bad(code, field, message):
        out.append(Violation(code, field, message))

    if not isinstance(cfg.n_frames, int) or cfg.n_frames < 1:
        bad("NonPositiveFrames", "n_frames", f"n_frames must be >= 1, got {cfg.n_frames!r}")
    if not _finite(cfg.dt) or cfg.dt <= 0:
        bad("NonPositiveDt", "dt", f"dt must be > 0, got {cfg.dt!r}")
    if not _finite(cfg.epsilon_lag) or cfg.epsilon_lag < 0:
        bad("NegativeLag", "epsilon_lag", f"epsilon_lag must be >= 0, got {cfg.epsilon_lag!r}")
    for name in ("sigma_x", "sigma_beta", "sigma_b", "sigma_pd"):
        v = getattr(cfg, name)
        if v is None and name == "sigma_b":
            continue
        if not _finite(v) or v < 0:
            bad("NegativeSigma", name, f"{name} must be finite and >= 0, got {v!r}")
    if not _finite(cfg.lambda_T) or cfg.lambda_T <= 0:
        bad("NonPositiveMeanLifetime", "lambda_T", f"lambda_T must be > 0, got {cfg.lambda_T!r}")
    if cfg.lambda_gamma is not None and (not _finite(cfg.lambda_gamma) or cfg.lambda_gamma < 0):
        bad("NegativeBirthIntensity", "lambda_gamma",
            f"lambda_gamma must be >= 0, got {cfg.lambda_gamma!r}")
    lo, hi = cfg.thresholds
    if math.isnan(lo) or math.isnan(hi) or not lo < hi:
        bad("ThresholdOrder", "iota_low", f"need iota_low < iota_high, got {lo!r} >= {hi!r}")
    if len(cfg.window) != 4 or not all(_finite(v) for v in cfg.window):
        bad("BadWindow", "window", "window must be 4 finite numbers [xmin, ymin, xmax, ymax]")
    else:
        x0, y0, x1, y1 = cfg.window
        if not (x1 > x0 and y1 > y0):
            bad("EmptyWindow", "window", f"window must have positive area, got {cfg.window!r}")
    if len(cfg.grid) != 2 or min(cfg.grid) < 1:
        bad("EmptyGrid", "grid", f"grid dimensions must be >= 1, got {cfg.grid!r}")
    if not isinstance(cfg.seed, int) or not 0 <= cfg.seed <= UINT64_MAX:
        bad("SeedRange", "seed", f"seed must be an unsigned 64-bit integer, got {cfg.seed!r}")
    if not _finite(cfg.p_spawn) or not 0 <= cfg.p_spawn <= 1:
        bad("SpawnProbability", "p_spawn", f"p_spawn must lie in [0, 1], got {cfg.p_spawn!r}")
    if not isinstance(cfg.max_births, int) or cfg.max_births < 1:
        bad("NonPositiveBirthCap", "max_births", f"max_births must be >= 1, got {cfg.max_births!r}")
    return out


def validate_config(cfg: SimConfig) -> SimConfig:
    """Return ``cfg`` unchanged if valid, else raise :class:`ConfigError`."""
    violations = check_config(cfg)
    if violations:
        raise ConfigError(violations)
    return cfg


_FIELD_NAMES = tuple(f.name for f in fields(SimConfig))


def config_from_mapping(data: dict[str, Any]) -> tuple[SimConfig, dict[str, Any]]:
    """Split a flat mapping into a :class:`SimConfig` and run inputs.

    Unknown keys raise :class:`ConfigError`. The config is not validated.
    """
    unknown = sorted(set(data) - set(_FIELD_NAMES) - set(INPUT_KEYS))
    if unknown:
        raise ConfigError(
            [Violation("UnknownKey", k, f"unknown config key {k!r}") for k in unknown]
        )
    kwargs = {k: data[k] for k in _FIELD_NAMES if k in data}
    for k in ("window", "grid"):
        if k in kwargs:
            kwargs[k] = tuple(kwargs[k])
    inputs = {k: data[k] for k in INPUT_KEYS if k in data}
    try:
        cfg = SimConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError([Violation("BadValue", "?", str(exc))]) from exc
    return cfg, inputs


def load_config(path) -> tuple[SimConfig, dict[str, Any]]:
    """Read a TOML config file; returns ``(config, run_inputs)``."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise InputFileError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InputFileError(f"cannot parse config {path}: {exc}") from exc
    cfg, inputs = config_from_mapping(data)
    if "background" in inputs:
        inputs["background"] = str((path.parent / inputs["background"]))
    for key in ("wind", "boats"):
        inputs[key] = _resolve_relative(inputs.get(key), path.parent)
    return cfg, {k: v for k, v in inputs.items() if v is not None}


def _resolve_relative(value, base: Path):
    if isinstance(value, str) and value.endswith(".csv"):
        return str(base / value)
    if isinstance(value, list):
        return [_resolve_relative(v, base) for v in value]
    return value


def dump_config(cfg: SimConfig) -> str:
    """Serialize ``cfg`` as flat TOML text readable by :func:`load_config`."""
    lines = []
    for name, value in cfg.to_dict().items():
        if value is None:
            continue
        lines.append(f"{name} = {_toml_value(value)}")
    return "\n".join(lines) + "\n"


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    return '"' + str(v).replace("\\", "\\\\").replace('"', '\\"') + '"'
