"""Synthetic bivariate AR(1) panels.

    X[i,t] = delta_i X[i,t-1] + noise_x
    Y[i,t] = theta_i Y[i,t-1] + beta_i X[i,t-lag] + noise_y

with ``lag = 0`` for the instantaneous regime and 1 otherwise.  All
randomness is drawn from streams keyed by ``(seed, stream, member)``, so a
member's coefficients and innovations do not depend on how many other
members are generated or in what order.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from . import _backend
from .errors import ConfigError
from .granger import Panel

NOISE_FAMILIES = ("gaussian_iid", "cross_sectional_rank1", "uniform_iid", "block_dependent")

# stream ids
_COEF, _NOISE_X, _NOISE_Y, _FACTOR_X, _FACTOR_Y, _LOAD_X, _LOAD_Y = range(7)


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))


@dataclass(frozen=True)
class SimConfig:
    n_members: int = 30
    n_timestamps: int = 100
    lag_order: int = 1
    causal: bool = True
    coef_law_delta: tuple[float, float] = (0.2, 0.8)
    coef_law_theta: tuple[float, float] = (0.2, 0.8)
    coef_law_beta: tuple[float, float] = (0.2, 0.8)
    noise_family: str = "gaussian_iid"
    noise_variance: float = 0.1
    noise_interval: tuple[float, float] = (0.2, 0.8)
    loading_interval: tuple[float, float] = (0.5, 1.5)
    block_len: int = 3
    instantaneous: bool = False
    missing_edge_prob: float = 0.0
    burn_in: int = 50
    seed: int = 0

    def __post_init__(self):
        for name in ("coef_law_delta", "coef_law_theta", "coef_law_beta", "noise_interval", "loading_interval"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ConfigError(f"{name}: interval bounds out of order ({lo}, {hi})")
            object.__setattr__(self, name, (float(lo), float(hi)))
        for name in ("coef_law_delta", "coef_law_theta"):
            lo, hi = getattr(self, name)
            if not (-1.0 < lo and hi < 1.0):
                raise ConfigError(f"{name}: autoregressive coefficients must lie in (-1, 1) for stability")
        if self.n_members < 1 or self.n_timestamps < 1:
            raise ConfigError("n_members and n_timestamps must be at least 1")
        if self.lag_order != 1:
            raise ConfigError("generators are AR(1); lag_order must be 1")
        if self.noise_family not in NOISE_FAMILIES:
            raise ConfigError(f"noise_family must be one of {NOISE_FAMILIES}, got {self.noise_family!r}")
        if not self.noise_variance > 0:
            raise ConfigError("noise_variance must be positive")
        if self.block_len < 1:
            raise ConfigError("block_len must be at least 1")
        if not 0.0 <= self.missing_edge_prob <= 1.0:
            raise ConfigError("missing_edge_prob must lie in [0, 1]")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be nonnegative")

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SimOutput:
    panel: Panel
    ground_truth: np.ndarray
    config: SimConfig
    beta: np.ndarray = field(repr=False)


class RankOneNoise:
    """Cross-sectionally dependent innovations ``A * z_t``.

    ``A`` holds one loading per member drawn once from ``interval``; the
    scalar factor ``z_t`` is standard normal and independent over time, so
    the covariance across members is the rank-one matrix ``A A^T``.
    """

    def __init__(self, n_members: int, seed: int, interval=(0.5, 1.5), streams=(_LOAD_X, _FACTOR_X)):
        if n_members < 1:
            raise ConfigError("n_members must be at least 1")
        lo, hi = interval
        if not lo <= hi:
            raise ConfigError("loading interval bounds out of order")
        load_stream, factor_stream = streams
        self.loadings = np.array(
            [_rng(seed, load_stream, i).uniform(lo, hi) for i in range(n_members)]
        )
        self._factor = _rng(seed, factor_stream)

    @property
    def covariance(self) -> np.ndarray:
        return np.outer(self.loadings, self.loadings)

    def step(self) -> np.ndarray:
        return self.loadings * self._factor.standard_normal()

    def sample(self, n_steps: int) -> np.ndarray:
        """``n_steps`` consecutive draws as an (N, n_steps) array."""
        z = self._factor.standard_normal(n_steps)
        return self.loadings[:, None] * z[None, :]


def sample_cross_sectional_noise(n_members: int, seed: int, interval=(0.5, 1.5)) -> RankOneNoise:
    return RankOneNoise(n_members, seed, interval)


def _member_noise(cfg: SimConfig, stream: int, S: int) -> np.ndarray:
    N = cfg.n_members
    sd = np.sqrt(cfg.noise_variance)
    out = np.empty((N, S))
    for i in range(N):
        rng = _rng(cfg.seed, stream, i)
        if cfg.noise_family == "gaussian_iid":
            out[i] = sd * rng.standard_normal(S)
        elif cfg.noise_family == "uniform_iid":
            out[i] = rng.uniform(*cfg.noise_interval, size=S)
        else:  # block_dependent
            n_blocks = -(-S // cfg.block_len)
            out[i] = np.repeat(sd * rng.standard_normal(n_blocks), cfg.block_len)[:S]
    return out


def _draw_coefficients(cfg: SimConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    N = cfg.n_members
    delta = np.empty(N)
    theta = np.empty(N)
    beta = np.empty(N)
    for i in range(N):
        u = _rng(cfg.seed, _COEF, i).random(4)
        delta[i] = cfg.coef_law_delta[0] + u[0] * (cfg.coef_law_delta[1] - cfg.coef_law_delta[0])
        theta[i] = cfg.coef_law_theta[0] + u[1] * (cfg.coef_law_theta[1] - cfg.coef_law_theta[0])
        beta[i] = cfg.coef_law_beta[0] + u[2] * (cfg.coef_law_beta[1] - cfg.coef_law_beta[0])
        if not cfg.causal or u[3] < cfg.missing_edge_prob:
            beta[i] = 0.0
    return delta, theta, beta


def simulate_panel(config: SimConfig) -> SimOutput:
    cfg = config
    S = cfg.n_timestamps + cfg.burn_in
    delta, theta, beta = _draw_coefficients(cfg)
    if cfg.noise_family == "cross_sectional_rank1":
        noise_x = RankOneNoise(cfg.n_members, cfg.seed, cfg.loading_interval, (_LOAD_X, _FACTOR_X)).sample(S)
        noise_y = RankOneNoise(cfg.n_members, cfg.seed, cfg.loading_interval, (_LOAD_Y, _FACTOR_Y)).sample(S)
    else:
        noise_x = _member_noise(cfg, _NOISE_X, S)
        noise_y = _member_noise(cfg, _NOISE_Y, S)
    X, Y = _backend.simulate_ar1_pair(delta, theta, beta, noise_x, noise_y, cfg.instantaneous)
    panel = Panel(X[:, cfg.burn_in:], Y[:, cfg.burn_in:], [f"m{i}" for i in range(cfg.n_members)])
    return SimOutput(panel=panel, ground_truth=beta != 0.0, config=cfg, beta=beta)


PRESETS: dict[str, SimConfig] = {
    "experiment1": SimConfig(),
    "experiment2": SimConfig(noise_family="cross_sectional_rank1"),
    "instantaneous": SimConfig(instantaneous=True),
    "instantaneous_strong": SimConfig(instantaneous=True, coef_law_beta=(0.6, 0.8)),
    "sporadic": SimConfig(n_members=100, missing_edge_prob=0.5),
    "uniform_noise": SimConfig(noise_family="uniform_iid"),
    "block_noise": SimConfig(noise_family="block_dependent"),
}


def preset(name: str, **overrides) -> SimConfig:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return base.replace(**overrides)


# -- plain-text configuration files -----------------------------------------

_FIELDS = {f.name: f for f in dataclasses.fields(SimConfig)}


def _parse_value(name: str, raw: str):
    default = getattr(SimConfig(), name)
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, tuple):
            parts = [p for p in raw.replace("(", "").replace(")", "").split(",") if p.strip()]
            if len(parts) != 2:
                raise ValueError(raw)
            return (float(parts[0]), float(parts[1]))
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"cannot parse {name} = {raw!r}") from None


def config_from_mapping(values: Mapping[str, str], base: SimConfig | None = None) -> SimConfig:
    changes = {}
    for key, raw in values.items():
        if key == "preset":
            continue
        if key not in _FIELDS:
            raise ConfigError(f"unknown configuration key {key!r}")
        changes[key] = _parse_value(key, raw)
    base = base if base is not None else (preset(values["preset"]) if "preset" in values else SimConfig())
    return base.replace(**changes)


def load_configs(path: str | Path) -> dict[str, SimConfig]:
    """Read every section of an INI-style file into a :class:`SimConfig`.

    A section may name a ``preset`` and override any subset of fields.
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return {name: config_from_mapping(dict(parser[name])) for name in parser.sections()}


def config_to_text(configs: Mapping[str, SimConfig]) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    for name, cfg in configs.items():
        section = {}
        for key in _FIELDS:
            value = getattr(cfg, key)
            if isinstance(value, tuple):
                section[key] = f"{value[0]!r}, {value[1]!r}"
            elif isinstance(value, bool):
                section[key] = "true" if value else "false"
            else:
                section[key] = repr(value) if isinstance(value, float) else str(value)
        parser[name] = section
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def save_configs(configs: Mapping[str, SimConfig], path: str | Path) -> None:
    Path(path).write_text(config_to_text(configs), encoding="utf-8")
