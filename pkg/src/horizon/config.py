"""Experiment configuration: a single JSON document with CLI overrides.

Configs are committed fixtures, so parsing is strict (unknown keys are
rejected, every message names the offending key) and parse -> serialize
-> parse is the identity.
"""

import json
from dataclasses import asdict, dataclass, field

from .kernels import TargetKernel
from .signals import Signal
from .spectral_core import SpectralGrid, TimeGrid, default_omega_max


class ConfigError(ValueError):
    """Invalid experiment configuration; message carries the key path."""


_DEFAULTS = {
    "T": 0.5,
    "theta": 0.1,
    "r": 2.0,
    "method": "taylor",
    "d_range": [0, 12],
    "d_step": 1,
    "kernel": {"shape": "bump"},
    "signal": {"kind": "poisson", "params": {"a": 1.5}},
    "noise": {"kind": "chirp_noise", "params": {"band": [6.0, 12.0], "amplitude": 1.0}},
    "tgrid": {"t_min": -2.0, "t_max": 2.0, "n_points": 41},
    "grid": {"omega_max": None, "n_points": 2048},
    "nu_range": [0.0, 0.01, 0.1],
    "p": 2,
    "eps_target": 1e-4,
    "output_dir": "out",
}


@dataclass(frozen=True)
class ExperimentConfig:
    T: float = 0.5
    theta: float = 0.1
    r: float = 2.0
    method: str = "taylor"
    d_range: tuple = (0, 12)
    d_step: int = 1
    kernel: dict = field(default_factory=lambda: dict(_DEFAULTS["kernel"]))
    signal: dict = field(default_factory=lambda: dict(_DEFAULTS["signal"]))
    noise: dict = field(default_factory=lambda: dict(_DEFAULTS["noise"]))
    tgrid: dict = field(default_factory=lambda: dict(_DEFAULTS["tgrid"]))
    grid: dict = field(default_factory=lambda: dict(_DEFAULTS["grid"]))
    nu_range: tuple = (0.0, 0.01, 0.1)
    p: int = 2
    eps_target: float = 1e-4
    output_dir: str = "out"

    def __post_init__(self):
        if self.T <= 0:
            raise ConfigError("T: prediction horizon must be positive")
        if self.theta < 0:
            raise ConfigError("theta: causal tail must be nonnegative")
        if self.r <= 0:
            raise ConfigError("r: decay rate must be positive")
        if self.method not in ("taylor", "projection"):
            raise ConfigError(f"method: expected taylor or projection, got {self.method!r}")
        dr = tuple(self.d_range)
        if len(dr) != 2 or dr[0] < 0 or dr[1] < dr[0]:
            raise ConfigError("d_range: expected [start, stop] with 0 <= start <= stop")
        object.__setattr__(self, "d_range", dr)
        if self.d_step < 1:
            raise ConfigError("d_step: must be a positive integer")
        if len(self.nu_range) == 0:
            raise ConfigError("nu_range: must be nonempty")
        if any(nu < 0 for nu in self.nu_range):
            raise ConfigError("nu_range: intensities must be nonnegative")
        object.__setattr__(self, "nu_range", tuple(float(v) for v in self.nu_range))
        if self.p not in (1, 2):
            raise ConfigError(f"p: expected 1 or 2, got {self.p!r}")
        if self.eps_target <= 0:
            raise ConfigError("eps_target: must be positive")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        merged = {**_DEFAULTS, **data}
        try:
            return cls(**{k: merged[k] for k in _DEFAULTS})
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    # -- serialization -------------------------------------------------------

    def to_dict(self):
        data = asdict(self)
        data["d_range"] = list(self.d_range)
        data["nu_range"] = list(self.nu_range)
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    # -- realized objects ----------------------------------------------------

    @property
    def ds(self):
        return list(range(self.d_range[0], self.d_range[1] + 1, self.d_step))

    def build_kernel(self):
        spec = dict(self.kernel)
        spec.setdefault("T", self.T)
        spec.setdefault("theta", self.theta)
        try:
            return TargetKernel.from_spec(spec)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"kernel: {exc}") from exc

    def build_signal(self):
        try:
            return Signal.from_spec(self.signal)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"signal: {exc}") from exc

    def build_noise(self):
        try:
            return Signal.from_spec(self.noise)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"noise: {exc}") from exc

    def build_tgrid(self):
        try:
            return TimeGrid(self.tgrid["t_min"], self.tgrid["t_max"], self.tgrid["n_points"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"tgrid: {exc}") from exc

    def build_grid(self):
        spec = dict(self.grid)
        omega_max = spec.get("omega_max") or default_omega_max(self.r)
        n_points = spec.get("n_points", 2048)
        try:
            return SpectralGrid.build(omega_max, n_points)
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from exc
