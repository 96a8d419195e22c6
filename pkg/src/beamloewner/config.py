"""Experiment configuration: JSON schema, validation, defaults.

Config files are UTF-8 JSON with a top-level  "version": 1  and all
physical quantities in SI units (stiffness in N/m, lengths in m); any
unit conversions made when writing a config belong in the free-form
"provenance" block, which is carried through to summaries unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

from .beam import BeamParams
from .exceptions import ConfigError
from .noise import NoiseSpec

CONFIG_VERSION = 1

DEFAULT_PARTITION_SCHEME = "alternate"
DEFAULT_TOL = 1e-10

_BEAM_KEYS = {"l", "l0", "l1", "rho0", "S", "E", "I", "m_shaker", "kappa", "d", "rho"}


@dataclass(frozen=True)
class GridSpec:
    """Uniform frequency grid in Hz, endpoints included."""

    f_min_hz: float
    f_max_hz: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"count must be >= 2, got {self.count}")
        if self.f_min_hz < 0 or self.f_max_hz <= self.f_min_hz:
            raise ValueError(
                f"need 0 <= f_min_hz < f_max_hz, got [{self.f_min_hz}, {self.f_max_hz}]"
            )

    @property
    def step_hz(self) -> float:
        return (self.f_max_hz - self.f_min_hz) / (self.count - 1)


@dataclass(frozen=True)
class TruncationSpec:
    """Either an explicit reduced order or a singular value threshold."""

    order: Optional[int] = None
    tol: Optional[float] = None

    def __post_init__(self):
        if (self.order is None) == (self.tol is None):
            raise ValueError("give exactly one of order and tol")
        if self.order is not None and self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.tol is not None and not 0 < self.tol < 1:
            raise ValueError(f"tol must be in (0, 1), got {self.tol}")


@dataclass(frozen=True)
class ExperimentConfig:
    beam: BeamParams
    grid: GridSpec
    output_dir: Path
    partition_scheme: str = DEFAULT_PARTITION_SCHEME
    truncation: TruncationSpec = TruncationSpec(tol=DEFAULT_TOL)
    noise: Optional[NoiseSpec] = None
    verification_grid: Union[str, GridSpec] = "sampling"
    provenance: dict = None

    def __post_init__(self):
        if self.partition_scheme not in ("alternate", "half_half"):
            raise ValueError(f"unknown partition scheme {self.partition_scheme!r}")
        if isinstance(self.verification_grid, str) and self.verification_grid not in (
            "sampling",
            "held_out",
        ):
            raise ValueError(
                f"verification_grid must be 'sampling', 'held_out' or a grid object, "
                f"got {self.verification_grid!r}"
            )
        if self.provenance is None:
            object.__setattr__(self, "provenance", {})
        object.__setattr__(self, "output_dir", Path(self.output_dir))


def resolve_verification_grid(cfg: ExperimentConfig) -> GridSpec:
    """The grid used for held-out error reporting.

    "sampling" reuses the sampling grid.  "held_out" doubles the density
    and offsets by half a (new) step: the nodes sit at odd quarter-step
    multiples, so they are disjoint from the sampling nodes.
    """
    if isinstance(cfg.verification_grid, GridSpec):
        return cfg.verification_grid
    if cfg.verification_grid == "sampling":
        return cfg.grid
    step = cfg.grid.step_hz
    return GridSpec(
        f_min_hz=cfg.grid.f_min_hz + step / 4.0,
        f_max_hz=cfg.grid.f_max_hz - step / 4.0,
        count=2 * (cfg.grid.count - 1),
    )


def _expect(obj, key, kinds, path, default=None, required=False):
    if key not in obj:
        if required:
            raise ConfigError(path, f"missing required field '{key}'")
        return default
    value = obj[key]
    if not isinstance(value, kinds) or isinstance(value, bool):
        names = kinds.__name__ if isinstance(kinds, type) else "/".join(k.__name__ for k in kinds)
        raise ConfigError(path, f"field '{key}' must be {names}, got {type(value).__name__}")
    return value


def _build(path, field, ctor, kwargs):
    try:
        return ctor(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(path, f"{field}: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    """Load, validate and normalize an experiment config file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(path, f"cannot read: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(path, f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(path, "top level must be a JSON object")

    known = {
        "version", "beam", "grid", "partition_scheme", "truncation",
        "noise", "verification_grid", "output_dir", "provenance",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(path, f"unknown top-level fields: {sorted(unknown)}")

    version = _expect(raw, "version", int, path, required=True)
    if version != CONFIG_VERSION:
        raise ConfigError(path, f"unsupported version {version} (expected {CONFIG_VERSION})")

    beam_obj = _expect(raw, "beam", dict, path, required=True)
    unknown = set(beam_obj) - _BEAM_KEYS
    if unknown:
        raise ConfigError(path, f"beam: unknown fields: {sorted(unknown)}")
    for key in sorted(_BEAM_KEYS - {"rho"}):
        _expect(beam_obj, key, (int, float), f"{path}:beam", required=True)
    beam = _build(path, "beam", BeamParams, {k: float(v) for k, v in beam_obj.items()})

    grid_obj = _expect(raw, "grid", dict, path, required=True)
    grid = _parse_grid(grid_obj, path, "grid")

    scheme = _expect(raw, "partition_scheme", str, path, default=DEFAULT_PARTITION_SCHEME)

    trunc_obj = _expect(raw, "truncation", dict, path, default={"tol": DEFAULT_TOL})
    unknown = set(trunc_obj) - {"order", "tol"}
    if unknown:
        raise ConfigError(path, f"truncation: unknown fields: {sorted(unknown)}")
    trunc = _build(
        path, "truncation", TruncationSpec,
        {
            "order": _expect(trunc_obj, "order", int, f"{path}:truncation"),
            "tol": _expect(trunc_obj, "tol", (int, float), f"{path}:truncation"),
        },
    )

    noise = None
    if raw.get("noise") is not None:
        noise_obj = _expect(raw, "noise", dict, path)
        unknown = set(noise_obj) - {"nu", "seed"}
        if unknown:
            raise ConfigError(path, f"noise: unknown fields: {sorted(unknown)}")
        noise = _build(
            path, "noise", NoiseSpec,
            {
                "nu": _expect(noise_obj, "nu", int, f"{path}:noise", required=True),
                "seed": _expect(noise_obj, "seed", int, f"{path}:noise", required=True),
            },
        )

    ver = raw.get("verification_grid", "sampling")
    if ver is None:
        ver = "sampling"
    elif isinstance(ver, dict):
        ver = _parse_grid(ver, path, "verification_grid")
    elif not isinstance(ver, str):
        raise ConfigError(path, "verification_grid must be a string or a grid object")

    output_dir = _expect(raw, "output_dir", str, path, required=True)
    provenance = _expect(raw, "provenance", dict, path, default={})

    return _build(
        path, "config", ExperimentConfig,
        {
            "beam": beam,
            "grid": grid,
            "output_dir": Path(output_dir),
            "partition_scheme": scheme,
            "truncation": trunc,
            "noise": noise,
            "verification_grid": ver,
            "provenance": provenance,
        },
    )


def _parse_grid(obj, path, field) -> GridSpec:
    unknown = set(obj) - {"f_min_hz", "f_max_hz", "count"}
    if unknown:
        raise ConfigError(path, f"{field}: unknown fields: {sorted(unknown)}")
    return _build(
        path, field, GridSpec,
        {
            "f_min_hz": float(_expect(obj, "f_min_hz", (int, float), f"{path}:{field}", required=True)),
            "f_max_hz": float(_expect(obj, "f_max_hz", (int, float), f"{path}:{field}", required=True)),
            "count": _expect(obj, "count", int, f"{path}:{field}", required=True),
        },
    )


def config_echo(cfg: ExperimentConfig) -> dict:
    """JSON-serializable snapshot of a resolved configuration."""
    beam = {k: getattr(cfg.beam, k) for k in sorted(_BEAM_KEYS)}
    echo = {
        "version": CONFIG_VERSION,
        "beam": beam,
        "grid": {
            "f_min_hz": cfg.grid.f_min_hz,
            "f_max_hz": cfg.grid.f_max_hz,
            "count": cfg.grid.count,
        },
        "partition_scheme": cfg.partition_scheme,
        "truncation": (
            {"order": cfg.truncation.order}
            if cfg.truncation.order is not None
            else {"tol": cfg.truncation.tol}
        ),
        "noise": (
            None
            if cfg.noise is None
            else {"nu": cfg.noise.nu, "seed": cfg.noise.seed, "epsilon": cfg.noise.epsilon}
        ),
        "verification_grid": (
            cfg.verification_grid
            if isinstance(cfg.verification_grid, str)
            else {
                "f_min_hz": cfg.verification_grid.f_min_hz,
                "f_max_hz": cfg.verification_grid.f_max_hz,
                "count": cfg.verification_grid.count,
            }
        ),
        "output_dir": str(cfg.output_dir),
        "provenance": cfg.provenance,
    }
    return echo


def override(cfg: ExperimentConfig, output_dir=None, seed=None) -> ExperimentConfig:
    """CLI overrides for the output directory and the noise seed."""
    if output_dir is not None:
        cfg = replace(cfg, output_dir=Path(output_dir))
    if seed is not None:
        if cfg.noise is None:
            raise ConfigError(
                cfg.output_dir, "--seed given but the config has no noise block"
            )
        cfg = replace(cfg, noise=replace(cfg.noise, seed=seed))
    return cfg
