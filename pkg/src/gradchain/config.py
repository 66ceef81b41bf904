"""Run configuration: one YAML mapping, strict keys, documented defaults.

A config document is a flat YAML mapping; every key below is optional and
unknown keys are rejected. Command-line flags override config values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import yaml

from .errors import ConfigConstraintError, ConfigSyntaxError, UnknownConfigKeyError
from .hamiltonian import (COUPLING_DISTRIBUTIONS, COUPLING_KINDS, RANDOM_KINDS,
                          CouplingSpec)
from .dynamics import ERROR_FRAMES, EVOLUTION_METHODS, PHASE_CONVENTIONS
from .spins import MAX_QUBITS, ChainSpec

SPACINGS_SCOPES = ("full", "per-band")


@dataclass
class RunConfig:
    """Effective parameters for one CLI run, with package-wide defaults."""

    qubits: int = 10
    gradient: float = 1.0
    rabi: float = 1.0
    nu: float | None = None          # None: center of the ladder, a*(L-1)/2
    phase: float = math.pi / 2
    coupling: str = "nn-constant"
    j: float = 0.0
    distribution: str = "symmetric"
    seed: int | None = None
    realizations: int = 1
    workers: int = 1
    tau: float | None = None         # pulse duration; None: pi/(2 Omega)
    dt: float | None = None          # stepped-propagator step; None: auto
    method: str = "spectral"
    frame: str = "rotating"
    phase_convention: str = "principal"
    j_grid: tuple = ()
    omega_grid: tuple = ()
    bins: int = 50
    window: float = 0.5
    threshold: float = 2.0
    gap_factor: float = 5.0
    unfold_degree: int = 7
    unfold_trim: float = 0.10
    spacings_scope: str = "full"

    def chain_spec(self) -> ChainSpec:
        try:
            return ChainSpec(L=self.qubits, a=self.gradient, Omega=self.rabi,
                             nu=self.nu, phase=self.phase)
        except ValueError as exc:
            raise ConfigConstraintError(str(exc)) from None

    def coupling_spec(self) -> CouplingSpec:
        if self.coupling in RANDOM_KINDS and self.seed is None:
            raise ConfigConstraintError(
                f"key 'seed': required for coupling kind {self.coupling!r}")
        seed = self.seed if self.coupling in RANDOM_KINDS else None
        try:
            return CouplingSpec(kind=self.coupling, J=self.j, seed=seed,
                                distribution=self.distribution)
        except ValueError as exc:
            raise ConfigConstraintError(str(exc)) from None

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out


_GRID_KEYS = ("j_grid", "omega_grid")


def _coerce(key: str, value, target):
    if value is None:
        return None
    if target is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigConstraintError(f"key {key!r}: expected an integer, got {value!r}")
        return value
    if target is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigConstraintError(f"key {key!r}: expected a number, got {value!r}")
        return float(value)
    if target is str:
        if not isinstance(value, str):
            raise ConfigConstraintError(f"key {key!r}: expected a string, got {value!r}")
        return value
    raise AssertionError(target)


def _parse_grid(key: str, value) -> tuple:
    if isinstance(value, str):
        value = [p for p in value.split(",") if p.strip()]
    if not isinstance(value, (list, tuple)):
        raise ConfigConstraintError(f"key {key!r}: expected a list of numbers")
    try:
        grid = tuple(float(x) for x in value)
    except (TypeError, ValueError):
        raise ConfigConstraintError(f"key {key!r}: expected a list of numbers") from None
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigConstraintError(f"key {key!r}: grid must be strictly increasing")
    return grid


def _validate(cfg: RunConfig) -> RunConfig:
    if not 1 <= cfg.qubits <= MAX_QUBITS:
        raise ConfigConstraintError(f"key 'qubits': L exceeds limit {MAX_QUBITS}"
                                    if cfg.qubits > MAX_QUBITS else
                                    "key 'qubits': must be >= 1")
    if cfg.gradient < 0:
        raise ConfigConstraintError("key 'gradient': must be >= 0")
    if cfg.rabi < 0:
        raise ConfigConstraintError("key 'rabi': must be >= 0")
    if cfg.coupling not in COUPLING_KINDS:
        raise ConfigConstraintError(
            f"key 'coupling': {cfg.coupling!r} not in {COUPLING_KINDS}")
    if cfg.distribution not in COUPLING_DISTRIBUTIONS:
        raise ConfigConstraintError(
            f"key 'distribution': {cfg.distribution!r} not in {COUPLING_DISTRIBUTIONS}")
    if cfg.coupling in RANDOM_KINDS and cfg.seed is None:
        raise ConfigConstraintError(
            f"key 'seed': required for coupling kind {cfg.coupling!r}")
    if cfg.j < 0:
        raise ConfigConstraintError("key 'j': must be >= 0")
    if cfg.realizations < 1:
        raise ConfigConstraintError("key 'realizations': must be >= 1")
    if cfg.workers < 1:
        raise ConfigConstraintError("key 'workers': must be >= 1")
    if cfg.tau is not None and cfg.tau <= 0:
        raise ConfigConstraintError("key 'tau': must be > 0")
    if cfg.dt is not None and cfg.dt <= 0:
        raise ConfigConstraintError("key 'dt': must be > 0")
    if cfg.method not in EVOLUTION_METHODS:
        raise ConfigConstraintError(f"key 'method': {cfg.method!r} not in {EVOLUTION_METHODS}")
    if cfg.frame not in ERROR_FRAMES:
        raise ConfigConstraintError(f"key 'frame': {cfg.frame!r} not in {ERROR_FRAMES}")
    if cfg.phase_convention not in PHASE_CONVENTIONS:
        raise ConfigConstraintError(
            f"key 'phase_convention': {cfg.phase_convention!r} not in {PHASE_CONVENTIONS}")
    if cfg.bins < 1:
        raise ConfigConstraintError("key 'bins': must be >= 1")
    if not 0 < cfg.window <= 1:
        raise ConfigConstraintError("key 'window': must be in (0, 1]")
    if cfg.threshold <= 1:
        raise ConfigConstraintError("key 'threshold': must exceed 1")
    if cfg.gap_factor <= 1:
        raise ConfigConstraintError("key 'gap_factor': must exceed 1")
    if cfg.unfold_degree < 1:
        raise ConfigConstraintError("key 'unfold_degree': must be >= 1")
    if not 0 <= cfg.unfold_trim < 0.5:
        raise ConfigConstraintError("key 'unfold_trim': must be in [0, 0.5)")
    if cfg.spacings_scope not in SPACINGS_SCOPES:
        raise ConfigConstraintError(
            f"key 'spacings_scope': {cfg.spacings_scope!r} not in {SPACINGS_SCOPES}")
    return cfg


def from_mapping(doc: dict) -> RunConfig:
    """Build a validated RunConfig from a plain mapping; unknown keys rejected."""
    known = {f.name: f.type for f in fields(RunConfig)}
    cfg = RunConfig()
    for key, value in doc.items():
        if key not in known:
            raise UnknownConfigKeyError(f"unknown config key {key!r}")
        if key in _GRID_KEYS:
            setattr(cfg, key, _parse_grid(key, value))
        elif key in ("qubits", "realizations", "workers", "bins", "unfold_degree", "seed"):
            setattr(cfg, key, _coerce(key, value, int))
        elif key in ("coupling", "distribution", "method", "frame",
                     "phase_convention", "spacings_scope"):
            setattr(cfg, key, _coerce(key, value, str))
        else:
            setattr(cfg, key, _coerce(key, value, float))
    return _validate(cfg)


def parse_config(text: str) -> RunConfig:
    """Parse a YAML config document into a validated RunConfig."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigSyntaxError(f"config is not valid YAML: {exc}") from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigSyntaxError("config must be a key-value mapping")
    return from_mapping(doc)
