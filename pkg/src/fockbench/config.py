"""Sweep configuration: flat ``key=value`` files overridden by command-line flags."""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .errors import ConfigurationError
from .protocol import DEFAULT_SIMPLE, SimpleStrategy
from .states import JointStrategy

KEYS = ("lambda", "t2_min", "t2_max", "t2_steps", "cutoff", "strategies", "eta_grid", "out", "format")
FORMATS = ("csv", "json")
THREADS_ENV = "FOCKBENCH_THREADS"

# joint labels contain commas, so strategy lists split on ';' or whitespace
_STRATEGY_SPLIT = re.compile(r"[;\s]+")


@dataclass(frozen=True)
class SweepConfig:
    lam: float = 0.5
    t2_min: float = 0.5
    t2_max: float = 0.99
    t2_steps: int = 50
    cutoff: int | None = None
    strategies: tuple[str, ...] = ()
    eta_grid: tuple[float, ...] | None = None
    output_path: Path | None = None
    output_format: str = "csv"

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ConfigurationError(f"lambda must lie in (0, 1), got {self.lam}")
        for name in ("t2_min", "t2_max"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigurationError(f"{name} must lie in (0, 1), got {v}")
        if not self.t2_min < self.t2_max:
            raise ConfigurationError(f"t2_min ({self.t2_min}) must be below t2_max ({self.t2_max})")
        if self.t2_steps < 1:
            raise ConfigurationError(f"t2_steps must be positive, got {self.t2_steps}")
        if self.cutoff is not None and self.cutoff < 1:
            raise ConfigurationError(f"cutoff must be 'auto' or a positive integer, got {self.cutoff}")
        if self.eta_grid is not None:
            if not self.eta_grid:
                raise ConfigurationError("eta_grid is empty")
            bad = [e for e in self.eta_grid if not 0.0 < e <= 1.0]
            if bad:
                raise ConfigurationError(f"eta_grid values must lie in (0, 1], got {bad}")
        for label in self.strategies:
            _check_label(label)
        if self.output_format not in FORMATS:
            raise ConfigurationError(f"format must be one of {FORMATS}, got {self.output_format!r}")

    @property
    def t2_values(self) -> list[float]:
        if self.t2_steps == 1:
            return [self.t2_min]
        step = (self.t2_max - self.t2_min) / (self.t2_steps - 1)
        return [self.t2_min + i * step for i in range(self.t2_steps - 1)] + [self.t2_max]

    def simple_strategies(self) -> tuple[SimpleStrategy, ...]:
        if not self.strategies:
            return DEFAULT_SIMPLE
        return tuple(SimpleStrategy.parse(s) for s in self.strategies)

    def joint_strategies(self) -> tuple[JointStrategy, ...]:
        if not self.strategies:
            return tuple(JointStrategy)
        return tuple(JointStrategy.parse(s) for s in self.strategies)

    def resolved(self) -> dict[str, str]:
        """Every physics-relevant field as text; the output location is left out."""
        return {
            "lambda": _fmt(self.lam),
            "t2_min": _fmt(self.t2_min),
            "t2_max": _fmt(self.t2_max),
            "t2_steps": str(self.t2_steps),
            "cutoff": "auto" if self.cutoff is None else str(self.cutoff),
            "strategies": ";".join(self.strategies) if self.strategies else "default",
            "eta_grid": "none" if self.eta_grid is None else ",".join(_fmt(e) for e in self.eta_grid),
            "format": self.output_format,
        }


def _check_label(label: str) -> None:
    # which family applies depends on the command; here the label only has to name one
    try:
        SimpleStrategy.parse(label)
    except ConfigurationError:
        try:
            JointStrategy.parse(label)
        except ConfigurationError:
            raise ConfigurationError(f"unknown strategy label {label!r}") from None


def _fmt(x: float) -> str:
    return "%.12g" % x


def _float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigurationError(f"{key}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigurationError(f"{key}: must be finite, got {text!r}")
    return value


def _int(key: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigurationError(f"{key}: not an integer: {text!r}") from None


def parse_strategies(text: str) -> tuple[str, ...]:
    return tuple(s for s in _STRATEGY_SPLIT.split(text.strip()) if s)


def parse_eta_grid(text: str) -> tuple[float, ...]:
    return tuple(_float("eta_grid", s) for s in re.split(r"[,;\s]+", text.strip()) if s)


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment and blank lines are skipped."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
    entries = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        entries[key.replace("-", "_")] = value
    return entries


def build_config(entries: Mapping[str, str | None]) -> SweepConfig:
    """Turn raw text values, keyed like the flags, into a validated config.

    ``None`` values are ignored so flag defaults never mask file entries.
    """
    unknown = sorted(set(entries) - set(KEYS))
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
    kw = {}
    for key, value in entries.items():
        if value is None:
            continue
        value = value.strip()
        if key == "lambda":
            kw["lam"] = _float(key, value)
        elif key in ("t2_min", "t2_max"):
            kw[key] = _float(key, value)
        elif key == "t2_steps":
            kw[key] = _int(key, value)
        elif key == "cutoff":
            kw["cutoff"] = None if value.lower() == "auto" else _int(key, value)
        elif key == "strategies":
            kw["strategies"] = parse_strategies(value)
        elif key == "eta_grid":
            kw["eta_grid"] = parse_eta_grid(value)
        elif key == "out":
            kw["output_path"] = Path(value) if value else None
        elif key == "format":
            kw["output_format"] = value.lower()
    return SweepConfig(**kw)


def merge(file_entries: Mapping[str, str], flag_entries: Mapping[str, str | None]) -> SweepConfig:
    combined = dict(file_entries)
    combined.update({k: v for k, v in flag_entries.items() if v is not None})
    return build_config(combined)


def worker_count() -> int:
    """Worker threads: the CPU count, capped by ``FOCKBENCH_THREADS`` when set."""
    cpus = os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap is None or not cap.strip():
        return cpus
    n = _int(THREADS_ENV, cap)
    if n < 1:
        raise ConfigurationError(f"{THREADS_ENV} must be a positive integer, got {cap!r}")
    return min(cpus, n)

