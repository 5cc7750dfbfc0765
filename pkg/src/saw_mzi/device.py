"""Device geometry and fields to interferometer parameters.

Everything is strict SI. Unit conversion for display lives in :mod:`saw_mzi.cli`.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from scipy import constants as _codata

from .errors import ConfigError, DomainError
from .qubit import BeamsplitterSpec


@dataclass(frozen=True)
class PhysicalConstants:
    e: float = _codata.e
    hbar: float = _codata.hbar
    h: float = _codata.h
    k_B: float = _codata.k


CONSTANTS = PhysicalConstants()

DEVICE_KEYS = ("v_saw", "d", "l_phase", "l_tunnel", "area", "temperature", "f_saw")


@dataclass(frozen=True)
class DeviceParams:
    """Geometry and operating point of a two-channel SAW device.

    Fields other than ``v_saw`` are optional; operations that need one call
    :meth:`require`, which raises :class:`ConfigError` naming the missing key.
    """

    v_saw: float = 2700.0
    d: float | None = None
    l_phase: float | None = None
    l_tunnel: float | None = None
    area: float | None = None
    temperature: float | None = None
    f_saw: float | None = None

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None and not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{f.name} must be strictly positive, got {value!r}")

    def require(self, *names: str) -> tuple[float, ...]:
        values = []
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise ConfigError(f"missing config key: {name}")
            values.append(value)
        return tuple(values)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str | float]) -> DeviceParams:
        """Build from the device keys present in ``mapping``; other keys are ignored."""
        kwargs = {k: parse_float(mapping, k) for k in DEVICE_KEYS if k in mapping}
        return cls(**kwargs)


@dataclass(frozen=True)
class TunnelSpec:
    """Tunnelling energy ``delta`` and well asymmetry ``epsilon``, both in joules."""

    delta: float
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if not self.delta >= 0.0:
            raise DomainError(f"tunnelling energy must be non-negative, got {self.delta!r}")


def read_config(path: str | Path) -> dict[str, str]:
    """Read a flat ``key = value`` file. ``#`` starts a comment, keys are case-sensitive."""
    parser = configparser.ConfigParser(
        comment_prefixes=("#",), inline_comment_prefixes=("#",), interpolation=None
    )
    parser.optionxform = str  # type: ignore[assignment]
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        parser.read_string("[config]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return dict(parser["config"])


def parse_float(mapping: Mapping[str, str | float], key: str, default: float | None = None) -> float:
    if key not in mapping:
        if default is None:
            raise ConfigError(f"missing config key: {key}")
        return default
    try:
        return float(mapping[key])
    except ValueError as exc:
        raise ConfigError(f"config key {key}: not a number: {mapping[key]!r}") from exc


def load_device_params(path: str | Path) -> DeviceParams:
    """Load a device-only file; keys outside :data:`DEVICE_KEYS` are rejected."""
    raw = read_config(path)
    unknown = sorted(set(raw) - set(DEVICE_KEYS))
    if unknown:
        raise ConfigError(f"unknown device keys: {', '.join(unknown)}")
    return DeviceParams.from_mapping(raw)


def transit_time(length: float, v_saw: float) -> float:
    if not v_saw > 0.0:
        raise DomainError(f"SAW velocity must be positive, got {v_saw!r}")
    if not length >= 0.0:
        raise DomainError(f"length must be non-negative, got {length!r}")
    return length / v_saw


def efield_phase(
    E: float, d: float, l: float, v_saw: float, k: PhysicalConstants = CONSTANTS
) -> float:
    """Relative phase from a transverse field ``E`` over a gate of length ``l``.

    ``e * (E*d) * (l/v_saw) / hbar``: the channel voltage difference ``E*d`` held
    for the SAW transit time of the gate.
    """
    for name, value in (("d", d), ("l", l), ("v_saw", v_saw)):
        if not value > 0.0:
            raise DomainError(f"{name} must be positive, got {value!r}")
    return k.e * E * d * l / (k.hbar * v_saw)


def max_gate_length(v_min: float, v_saw: float, k: PhysicalConstants = CONSTANTS) -> float:
    """Gate length at which a channel voltage ``v_min`` gives exactly one 2*pi fringe."""
    if not v_min > 0.0:
        raise DomainError(f"voltage resolution must be positive, got {v_min!r}")
    if not v_saw > 0.0:
        raise DomainError(f"SAW velocity must be positive, got {v_saw!r}")
    return k.h * v_saw / (k.e * v_min)


def ab_phase(B: float, area: float, k: PhysicalConstants = CONSTANTS) -> float:
    """Aharonov-Bohm phase for a uniform field ``B`` normal to a loop of ``area``."""
    if not area >= 0.0:
        raise DomainError(f"area must be non-negative, got {area!r}")
    return k.e * B * area / k.hbar


def ab_field_for_2pi(area: float, k: PhysicalConstants = CONSTANTS) -> float:
    if not area > 0.0:
        raise DomainError(f"area must be positive, got {area!r}")
    return k.h / (k.e * area)


def tunnel_angle(
    spec: TunnelSpec, gap_length: float, v_saw: float, k: PhysicalConstants = CONSTANTS
) -> BeamsplitterSpec:
    """Beamsplitter produced by tunnelling for the SAW transit time of a gap.

    The raw rotation is ``(delta/hbar) * gap_length / v_saw`` and maps
    ``|0> -> cos(t)|0> - i sin(t)|1>``. Rotations past pi/2 are folded back
    into [0, pi/2] (count kept in ``wraps``); for odd ``wraps`` the output
    phase flips to ``+pi/2`` so that the action on ``|0>`` is unchanged up to
    a global phase. ``epsilon`` is neglected.
    """
    if not gap_length >= 0.0:
        raise DomainError(f"gap length must be non-negative, got {gap_length!r}")
    raw = spec.delta / k.hbar * transit_time(gap_length, v_saw)
    wraps = int(raw // (math.pi / 2))
    rem = raw - wraps * (math.pi / 2)
    if wraps % 2 == 0:
        return BeamsplitterSpec(min(rem, math.pi / 2), -math.pi / 2, wraps=wraps)
    return BeamsplitterSpec(max(math.pi / 2 - rem, 0.0), math.pi / 2, wraps=wraps)


def thermal_energy(temperature: float, k: PhysicalConstants = CONSTANTS) -> float:
    """``k_B T`` in electronvolts."""
    if not temperature >= 0.0:
        raise DomainError(f"temperature must be non-negative, got {temperature!r}")
    return k.k_B * temperature / k.e


def shot_noise_relative(f_saw: float, delta_t: float) -> float:
    """Relative counting noise ``1/sqrt(N)`` with ``N = f_saw * delta_t`` electrons."""
    if not (f_saw > 0.0 and delta_t > 0.0):
        raise DomainError("SAW frequency and integration time must be positive")
    return 1.0 / math.sqrt(f_saw * delta_t)
