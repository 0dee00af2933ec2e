"""Scenario files: a validated JSON description of one run.

Top-level keys (all optional, unknown keys are rejected)::

    scheme   {"kind": "two_level" | "lambda3" | "m5" | "extended_lambda5",
              "delta": float | "detunings": [float, ...]}
    pulses   [{"peak", "center", "width", "phase"}, ...]   # Omega_1, Omega_2, ...
    tie_1_4  bool        # five-level: Omega_4 is Omega_1, give three pulses
    initial  int         # 0-based bare state
    grid     {"t_start", "t_end", "steps", "adaptive", "tol", "norm_tol", "samples"}
    gate     {"kind", "input", "delta", "t_short", "peak", "peak_long",
              "long_width", "delay", "scheme", "threshold", "steps"}
    medium   {"q1L_over_delta" | "couplings", "length", "z_steps", "floor_omega",
              "drift_denominator", "z_tol", "check", "tau_steps"}
    output   {"dir", "prefix"}

Every number must be finite.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from .dynamics import TimeGrid
from .errors import ConfigError
from .gates import GateKind, GateParams
from .model import LevelScheme, PulseEnvelope, PulseSet, SchemeKind

__all__ = ["Scenario", "load_scenario", "parse_scenario"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("*", mode="after")
    @classmethod
    def _finite(cls, v):
        items = v if isinstance(v, (list, tuple)) else [v]
        for x in items:
            if isinstance(x, float) and not math.isfinite(x):
                raise ValueError("values must be finite")
        return v


class SchemeSpec(_Strict):
    kind: SchemeKind
    delta: Optional[float] = None
    detunings: Optional[tuple[float, ...]] = None

    @model_validator(mode="after")
    def _one_of(self):
        if (self.delta is None) == (self.detunings is None):
            raise ValueError("give exactly one of 'delta' or 'detunings'")
        return self

    def build(self) -> LevelScheme:
        if self.detunings is not None:
            return LevelScheme(self.kind, self.detunings)
        return getattr(LevelScheme, self.kind.value)(self.delta)


class PulseSpec(_Strict):
    peak: float
    center: float = 0.0
    width: float = 1.0
    phase: float = 0.0

    def build(self) -> PulseEnvelope:
        return PulseEnvelope(self.peak, self.center, self.width, self.phase)


class GridSpec(_Strict):
    t_start: float
    t_end: float
    steps: int = 200_000
    adaptive: bool = False
    tol: float = 1e-6
    norm_tol: float = 1e-8
    samples: int = 1000

    def build(self) -> TimeGrid:
        return TimeGrid(**self.model_dump())


class GateSpec(_Strict):
    kind: GateKind = GateKind.TOFFOLI4
    input: Optional[str] = None
    delta: float = 50.0
    t_short: float = 1.0
    peak: float = 100.0
    peak_long: float = 100.0
    long_width: float = 4.0
    delay: float = 1.5
    scheme: Literal["m5", "extended_lambda5"] = "m5"
    threshold: float = 0.99
    steps: Optional[int] = None

    @field_validator("input")
    @classmethod
    def _bits(cls, v):
        if v is not None and (not v or set(v) - {"0", "1"}):
            raise ValueError("input must be a string of 0/1 bits")
        return v

    def params(self) -> GateParams:
        return GateParams(**self.model_dump(exclude={"kind", "input"}))


class MediumSpec(_Strict):
    q1L_over_delta: Optional[float] = None
    couplings: Optional[tuple[float, float, float, float]] = None
    length: float = 1.0
    z_steps: int = 16
    floor_omega: Optional[float] = None
    drift_denominator: Literal["omega1", "own"] = "omega1"
    z_tol: float = 1e-4
    check: bool = True
    tau_steps: Optional[int] = None

    @model_validator(mode="after")
    def _one_of(self):
        if (self.q1L_over_delta is None) == (self.couplings is None):
            raise ValueError("give exactly one of 'q1L_over_delta' or 'couplings'")
        return self


class OutputSpec(_Strict):
    dir: str = "."
    prefix: str = "run"


class Scenario(_Strict):
    scheme: Optional[SchemeSpec] = None
    pulses: Optional[tuple[PulseSpec, ...]] = None
    tie_1_4: bool = False
    initial: int = 0
    grid: Optional[GridSpec] = None
    gate: Optional[GateSpec] = None
    medium: Optional[MediumSpec] = None
    output: OutputSpec = OutputSpec()

    def level_scheme(self) -> LevelScheme:
        if self.scheme is None:
            raise ConfigError("scenario has no 'scheme' section")
        return self.scheme.build()

    def pulse_set(self) -> PulseSet:
        if self.pulses is None:
            raise ConfigError("scenario has no 'pulses' section")
        env = tuple(p.build() for p in self.pulses)
        if self.tie_1_4:
            return PulseSet.tied(*env)
        return PulseSet(env)

    def time_grid(self) -> TimeGrid | None:
        return None if self.grid is None else self.grid.build()

    def gate_params(self) -> GateParams:
        return (self.gate or GateSpec()).params()

    def resolved(self) -> dict:
        """Full parameter set, defaults filled in, for provenance sidecars."""
        out = self.model_dump(mode="json")
        if self.gate is not None:
            out["gate"]["params"] = asdict(self.gate_params())
        return out


def parse_scenario(data: dict) -> Scenario:
    """Validate a decoded scenario; every failure becomes :class:`ConfigError`."""
    try:
        sc = Scenario.model_validate(data)
        # build the physical objects once so their own invariants surface here
        if sc.scheme is not None:
            sc.level_scheme()
        if sc.pulses is not None:
            ps = sc.pulse_set()
            if sc.scheme is not None and len(ps) != sc.level_scheme().n_transitions:
                raise ConfigError(
                    f"{sc.scheme.kind.value} needs {sc.level_scheme().n_transitions} pulses, got {len(ps)}"
                )
        sc.time_grid()
        sc.gate_params()
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    return sc


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return parse_scenario(data)
