"""Pulses, level schemes and the chain Hamiltonian.

Units follow the convention hbar = 1, time measured in units of the short
pulse width ``T`` and frequencies in ``1/T``.

Coupling convention
-------------------
The Hamiltonian of an ``n``-level chain is

    H = sum_k delta_k |k><k| - sum_k (Omega_k e^{i phi_k} |u_k><l_k| + h.c.)

where ``u_k`` / ``l_k`` are the energetically upper / lower level of the
``k``-th transition. For the Lambda and M schemes the even (0-based) levels
are the lower ones; for the extended Lambda scheme the ladder climbs up to the
middle level and back down. With real fields this is the plain chain with
``-Omega_k`` on both off-diagonals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ResonanceError, SequenceOrderError, UnsupportedSchemeError

__all__ = [
    "SchemeKind",
    "PulseEnvelope",
    "LevelScheme",
    "PulseSet",
    "HamiltonianSample",
    "envelope_value",
    "multiphoton_detunings",
    "detuning_ladder",
    "build_hamiltonian",
    "tridiagonal_tables",
    "sp_pair",
    "pulse_support",
]


class SchemeKind(str, enum.Enum):
    TWO_LEVEL = "two_level"
    LAMBDA3 = "lambda3"
    M5 = "m5"
    EXTENDED_LAMBDA5 = "extended_lambda5"

    @property
    def dimension(self) -> int:
        return {"two_level": 2, "lambda3": 3, "m5": 5, "extended_lambda5": 5}[self.value]


@dataclass(frozen=True)
class PulseEnvelope:
    """Gaussian Rabi-frequency profile ``peak * exp(-((t - center) / width)**2)``.

    ``width`` is the 1/e half width, not the FWHM. ``phase`` is a constant
    carrier phase in radians.
    """

    peak: float
    center: float = 0.0
    width: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        for name in ("peak", "center", "width", "phase"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"PulseEnvelope.{name} must be finite")
        if self.peak < 0:
            raise ValueError(f"peak must be >= 0, got {self.peak}")
        if self.width <= 0:
            raise ValueError(f"width must be > 0, got {self.width}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.peak * np.exp(-(((t - self.center) / self.width) ** 2))

    def scaled(self, peak: float) -> "PulseEnvelope":
        return PulseEnvelope(peak, self.center, self.width, self.phase)

    def with_phase(self, phase: float) -> "PulseEnvelope":
        return PulseEnvelope(self.peak, self.center, self.width, phase)


def envelope_value(p: PulseEnvelope, t):
    """Rabi frequency of ``p`` at time(s) ``t``; returns a float for scalar ``t``."""
    v = p(t)
    return float(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True)
class LevelScheme:
    """Coupling topology plus single-photon detunings.

    ``detunings`` holds one shared value for the 2- and 3-level schemes and
    the four single-photon detunings for the 5-level schemes.
    """

    kind: SchemeKind
    detunings: tuple = (0.0,)

    def __post_init__(self):
        kind = SchemeKind(self.kind)
        object.__setattr__(self, "kind", kind)
        det = tuple(float(d) for d in np.atleast_1d(self.detunings))
        object.__setattr__(self, "detunings", det)
        expected = 4 if kind.dimension == 5 else 1
        if len(det) != expected:
            raise DimensionError(f"{kind.value} takes {expected} single-photon detuning(s), got {len(det)}")
        if not all(math.isfinite(d) for d in det):
            raise ValueError("detunings must be finite")

    @property
    def dimension(self) -> int:
        return self.kind.dimension

    @property
    def n_transitions(self) -> int:
        return self.dimension - 1

    @classmethod
    def two_level(cls, delta: float) -> "LevelScheme":
        return cls(SchemeKind.TWO_LEVEL, (delta,))

    @classmethod
    def lambda3(cls, delta: float) -> "LevelScheme":
        return cls(SchemeKind.LAMBDA3, (delta,))

    @classmethod
    def m5(cls, delta: float) -> "LevelScheme":
        """M scheme tuned to two-photon resonance: equal detunings."""
        return cls(SchemeKind.M5, (delta,) * 4)

    @classmethod
    def extended_lambda5(cls, delta: float) -> "LevelScheme":
        """Extended Lambda tuned to two-photon resonance: equal magnitude, opposite signs."""
        return cls(SchemeKind.EXTENDED_LAMBDA5, (delta, -delta, -delta, delta))

    def upper_levels(self) -> tuple:
        """0-based index of the upper level of every transition."""
        if self.kind is SchemeKind.EXTENDED_LAMBDA5:
            return (1, 2, 2, 3)
        return tuple(k + 1 if k % 2 == 0 else k for k in range(self.n_transitions))

    def with_detunings(self, detunings) -> "LevelScheme":
        return LevelScheme(self.kind, tuple(detunings))


def multiphoton_detunings(scheme: LevelScheme) -> tuple:
    """Detuning ladder ``(delta_0, ..., delta_4)`` of a 5-level scheme."""
    if scheme.dimension != 5:
        raise UnsupportedSchemeError(f"multi-photon detunings are defined for 5-level schemes, not {scheme.kind.value}")
    d1, d2, d3, d4 = scheme.detunings
    if scheme.kind is SchemeKind.M5:
        return (0.0, d1, d1 - d2, d3 + d1 - d2, d4 - d3 + d2 - d1)
    return (0.0, d1, d1 + d2, -d3 + d1 + d2, -d4 - d3 + d2 + d1)


def detuning_ladder(scheme: LevelScheme) -> tuple:
    """Diagonal of the Hamiltonian for any supported scheme."""
    if scheme.dimension == 5:
        return multiphoton_detunings(scheme)
    (delta,) = scheme.detunings
    return (0.0, delta) if scheme.dimension == 2 else (0.0, delta, 0.0)


def check_resonance(scheme: LevelScheme, rtol: float = 1e-12) -> None:
    """Raise ResonanceError unless delta_2 = delta_4 = 0 and delta_1 = delta_3."""
    if scheme.dimension != 5:
        return
    d = multiphoton_detunings(scheme)
    scale = max(1.0, max(abs(x) for x in scheme.detunings))
    if abs(d[2]) > rtol * scale or abs(d[4]) > rtol * scale or abs(d[1] - d[3]) > rtol * scale:
        raise ResonanceError(f"two-photon resonance violated: ladder {d}")


@dataclass(frozen=True)
class PulseSet:
    """Envelopes indexed by transition (``Omega_1`` first).

    With ``tie_1_4`` the fourth envelope is the first one; pass three
    envelopes and the fourth is filled in.
    """

    envelopes: tuple
    tie_1_4: bool = False
    sequence: str | None = None

    def __post_init__(self):
        env = tuple(self.envelopes)
        if self.tie_1_4:
            if len(env) == 3:
                env = env + (env[0],)
            elif len(env) != 4 or env[3] != env[0]:
                raise DimensionError("tie_1_4 requires three envelopes or envelopes[3] == envelopes[0]")
            else:
                env = env[:3] + (env[0],)
        for e in env:
            if not isinstance(e, PulseEnvelope):
                raise TypeError(f"expected PulseEnvelope, got {type(e).__name__}")
        object.__setattr__(self, "envelopes", env)

    @classmethod
    def tied(cls, omega1: PulseEnvelope, omega2: PulseEnvelope, omega3: PulseEnvelope) -> "PulseSet":
        return cls((omega1, omega2, omega3), tie_1_4=True)

    def __len__(self):
        return len(self.envelopes)

    def __getitem__(self, i):
        return self.envelopes[i]

    def values(self, t) -> np.ndarray:
        """Rabi frequencies, shape ``(len(t), n_transitions)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.stack([e(t) for e in self.envelopes], axis=-1)

    def phases(self) -> np.ndarray:
        return np.array([e.phase for e in self.envelopes])

    def with_common_phase(self, phase: float) -> "PulseSet":
        env = tuple(e.with_phase(e.phase + phase) for e in self.envelopes)
        if self.tie_1_4:
            env = env[:3]
        return PulseSet(env, self.tie_1_4, self.sequence)


@dataclass(frozen=True)
class HamiltonianSample:
    matrix: np.ndarray
    time: float

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def _check_dimensions(scheme: LevelScheme, pulses: PulseSet) -> None:
    if len(pulses) != scheme.n_transitions:
        raise DimensionError(
            f"{scheme.kind.value} needs {scheme.n_transitions} envelopes, got {len(pulses)}"
        )


def _off_diagonal(scheme: LevelScheme, omegas, phases):
    """Upper off-diagonal ``H[k, k+1]`` for tabulated Rabi frequencies."""
    upper = np.array(scheme.upper_levels())
    k = np.arange(scheme.n_transitions)
    # H[u, l] = -Omega e^{i phi}; the stored element is H[k, k+1]
    sign = np.where(upper == k, 1.0, -1.0)
    return -np.asarray(omegas) * np.exp(1j * sign * np.asarray(phases))


def build_hamiltonian(scheme: LevelScheme, pulses: PulseSet, t: float, require_resonance: bool = False) -> HamiltonianSample:
    """Assemble the Hermitian Hamiltonian at time ``t``.

    Parameters
    ----------
    require_resonance : bool
        Refuse 5-level schemes that are off two-photon resonance, i.e. outside
        the regime where the closed-form spectrum holds.
    """
    _check_dimensions(scheme, pulses)
    if require_resonance:
        check_resonance(scheme)
    n = scheme.dimension
    H = np.diag(np.array(detuning_ladder(scheme), dtype=complex))
    off = _off_diagonal(scheme, pulses.values(t)[0], pulses.phases())
    idx = np.arange(n - 1)
    H[idx, idx + 1] = off
    H[idx + 1, idx] = np.conj(off)
    return HamiltonianSample(H, float(t))


def tridiagonal_tables(scheme: LevelScheme, pulses: PulseSet, times):
    """Tabulate ``(diag, off)`` with shapes ``(len(times), n)`` and ``(len(times), n-1)``.

    ``off[:, k]`` is ``H[k, k+1]``; this is the input format of the integrator kernel.
    """
    _check_dimensions(scheme, pulses)
    times = np.asarray(times, dtype=float)
    diag = np.broadcast_to(np.array(detuning_ladder(scheme), dtype=float), (len(times), scheme.dimension))
    off = _off_diagonal(scheme, pulses.values(times), pulses.phases())
    return np.ascontiguousarray(diag), np.ascontiguousarray(off)


def sp_pair(stokes: PulseEnvelope, pump: PulseEnvelope) -> PulseSet:
    """Lambda-system pulse pair with the Stokes pulse preceding the pump.

    Returns ``PulseSet((pump, stokes))`` so that ``Omega_1`` is the pump.
    """
    if not stokes.center < pump.center:
        raise SequenceOrderError(
            f"Stokes (center {stokes.center}) must precede pump (center {pump.center})"
        )
    return PulseSet((pump, stokes), sequence="SP")


def pulse_support(pulses: PulseSet, rel: float = 1e-6) -> tuple:
    """Interval outside which every envelope is below ``rel * peak``.

    Zero-peak envelopes are ignored; returns ``(inf, -inf)`` if all are zero.
    """
    reach = math.sqrt(-math.log(rel))
    lo, hi = math.inf, -math.inf
    for e in pulses.envelopes:
        if e.peak > 0:
            lo = min(lo, e.center - reach * e.width)
            hi = max(hi, e.center + reach * e.width)
    return lo, hi
