"""Reversible Toffoli gates driven by adiabatic passage.

Toffoli3 lives in a Lambda system: the pump (1-2) and Stokes (2-3) pulses are
the two control bits and the atom's initial state (``|1>`` = 0, ``|3>`` = 1)
is the target. Toffoli4 lives in the tied five-level chain: ``Omega_1``
(= ``Omega_4``), ``Omega_2`` and ``Omega_3`` are the control bits and the
target is stored in ``|1>`` / ``|5>``. A control bit 0 switches its pulse off;
nothing else about the pulse sequence depends on the input.

:class:`ToffoliGate` wraps the simulation in a scikit-learn estimator whose
``predict`` maps rows of input bits to rows of output bits.
"""

from __future__ import annotations

import enum
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .adiabaticity import AdiabaticityReport, scan_five, scan_lambda3
from .dynamics import TimeGrid, Trajectory, integrate
from .errors import DimensionError
from .model import LevelScheme, PulseEnvelope, PulseSet, sp_pair

__all__ = [
    "GateKind",
    "GateParams",
    "GateInput",
    "GateScenario",
    "GateOutcome",
    "TruthTable",
    "encode",
    "readout",
    "run_gate",
    "truth_table",
    "toffoli",
    "ToffoliGate",
    "WORKERS_ENV",
]

WORKERS_ENV = "STIRAP_TOFFOLI_WORKERS"


class GateKind(str, enum.Enum):
    TOFFOLI3 = "toffoli3"
    TOFFOLI4 = "toffoli4"

    @property
    def n_bits(self) -> int:
        return 3 if self is GateKind.TOFFOLI3 else 4

    @property
    def logical_levels(self) -> tuple:
        """0-based bare states holding target 0 and target 1."""
        return (0, 2) if self is GateKind.TOFFOLI3 else (0, 4)


@dataclass(frozen=True)
class GateParams:
    """Physical configuration shared by every row of a truth table.

    The two short pulses (pump/Stokes, or ``Omega_2``/``Omega_3``) have width
    ``t_short`` and centers ``+delay/2`` / ``-delay/2``; the long field
    ``Omega_1 = Omega_4`` has width ``long_width * t_short`` and is centered
    at 0, nesting both short pulses.
    """

    delta: float = 50.0
    t_short: float = 1.0
    peak: float = 100.0
    peak_long: float = 100.0
    long_width: float = 4.0
    delay: float = 1.5
    scheme: str = "m5"
    threshold: float = 0.99
    steps: int | None = None

    def __post_init__(self):
        if self.t_short <= 0 or self.long_width <= 0:
            raise ValueError("pulse widths must be positive")
        if self.peak < 0 or self.peak_long < 0:
            raise ValueError("peaks must be non-negative")
        if self.delay <= 0:
            raise ValueError("delay must be positive (Stokes / Omega_3 first)")
        if not 0.5 < self.threshold <= 1.0:
            raise ValueError("threshold must lie in (0.5, 1]")
        if self.scheme not in ("m5", "extended_lambda5"):
            raise ValueError(f"unknown five-level scheme {self.scheme!r}")


@dataclass(frozen=True)
class GateInput:
    controls: tuple
    target: int

    def __post_init__(self):
        bits = tuple(int(b) for b in self.controls) + (int(self.target),)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0 or 1, got {bits}")
        object.__setattr__(self, "controls", bits[:-1])
        object.__setattr__(self, "target", bits[-1])

    @classmethod
    def from_bits(cls, bits) -> "GateInput":
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        bits = list(bits)
        return cls(tuple(bits[:-1]), bits[-1])

    @property
    def bits(self) -> tuple:
        return self.controls + (self.target,)

    def __str__(self):
        return "".join(map(str, self.bits))


def toffoli(bits) -> tuple:
    """Ideal Toffoli map: flip the last bit iff all others are 1."""
    bits = tuple(int(b) for b in bits)
    return bits[:-1] + (bits[-1] ^ int(all(bits[:-1])),)


@dataclass(frozen=True)
class GateScenario:
    kind: GateKind
    input: GateInput
    scheme: LevelScheme
    pulses: PulseSet
    initial: int
    grid: TimeGrid


def _as_input(kind: GateKind, bits) -> GateInput:
    inp = bits if isinstance(bits, GateInput) else GateInput.from_bits(bits)
    if len(inp.bits) != kind.n_bits:
        raise DimensionError(f"{kind.value} takes {kind.n_bits} bits, got {len(inp.bits)}")
    return inp


def _pulses(kind: GateKind, controls, params: GateParams) -> PulseSet:
    half = 0.5 * params.delay
    if kind is GateKind.TOFFOLI3:
        pump_on, stokes_on = controls
        pump = PulseEnvelope(params.peak * pump_on, +half, params.t_short)
        stokes = PulseEnvelope(params.peak * stokes_on, -half, params.t_short)
        return sp_pair(stokes, pump)
    c1, c2, c3 = controls
    return PulseSet.tied(
        PulseEnvelope(params.peak_long * c1, 0.0, params.long_width * params.t_short),
        PulseEnvelope(params.peak * c2, +half, params.t_short),
        PulseEnvelope(params.peak * c3, -half, params.t_short),
    )


def _scheme(kind: GateKind, params: GateParams) -> LevelScheme:
    if kind is GateKind.TOFFOLI3:
        return LevelScheme.lambda3(params.delta)
    if params.scheme == "m5":
        return LevelScheme.m5(params.delta)
    return LevelScheme.extended_lambda5(params.delta)


def _grid(kind: GateKind, params: GateParams) -> TimeGrid:
    # one grid for every row: built from the all-on sequence
    template = _pulses(kind, (1,) * (kind.n_bits - 1), params)
    kw = {} if params.steps is None else {"steps": params.steps}
    return TimeGrid.for_pulses(_scheme(kind, params), template, **kw)


def encode(kind, bits, params: GateParams | None = None) -> GateScenario:
    """Translate input bits into a scheme, pulse sequence and initial bare state."""
    kind = GateKind(kind)
    params = params or GateParams()
    inp = _as_input(kind, bits)
    return GateScenario(
        kind=kind,
        input=inp,
        scheme=_scheme(kind, params),
        pulses=_pulses(kind, inp.controls, params),
        initial=kind.logical_levels[inp.target],
        grid=_grid(kind, params),
    )


def readout(state, kind, threshold: float = 0.99):
    """Target bit stored in ``state``, or ``None`` when indeterminate.

    A bit is reported only if its logical state holds at least ``threshold``
    of the population and the leakage out of the logical pair is at most
    ``1 - threshold``.
    """
    kind = GateKind(kind)
    pops = np.abs(np.asarray(state)) ** 2
    lo, hi = kind.logical_levels
    leakage = float(pops.sum() - pops[lo] - pops[hi])
    if leakage > 1.0 - threshold:
        return None
    if pops[lo] >= threshold:
        return 0
    if pops[hi] >= threshold:
        return 1
    return None


@dataclass(frozen=True)
class GateOutcome:
    kind: GateKind
    input: GateInput
    output_target: int | None
    expected_target: int
    fidelity: float
    leakage: float
    opposite: float
    trajectory: Trajectory = field(repr=False, compare=False)
    repeats: int = 1

    @property
    def passed(self) -> bool:
        return self.output_target == self.expected_target

    @property
    def output_bits(self) -> tuple:
        return self.input.controls + (self.output_target,)

    def as_dict(self) -> dict:
        return {
            "input": str(self.input),
            "output": "".join("?" if b is None else str(b) for b in self.output_bits),
            "expected": "".join(map(str, self.input.controls + (self.expected_target,))),
            "fidelity": self.fidelity,
            "leakage": self.leakage,
            "opposite": self.opposite,
            "pass": self.passed,
            "repeats": self.repeats,
            "norm_drift": self.trajectory.norm_drift,
            "max_populations": [float(p) for p in self.trajectory.metadata.get("max_populations", [])],
        }


def run_gate(kind, bits, params: GateParams | None = None, repeats: int = 1) -> GateOutcome:
    """Encode, integrate and read out one gate application.

    With ``repeats > 1`` the same pulse sequence is applied again to the final
    state of the previous pass; the expected target then flips once per pass.
    """
    params = params or GateParams()
    sc = encode(kind, bits, params)
    state = sc.initial
    for _ in range(repeats):
        traj = integrate(sc.scheme, sc.pulses, state, sc.grid)
        # each pass checks its own drift; restart the next one from a unit vector
        state = traj.final_state / np.linalg.norm(traj.final_state)
    expected = toffoli(sc.input.bits)[-1] if repeats % 2 else sc.input.target
    pops = np.abs(traj.final_state) ** 2
    lo, hi = sc.kind.logical_levels
    good, bad = (hi, lo) if expected else (lo, hi)
    return GateOutcome(
        kind=sc.kind,
        input=sc.input,
        output_target=readout(traj.final_state, sc.kind, params.threshold),
        expected_target=expected,
        fidelity=float(pops[good]),
        leakage=float(pops.sum() - pops[lo] - pops[hi]),
        opposite=float(pops[bad]),
        trajectory=traj,
        repeats=repeats,
    )


@dataclass(frozen=True)
class TruthTable:
    kind: GateKind
    rows: tuple
    params: GateParams

    @property
    def passed(self) -> bool:
        return all(r.passed and r.fidelity >= self.params.threshold for r in self.rows)

    @property
    def failures(self) -> tuple:
        return tuple(r for r in self.rows if not (r.passed and r.fidelity >= self.params.threshold))

    @property
    def min_fidelity(self) -> float:
        return min(r.fidelity for r in self.rows)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "pass": self.passed,
            "min_fidelity": self.min_fidelity,
            "params": asdict(self.params),
            "rows": [r.as_dict() for r in self.rows],
        }

    def text(self) -> str:
        if self.kind is GateKind.TOFFOLI3:
            head = ["pump", "stokes", "initial", "final", "fidelity"]
        else:
            head = ["c1", "c2", "c3", "t", "out", "fidelity"]
        lines = [" | ".join(head)]
        for r in self.rows:
            out = "?" if r.output_target is None else str(r.output_target)
            if self.kind is GateKind.TOFFOLI3:
                cells = [str(b) for b in r.input.bits] + [out]
            else:
                cells = [str(b) for b in r.input.bits] + ["".join(map(str, r.input.controls)) + out]
            flag = "" if r.passed and r.fidelity >= self.params.threshold else "  <-- FAIL"
            lines.append(" | ".join(cells + [f"{r.fidelity:.6f}"]) + flag)
        return "\n".join(lines)


def _worker_count(workers):
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, int(workers))


def _row(args):
    kind, bits, params = args
    return run_gate(kind, bits, params)


def truth_table(kind, params: GateParams | None = None, workers: int | None = None) -> TruthTable:
    """Simulate all ``2**n`` inputs in canonical binary order."""
    kind = GateKind(kind)
    params = params or GateParams()
    inputs = list(itertools.product((0, 1), repeat=kind.n_bits))
    jobs = [(kind, bits, params) for bits in inputs]
    n = _worker_count(workers)
    if n == 1:
        rows = [_row(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(_row, jobs))
    return TruthTable(kind, tuple(rows), params)


def adiabaticity_report(kind, params: GateParams | None = None) -> AdiabaticityReport:
    """Single-atom adiabaticity of the all-on pulse sequence."""
    kind = GateKind(kind)
    params = params or GateParams()
    pulses = _pulses(kind, (1,) * (kind.n_bits - 1), params)
    if kind is GateKind.TOFFOLI3:
        return scan_lambda3(pulses, params.delta, params.t_short)
    return scan_five(pulses, params.delta, params.t_short)


class ToffoliGate(BaseEstimator):
    """Adiabatic Toffoli gate as a scikit-learn style predictor.

    ``fit`` validates the configuration and evaluates the adiabaticity
    conditions; ``predict`` simulates every input row and returns the output
    bits, with ``-1`` marking an indeterminate target.

    Examples
    --------
    >>> gate = ToffoliGate(kind="toffoli3").fit()
    >>> gate.predict([[1, 1, 0]])
    array([[1, 1, 1]])
    """

    def __init__(self, kind="toffoli4", delta=50.0, t_short=1.0, peak=100.0, peak_long=100.0,
                 long_width=4.0, delay=1.5, scheme="m5", threshold=0.99, steps=None):
        self.kind = kind
        self.delta = delta
        self.t_short = t_short
        self.peak = peak
        self.peak_long = peak_long
        self.long_width = long_width
        self.delay = delay
        self.scheme = scheme
        self.threshold = threshold
        self.steps = steps

    def _params(self) -> GateParams:
        return GateParams(self.delta, self.t_short, self.peak, self.peak_long, self.long_width,
                          self.delay, self.scheme, self.threshold, self.steps)

    def fit(self, X=None, y=None):
        self.kind_ = GateKind(self.kind)
        self.params_ = self._params()
        self.n_features_in_ = self.kind_.n_bits
        self.adiabaticity_ = adiabaticity_report(self.kind_, self.params_)
        return self

    def _check_bits(self, X):
        X = check_array(X, dtype=np.int64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} bits per row, {self.kind_.value} expects {self.n_features_in_}")
        if np.any((X != 0) & (X != 1)):
            raise ValueError("X must contain only 0/1 bits")
        return X

    def run(self, X) -> list:
        """Full :class:`GateOutcome` for every row of ``X``."""
        check_is_fitted(self)
        X = self._check_bits(X)
        return [run_gate(self.kind_, row, self.params_) for row in X]

    def predict(self, X) -> np.ndarray:
        out = []
        for o in self.run(X):
            t = -1 if o.output_target is None else o.output_target
            out.append(list(o.input.controls) + [t])
        return np.array(out, dtype=np.int64)

    def predict_fidelity(self, X) -> np.ndarray:
        return np.array([o.fidelity for o in self.run(X)])

    def score(self, X, y=None) -> float:
        """Fraction of rows whose predicted output equals ``y`` (default: the ideal Toffoli output)."""
        X = self._check_bits(X)
        if y is None:
            y = np.array([toffoli(row) for row in X])
        y = check_array(y, dtype=np.int64)
        return float(np.mean(np.all(self.predict(X) == y, axis=1)))
