"""Adiabaticity and optical-length inequalities as structured reports.

Every criterion is dimensionless. ``>>`` criteria pass when the value is at
least ``much_greater`` (default 10); ``<<`` criteria pass when the value is at
most ``much_less`` (default 0.1). A criterion that does not apply to the given
field configuration (e.g. the overlap conditions when a field is absent) is
kept in the report, flagged inapplicable and not counted against ``overall``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dressed import five_eigenvalues_general, numeric_spectrum
from .model import LevelScheme, PulseSet, build_hamiltonian

__all__ = [
    "MUCH_GREATER",
    "MUCH_LESS",
    "Criterion",
    "AdiabaticityReport",
    "check_lambda3",
    "check_lambda3_medium",
    "check_five",
    "check_five_general",
    "check_medium_five",
    "optical_length_indicator",
    "overlap_window",
    "scan_lambda3",
    "scan_five",
    "scan_gaps",
]

MUCH_GREATER = 10.0
MUCH_LESS = 0.1


@dataclass(frozen=True)
class Criterion:
    name: str
    formula: str
    value: float
    threshold: float
    relation: str  # ">>" or "<<"
    applicable: bool = True

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"criterion {self.name} is not finite: {self.value}")

    @property
    def passed(self) -> bool:
        if not self.applicable:
            return True
        if self.relation == ">>":
            return self.value >= self.threshold
        return self.value <= self.threshold

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "formula": self.formula,
            "value": self.value,
            "threshold": self.threshold,
            "relation": self.relation,
            "applicable": self.applicable,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class AdiabaticityReport:
    criteria: tuple
    asymptotic: dict = field(default_factory=dict)
    context: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.criteria)

    def __getitem__(self, name: str) -> Criterion:
        for c in self.criteria:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def names(self) -> tuple:
        return tuple(c.name for c in self.criteria)

    def verdicts(self) -> dict:
        return {c.name: c.passed for c in self.criteria}

    def min_margin(self) -> float:
        """Smallest applicable ``>>`` value; ``inf`` when there is none."""
        vals = [c.value for c in self.criteria if c.applicable and c.relation == ">>"]
        return min(vals, default=math.inf)

    def as_dict(self) -> dict:
        return {
            "overall": self.overall,
            "criteria": [c.as_dict() for c in self.criteria],
            "asymptotic": dict(self.asymptotic),
            "context": dict(self.context),
        }

    def table(self) -> str:
        rows = [("criterion", "value", "relation", "threshold", "status")]
        for c in self.criteria:
            status = "n/a" if not c.applicable else ("pass" if c.passed else "FAIL")
            rows.append((c.name, f"{c.value:.6g}", c.relation, f"{c.threshold:g}", status))
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
        lines.append(f"overall: {'pass' if self.overall else 'FAIL'}")
        return "\n".join(lines)


def _require(**kw):
    for name, (value, strict) in kw.items():
        if not math.isfinite(value) or value < 0 or (strict and value == 0):
            raise ValueError(f"{name} must be {'positive' if strict else 'non-negative'}, got {value}")


def check_lambda3(omega_peak, delta, t_pulse, much_greater=MUCH_GREATER) -> AdiabaticityReport:
    """Single-atom conditions of the Lambda scheme: ``Omega**2 T / delta`` and ``delta T``."""
    _require(omega_peak=(omega_peak, False), delta=(delta, True), t_pulse=(t_pulse, True))
    return AdiabaticityReport((
        Criterion("omega2T_over_delta", "|Omega^2 T / Delta|", abs(omega_peak ** 2 * t_pulse / delta), much_greater, ">>"),
        Criterion("deltaT", "Delta T", delta * t_pulse, much_greater, ">>"),
    ))


def check_lambda3_medium(q, L, omega_peak, delta, t_pulse, much_less=MUCH_LESS) -> AdiabaticityReport:
    """Conditions under which propagation through the medium can be ignored."""
    _require(q=(q, False), L=(L, False), omega_peak=(omega_peak, True), delta=(delta, True), t_pulse=(t_pulse, True))
    ql = q * L
    return AdiabaticityReport((
        Criterion("qL_over_omega2T", "q L / (Omega^2 T)", ql / (omega_peak ** 2 * t_pulse), much_less, "<<"),
        Criterion("qL_over_delta2T", "q L / (Delta^2 T)", ql / (delta ** 2 * t_pulse), much_less, "<<"),
    ))


def _five_criteria(x1, x2, delta, t, gap_applicable, x1_applicable, much_greater, names):
    """Shared body of the tied and general five-level checks."""
    d2 = delta * delta
    n_gap, n_two, n_x1, n_x2 = names
    return (
        Criterion("deltaT", "Delta T", abs(delta) * t, much_greater, ">>"),
        Criterion(n_gap[0], n_gap[1], (x2 - x1) * t / math.sqrt(d2 + 4 * x2) if x2 > 0 else 0.0,
                  much_greater, ">>", gap_applicable),
        Criterion(n_two[0], n_two[1], math.sqrt(d2 + 4 * x1) * t, much_greater, ">>"),
        Criterion(n_x1[0], n_x1[1], x1 * t / math.sqrt(d2 + 4 * x1) if x1 > 0 else 0.0,
                  much_greater, ">>", x1_applicable),
        Criterion(n_x2[0], n_x2[1], x2 * t / math.sqrt(d2 + 4 * x2) if x2 > 0 else 0.0, much_greater, ">>"),
    )


_TIED_NAMES = (
    ("three_level", "(Omega_2^2 + Omega_3^2) T / sqrt(Delta^2 + 4 Omega_t^2)"),
    ("two_level_gap", "sqrt(Delta^2 + 4 Omega_1^2) T"),
    ("omega1", "Omega_1^2 T / sqrt(Delta^2 + 4 Omega_1^2)"),
    ("total", "Omega_t^2 T / sqrt(Delta^2 + 4 Omega_t^2)"),
)
_GENERAL_NAMES = (
    ("three_level", "(x_2 - x_1) T / sqrt(Delta^2 + 4 x_2)"),
    ("two_level_gap", "sqrt(Delta^2 + 4 x_1) T"),
    ("omega1", "x_1 T / sqrt(Delta^2 + 4 x_1)"),
    ("total", "x_2 T / sqrt(Delta^2 + 4 x_2)"),
)


def check_five(omega1, omega2, omega3, delta, t_short, much_greater=MUCH_GREATER) -> AdiabaticityReport:
    """Single-atom conditions of the tied five-level chain at given field values.

    ``Omega_t**2 = Omega_1**2 + Omega_2**2 + Omega_3**2`` is the effective field
    of the bright pair. ``three_level`` is inapplicable when
    ``Omega_2 = Omega_3 = 0``; ``omega1`` additionally needs ``Omega_1 > 0``.
    The large-detuning forms are reported in ``asymptotic``.
    """
    _require(omega1=(omega1, False), omega2=(omega2, False), omega3=(omega3, False),
             delta=(abs(delta), False), t_short=(t_short, True))
    short = omega2 ** 2 + omega3 ** 2
    x1 = omega1 ** 2
    x2 = x1 + short
    # decided on x2 > x1, as in the general form, so rounding cannot split the verdicts
    gap = x2 > x1
    crit = _five_criteria(x1, x2, delta, t_short, gap, gap and x1 > 0, much_greater, _TIED_NAMES)
    asym = {}
    if delta != 0:
        asym = {
            "three_level_large_delta": short * t_short / abs(delta),
            "omega1_large_delta": x1 * t_short / abs(delta),
        }
    return AdiabaticityReport(crit, asym)


def check_five_general(omega1, omega2, omega3, omega4, delta, t_short, much_greater=MUCH_GREATER) -> AdiabaticityReport:
    """Same inequalities written through the roots ``x_1 <= x_2`` of the reduced quadratic.

    Criterion names match :func:`check_five`, so the two reports can be
    compared verdict by verdict on tied inputs.
    """
    for name, v in (("omega1", omega1), ("omega2", omega2), ("omega3", omega3), ("omega4", omega4)):
        _require(**{name: (v, False)})
    _require(delta=(abs(delta), False), t_short=(t_short, True))
    spectrum = five_eigenvalues_general(omega1, omega2, omega3, omega4, delta)
    gap_ok = spectrum.x2 > spectrum.x1
    x1_ok = spectrum.v4 > 0 and gap_ok
    crit = _five_criteria(spectrum.x1, spectrum.x2, delta, t_short, gap_ok, x1_ok, much_greater, _GENERAL_NAMES)
    return AdiabaticityReport(crit, context={"x1": spectrum.x1, "x2": spectrum.x2, "v4": spectrum.v4})


def optical_length_indicator(alpha0, L, gamma, delta) -> float:
    """``alpha0 L Gamma / Delta``: of order one at the usable medium length."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    _require(alpha0=(alpha0, False), L=(L, False), gamma=(gamma, False))
    return alpha0 * L * gamma / delta


def check_medium_five(q1, L, delta, omega1_peak, t_pulse, gamma, alpha0, much_less=MUCH_LESS,
                      band=(0.5, 2.0)) -> AdiabaticityReport:
    """Propagation condition ``(q1 L / Delta) (Delta / (Omega_1^2 T)) << 1`` plus the optical-length indicator.

    The indicator is advisory: it never fails the report, and its position
    relative to ``band`` is recorded in ``context``.
    """
    _require(q1=(q1, False), L=(L, False), delta=(delta, True), omega1_peak=(omega1_peak, True), t_pulse=(t_pulse, True))
    value = (q1 * L / delta) * (delta / (omega1_peak ** 2 * t_pulse))
    indicator = optical_length_indicator(alpha0, L, gamma, delta)
    lo, hi = band
    position = "below" if indicator < lo else ("above" if indicator > hi else "boundary")
    return AdiabaticityReport(
        (Criterion("medium_five", "(q_1 L / Delta) (Delta / (Omega_1^2 T))", value, much_less, "<<"),),
        asymptotic={"optical_length": indicator},
        context={"optical_length_band": position},
    )


def overlap_window(pulses: PulseSet) -> tuple:
    """Interval where every switched-on pulse is above ``1/e`` of its peak.

    Falls back to the union of the individual windows when they do not
    intersect. Returns ``None`` when every pulse is off.
    """
    on = [e for e in pulses.envelopes if e.peak > 0]
    if not on:
        return None
    lo = max(e.center - e.width for e in on)
    hi = min(e.center + e.width for e in on)
    if lo > hi:
        lo = min(e.center - e.width for e in on)
        hi = max(e.center + e.width for e in on)
    return lo, hi


def _window_times(pulses, n):
    win = overlap_window(pulses)
    if win is None:
        return np.zeros(1)
    return np.linspace(win[0], win[1], n)


def _min_over(reports, times):
    """Merge per-instant reports keeping, per criterion, the instant of minimum margin."""
    merged, at = [], {}
    for k, first in enumerate(reports[0].criteria):
        best = None
        for r, t in zip(reports, times):
            c = r.criteria[k]
            if not c.applicable:
                continue
            if best is None or (c.value < best[0].value if c.relation == ">>" else c.value > best[0].value):
                best = (c, t)
        if best is None:
            merged.append(first)
        else:
            merged.append(best[0])
            at[first.name] = float(best[1])
    return merged, at


def scan_lambda3(pulses: PulseSet, delta, t_pulse, n=201, much_greater=MUCH_GREATER) -> AdiabaticityReport:
    """:func:`check_lambda3` at the instant of minimum margin inside the overlap window."""
    times = _window_times(pulses, n)
    vals = pulses.values(times)
    omega = np.sqrt((vals ** 2).sum(axis=1))
    reports = [check_lambda3(float(o), delta, t_pulse, much_greater) for o in omega]
    merged, at = _min_over(reports, times)
    return AdiabaticityReport(tuple(merged), context={"instants": at, "window": overlap_window(pulses)})


def scan_five(pulses: PulseSet, delta, t_short, n=201, much_greater=MUCH_GREATER) -> AdiabaticityReport:
    """:func:`check_five` at the instant of minimum margin inside the overlap window."""
    times = _window_times(pulses, n)
    vals = pulses.values(times)
    reports = [check_five(float(v[0]), float(v[1]), float(v[2]), delta, t_short, much_greater) for v in vals]
    merged, at = _min_over(reports, times)
    asym = {}
    for key in reports[0].asymptotic:
        asym[key] = min(r.asymptotic[key] for r in reports)
    return AdiabaticityReport(tuple(merged), asym, {"instants": at, "window": overlap_window(pulses)})


def scan_gaps(scheme: LevelScheme, pulses: PulseSet, t_short, times=None) -> dict:
    """Minimum pairwise eigenvalue gap ``|L_i - L_j| T`` over ``times``.

    Computed twice: from the closed-form spectrum and from numerical
    diagonalisation of the assembled Hamiltonian. Defaults to the overlap
    window.
    """
    if times is None:
        times = _window_times(pulses, 201)
    delta = scheme.detunings[0]
    analytic, numeric = math.inf, math.inf
    for t in np.atleast_1d(times):
        om = pulses.values(t)[0]
        lam = five_eigenvalues_general(*om, delta).lambdas
        num, _ = numeric_spectrum(build_hamiltonian(scheme, pulses, t, require_resonance=True))
        analytic = min(analytic, float(np.min(np.diff(lam))) * t_short)
        numeric = min(numeric, float(np.min(np.diff(num))) * t_short)
    return {"analytic": analytic, "numeric": numeric}
