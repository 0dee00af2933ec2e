"""Adiabatic population transfer in Lambda and five-level systems and the
reversible Toffoli gates built on it."""

from .model import LevelScheme, PulseEnvelope, PulseSet, SchemeKind, build_hamiltonian, sp_pair
from .dynamics import TimeGrid, Trajectory, integrate, final_fidelity, transient_peak
from .gates import GateKind, GateParams, ToffoliGate, run_gate, truth_table

__version__ = "0.1.0"

__all__ = [
    "LevelScheme",
    "PulseEnvelope",
    "PulseSet",
    "SchemeKind",
    "build_hamiltonian",
    "sp_pair",
    "TimeGrid",
    "Trajectory",
    "integrate",
    "final_fidelity",
    "transient_peak",
    "GateKind",
    "GateParams",
    "ToffoliGate",
    "run_gate",
    "truth_table",
]
