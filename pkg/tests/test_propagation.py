import warnings

import numpy as np
import pytest

from stirap_toffoli.dynamics import TimeGrid, integrate
from stirap_toffoli.errors import DimensionError, ResolutionError
from stirap_toffoli.gates import GateKind, GateParams, encode
from stirap_toffoli.model import LevelScheme, PulseEnvelope, PulseSet
from stirap_toffoli.propagation import (
    MediumConfig,
    gate_medium,
    optical_length_indicator,
    propagate_medium,
)


@pytest.fixture(scope="module")
def weak():
    return propagate_medium(gate_medium(q1L_over_delta=0.01))


def test_vacuum_is_single_atom_bit_for_bit():
    cfg = gate_medium(q1L_over_delta=0.0, z_steps=2)
    res = propagate_medium(cfg)
    sc = encode(GateKind.TOFFOLI4, "1110")
    traj = integrate(sc.scheme, sc.pulses, sc.initial, sc.grid)
    assert np.array_equal(res.exit_populations, traj.populations)
    assert res.fidelity[-1] == traj.populations[-1, 4]
    assert np.all(res.fidelity == res.fidelity[0])
    # fields do not evolve
    assert np.array_equal(res.omegas[-1], res.omegas[0])
    assert np.all(res.detuning_drift == 0)


def test_zero_length_is_vacuum():
    res = propagate_medium(gate_medium(q1L_over_delta=0.0, length=0.0, z_steps=1))
    assert res.z.tolist() == [0.0, 0.0]


def test_input_face_equals_input_pulses(weak):
    sc = encode(GateKind.TOFFOLI4, "1110")
    expected = sc.pulses.values(weak.tau).T
    assert np.allclose(weak.omegas[0], expected, rtol=0, atol=1e-12)
    assert weak.omegas.shape == (17, 4, len(weak.tau))
    assert np.all(weak.omegas >= 0)
    assert np.array_equal(weak.omegas[:, 3], weak.omegas[:, 0])


def test_weak_coupling_exit_fidelity(weak):
    assert weak.exit_fidelity >= 0.98
    assert weak.diagnostics["z_error_estimate"] < 1e-4
    assert weak.diagnostics["q1L_over_delta"] == pytest.approx(0.01)
    assert weak.diagnostics["adiabaticity"]["overall"]


def test_weak_coupling_detunings(weak):
    assert weak.detunings.shape == (17, 4)
    assert np.array_equal(weak.detunings[:, 3] - weak.detunings[0, 3], weak.detunings[:, 0] - weak.detunings[0, 0])
    # a one-percent optical length moves the carriers by much less than the detuning
    assert np.max(np.abs(weak.detuning_drift)) < 0.05 * 50


def test_strong_coupling_reports_resolution_error():
    with pytest.raises(ResolutionError) as info:
        propagate_medium(gate_medium(q1L_over_delta=1.0))
    err = info.value
    assert 0 < err.z <= 1.0
    assert len(err.fidelity_trace) == len(err.z_trace) >= 1
    assert err.fidelity_trace[0] > 0.99


def test_config_validation():
    sc = encode(GateKind.TOFFOLI4, "1110")
    base = dict(length=1.0, scheme=sc.scheme, pulses=sc.pulses, tau_grid=sc.grid)
    with pytest.raises(ValueError):
        MediumConfig(couplings=(-1, 0, 0, 0), **base)
    with pytest.raises(DimensionError):
        MediumConfig(couplings=(0, 0, 0), **base)
    with pytest.raises(ValueError):
        MediumConfig(couplings=(0,) * 4, **{**base, "length": -1.0})
    with pytest.raises(ValueError):
        MediumConfig(couplings=(0,) * 4, z_steps=0, **base)
    with pytest.raises(ValueError):
        MediumConfig(couplings=(0,) * 4, drift_denominator="omega2", **base)
    untied = PulseSet(tuple(sc.pulses.envelopes[:3]) + (PulseEnvelope(1.0),))
    with pytest.raises(ValueError):
        MediumConfig(couplings=(0,) * 4, **{**base, "pulses": untied})
    lam = LevelScheme.lambda3(50.0)
    with pytest.raises(DimensionError):
        MediumConfig(couplings=(0,) * 4, **{**base, "scheme": lam})
    cfg = MediumConfig(couplings=(0,) * 4, **base)
    assert cfg.floor_omega == pytest.approx(1e-4)


def test_warns_on_non_adiabatic_input():
    params = GateParams(delta=2.0)
    cfg = gate_medium(params=params, q1L_over_delta=0.0, z_steps=1)
    with pytest.warns(UserWarning, match="adiabaticity"):
        propagate_medium(cfg)


def test_adiabatic_input_does_not_warn():
    cfg = gate_medium(q1L_over_delta=0.0, z_steps=1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        propagate_medium(cfg)


def test_gate_medium_couplings():
    cfg = gate_medium(q1L_over_delta=0.3, length=2.0)
    assert cfg.couplings == (7.5,) * 4
    assert cfg.target == 4
    assert gate_medium("1111").target == 0
    coarse = gate_medium(steps=4000)
    assert coarse.tau_grid.steps == 4000
    assert isinstance(coarse.tau_grid, TimeGrid)


@pytest.mark.parametrize("alpha_l, ratio, expected", [(10, 0.1, 1.0), (0, 0.1, 0.0), (5, 0.01, 0.05)])
def test_optical_length_indicator(alpha_l, ratio, expected):
    assert optical_length_indicator(alpha_l, 1.0, ratio * 50, 50) == pytest.approx(expected)
