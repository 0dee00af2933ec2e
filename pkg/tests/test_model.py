import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stirap_toffoli.errors import DimensionError, ResonanceError, SequenceOrderError, UnsupportedSchemeError
from stirap_toffoli.model import (
    LevelScheme,
    PulseEnvelope,
    PulseSet,
    SchemeKind,
    build_hamiltonian,
    check_resonance,
    envelope_value,
    multiphoton_detunings,
    pulse_support,
    sp_pair,
    tridiagonal_tables,
)

finite = st.floats(-200, 200, allow_nan=False)
positive = st.floats(0, 200, allow_nan=False)
phase = st.floats(-math.pi, math.pi, allow_nan=False)


def test_envelope_values():
    p = PulseEnvelope(100.0, 0.0, 1.0)
    assert envelope_value(p, 0.0) == 100.0
    assert envelope_value(p, 1.0) == pytest.approx(100 * math.exp(-1), rel=1e-14)
    assert envelope_value(p, 1.0) == pytest.approx(36.7879, abs=1e-4)
    assert np.all(PulseEnvelope(0.0)(np.linspace(-5, 5, 11)) == 0)


@pytest.mark.parametrize("kw", [{"peak": -1.0}, {"peak": 1.0, "width": 0.0}, {"peak": float("nan")}])
def test_envelope_rejects_bad_values(kw):
    with pytest.raises(ValueError):
        PulseEnvelope(**kw)


@given(positive, finite, st.floats(0.1, 10), st.floats(0, 20))
def test_envelope_symmetric(peak, center, width, s):
    p = PulseEnvelope(peak, center, width)
    assert envelope_value(p, center + s) == pytest.approx(envelope_value(p, center - s), rel=1e-12, abs=1e-300)


def test_multiphoton_examples():
    assert multiphoton_detunings(LevelScheme.m5(50)) == (0, 50, 0, 50, 0)
    assert multiphoton_detunings(LevelScheme.extended_lambda5(50)) == (0, 50, 0, 50, 0)
    assert multiphoton_detunings(LevelScheme(SchemeKind.M5, (0, 0, 0, 0))) == (0, 0, 0, 0, 0)
    with pytest.raises(UnsupportedSchemeError):
        multiphoton_detunings(LevelScheme.lambda3(50))


@given(st.lists(finite, min_size=4, max_size=4), st.sampled_from([SchemeKind.M5, SchemeKind.EXTENDED_LAMBDA5]))
def test_multiphoton_linear(dets, kind):
    a = np.array(multiphoton_detunings(LevelScheme(kind, dets)))
    b = np.array(multiphoton_detunings(LevelScheme(kind, [2 * d for d in dets])))
    assert np.allclose(b, 2 * a, rtol=1e-12, atol=1e-12)


def test_general_formulas():
    m = multiphoton_detunings(LevelScheme(SchemeKind.M5, (1, 2, 4, 8)))
    assert m == (0, 1, 1 - 2, 4 + 1 - 2, 8 - 4 + 2 - 1)
    e = multiphoton_detunings(LevelScheme(SchemeKind.EXTENDED_LAMBDA5, (1, 2, 4, 8)))
    assert e == (0, 1, 1 + 2, -4 + 1 + 2, -8 - 4 + 2 + 1)


def test_scheme_dimension_checks():
    with pytest.raises(DimensionError):
        LevelScheme(SchemeKind.M5, (1.0,))
    with pytest.raises(DimensionError):
        LevelScheme(SchemeKind.LAMBDA3, (1.0, 2.0))
    assert LevelScheme.two_level(3).dimension == 2


def test_lambda3_no_coupling():
    pulses = sp_pair(PulseEnvelope(0.0, -0.75), PulseEnvelope(0.0, 0.75))
    H = build_hamiltonian(LevelScheme.lambda3(50), pulses, 0.0).matrix
    assert np.array_equal(H, np.diag([0, 50, 0]).astype(complex))


def test_m5_at_peaks():
    o1, o2, o3 = 100.0, 80.0, 60.0
    pulses = PulseSet.tied(PulseEnvelope(o1), PulseEnvelope(o2), PulseEnvelope(o3))
    H = build_hamiltonian(LevelScheme.m5(50), pulses, 0.0).matrix
    assert np.allclose(np.diag(H).real, [0, 50, 0, 50, 0])
    assert np.allclose([H[0, 1], H[1, 2], H[2, 3], H[3, 4]], [-o1, -o2, -o3, -o1])
    mask = np.abs(np.subtract.outer(np.arange(5), np.arange(5))) > 1
    assert np.all(H[mask] == 0)


@settings(max_examples=60)
@given(
    st.sampled_from(list(SchemeKind)),
    st.lists(positive, min_size=4, max_size=4),
    st.lists(phase, min_size=4, max_size=4),
    st.lists(finite, min_size=4, max_size=4),
    st.floats(-3, 3),
)
def test_hermitian(kind, peaks, phases, dets, t):
    n = kind.dimension - 1
    scheme = LevelScheme(kind, dets if kind.dimension == 5 else dets[:1])
    pulses = PulseSet(tuple(PulseEnvelope(p, 0.3 * i, 1.0, f) for i, (p, f) in enumerate(zip(peaks[:n], phases[:n]))))
    H = build_hamiltonian(scheme, pulses, t).matrix
    assert np.max(np.abs(H - H.conj().T)) < 1e-12
    for k in range(n):
        assert abs(H[k, k + 1]) == pytest.approx(pulses[k](t), abs=1e-12)


@given(st.floats(-5, 5), positive, phase)
def test_tie_1_4(t, peak, ph):
    o1 = PulseEnvelope(peak, 0.1, 2.0, ph)
    pulses = PulseSet.tied(o1, PulseEnvelope(50, 0.75), PulseEnvelope(50, -0.75))
    assert pulses[3] is pulses[0]
    H = build_hamiltonian(LevelScheme.m5(50), pulses, t).matrix
    assert abs(H[0, 1]) == abs(H[3, 4])
    # the phase sits on the upper-level row, which is row 1 for one transition and row 3 for the other
    assert H[0, 1] == H[4, 3]
    real = build_hamiltonian(LevelScheme.m5(50), PulseSet.tied(o1.with_phase(0.0), pulses[1], pulses[2]), t).matrix
    assert real[0, 1] == real[3, 4]


def test_tie_rejects_mismatch():
    a, b = PulseEnvelope(1.0), PulseEnvelope(2.0)
    with pytest.raises(DimensionError):
        PulseSet((a, b, b, b), tie_1_4=True)


def test_phases_give_exact_dark_state():
    th, f1, f2 = 0.4, 0.7, -1.1
    o1, o2 = 30 * math.sin(th), 30 * math.cos(th)
    pulses = PulseSet((PulseEnvelope(o1, phase=f1), PulseEnvelope(o2, phase=f2)))
    H = build_hamiltonian(LevelScheme.lambda3(20), pulses, 0.0).matrix
    dark = np.array([math.cos(th) * np.exp(-1j * f1), 0, -math.sin(th) * np.exp(-1j * f2)])
    assert np.max(np.abs(H @ dark)) < 1e-12


def test_sp_pair_order():
    pair = sp_pair(PulseEnvelope(1, -0.75), PulseEnvelope(1, 0.75))
    assert pair[0].center == 0.75 and pair.sequence == "SP"
    with pytest.raises(SequenceOrderError):
        sp_pair(PulseEnvelope(1, 1.0), PulseEnvelope(1, 0.0))
    with pytest.raises(SequenceOrderError):
        sp_pair(PulseEnvelope(1, 0.0), PulseEnvelope(1, 0.0))


def test_resonance_check():
    check_resonance(LevelScheme.m5(50))
    check_resonance(LevelScheme.extended_lambda5(50))
    off = LevelScheme(SchemeKind.M5, (50, 49, 50, 50))
    with pytest.raises(ResonanceError):
        check_resonance(off)
    pulses = PulseSet.tied(PulseEnvelope(1), PulseEnvelope(1), PulseEnvelope(1))
    with pytest.raises(ResonanceError):
        build_hamiltonian(off, pulses, 0.0, require_resonance=True)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        build_hamiltonian(LevelScheme.m5(50), PulseSet((PulseEnvelope(1), PulseEnvelope(1))), 0.0)


def test_tables_match_matrix():
    pulses = PulseSet.tied(PulseEnvelope(100, 0, 4), PulseEnvelope(100, 0.75, 1, 0.3), PulseEnvelope(100, -0.75))
    scheme = LevelScheme.extended_lambda5(50)
    ts = np.linspace(-2, 2, 7)
    diag, off = tridiagonal_tables(scheme, pulses, ts)
    for i, t in enumerate(ts):
        H = build_hamiltonian(scheme, pulses, t).matrix
        assert np.allclose(diag[i], np.diag(H).real)
        assert np.allclose(off[i], np.diag(H, 1))


def test_pulse_support():
    ps = PulseSet((PulseEnvelope(1, -1, 1), PulseEnvelope(0, 50, 1)))
    lo, hi = pulse_support(ps)
    assert lo == pytest.approx(-1 - math.sqrt(math.log(1e6)))
    assert hi == pytest.approx(-1 + math.sqrt(math.log(1e6)))
    assert pulse_support(PulseSet((PulseEnvelope(0),))) == (math.inf, -math.inf)
