import csv
import json

import numpy as np
import pytest

from stirap_toffoli.config import load_scenario, parse_scenario
from stirap_toffoli.dynamics import integrate
from stirap_toffoli.errors import ConfigError
from stirap_toffoli.gates import GateKind, GateParams
from stirap_toffoli.io import fmt, jsonable, write_csv, write_envelopes, write_trajectory
from stirap_toffoli.model import SchemeKind

LAMBDA = {
    "scheme": {"kind": "lambda3", "delta": 50.0},
    "pulses": [{"peak": 100, "center": 0.75}, {"peak": 100, "center": -0.75}],
    "grid": {"t_start": -6, "t_end": 6, "adaptive": True},
}


def test_parse_full_scenario():
    sc = parse_scenario(LAMBDA)
    assert sc.level_scheme().kind is SchemeKind.LAMBDA3
    assert len(sc.pulse_set()) == 2
    assert sc.time_grid().adaptive
    assert sc.gate_params() == GateParams()


def test_tied_five_level_scenario():
    sc = parse_scenario({
        "scheme": {"kind": "m5", "delta": 50},
        "pulses": [{"peak": 100, "width": 4}, {"peak": 100, "center": 0.75}, {"peak": 100, "center": -0.75}],
        "tie_1_4": True,
    })
    ps = sc.pulse_set()
    assert ps.envelopes[3] == ps.envelopes[0]
    assert sc.level_scheme().detunings == (50.0,) * 4


def test_gate_section():
    sc = parse_scenario({"gate": {"kind": "toffoli3", "input": "110", "delta": 80}})
    assert sc.gate.kind is GateKind.TOFFOLI3
    assert sc.gate_params().delta == 80
    assert sc.resolved()["gate"]["params"]["peak"] == 100.0


@pytest.mark.parametrize("bad", [
    {"bogus": 1},
    {"scheme": {"kind": "lambda3", "delta": 50, "extra": 0}},
    {"scheme": {"kind": "lambda3"}},
    {"scheme": {"kind": "lambda3", "delta": 1, "detunings": [1]}},
    {"scheme": {"kind": "six_level", "delta": 1}},
    {"scheme": {"kind": "lambda3", "delta": float("nan")}},
    {"pulses": [{"peak": float("inf")}]},
    {"pulses": [{"peak": -1}]},
    {"scheme": {"kind": "lambda3", "delta": 1}, "pulses": [{"peak": 1}]},
    {"scheme": {"kind": "m5", "detunings": [1, 2]}},
    {"gate": {"input": "12"}},
    {"gate": {"threshold": 2}},
    {"gate": {"scheme": "lambda3"}},
    {"medium": {"length": 1}},
    {"medium": {"q1L_over_delta": 0.1, "couplings": [1, 1, 1, 1]}},
    {"grid": {"t_start": 0, "t_end": 1, "steps": 10}},
])
def test_invalid_scenarios_rejected(bad):
    with pytest.raises(ConfigError):
        parse_scenario(bad)


def test_load_scenario_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_scenario(tmp_path / "missing.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_scenario(p)
    p.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_scenario(p)
    p.write_text(json.dumps(LAMBDA))
    assert load_scenario(p).level_scheme().detunings == (50.0,)


def test_fmt_twelve_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(1e-20) == "1e-20"
    assert fmt(2) == "2"


def test_jsonable():
    data = jsonable({"a": np.float64(1.5), "b": np.arange(2), "k": GateKind.TOFFOLI3, "n": float("nan"),
                     "p": GateParams()})
    assert data["a"] == 1.5 and data["b"] == [0, 1] and data["k"] == "toffoli3" and data["n"] == "nan"
    assert data["p"]["delta"] == 50.0
    json.dumps(data)


def test_csv_with_sidecar(tmp_path):
    path = write_csv(tmp_path / "sub" / "x.csv", ["a", "b"], [[1, 0.1], [2, 1 / 3]], {"seed": 1})
    rows = list(csv.reader(path.open()))
    assert rows == [["a", "b"], ["1", "0.1"], ["2", "0.333333333333"]]
    assert json.loads((tmp_path / "sub" / "x.json").read_text()) == {"seed": 1}


def test_trajectory_and_envelope_csv_deterministic(tmp_path):
    sc = parse_scenario(LAMBDA)
    traj = integrate(sc.level_scheme(), sc.pulse_set(), 0, sc.time_grid())
    a = write_trajectory(tmp_path / "a.csv", traj, sc.resolved())
    b = write_trajectory(tmp_path / "b.csv", integrate(sc.level_scheme(), sc.pulse_set(), 0, sc.time_grid()),
                         sc.resolved())
    assert a.read_bytes() == b.read_bytes()
    head = a.read_text().splitlines()[0]
    assert head == "t,rho_1,rho_2,rho_3,norm"
    env = write_envelopes(tmp_path / "e.csv", sc.pulse_set(), traj.times)
    assert env.read_text().splitlines()[0] == "t,Omega_1,Omega_2"
    assert not (tmp_path / "e.json").exists()
