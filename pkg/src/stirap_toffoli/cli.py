"""Command line front end.

Exit codes: 0 success, 2 gate or truth-table mismatch, 3 accuracy or
adiabaticity failure, 4 configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .adiabaticity import scan_five, scan_lambda3
from .config import Scenario, load_scenario, parse_scenario
from .dressed import five_eigenvalues_general, five_eigenvalues_tied, lambda3_dressed, numeric_spectrum
from .dynamics import integrate
from .errors import AccuracyError, ConfigError, ResolutionError, StirapError
from .gates import GateKind, GateParams, _worker_count, adiabaticity_report, encode, run_gate, toffoli, truth_table
from .io import fmt, write_csv, write_envelopes, write_json, write_trajectory
from .model import SchemeKind, build_hamiltonian
from .propagation import gate_medium, propagate_medium

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_ACCURACY = 3
EXIT_CONFIG = 4

FIGURES = {3: ("1110",), 4: ("1111",), 5: ("1000",), 6: ("1010", "1100")}
SCAN_AXES = ("delta", "peak", "delay", "width", "qL")


def _scenario(args) -> Scenario:
    path = args.config_opt or args.config
    return load_scenario(path) if path else parse_scenario({})


def _gate_params(sc: Scenario, args) -> GateParams:
    params = sc.gate_params()
    if getattr(args, "threshold", None) is not None:
        params = replace(params, threshold=args.threshold)
    return params


def _gate_kind(sc: Scenario, args) -> GateKind:
    if getattr(args, "kind", None):
        return GateKind(args.kind)
    return sc.gate.kind if sc.gate else GateKind.TOFFOLI4


def _gate_input(sc: Scenario, args, kind: GateKind) -> str:
    bits = getattr(args, "input", None) or (sc.gate.input if sc.gate else None)
    return bits or "1" * (kind.n_bits - 1) + "0"


def _out(args, sc: Scenario) -> Path:
    return Path(args.out if args.out else sc.output.dir)


def _emit(data):
    print(json.dumps(data, indent=2, sort_keys=True))


# subcommands ------------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    if sc.scheme is not None:
        scheme, pulses, initial = sc.level_scheme(), sc.pulse_set(), sc.initial
        grid = sc.time_grid()
    else:
        kind = _gate_kind(sc, args)
        g = encode(kind, _gate_input(sc, args, kind), _gate_params(sc, args))
        scheme, pulses, initial, grid = g.scheme, g.pulses, g.initial, g.grid
    traj = integrate(scheme, pulses, initial, grid)
    out = _out(args, sc)
    params = {"scenario": sc.resolved(), "grid": asdict(traj.metadata["grid"]), "version": __version__}
    write_trajectory(out / f"{sc.output.prefix}_trajectory.csv", traj, params)
    write_envelopes(out / f"{sc.output.prefix}_envelopes.csv", pulses, traj.times, params)
    pops = traj.populations[-1]
    print(" ".join(f"rho_{i + 1}={fmt(p)}" for i, p in enumerate(pops)))
    print(f"norm_drift={traj.norm_drift:.3e} error_estimate={traj.metadata['error_estimate']:.3e}")
    return EXIT_OK


def _field_values(args, sc: Scenario):
    if args.omegas is not None:
        om = [float(x) for x in args.omegas.split(",")]
        kind = SchemeKind(args.scheme) if args.scheme else {2: SchemeKind.LAMBDA3, 3: SchemeKind.M5}.get(len(om))
        if kind is None:
            raise ConfigError("give two (Lambda) or three / four (five-level) Rabi frequencies")
        if args.delta is None:
            raise ConfigError("--delta is required with --omegas")
        return kind, om, args.delta
    scheme, pulses = sc.level_scheme(), sc.pulse_set()
    om = [float(v) for v in pulses.values(args.time)[0]]
    if pulses.tie_1_4:
        om = om[:3]
    return scheme.kind, om, scheme.detunings[0]


def cmd_dressed(args) -> int:
    sc = _scenario(args)
    kind, om, delta = _field_values(args, sc)
    data = {"scheme": kind.value, "omegas": om, "delta": delta}
    if kind is SchemeKind.LAMBDA3:
        d = lambda3_dressed(om[0], om[1], delta)
        data.update(theta=d.theta, phi=d.phi, eigenvalues=list(d.eigenvalues),
                    dark=_cplx(d.dark), bright1=_cplx(d.bright1), bright2=_cplx(d.bright2))
    elif kind in (SchemeKind.M5, SchemeKind.EXTENDED_LAMBDA5):
        if len(om) == 3:
            data["eigenvalues"] = list(five_eigenvalues_tied(*om, delta))
        else:
            s = five_eigenvalues_general(*om, delta)
            data.update(eigenvalues=[0.0] + list(s.lambdas), x1=s.x1, x2=s.x2)
    else:
        raise ConfigError(f"no closed-form dressed states for {kind.value}")
    if sc.scheme is not None and args.omegas is None:
        vals, _ = numeric_spectrum(build_hamiltonian(sc.level_scheme(), sc.pulse_set(), args.time).matrix)
        data["numeric_eigenvalues"] = list(vals)
    _emit(data)
    return EXIT_OK


def _cplx(v):
    return [[float(x.real), float(x.imag)] for x in np.asarray(v)]


def cmd_adiabaticity(args) -> int:
    sc = _scenario(args)
    if sc.scheme is not None:
        scheme, pulses = sc.level_scheme(), sc.pulse_set()
        width = min(e.width for e in pulses.envelopes if e.peak > 0)
        delta = abs(scheme.detunings[0])
        rep = scan_lambda3(pulses, delta, width) if scheme.dimension == 3 else scan_five(pulses, delta, width)
    else:
        rep = adiabaticity_report(_gate_kind(sc, args), _gate_params(sc, args))
    print(rep.table())
    if args.out:
        write_json(Path(args.out) / f"{sc.output.prefix}_adiabaticity.json",
                   {"report": rep.as_dict(), "scenario": sc.resolved()})
    return EXIT_OK if rep.overall else EXIT_ACCURACY


def cmd_gate(args) -> int:
    sc = _scenario(args)
    kind = _gate_kind(sc, args)
    params = _gate_params(sc, args)
    o = run_gate(kind, _gate_input(sc, args, kind), params)
    _emit(o.as_dict())
    if args.out:
        out = Path(args.out)
        meta = {"kind": kind.value, "params": asdict(params), "outcome": o.as_dict()}
        write_trajectory(out / f"{kind.value}_{o.input}.csv", o.trajectory, meta)
    return EXIT_OK if o.passed and o.fidelity >= params.threshold else EXIT_MISMATCH


def cmd_truth_table(args) -> int:
    sc = _scenario(args)
    kind = _gate_kind(sc, args)
    table = truth_table(kind, _gate_params(sc, args), workers=args.workers)
    print(table.text())
    print(f"min fidelity {table.min_fidelity:.6f}: {'pass' if table.passed else 'FAIL'}")
    if args.out:
        write_json(Path(args.out) / f"{kind.value}_truth_table.json", table.as_dict())
    return EXIT_OK if table.passed else EXIT_MISMATCH


def cmd_figure(args) -> int:
    if args.id not in FIGURES:
        raise ConfigError(f"figure id must be one of {sorted(FIGURES)}, got {args.id}")
    sc = _scenario(args)
    params = _gate_params(sc, args)
    out = _out(args, sc)
    ok = True
    for bits in FIGURES[args.id]:
        g = encode(GateKind.TOFFOLI4, bits, params)
        traj = integrate(g.scheme, g.pulses, g.initial, g.grid)
        expect = GateKind.TOFFOLI4.logical_levels[toffoli(g.input.bits)[-1]]
        final = float(traj.populations[-1, expect])
        ok &= final >= params.threshold
        meta = {
            "figure": args.id,
            "input": bits,
            "scheme": g.scheme.kind.value,
            "detunings": list(g.scheme.detunings),
            "pulses": [asdict(e) for e in g.pulses.envelopes],
            "tie_1_4": True,
            "initial_level": g.initial + 1,
            "expected_level": expect + 1,
            "final_expected_population": final,
            "params": asdict(params),
            "grid": asdict(traj.metadata["grid"]),
            "norm_drift": traj.norm_drift,
            "version": __version__,
        }
        stem = f"fig{args.id}_{bits}"
        write_trajectory(out / f"{stem}.csv", traj, meta)
        write_envelopes(out / f"{stem}_envelopes.csv", g.pulses, traj.times, meta)
        print(f"{stem}: rho_{expect + 1}(end) = {final:.6f}")
    return EXIT_OK if ok else EXIT_ACCURACY


def _scan_values(args):
    if args.values:
        vals = [float(x) for x in args.values.split(",") if x.strip()]
    elif args.num is not None:
        if args.start is None or args.stop is None:
            raise ConfigError("--num needs --start and --stop")
        vals = list(np.linspace(args.start, args.stop, args.num)) if args.num > 0 else []
    else:
        vals = []
    if not vals:
        raise ConfigError("scan grid is empty")
    return vals


def _scan_row(job):
    axis, value, kind, bits, params, medium = job
    if axis == "qL":
        cfg = gate_medium(bits, params, q1L_over_delta=value, **medium)
        try:
            fid = propagate_medium(cfg).exit_fidelity
        except ResolutionError:
            fid = math.nan
        return value, fid, adiabaticity_report(kind, params).min_margin()
    changes = {
        "delta": {"delta": value},
        "peak": {"peak": value, "peak_long": value},
        "delay": {"delay": value},
        "width": {"t_short": value},
    }[axis]
    p = replace(params, **changes)
    return value, run_gate(kind, bits, p).fidelity, adiabaticity_report(kind, p).min_margin()


def cmd_scan(args) -> int:
    if args.axis not in SCAN_AXES:
        raise ConfigError(f"scan axis must be one of {SCAN_AXES}, got {args.axis!r}")
    sc = _scenario(args)
    vals = _scan_values(args)
    kind = GateKind.TOFFOLI4 if args.axis == "qL" else _gate_kind(sc, args)
    bits = _gate_input(sc, args, kind)
    params = _gate_params(sc, args)
    medium = {}
    if sc.medium is not None:
        medium = {"length": sc.medium.length, "z_steps": sc.medium.z_steps, "check": sc.medium.check,
                  "drift_denominator": sc.medium.drift_denominator, "z_tol": sc.medium.z_tol}
    jobs = [(args.axis, v, kind, bits, params, medium) for v in vals]
    n = _worker_count(args.workers)
    if n == 1:
        rows = [_scan_row(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(_scan_row, jobs))
    meta = {"axis": args.axis, "kind": kind.value, "input": bits, "params": asdict(params),
            "medium": medium, "values": vals, "version": __version__}
    header = ["parameter", "fidelity", "min_criterion"]
    if args.out:
        write_csv(Path(args.out) / f"scan_{args.axis}.csv", header, rows, meta)
    print(",".join(header))
    for r in rows:
        print(",".join(fmt(x) for x in r))
    return EXIT_OK


def cmd_propagate(args) -> int:
    sc = _scenario(args)
    m = sc.medium
    params = _gate_params(sc, args)
    bits = _gate_input(sc, args, GateKind.TOFFOLI4)
    kw = {}
    if m is not None:
        kw = dict(length=m.length, z_steps=m.z_steps, floor_omega=m.floor_omega,
                  drift_denominator=m.drift_denominator, z_tol=m.z_tol, check=m.check, steps=m.tau_steps)
    if args.z_steps is not None:
        kw["z_steps"] = args.z_steps
    ratio = args.q1L_over_delta
    if ratio is None:
        ratio = m.q1L_over_delta if m is not None and m.q1L_over_delta is not None else 0.01
    cfg = gate_medium(bits, params, q1L_over_delta=ratio, **kw)
    if m is not None and m.couplings is not None and args.q1L_over_delta is None:
        cfg = replace(cfg, couplings=m.couplings)
    res = propagate_medium(cfg)
    out = _out(args, sc)
    summary = {
        "input": bits,
        "couplings": list(cfg.couplings),
        "length": cfg.length,
        "z_steps": cfg.z_steps,
        "target_level": cfg.target + 1,
        "z": res.z,
        "fidelity": res.fidelity,
        "exit_fidelity": res.exit_fidelity,
        "detunings": res.detunings,
        "diagnostics": res.diagnostics,
        "params": asdict(params),
        "tau_grid": asdict(cfg.tau_grid),
        "version": __version__,
    }
    stride = max(1, len(res.tau) // args.tau_samples)
    rows = [
        [z, t, *res.omegas[i, :, j]]
        for i, z in enumerate(res.z)
        for j, t in list(enumerate(res.tau))[::stride]
    ]
    write_csv(out / "propagation_fields.csv", ["z", "tau", "Omega_1", "Omega_2", "Omega_3", "Omega_4"], rows, summary)
    print(f"exit fidelity {res.exit_fidelity:.6f} at q1L/Delta = {res.diagnostics['q1L_over_delta']:.4g}")
    return EXIT_OK


# parser ------------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors; exit code 2 is reserved for gate mismatches."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stirap-toffoli", description="Adiabatic-passage Toffoli gate simulator.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", nargs="?", help="scenario JSON file")
        sp.add_argument("--config", dest="config_opt", help="scenario JSON file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--threshold", type=float, help="readout / fidelity threshold")
        sp.set_defaults(func=func)
        return sp

    add("simulate", cmd_simulate, "integrate a scenario and write CSV")
    sp = add("dressed", cmd_dressed, "closed-form dressed energies and states")
    sp.add_argument("--time", type=float, default=0.0)
    sp.add_argument("--omegas", help="comma separated Rabi frequencies")
    sp.add_argument("--delta", type=float)
    sp.add_argument("--scheme", choices=[k.value for k in SchemeKind])
    sp = add("adiabaticity", cmd_adiabaticity, "evaluate the adiabaticity conditions")
    sp.add_argument("--kind", choices=[k.value for k in GateKind])
    for name, func in (("gate", cmd_gate), ("truth-table", cmd_truth_table)):
        sp = add(name, func, f"run the {name}")
        sp.add_argument("--kind", choices=[k.value for k in GateKind])
        if name == "gate":
            sp.add_argument("--input", help="input bits, e.g. 1110")
        else:
            sp.add_argument("--workers", type=int)
    sp = sub.add_parser("figure", help="reproduce a figure scenario")
    sp.add_argument("id", type=int)
    sp.add_argument("config", nargs="?")
    sp.add_argument("--config", dest="config_opt")
    sp.add_argument("--out")
    sp.add_argument("--threshold", type=float)
    sp.set_defaults(func=cmd_figure)
    sp = add("scan", cmd_scan, "parameter sweep")
    sp.add_argument("--axis", required=True)
    sp.add_argument("--values", help="comma separated grid")
    sp.add_argument("--start", type=float)
    sp.add_argument("--stop", type=float)
    sp.add_argument("--num", type=int)
    sp.add_argument("--kind", choices=[k.value for k in GateKind])
    sp.add_argument("--input")
    sp.add_argument("--workers", type=int)
    sp = add("propagate", cmd_propagate, "propagate the Toffoli4 pulses through a medium")
    sp.add_argument("--input")
    sp.add_argument("--q1L-over-delta", dest="q1L_over_delta", type=float)
    sp.add_argument("--z-steps", dest="z_steps", type=int)
    sp.add_argument("--tau-samples", dest="tau_samples", type=int, default=200)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AccuracyError, ResolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except (ConfigError, StirapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
