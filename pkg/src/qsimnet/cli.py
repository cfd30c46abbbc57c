"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 synthesis (or simulation) infeasible.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io
from .exceptions import (
    CommutatorError,
    SimulationError,
    SingularRealPartError,
    SynthesisError,
)
from .netlist import export_netlist
from .quantum import propagate, shift_spectrum
from .realify import initial_conditions, second_order_coeffs
from .signal import verify_against_quantum
from .simulate import simulate_second_order
from .synthesis import reconstruct_AB, synthesize_network, synthesize_pauli

log = logging.getLogger("qsimnet")

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _effective_hamiltonian(cfg: io.JobConfig, no_shift: bool):
    if cfg.shift_enabled and not no_shift:
        return shift_spectrum(cfg.hamiltonian, cfg.shift_margin)
    return cfg.hamiltonian, 0.0


# --- stages --------------------------------------------------------------------


def run_synth(config_path, out_path, no_shift=False):
    cfg = io.load_config(config_path)
    H, shift = _effective_hamiltonian(cfg, no_shift)
    system = second_order_coeffs(H, mode=cfg.mode)
    design = synthesize_network(system, cap=cfg.cap, omega0_strategy=cfg.omega0_strategy)
    init = initial_conditions(H, cfg.psi0, "real_part")
    design = design.with_initial(init.q0, init.qdot0)
    extra = {"route": system.route, "commutator_norm": system.commutator_norm, "shift": shift}
    io.atomic_write(out_path, io.dumps(io.design_to_dict(design, extra)))
    log.info("wrote design (%s route, flags %s) to %s", system.route, sorted(design.flags), out_path)
    return EXIT_OK


def run_simulate(design_path, config_path, out_path, no_shift=False):
    cfg = io.load_config(config_path)
    design = io.load_design(design_path)
    H, _ = _effective_hamiltonian(cfg, no_shift)
    if design.n != H.n:
        raise UsageError(f"design has {design.n} ports but the config Hamiltonian is {H.n}x{H.n}")
    A, B = reconstruct_AB(design)
    init = initial_conditions(H, cfg.psi0, "real_part")
    traces = simulate_second_order(A, B, init, cfg.sim)
    io.atomic_write(out_path, io.traces_to_csv(traces))
    log.info("wrote %d samples x %d channels to %s", len(traces.times), traces.n_channels, out_path)
    return EXIT_OK


def run_verify(traces_path, config_path, out_path, no_shift=False):
    cfg = io.load_config(config_path)
    traces = io.traces_from_csv(traces_path)
    H, _ = _effective_hamiltonian(cfg, no_shift)
    truth = propagate(H, cfg.psi0, traces.times)
    report = verify_against_quantum(traces, truth, hamiltonian=H)
    io.atomic_write(out_path, io.dumps(io.report_to_dict(report)))
    if not report.spectrum_one_sided:
        log.warning("spectrum is not one-sided; envelope Born estimates are not expected to hold")
    return EXIT_OK if report.all_passed else EXIT_VERIFY


def run_netlist(design_path, out_path):
    design = io.load_design(design_path)
    io.atomic_write(out_path, export_netlist(design).text)
    return EXIT_OK


def run_pauli(xi_text, cap, out_path, strict=False):
    try:
        xi = [float(v) for v in xi_text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--xi must be four comma-separated numbers, got {xi_text!r}") from exc
    if len(xi) != 4:
        raise UsageError(f"--xi needs 4 values, got {len(xi)}")
    pc = synthesize_pauli(xi, C=cap, strict=strict)
    design = pc.to_design()
    io.atomic_write(out_path, io.dumps(io.design_to_dict(design, {"pauli": io.pauli_to_dict(pc)})))
    if not pc.faithful:
        log.warning("Re(H) and Im(H) do not commute: this circuit realizes the commuting-form "
                    "coefficients, not the exact dynamics")
    return EXIT_OK


def run_pipeline(config_path, outdir, no_shift=False):
    outdir = Path(outdir)
    design = outdir / "design.json"
    traces = outdir / "traces.csv"
    report = outdir / "report.json"
    netlist = outdir / "circuit.cir"
    run_synth(config_path, design, no_shift)
    run_netlist(design, netlist)
    run_simulate(design, config_path, traces, no_shift)
    return run_verify(traces, config_path, report, no_shift)


# --- argument handling ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json-errors", action="store_true",
                        help="emit errors as a JSON object on stderr")
    common.add_argument("-v", "--verbose", action="store_true")

    shift = argparse.ArgumentParser(add_help=False)
    shift.add_argument("--no-shift", action="store_true",
                       help="disable the spectrum shift even if the config enables it")

    p = argparse.ArgumentParser(prog="qsimnet", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", parents=[common, shift], help="synthesize a circuit design")
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("simulate", parents=[common, shift], help="simulate port voltages")
    s.add_argument("--design", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("verify", parents=[common, shift], help="check traces against the exact evolution")
    s.add_argument("--traces", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("netlist", parents=[common], help="export a netlist")
    s.add_argument("--design", required=True)
    s.add_argument("--out", required=True)

    s = sub.add_parser("pauli", parents=[common], help="two-level circuit from Pauli coefficients")
    s.add_argument("--xi", required=True, help="xi0,xi1,xi2,xi3")
    s.add_argument("--cap", type=float, default=1.0)
    s.add_argument("--out", required=True)
    s.add_argument("--strict-tanks", action="store_true",
                   help="fail instead of omitting a tank inductor when xi0 +- xi3 = 0")

    s = sub.add_parser("pipeline", parents=[common, shift], help="synth, netlist, simulate and verify")
    s.add_argument("--input", required=True)
    s.add_argument("--outdir", required=True)
    return p


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "synth":
        return run_synth(args.input, args.out, args.no_shift)
    if cmd == "simulate":
        return run_simulate(args.design, args.config, args.out, args.no_shift)
    if cmd == "verify":
        return run_verify(args.traces, args.config, args.out, args.no_shift)
    if cmd == "netlist":
        return run_netlist(args.design, args.out)
    if cmd == "pauli":
        return run_pauli(args.xi, args.cap, args.out, args.strict_tanks)
    return run_pipeline(args.input, args.outdir, args.no_shift)


def _fail(code, exc, json_errors):
    if json_errors:
        err = {"qsimnet": io.SCHEMA_VERSION, "error": type(exc).__name__,
               "message": str(exc), "exit_code": code}
        print(json.dumps(err), file=sys.stderr)
    else:
        print(f"qsimnet: error: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    json_errors = "--json-errors" in (sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return 0
        return _fail(EXIT_INPUT, UsageError("invalid command line"), json_errors)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return _dispatch(args)
    except (SynthesisError, SingularRealPartError, CommutatorError, SimulationError) as exc:
        return _fail(EXIT_INFEASIBLE, exc, args.json_errors)
    except (ValueError, OSError) as exc:
        return _fail(EXIT_INPUT, exc, args.json_errors)


if __name__ == "__main__":
    sys.exit(main())
