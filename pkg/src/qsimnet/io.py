"""JSON/CSV serialization for configs, designs, traces and reports.

Complex matrices are stored as separate real and imaginary matrices. Every
JSON artifact carries ``"qsimnet": 1``. Writes are atomic.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import DimensionError
from .quantum import Hamiltonian, PauliCoefficients, StateVector, pauli_to_matrix
from .simulate import SimulationConfig, TraceSet
from .synthesis import CircuitDesign, InteractionNetwork, PauliCircuit, PortTank

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    version = data.get("qsimnet", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{path}: unsupported schema version {version!r}")
    return data


# --- job configuration ---------------------------------------------------------


@dataclass(frozen=True)
class JobConfig:
    hamiltonian: Hamiltonian
    psi0: StateVector
    sim: SimulationConfig
    cap: float = 1.0
    omega0_strategy: object = "auto"
    mode: str = "auto"
    shift_enabled: bool = True
    shift_margin: float = 0.5
    pauli: PauliCoefficients | None = None


def _real_matrix(rows, name):
    M = np.asarray(rows, dtype=float)
    if M.ndim != 2:
        raise ConfigError(f"{name} must be a matrix")
    return M


def parse_config(data: dict) -> JobConfig:
    try:
        h = data["hamiltonian"]
        dense = "H_re" in h or "H_im" in h
        if dense == ("pauli" in h):
            raise ConfigError("hamiltonian needs exactly one of {H_re, H_im} or {pauli}")
        pauli = None
        if dense:
            re_ = _real_matrix(h["H_re"], "H_re")
            im_ = _real_matrix(h.get("H_im", np.zeros_like(re_)), "H_im")
            if re_.shape != im_.shape:
                raise DimensionError("H_re and H_im differ in shape")
            H = Hamiltonian(re_ + 1j * im_)
        else:
            pauli = PauliCoefficients.from_sequence(h["pauli"])
            H = pauli_to_matrix(pauli)

        p = data["psi0"]
        re_ = np.asarray(p["re"], dtype=float)
        im_ = np.asarray(p.get("im", np.zeros_like(re_)), dtype=float)
        if re_.shape != im_.shape:
            raise DimensionError("psi0.re and psi0.im differ in length")
        psi0 = StateVector.normalized(re_ + 1j * im_)
        if psi0.n != H.n:
            raise DimensionError(f"psi0 has {psi0.n} components, Hamiltonian is {H.n}x{H.n}")

        s = data.get("sim", {})
        sim = SimulationConfig(
            t_end=float(s.get("t_end", 10.0)),
            dt=float(s.get("dt", 1e-3)),
            method=s.get("method", "exact_spectral"),
        )
        syn = data.get("synth", {})
        shift = data.get("spectrum_shift", {})
        return JobConfig(
            hamiltonian=H,
            psi0=psi0,
            sim=sim,
            cap=float(syn.get("cap", 1.0)),
            omega0_strategy=syn.get("omega0_strategy", "auto"),
            mode=syn.get("mode", "auto"),
            shift_enabled=bool(shift.get("enabled", True)),
            shift_margin=float(shift.get("margin", 0.5)),
            pauli=pauli,
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"invalid job config: {exc!r}") from exc


def load_config(path) -> JobConfig:
    return parse_config(read_json(path))


def config_to_dict(cfg: JobConfig) -> dict:
    H = np.asarray(cfg.hamiltonian.matrix)
    ham = (
        {"pauli": cfg.pauli.as_array().tolist()}
        if cfg.pauli is not None
        else {"H_re": H.real.tolist(), "H_im": H.imag.tolist()}
    )
    psi = cfg.psi0.amplitudes
    strategy = cfg.omega0_strategy
    if not isinstance(strategy, str):
        strategy = np.asarray(strategy, dtype=float).tolist()
    return {
        "qsimnet": SCHEMA_VERSION,
        "hamiltonian": ham,
        "psi0": {"re": psi.real.tolist(), "im": psi.imag.tolist()},
        "sim": {"t_end": cfg.sim.t_end, "dt": cfg.sim.dt, "method": cfg.sim.method},
        "synth": {"cap": cfg.cap, "omega0_strategy": strategy, "mode": cfg.mode},
        "spectrum_shift": {"enabled": cfg.shift_enabled, "margin": cfg.shift_margin},
    }


# --- designs -------------------------------------------------------------------


def _opt(x):
    return None if x is None or math.isinf(x) else float(x) + 0.0


def design_to_dict(design: CircuitDesign, extra: dict | None = None) -> dict:
    out = {
        "qsimnet": SCHEMA_VERSION,
        "kind": "design",
        "n": design.n,
        "omega0_strategy": design.omega0_strategy,
        "tanks": [
            {"index": t.index, "L": _opt(t.L), "C": t.C, "v0": t.v0 + 0.0, "dv0": _opt(t.dv0)}
            for t in design.tanks
        ],
        "alpha": np.asarray(design.interaction.alpha).tolist(),
        "beta": np.asarray(design.interaction.beta).tolist(),
        "omega0_sq": np.diag(design.omega0_sq).tolist(),
        "flags": sorted(design.flags),
    }
    if extra:
        out.update(extra)
    return out


def pauli_to_dict(pc: PauliCircuit) -> dict:
    return {
        "C": pc.C,
        "L1": _opt(pc.L1),
        "L2": _opt(pc.L2),
        "La": _opt(pc.La),
        "Lb": _opt(pc.Lb),
        "Lc": _opt(pc.Lc),
        "g": pc.g,
        "L1_star": _opt(pc.L1_star),
        "L2_star": _opt(pc.L2_star),
        "xi": None if pc.xi is None else pc.xi.as_array().tolist(),
        "faithful": pc.faithful,
    }


def design_from_dict(data: dict) -> CircuitDesign:
    try:
        tanks = tuple(
            PortTank(
                index=int(t["index"]),
                L=math.inf if t["L"] is None else float(t["L"]),
                C=float(t["C"]),
                v0=float(t.get("v0", 0.0)),
                dv0=None if t.get("dv0") is None else float(t["dv0"]),
            )
            for t in data["tanks"]
        )
        net = InteractionNetwork(np.asarray(data["alpha"], float), np.asarray(data["beta"], float))
        return CircuitDesign(tanks, net, omega0_strategy=data.get("omega0_strategy", "explicit"))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"invalid design: {exc!r}") from exc


def load_design(path) -> CircuitDesign:
    return design_from_dict(read_json(path))


# --- traces --------------------------------------------------------------------


def traces_to_csv(traces: TraceSet) -> str:
    header = ",".join(("t",) + traces.labels)
    data = np.column_stack([traces.times, traces.channels]) + 0.0
    rows = [",".join(f"{v:.17g}" for v in row) for row in data]
    return header + "\n" + "\n".join(rows) + "\n"


def traces_from_csv(path) -> TraceSet:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if not header or header[0] != "t":
        raise ConfigError(f"{path}: first CSV column must be 't'")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed CSV ({exc})") from exc
    if data.shape[1] != len(header):
        raise ConfigError(f"{path}: header has {len(header)} columns, data {data.shape[1]}")
    return TraceSet(data[:, 0], data[:, 1:], tuple(header[1:]))


def report_to_dict(report) -> dict:
    return {
        "qsimnet": SCHEMA_VERSION,
        "kind": "verification_report",
        "max_re_err": report.max_re_err,
        "max_im_err": report.max_im_err,
        "max_born_err": report.max_born_err,
        "norm_err": report.norm_err,
        "pass": dict(report.passed),
        "spectrum_one_sided": report.spectrum_one_sided,
        "im_convention": report.im_convention,
        "thresholds": dict(report.thresholds),
    }
