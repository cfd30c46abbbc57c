"""SPICE-style netlist export and parse-back for :class:`CircuitDesign`.

Layout, one element per line, after a ``* qsimnet v1 n=<n>`` header:

* tanks, ascending: ``C<k> p<k> 0 <C> IC=<v0>`` and ``L<k> p<k> 0 <L>``
  (the inductor line is omitted for an open tank, and carries ``IC=<i0>``
  when initial rates are known);
* symmetric part of beta as inductors, upper triangle: shunts
  ``LB<k>_<k> p<k> 0`` sized by the row sum, bridges ``LB<k>_<l> p<k> p<l>``
  (entries below 1e-15 of the largest are dropped);
* antisymmetric part of beta through integrator nodes ``i<l>``
  (``CI<l>``/``GI<l>``) and VCCS ``GB<k>_<l>``;
* alpha, upper triangle, as VCCS ``G<k>_<l> p<k> 0 p<l> 0 <alpha_kl>``.

Numbers use 17 significant digits so values survive a text round trip.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .exceptions import NetlistError
from .synthesis import CircuitDesign, InteractionNetwork, PortTank

HEADER = "* qsimnet v1 n={n}"
DROP_RTOL = 1e-15


@dataclass(frozen=True)
class Netlist:
    text: str
    element_count: int

    def __str__(self):
        return self.text


def _fmt(x: float) -> str:
    return f"{float(x) + 0.0:.17g}"


def export_netlist(design: CircuitDesign, initial=None, initial_rate=None) -> Netlist:
    """Render ``design`` as netlist text.

    ``initial`` (port voltages) and ``initial_rate`` (their time derivatives)
    default to the values stored on the tanks. Initial rates are realized as
    tank-inductor currents ``i0 = -C dv0 - (alpha v0)``.
    """
    n = design.n
    alpha = np.asarray(design.interaction.alpha)
    beta = np.asarray(design.interaction.beta)
    v0 = design.initial_voltages if initial is None else np.asarray(initial, dtype=float)
    rates = design.initial_rates if initial_rate is None else np.asarray(initial_rate, dtype=float)
    if v0.shape != (n,) or (rates is not None and rates.shape != (n,)):
        raise NetlistError("initial conditions must have one entry per port")
    values = [alpha, beta, design.capacitances, v0]
    if rates is not None:
        values.append(rates)
    if not all(np.all(np.isfinite(v)) for v in values):
        raise NetlistError("netlist values must be finite")

    i0 = None
    if rates is not None:
        i0 = -design.capacitances * rates - alpha @ v0

    lines = [HEADER.format(n=n), f"* omega0_strategy={design.omega0_strategy}"]
    count = 0

    def emit(line):
        nonlocal count
        lines.append(line)
        count += 1

    for k, tank in enumerate(design.tanks, start=1):
        emit(f"C{k} p{k} 0 {_fmt(tank.C)} IC={_fmt(v0[k - 1])}")
        if math.isinf(tank.L):
            if i0 is not None and i0[k - 1] != 0:
                raise NetlistError(f"port {k} has no tank inductor to carry its initial current")
            continue
        line = f"L{k} p{k} 0 {_fmt(tank.L)}"
        if i0 is not None:
            line += f" IC={_fmt(i0[k - 1])}"
        emit(line)

    bsym = 0.5 * (beta + beta.T)
    banti = 0.5 * (beta - beta.T)
    bscale = max(1.0, float(np.max(np.abs(beta))))
    rowsum = bsym.sum(axis=1)
    for k in range(n):
        for l in range(k, n):
            if k == l:
                if abs(rowsum[k]) > DROP_RTOL * bscale:
                    emit(f"LB{k + 1}_{k + 1} p{k + 1} 0 {_fmt(1.0 / rowsum[k])}")
            elif abs(bsym[k, l]) > DROP_RTOL * bscale:
                emit(f"LB{k + 1}_{l + 1} p{k + 1} p{l + 1} {_fmt(-1.0 / bsym[k, l])}")

    used = sorted({l for k in range(n) for l in range(n) if banti[k, l] != 0})
    for l in used:
        emit(f"CI{l + 1} i{l + 1} 0 1 IC=0")
        emit(f"GI{l + 1} 0 i{l + 1} p{l + 1} 0 1")
    for k in range(n):
        for l in range(k + 1, n):
            for a, b in ((k, l), (l, k)):
                if banti[a, b] != 0:
                    emit(f"GB{a + 1}_{b + 1} p{a + 1} 0 i{b + 1} 0 {_fmt(banti[a, b])}")

    for k in range(n):
        for l in range(k, n):
            pairs = ((k, l),) if k == l else ((k, l), (l, k))
            for a, b in pairs:
                if alpha[a, b] != 0:
                    emit(f"G{a + 1}_{b + 1} p{a + 1} 0 p{b + 1} 0 {_fmt(alpha[a, b])}")
    lines.append(".end")
    return Netlist("\n".join(lines) + "\n", count)


_HEADER_RE = re.compile(r"^\*\s*qsimnet\s+v1\s+n=(\d+)\s*$")
_IC_RE = re.compile(r"^IC=(.+)$", re.IGNORECASE)


def _port(node: str) -> int:
    if not node.startswith("p"):
        raise NetlistError(f"expected a port node, got {node!r}")
    return int(node[1:]) - 1


def parse_netlist(text: str) -> CircuitDesign:
    """Rebuild a :class:`CircuitDesign` from :func:`export_netlist` output."""
    lines = [ln.strip() for ln in str(text).splitlines() if ln.strip()]
    if not lines:
        raise NetlistError("empty netlist")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise NetlistError(f"missing or unsupported header: {lines[0]!r}")
    n = int(m.group(1))
    strategy = "parsed"
    caps = [None] * n
    v0 = np.zeros(n)
    tankL = [math.inf] * n
    i0 = [None] * n
    shunt = np.zeros(n)
    bridge = np.zeros((n, n))
    banti = np.zeros((n, n))
    alpha = np.zeros((n, n))

    for ln in lines[1:]:
        if ln.startswith("*"):
            if ln.startswith("* omega0_strategy="):
                strategy = ln.split("=", 1)[1].strip()
            continue
        if ln.lower() == ".end":
            break
        tok = ln.split()
        name = tok[0]
        try:
            if re.fullmatch(r"C\d+", name):
                k = _port(tok[1])
                caps[k] = float(tok[3])
                if len(tok) > 4:
                    v0[k] = float(_IC_RE.match(tok[4]).group(1))
            elif re.fullmatch(r"L\d+", name):
                k = _port(tok[1])
                tankL[k] = float(tok[3])
                if len(tok) > 4:
                    i0[k] = float(_IC_RE.match(tok[4]).group(1))
            elif name.startswith("LB"):
                k = _port(tok[1])
                if tok[2] == "0":
                    shunt[k] = 1.0 / float(tok[3])
                else:
                    l = _port(tok[2])
                    bridge[k, l] = bridge[l, k] = -1.0 / float(tok[3])
            elif name.startswith("GB"):
                k = _port(tok[1])
                l = int(tok[3][1:]) - 1
                banti[k, l] = float(tok[5])
            elif name.startswith(("CI", "GI")):
                continue
            elif re.fullmatch(r"G\d+_\d+", name):
                alpha[_port(tok[1]), _port(tok[3])] = float(tok[5])
            else:
                raise NetlistError(f"unknown element {name!r}")
        except (IndexError, ValueError, AttributeError) as exc:
            if isinstance(exc, NetlistError):
                raise
            raise NetlistError(f"malformed line {ln!r}") from exc

    if any(c is None for c in caps):
        raise NetlistError("every port needs a capacitor")
    beta = bridge + banti
    beta[np.diag_indices(n)] = shunt - bridge.sum(axis=1)
    caps = np.array(caps)
    rates = [None] * n
    if any(i is not None for i in i0):
        ivec = np.array([0.0 if i is None else i for i in i0])
        r = -(ivec + alpha @ v0) / caps
        rates = [float(x) for x in r]
    tanks = tuple(
        PortTank(k + 1, tankL[k], float(caps[k]), float(v0[k]), rates[k]) for k in range(n)
    )
    return CircuitDesign(tanks, InteractionNetwork(alpha, beta), omega0_strategy=strategy)
