"""Real-valued forms of the Schrodinger equation.

Splitting ``psi = phi1 + i*phi2`` and ``H = H1 + i*H2`` turns ``i psi' = H psi``
into the real first-order system ``x' = M x`` with ``x = (phi1, phi2)``, and,
after eliminating one half, into the second-order system

    phi'' + A phi' + B phi = 0

which both ``phi1`` and ``phi2`` satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_vector, frozen
from .exceptions import CommutatorError, DimensionError, SingularRealPartError
from .quantum import Hamiltonian, StateVector, _as_hamiltonian, _as_state

COMMUTATOR_RTOL = 1e-10
REALPART_MAX_COND = 1e12

MODES = ("auto", "general", "commuting")
PARTS = ("real_part", "imag_part")


@dataclass(frozen=True)
class RealifiedState:
    phi1: np.ndarray
    phi2: np.ndarray

    def __post_init__(self):
        p1 = as_vector(self.phi1, name="phi1")
        p2 = as_vector(self.phi2, n=p1.shape[0], name="phi2")
        object.__setattr__(self, "phi1", frozen(p1))
        object.__setattr__(self, "phi2", frozen(p2))

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.phi1, self.phi2])


@dataclass(frozen=True)
class BlockFirstOrder:
    M: np.ndarray

    @property
    def n(self) -> int:
        return self.M.shape[0] // 2


@dataclass(frozen=True)
class SecondOrderSystem:
    A: np.ndarray
    B: np.ndarray
    route: str
    commutator_norm: float

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class InitialData:
    q0: np.ndarray
    qdot0: np.ndarray
    part: str = "real_part"

    def __post_init__(self):
        q0 = as_vector(self.q0, name="q0")
        qd = as_vector(self.qdot0, n=q0.shape[0], name="qdot0")
        if self.part not in PARTS:
            raise ValueError(f"part must be one of {PARTS}, got {self.part!r}")
        object.__setattr__(self, "q0", frozen(q0))
        object.__setattr__(self, "qdot0", frozen(qd))

    @property
    def n(self) -> int:
        return self.q0.shape[0]


def decomplexify(psi) -> RealifiedState:
    """Split a complex vector into real and imaginary parts.

    Accepts a :class:`StateVector` or any complex array (including zero).
    """
    if isinstance(psi, StateVector):
        psi = psi.amplitudes
    psi = np.asarray(psi, dtype=complex)
    return RealifiedState(psi.real.copy(), psi.imag.copy())


def recomplexify(r: RealifiedState) -> np.ndarray:
    return r.phi1 + 1j * r.phi2


def build_first_order(H) -> BlockFirstOrder:
    H = _as_hamiltonian(H)
    H1, H2 = H.real_part, H.imag_part
    M = np.block([[H2, H1], [-H1, H2]])
    return BlockFirstOrder(frozen(M))


def commutator_norm(H) -> float:
    H = _as_hamiltonian(H)
    H1, H2 = H.real_part, H.imag_part
    return float(np.linalg.norm(H1 @ H2 - H2 @ H1))


def _commutes(H1, H2, comm):
    scale = np.linalg.norm(H1) * np.linalg.norm(H2)
    return scale == 0.0 or comm <= COMMUTATOR_RTOL * scale


def _general_coeffs(H1, H2):
    cond = np.linalg.cond(H1)
    if not np.isfinite(cond) or cond >= REALPART_MAX_COND:
        raise SingularRealPartError(
            f"Re(H) is singular or ill-conditioned (cond = {cond:.3e}); "
            "use the first-order block system instead"
        )
    # K = H1 H2 H1^-1, computed as solve(H1^T, (H1 H2)^T)^T
    K = np.linalg.solve(H1.T, (H1 @ H2).T).T
    A = -H2 - K
    B = H1 @ H1 + K @ H2
    return A, B


def _commuting_coeffs(H1, H2):
    return -2.0 * H2, H1 @ H1 + H2 @ H2


def second_order_coeffs(H, mode: str = "auto", strict: bool = True) -> SecondOrderSystem:
    """Coefficients ``(A, B)`` of the decoupled second-order equation.

    Parameters
    ----------
    H : Hamiltonian or array_like
    mode : {"auto", "general", "commuting"}
        ``general`` uses ``A = -H2 - H1 H2 H1^-1`` and
        ``B = H1^2 + H1 H2 H1^-1 H2`` and needs an invertible ``H1``.
        ``commuting`` uses ``A = -2 H2`` and ``B = H1^2 + H2^2``, which is only
        correct when ``H1`` and ``H2`` commute. ``auto`` picks ``commuting``
        when the commutator vanishes and ``general`` otherwise.
    strict : bool
        With ``mode="commuting"``, refuse to evaluate the commuting formulas
        for a non-commuting pair. Pass ``False`` to evaluate them anyway
        (the commutator norm is still recorded on the result).

    Raises
    ------
    SingularRealPartError
        The general route was needed but ``H1`` is not invertible.
    CommutatorError
        ``mode="commuting"`` with ``strict=True`` and a nonzero commutator.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    H = _as_hamiltonian(H)
    H1, H2 = H.real_part, H.imag_part
    comm = float(np.linalg.norm(H1 @ H2 - H2 @ H1))
    commutes = _commutes(H1, H2, comm)

    if mode == "commuting":
        if strict and not commutes:
            threshold = COMMUTATOR_RTOL * np.linalg.norm(H1) * np.linalg.norm(H2)
            raise CommutatorError(comm, threshold)
        A, B = _commuting_coeffs(H1, H2)
        route = "commuting"
    elif mode == "general" or not commutes:
        A, B = _general_coeffs(H1, H2)
        route = "general"
    else:
        A, B = _commuting_coeffs(H1, H2)
        route = "commuting"
    return SecondOrderSystem(frozen(A), frozen(B), route, comm)


def initial_conditions(H, psi0, part: str = "real_part") -> InitialData:
    """Initial value and rate for one half of the realified state.

    The rate comes from ``psi'(0) = -i H psi(0)``.
    """
    if part not in PARTS:
        raise ValueError(f"part must be one of {PARTS}, got {part!r}")
    H = _as_hamiltonian(H)
    psi0 = _as_state(psi0)
    if psi0.n != H.n:
        raise DimensionError(f"state has dimension {psi0.n}, Hamiltonian has {H.n}")
    psi = psi0.amplitudes
    rate = -1j * (np.asarray(H.matrix) @ psi)
    pick = np.real if part == "real_part" else np.imag
    return InitialData(pick(psi).copy(), pick(rate).copy(), part)
