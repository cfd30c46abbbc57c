"""Finite-dimensional quantum systems and their exact evolution.

Everything here is in natural units (hbar = 1). The exact propagator is the
ground truth that circuit traces are checked against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._validation import as_square_matrix, as_vector, check_hermitian, check_times, frozen
from .exceptions import DimensionError, NormalizationError, SingularMatrixError

NORM_ATOL = 1e-10
TRAJECTORY_NORM_ATOL = 1e-8
SINGULAR_COND = 1e12

SIGMA = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class Hamiltonian:
    """Dense Hermitian matrix.

    The stored matrix is the Hermitian part ``(H + H^dagger) / 2`` of the input,
    so ``real_part`` is exactly symmetric and ``imag_part`` exactly
    antisymmetric.
    """

    matrix: np.ndarray

    def __post_init__(self):
        H = check_hermitian(self.matrix)
        object.__setattr__(self, "matrix", frozen(0.5 * (H + H.conj().T)))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def real_part(self) -> np.ndarray:
        return self.matrix.real

    @property
    def imag_part(self) -> np.ndarray:
        return self.matrix.imag

    @cached_property
    def _eig(self):
        w, V = np.linalg.eigh(self.matrix)
        V = V.copy()
        for j in range(V.shape[1]):
            col = V[:, j]
            k = np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())[0]
            V[:, j] = col * (abs(col[k]) / col[k])
        return frozen(w), frozen(V)

    def eig(self):
        """Eigenvalues (ascending) and eigenvectors with a fixed phase convention.

        Each eigenvector's first non-negligible component is made positive real.
        """
        return self._eig

    def spectrum(self) -> np.ndarray:
        return self._eig[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class PauliCoefficients:
    """Real coefficients of ``xi0*I + xi1*X + xi2*Y + xi3*Z``."""

    xi0: float
    xi1: float
    xi2: float
    xi3: float

    def __post_init__(self):
        for name in ("xi0", "xi1", "xi2", "xi3"):
            v = getattr(self, name)
            if isinstance(v, complex) or not np.isfinite(v):
                raise ValueError(f"{name} must be a finite real number, got {v!r}")
            object.__setattr__(self, name, float(v))

    @classmethod
    def from_sequence(cls, xi) -> PauliCoefficients:
        xi = list(xi)
        if len(xi) != 4:
            raise DimensionError(f"expected 4 Pauli coefficients, got {len(xi)}")
        return cls(*xi)

    def as_array(self) -> np.ndarray:
        return np.array([self.xi0, self.xi1, self.xi2, self.xi3])


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        psi = as_vector(self.amplitudes, dtype=complex, name="state")
        if psi.size == 0:
            raise DimensionError("state must have at least one component")
        norm2 = float(np.vdot(psi, psi).real)
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise NormalizationError(
                f"state is not normalized: ||psi||^2 = {norm2!r}; "
                "use StateVector.normalized(...) to rescale explicitly"
            )
        object.__setattr__(self, "amplitudes", frozen(psi))

    @classmethod
    def normalized(cls, amplitudes) -> StateVector:
        psi = as_vector(amplitudes, dtype=complex, name="state")
        nrm = np.linalg.norm(psi)
        if nrm == 0:
            raise NormalizationError("cannot normalize the zero vector")
        return cls(psi / nrm)

    @classmethod
    def basis(cls, n: int, k: int) -> StateVector:
        e = np.zeros(n, dtype=complex)
        e[k] = 1.0
        return cls(e)

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)


@dataclass(frozen=True)
class QuantumTrajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n), row i is psi(times[i])
    hamiltonian: Hamiltonian | None = field(default=None, compare=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        S = np.asarray(self.states, dtype=complex)
        if S.ndim != 2 or S.shape[0] != t.shape[0]:
            raise DimensionError("states must have one row per time sample")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        dev = np.max(np.abs(np.sum(np.abs(S) ** 2, axis=1) - 1.0))
        if dev > TRAJECTORY_NORM_ATOL:
            raise NormalizationError(f"trajectory norm drift {dev:.3e} exceeds tolerance")
        object.__setattr__(self, "times", frozen(t))
        object.__setattr__(self, "states", frozen(S))

    def __len__(self):
        return self.times.shape[0]

    def state(self, i: int) -> StateVector:
        return StateVector.normalized(self.states[i])

    def probabilities(self) -> np.ndarray:
        return np.abs(self.states) ** 2


def _as_hamiltonian(H) -> Hamiltonian:
    return H if isinstance(H, Hamiltonian) else Hamiltonian(H)


def _as_state(psi) -> StateVector:
    return psi if isinstance(psi, StateVector) else StateVector(psi)


def pauli_to_matrix(xi) -> Hamiltonian:
    """Two-level Hamiltonian ``xi0*I + xi1*X + xi2*Y + xi3*Z``."""
    if not isinstance(xi, PauliCoefficients):
        xi = PauliCoefficients.from_sequence(xi)
    H = np.array(
        [
            [xi.xi0 + xi.xi3, xi.xi1 - 1j * xi.xi2],
            [xi.xi1 + 1j * xi.xi2, xi.xi0 - xi.xi3],
        ]
    )
    return Hamiltonian(H)


def propagate(H, psi0, times) -> QuantumTrajectory:
    """Exact solution ``psi(t) = exp(-iHt) psi0`` via the spectral decomposition."""
    H = _as_hamiltonian(H)
    psi0 = _as_state(psi0)
    if psi0.n != H.n:
        raise DimensionError(f"state has dimension {psi0.n}, Hamiltonian has {H.n}")
    t = check_times(times)
    w, V = H.eig()
    c = V.conj().T @ psi0.amplitudes
    phases = np.exp(-1j * np.outer(t, w))
    states = (phases * c) @ V.T
    return QuantumTrajectory(t, states, hamiltonian=H)


def born_probabilities(psi) -> np.ndarray:
    psi = _as_state(psi)
    return np.abs(psi.amplitudes) ** 2


def similarity_transform(H, omega) -> np.ndarray:
    """Return ``omega @ H @ inv(omega)`` for a constant invertible ``omega``.

    The result is only guaranteed Hermitian when ``omega`` is unitary, so a
    plain array is returned.
    """
    H = np.asarray(_as_hamiltonian(H).matrix)
    omega = as_square_matrix(omega, dtype=complex, name="omega")
    if omega.shape != H.shape:
        raise DimensionError(f"omega has shape {omega.shape}, Hamiltonian {H.shape}")
    cond = np.linalg.cond(omega)
    if not np.isfinite(cond) or cond > SINGULAR_COND:
        raise SingularMatrixError(f"omega is singular (condition number {cond:.3e})")
    # (omega H) omega^-1 = solve(omega^T, (omega H)^T)^T
    return np.linalg.solve(omega.T, (omega @ H).T).T


def shift_spectrum(H, margin: float = 0.5):
    """Add ``c * I`` so that every eigenvalue is at least ``margin``.

    Returns the shifted Hamiltonian and ``c = max(0, margin - lambda_min)``.
    A constant shift only contributes a global phase, so Born probabilities
    are unchanged.
    """
    if not margin > 0:
        raise ValueError(f"margin must be positive, got {margin!r}")
    H = _as_hamiltonian(H)
    c = max(0.0, float(margin) - float(H.spectrum()[0]))
    if c == 0.0:
        return H, 0.0
    return Hamiltonian(np.asarray(H.matrix) + c * np.eye(H.n)), c
