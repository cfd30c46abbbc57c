"""Small input-checking helpers shared by the modules and estimators."""

import numpy as np

from .exceptions import DimensionError, HermiticityError

HERMITIAN_RTOL = 1e-12


def as_square_matrix(M, dtype=float, name="matrix"):
    M = np.asarray(M, dtype=dtype)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def as_vector(v, dtype=float, n=None, name="vector"):
    v = np.asarray(v, dtype=dtype)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionError(f"{name} has length {v.shape[0]}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def check_hermitian(H, rtol=HERMITIAN_RTOL):
    """Return ``H`` as a complex array after checking Hermiticity.

    The tolerance is relative to the largest entry magnitude.
    """
    H = as_square_matrix(H, dtype=complex, name="Hamiltonian")
    scale = np.max(np.abs(H))
    dev = np.max(np.abs(H - H.conj().T))
    if dev > rtol * scale:
        raise HermiticityError(
            f"Hamiltonian is not Hermitian: max |H - H^dagger| = {dev:.3e} "
            f"exceeds {rtol:.0e} x max|H| = {rtol * scale:.3e}"
        )
    return H


def check_times(times):
    """Validate a sample grid: finite, strictly increasing, starting at zero."""
    t = np.asarray(times, dtype=float)
    if t.ndim == 0:
        t = t[None]
    if t.ndim != 1 or t.size == 0:
        raise DimensionError("times must be a non-empty one-dimensional sequence")
    if not np.all(np.isfinite(t)):
        raise ValueError("times contain non-finite values")
    if t[0] != 0.0:
        raise ValueError(f"times must start at 0, got {t[0]!r}")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    return t


def frozen(a):
    """Return a read-only copy of ``a``."""
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a
