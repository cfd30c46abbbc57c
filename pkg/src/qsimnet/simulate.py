"""Time-domain solution of the circuit equations.

``q'' + A q' + B q = 0`` is integrated in companion form
``z' = K z`` with ``z = (q, q')`` and ``K = [[0, I], [-B, -A]]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from ._validation import as_square_matrix, as_vector, frozen
from .exceptions import DimensionError, SimulationError
from .realify import InitialData

METHODS = ("exact_spectral", "rk4", "adaptive")
EIGVEC_MAX_COND = 1e10


@dataclass(frozen=True)
class SimulationConfig:
    t_end: float = 10.0
    dt: float = 1e-3
    method: str = "exact_spectral"
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12

    def __post_init__(self):
        if not (np.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if not (np.isfinite(self.dt) and 0 < self.dt < self.t_end):
            raise ValueError(f"dt must satisfy 0 < dt < t_end, got {self.dt!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v!r}")

    def times(self) -> np.ndarray:
        return time_grid(self.t_end, self.dt)


def time_grid(t_end: float, dt: float) -> np.ndarray:
    """``k * dt`` for ``k = 0..K`` with ``K * dt`` the last point not past ``t_end``.

    Index-multiplied, so there is no accumulated rounding drift.
    """
    steps = round(t_end / dt)
    if steps * dt > t_end * (1 + 1e-12):
        steps -= 1
    return np.arange(steps + 1) * dt


@dataclass(frozen=True)
class TraceSet:
    times: np.ndarray
    channels: np.ndarray  # shape (len(times), m)
    labels: tuple

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        X = np.asarray(self.channels, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or X.shape[0] != t.shape[0]:
            raise DimensionError("channels must have one row per time sample")
        labels = tuple(self.labels)
        if len(labels) != X.shape[1]:
            raise DimensionError(f"{len(labels)} labels for {X.shape[1]} channels")
        if not np.all(np.isfinite(X)):
            raise SimulationError("trace contains non-finite values")
        object.__setattr__(self, "times", frozen(t))
        object.__setattr__(self, "channels", frozen(X))
        object.__setattr__(self, "labels", labels)

    @property
    def n_channels(self) -> int:
        return self.channels.shape[1]

    def __getitem__(self, label: str) -> np.ndarray:
        return self.channels[:, self.labels.index(label)]


def companion_matrix(A, B) -> np.ndarray:
    A = as_square_matrix(A, name="A")
    B = as_square_matrix(B, name="B")
    if A.shape != B.shape:
        raise DimensionError(f"A {A.shape} and B {B.shape} differ in shape")
    n = A.shape[0]
    return np.block([[np.zeros((n, n)), np.eye(n)], [-B, -A]])


def linear_flow(K, z0, times) -> np.ndarray:
    """Samples of ``exp(K t) z0``, one row per time.

    Uses the eigendecomposition when the eigenvector matrix is well
    conditioned, and a scaled-and-squared matrix exponential per sample
    otherwise (defective or nearly defective ``K``).
    """
    K = np.asarray(K, dtype=float)
    z0 = np.asarray(z0, dtype=float)
    t = np.asarray(times, dtype=float)
    lam, W = np.linalg.eig(K)
    if np.linalg.cond(W) < EIGVEC_MAX_COND:
        c = np.linalg.solve(W, z0)
        return ((np.exp(np.outer(t, lam)) * c) @ W.T).real
    return np.array([expm(K * ti) @ z0 for ti in t])


def _rk4(K, z0, times):
    out = np.empty((len(times), len(z0)))
    z = z0.astype(float).copy()
    out[0] = z
    for i in range(1, len(times)):
        h = times[i] - times[i - 1]
        k1 = K @ z
        k2 = K @ (z + 0.5 * h * k1)
        k3 = K @ (z + 0.5 * h * k2)
        k4 = K @ (z + h * k3)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i] = z
    return out


def _adaptive(K, z0, times, cfg):
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(
            lambda _t, z: K @ z,
            (times[0], times[-1]),
            z0,
            method="DOP853",
            t_eval=times,
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
        )
    if not sol.success:
        t_fail = float(sol.t[-1]) if sol.t.size else float(times[0])
        raise SimulationError(f"adaptive integration failed: {sol.message}", t_fail)
    bad = ~np.all(np.isfinite(sol.y), axis=0)
    if bad.any():
        t_fail = float(sol.t[np.argmax(bad)])
        raise SimulationError(f"adaptive integration overflowed at t={t_fail:g}", t_fail)
    return sol.y.T


def _integrate(K, z0, times, method, cfg):
    if method == "exact_spectral":
        return linear_flow(K, z0, times)
    if method == "rk4":
        return _rk4(K, z0, times)
    return _adaptive(K, z0, times, cfg)


def exact_linear_solution(A, B, init: InitialData, times) -> TraceSet:
    """Reference solution of ``q'' + A q' + B q = 0`` on arbitrary sample times."""
    K = companion_matrix(A, B)
    n = K.shape[0] // 2
    if init.n != n:
        raise DimensionError(f"initial data has dimension {init.n}, system has {n}")
    t = np.asarray(times, dtype=float)
    Z = linear_flow(K, np.concatenate([init.q0, init.qdot0]), t)
    return TraceSet(t, Z[:, :n], tuple(f"V{k + 1}" for k in range(n)))


def simulate_second_order(A, B, init: InitialData, cfg: SimulationConfig | None = None) -> TraceSet:
    """Port voltages ``V1..Vn`` of the circuit with coefficients ``(A, B)``."""
    cfg = cfg or SimulationConfig()
    if cfg.method == "exact_spectral":
        return exact_linear_solution(A, B, init, cfg.times())
    K = companion_matrix(A, B)
    n = K.shape[0] // 2
    if init.n != n:
        raise DimensionError(f"initial data has dimension {init.n}, system has {n}")
    t = cfg.times()
    Z = _integrate(K, np.concatenate([init.q0, init.qdot0]), t, cfg.method, cfg)
    return TraceSet(t, Z[:, :n], tuple(f"V{k + 1}" for k in range(n)))


def simulate_first_order(M, x0, cfg: SimulationConfig | None = None) -> TraceSet:
    """Samples of ``x' = M x``; channels ``x1..xm``."""
    cfg = cfg or SimulationConfig()
    M = as_square_matrix(getattr(M, "M", M), name="M")
    x0 = as_vector(x0, n=M.shape[0], name="x0")
    t = cfg.times()
    X = _integrate(M, x0, t, cfg.method, cfg)
    return TraceSet(t, X, tuple(f"x{k + 1}" for k in range(M.shape[0])))
