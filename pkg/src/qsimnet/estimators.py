"""scikit-learn compatible wrappers.

:class:`CircuitEmulator` fits a circuit to a Hamiltonian and predicts port
voltages at requested times; :class:`EnvelopeTransformer` maps multichannel
traces to squared envelopes (Born estimates), so it drops into a
``Pipeline`` after anything that produces time-by-channel arrays.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .quantum import Hamiltonian, StateVector, propagate, shift_spectrum
from .realify import initial_conditions, second_order_coeffs
from .signal import INTERIOR_FRACTION, envelope, interior_mask
from .simulate import exact_linear_solution
from .synthesis import reconstruct_AB, synthesize_network


def _times_from_X(X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = check_array(X)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of times, got {X.shape[1]} columns")
        X = X[:, 0]
    elif X.ndim == 1:
        X = check_array(X[:, None])[:, 0]
    else:
        raise ValueError("times must be one- or two-dimensional")
    return X


class CircuitEmulator(BaseEstimator):
    """Classical circuit that reproduces the evolution of ``psi0`` under ``H``.

    Parameters
    ----------
    psi0 : array_like
        Initial state; normalized on fit. Defaults to the first basis state.
    cap : float
        Port capacitance.
    omega0_strategy : str or array_like
        See :func:`qsimnet.synthesis.synthesize_network`.
    mode : {"auto", "general", "commuting"}
    part : {"real_part", "imag_part"}
        Which half of the wave function the port voltages carry.
    shift_margin : float or None
        If set, shift the spectrum so every eigenvalue is at least this value.

    Attributes
    ----------
    hamiltonian_, shift_, system_, design_, init_, n_features_in_
    """

    def __init__(self, psi0=None, cap=1.0, omega0_strategy="auto", mode="auto",
                 part="real_part", shift_margin=None):
        self.psi0 = psi0
        self.cap = cap
        self.omega0_strategy = omega0_strategy
        self.mode = mode
        self.part = part
        self.shift_margin = shift_margin

    def fit(self, X, y=None):
        """Synthesize the circuit for the Hamiltonian matrix ``X``."""
        H = X if isinstance(X, Hamiltonian) else Hamiltonian(X)
        self.shift_ = 0.0
        if self.shift_margin is not None:
            H, self.shift_ = shift_spectrum(H, self.shift_margin)
        psi0 = StateVector.basis(H.n, 0) if self.psi0 is None else StateVector.normalized(self.psi0)
        self.hamiltonian_ = H
        self.psi0_ = psi0
        self.system_ = second_order_coeffs(H, mode=self.mode)
        self.design_ = synthesize_network(self.system_, cap=self.cap,
                                          omega0_strategy=self.omega0_strategy)
        self.init_ = initial_conditions(H, psi0, self.part)
        self.n_features_in_ = H.n
        return self

    def predict(self, X):
        """Port voltages at the times in ``X``, shape ``(len(X), n)``."""
        check_is_fitted(self, "design_")
        t = _times_from_X(X)
        A, B = reconstruct_AB(self.design_)
        return np.asarray(exact_linear_solution(A, B, self.init_, t).channels)

    def score(self, X, y=None):
        """Negative max deviation from the exact wave-function component."""
        check_is_fitted(self, "design_")
        t = _times_from_X(X)
        order = np.argsort(t)
        ts = t[order]
        if ts[0] != 0.0:
            ts = np.concatenate([[0.0], ts])
            states = propagate(self.hamiltonian_, self.psi0_, ts).states[1:]
        else:
            states = propagate(self.hamiltonian_, self.psi0_, ts).states
        ref = np.empty_like(states)
        ref[order] = states
        ref = ref.real if self.part == "real_part" else ref.imag
        return -float(np.max(np.abs(self.predict(t) - ref)))


class EnvelopeTransformer(TransformerMixin, BaseEstimator):
    """Squared (or plain) envelopes of each column of a uniformly sampled trace.

    Parameters
    ----------
    squared : bool
        Return ``env^2`` (a Born estimate) rather than ``env``.
    edge : {"predict", "periodic"}
    interior_fraction : float
        Fraction trimmed at each end by :meth:`interior_mask`.
    """

    def __init__(self, squared=True, edge="predict", interior_fraction=INTERIOR_FRACTION):
        self.squared = squared
        self.edge = edge
        self.interior_fraction = interior_fraction

    def fit(self, X, y=None):
        X = check_array(X, ensure_min_samples=16)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, ensure_min_samples=16)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} channels, expected {self.n_features_in_}")
        env = np.column_stack([envelope(X[:, k], self.edge) for k in range(X.shape[1])])
        return env**2 if self.squared else env

    def interior_mask(self, n_samples):
        return interior_mask(n_samples, self.interior_fraction)
