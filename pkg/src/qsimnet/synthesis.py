"""Network synthesis: LC port tanks coupled through an admittance ``alpha + beta/s``.

With port capacitances ``C`` and tank frequencies ``omega0^2 = (L C)^-1`` the
port voltages obey ``V'' + C^-1 alpha V' + (C^-1 beta + omega0^2) V = 0``, so a
target pair ``(A, B)`` is met by ``alpha = C A`` and
``beta = C (B - omega0^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._validation import as_square_matrix, as_vector, frozen
from .exceptions import (
    DegenerateMergeError,
    DimensionError,
    InfiniteInductanceError,
    StrategyError,
)
from .quantum import PauliCoefficients, pauli_to_matrix
from .realify import SecondOrderSystem, commutator_norm

ZERO_ATOL = 1e-12
PSD_ATOL = 1e-12
OMEGA0_RTOL = 1e-12

STRATEGIES = ("auto", "diag_B_positive", "unit")
FLAGS = ("non_passive", "gyrator_required", "disconnected")


@dataclass(frozen=True)
class PortTank:
    """Parallel L-C dipole on port ``index`` (1-based).

    ``L = inf`` means the tank has no inductor. ``dv0`` is the optional
    initial rate of the port voltage; it fixes the initial inductor current.
    """

    index: int
    L: float
    C: float
    v0: float = 0.0
    dv0: float | None = None

    def __post_init__(self):
        if not self.C > 0 or not math.isfinite(self.C):
            raise ValueError(f"tank {self.index}: capacitance must be positive, got {self.C!r}")
        if self.L == 0 or math.isnan(self.L):
            raise ValueError(f"tank {self.index}: inductance must be nonzero, got {self.L!r}")

    @property
    def omega0_sq(self) -> float:
        return 1.0 / (self.L * self.C)


@dataclass(frozen=True)
class InteractionNetwork:
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a = as_square_matrix(self.alpha, name="alpha")
        b = as_square_matrix(self.beta, name="beta")
        if a.shape != b.shape:
            raise DimensionError(f"alpha {a.shape} and beta {b.shape} differ in shape")
        object.__setattr__(self, "alpha", frozen(a))
        object.__setattr__(self, "beta", frozen(b))

    @property
    def n(self) -> int:
        return self.alpha.shape[0]

    def admittance(self, s):
        """Evaluate ``Y(s) = alpha + beta / s``."""
        return self.alpha + self.beta / s

    @property
    def passive(self) -> bool:
        """Lossless gyrators plus a passive inductor network."""
        return _antisymmetric(self.alpha) and _symmetric_psd(self.beta)


def _scale(*mats):
    return max([1.0] + [float(np.max(np.abs(m))) for m in mats if np.size(m)])


def _is_zero(M, scale=1.0):
    return bool(np.all(np.abs(M) <= ZERO_ATOL * scale))


def _antisymmetric(M):
    return _is_zero(M + M.T, _scale(M))


def _symmetric_psd(M):
    scale = _scale(M)
    if not _is_zero(M - M.T, scale):
        return False
    return bool(np.linalg.eigvalsh(0.5 * (M + M.T))[0] >= -PSD_ATOL * scale)


def _design_flags(alpha, beta, inductances):
    scale = _scale(alpha, beta)
    flags = set()
    if _is_zero(alpha, scale) and _is_zero(beta, scale):
        flags.add("disconnected")
    if not _is_zero(alpha, scale):
        flags.add("gyrator_required")
    if not _symmetric_psd(beta) or any(L < 0 for L in inductances):
        flags.add("non_passive")
    return frozenset(flags)


@dataclass(frozen=True)
class CircuitDesign:
    tanks: tuple
    interaction: InteractionNetwork
    omega0_strategy: str = "explicit"
    flags: frozenset = field(init=False)

    def __post_init__(self):
        tanks = tuple(self.tanks)
        if len(tanks) != self.interaction.n:
            raise DimensionError(
                f"{len(tanks)} tanks for a {self.interaction.n}-port interaction network"
            )
        if [t.index for t in tanks] != list(range(1, len(tanks) + 1)):
            raise ValueError("tanks must be indexed 1..n in order")
        object.__setattr__(self, "tanks", tanks)
        flags = _design_flags(self.interaction.alpha, self.interaction.beta, self.inductances)
        object.__setattr__(self, "flags", flags)

    @property
    def n(self) -> int:
        return len(self.tanks)

    @property
    def capacitances(self) -> np.ndarray:
        return np.array([t.C for t in self.tanks])

    @property
    def inductances(self) -> np.ndarray:
        return np.array([t.L for t in self.tanks])

    @property
    def omega0_sq(self) -> np.ndarray:
        """Diagonal matrix of tank frequencies squared."""
        return np.diag([t.omega0_sq for t in self.tanks])

    @property
    def initial_voltages(self) -> np.ndarray:
        return np.array([t.v0 for t in self.tanks])

    @property
    def initial_rates(self) -> np.ndarray | None:
        rates = [t.dv0 for t in self.tanks]
        if all(r is None for r in rates):
            return None
        return np.array([0.0 if r is None else r for r in rates])

    def with_initial(self, v0, dv0=None) -> CircuitDesign:
        v0 = as_vector(v0, n=self.n, name="v0")
        dv0 = [None] * self.n if dv0 is None else list(as_vector(dv0, n=self.n, name="dv0"))
        tanks = tuple(
            replace(t, v0=float(v), dv0=None if r is None else float(r))
            for t, v, r in zip(self.tanks, v0, dv0)
        )
        return replace(self, tanks=tanks)


def _cap_vector(cap, n):
    if cap is None:
        c = np.ones(n)
    else:
        c = np.asarray(cap, dtype=float)
        if c.ndim == 0:
            c = np.full(n, float(c))
        elif c.ndim == 2:
            if np.any(c - np.diag(np.diag(c))):
                raise ValueError("capacitance matrix must be diagonal")
            c = np.diag(c).copy()
    if c.shape != (n,):
        raise DimensionError(f"expected {n} capacitances, got shape {c.shape}")
    if not np.all(np.isfinite(c)) or np.any(c <= 0):
        raise ValueError("capacitances must be positive and finite")
    return c


def _realizable(w, c):
    """Positive ``omega0^2`` values whose tank inductances ``1/(c w)`` are finite."""
    with np.errstate(over="ignore", divide="ignore"):
        return bool(np.all(w > 0) and np.all(np.isfinite(1.0 / (c * w))))


def _omega0_values(B, strategy, c):
    diagB = np.diag(B).copy()
    if isinstance(strategy, str):
        if strategy == "unit":
            return np.ones(len(diagB)), "unit"
        if strategy == "diag_B_positive":
            if _realizable(diagB, c):
                return diagB, "diag_B_positive"
            raise StrategyError(
                "diag_B_positive needs every diagonal entry of B to be positive, "
                f"got {diagB.tolist()}; choose 'unit' or explicit values"
            )
        if strategy == "auto":
            if _realizable(diagB, c):
                return diagB, "diag_B_positive"
            return np.ones(len(diagB)), "unit"
        raise StrategyError(f"unknown omega0 strategy {strategy!r}; expected {STRATEGIES} or values")
    w = np.asarray(strategy, dtype=float)
    if w.ndim == 2:
        w = np.diag(w).copy()
    if w.shape != diagB.shape:
        raise DimensionError(f"expected {len(diagB)} omega0^2 values, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or not _realizable(w, c):
        raise StrategyError(f"explicit omega0^2 values must be positive, got {w.tolist()}")
    return w, "explicit"


def synthesize_network(system, cap=None, omega0_strategy="auto") -> CircuitDesign:
    """Design a network whose port voltages follow ``q'' + A q' + B q = 0``.

    Parameters
    ----------
    system : SecondOrderSystem or (A, B)
    cap : None, float, sequence or diagonal matrix
        Port capacitances, all ones by default.
    omega0_strategy : {"auto", "diag_B_positive", "unit"} or array_like
        How ``B`` is split between the tanks (``omega0^2``) and the
        interaction network (``beta``). ``diag_B_positive`` puts ``diag(B)``
        into the tanks and fails when an entry is not positive; ``auto`` does
        the same but falls back to ``unit``. An array gives explicit positive
        ``omega0^2`` values.

    Raises
    ------
    StrategyError
        The strategy produced a nonpositive tank frequency.
    """
    if isinstance(system, SecondOrderSystem):
        A, B = system.A, system.B
    else:
        A, B = system
    A = as_square_matrix(A, name="A")
    B = as_square_matrix(B, name="B")
    if A.shape != B.shape:
        raise DimensionError(f"A {A.shape} and B {B.shape} differ in shape")
    n = A.shape[0]
    c = _cap_vector(cap, n)
    w0sq, used = _omega0_values(B, omega0_strategy, c)

    # + 0.0 turns signed zeros into plain zeros for clean serialization
    alpha = c[:, None] * A + 0.0
    beta = c[:, None] * (B - np.diag(w0sq)) + 0.0
    tanks = tuple(
        PortTank(index=k + 1, L=1.0 / (c[k] * w0sq[k]), C=float(c[k])) for k in range(n)
    )
    return CircuitDesign(tanks, InteractionNetwork(alpha, beta), omega0_strategy=used)


def reconstruct_AB(design: CircuitDesign):
    """Return ``(C^-1 alpha, C^-1 beta + omega0^2)`` for a design."""
    c = design.capacitances
    A = design.interaction.alpha / c[:, None]
    B = design.interaction.beta / c[:, None] + design.omega0_sq
    return A, B


@dataclass(frozen=True)
class RealizabilityReport:
    alpha_antisymmetric: bool
    alpha_resistive: bool
    alpha_resistive_passive: bool
    beta_symmetric_psd: bool
    elements_positive: bool
    reciprocal: bool

    @property
    def passive(self) -> bool:
        return self.alpha_resistive_passive and self.beta_symmetric_psd and self.elements_positive


def check_realizability(design: CircuitDesign) -> RealizabilityReport:
    """Classify the interaction network and the tanks.

    ``alpha``'s antisymmetric part is a lossless gyrator; a nonzero symmetric
    part means conductances, which are passive only if positive semidefinite.
    ``beta`` is realizable with ordinary inductors iff it is symmetric PSD.
    """
    a = design.interaction.alpha
    b = design.interaction.beta
    scale = _scale(a)
    sym = 0.5 * (a + a.T)
    resistive = not _is_zero(sym, scale)
    resistive_ok = (not resistive) or bool(np.linalg.eigvalsh(sym)[0] >= -PSD_ATOL * scale)
    positive = bool(np.all(design.inductances > 0) and np.all(design.capacitances > 0))
    return RealizabilityReport(
        alpha_antisymmetric=_antisymmetric(a),
        alpha_resistive=resistive,
        alpha_resistive_passive=resistive_ok,
        beta_symmetric_psd=_symmetric_psd(b),
        elements_positive=positive,
        reciprocal=_is_zero(a - a.T, scale),
    )


# --- two-level (Pauli) circuit -------------------------------------------------


@dataclass(frozen=True)
class PauliCircuit:
    """Two LC tanks, a gyrator and a Pi network of inductors.

    Absent components are ``None``. With ``S = 1/La + 1/Lb`` the interaction
    admittance is ``alpha = [[0, g], [-g, 0]]`` and
    ``beta = [[S, -1/Lc], [-1/Lc, S]]``.
    """

    C: float
    L1: float | None
    L2: float | None
    La: float | None
    Lb: float | None
    Lc: float | None
    g: float
    L1_star: float | None = None
    L2_star: float | None = None
    xi: PauliCoefficients | None = None

    @property
    def faithful(self) -> bool:
        """Whether the commuting-form coefficients this circuit realizes are exact."""
        if self.xi is None:
            return True
        H = pauli_to_matrix(self.xi)
        return commutator_norm(H) <= 1e-10 * max(
            1.0, np.linalg.norm(H.real_part) * np.linalg.norm(H.imag_part)
        )

    def alpha(self) -> np.ndarray:
        return np.array([[0.0, self.g], [-self.g, 0.0]])

    def beta(self) -> np.ndarray:
        S = _inv(self.La) + _inv(self.Lb)
        m = -_inv(self.Lc)
        return np.array([[S, m], [m, S]])

    def to_design(self, merged: bool = False) -> CircuitDesign:
        """Equivalent :class:`CircuitDesign`.

        With ``merged=True`` the tanks carry ``L1_star``/``L2_star`` and the
        Pi shunts already absorbed into them are removed from ``beta``.
        """
        beta = self.beta()
        L1, L2 = self.L1, self.L2
        if merged:
            beta[0, 0] -= _inv(self.La)
            beta[1, 1] -= _inv(self.Lb)
            L1, L2 = self.L1_star, self.L2_star
        tanks = (
            PortTank(1, math.inf if L1 is None else L1, self.C),
            PortTank(2, math.inf if L2 is None else L2, self.C),
        )
        return CircuitDesign(tanks, InteractionNetwork(self.alpha(), beta), omega0_strategy="pauli")


def _reciprocal(y):
    """``1 / y``, or ``None`` (no element) when that is infinite."""
    with np.errstate(over="ignore", divide="ignore"):
        L = 1.0 / np.float64(y)
    return float(L) if np.isfinite(L) else None


def _inv(L):
    return 0.0 if L is None else 1.0 / L


def _parallel(La, Lb):
    if La is None:
        return Lb
    if Lb is None:
        return La
    y = 1.0 / La + 1.0 / Lb
    if abs(y) <= 1e-15 * max(abs(1.0 / La), abs(1.0 / Lb)):
        raise DegenerateMergeError(f"parallel combination of {La!r} and {Lb!r} is an open circuit")
    return 1.0 / y


def merge_parallel(pc: PauliCircuit) -> PauliCircuit:
    """Fill ``L1_star = L1 || La`` and ``L2_star = L2 || Lb``.

    Raises :class:`DegenerateMergeError` when a pair's admittances cancel.
    """
    return replace(pc, L1_star=_parallel(pc.L1, pc.La), L2_star=_parallel(pc.L2, pc.Lb))


def synthesize_pauli(xi, C: float = 1.0, split=None, strict: bool = False) -> PauliCircuit:
    """Component values for the two-level Hamiltonian ``sum_k xi_k sigma_k``.

    ``(C L1)^-1 = (xi0+xi3)^2``, ``(C L2)^-1 = (xi0-xi3)^2``,
    ``(C La)^-1 + (C Lb)^-1 = xi1^2 - xi2^2``, ``-(C Lc)^-1 = 2 xi0 xi1`` and
    ``g / C = 2 xi2``. The Pi shunts are split equally unless ``split=(La, Lb)``
    is given.

    A tank with ``xi0 +- xi3 = 0`` has no inductor and is reported as ``None``;
    with ``strict=True`` that raises :class:`InfiniteInductanceError` instead,
    and a degenerate parallel merge raises :class:`DegenerateMergeError`
    rather than leaving the merged value ``None``.
    """
    if not isinstance(xi, PauliCoefficients):
        xi = PauliCoefficients.from_sequence(xi)
    if not C > 0 or not math.isfinite(C):
        raise ValueError(f"capacitance must be positive, got {C!r}")
    x0, x1, x2, x3 = xi.as_array()

    tank = []
    for label, w in (("L1", x0 + x3), ("L2", x0 - x3)):
        L = _reciprocal(C * w * w)
        if L is None and strict:
            raise InfiniteInductanceError(
                f"{label} is infinite: xi0 {'+' if label == 'L1' else '-'} xi3 is zero or underflows"
            )
        tank.append(L)

    shunt = x1 * x1 - x2 * x2
    if split is not None:
        La, Lb = split
        if not math.isclose(_inv(La) + _inv(Lb), C * shunt, rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError("split does not satisfy 1/La + 1/Lb = C (xi1^2 - xi2^2)")
    else:
        La = Lb = _reciprocal(C * shunt / 2.0)
    Lc = _reciprocal(-2.0 * C * x0 * x1)

    pc = PauliCircuit(C=float(C), L1=tank[0], L2=tank[1], La=La, Lb=Lb, Lc=Lc, g=float(2.0 * C * x2), xi=xi)
    try:
        return merge_parallel(pc)
    except DegenerateMergeError:
        if strict:
            raise
    L1s = L2s = None
    try:
        L1s = _parallel(pc.L1, pc.La)
    except DegenerateMergeError:
        pass
    try:
        L2s = _parallel(pc.L2, pc.Lb)
    except DegenerateMergeError:
        pass
    return replace(pc, L1_star=L1s, L2_star=L2s)
