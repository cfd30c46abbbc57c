"""Compile finite-dimensional quantum Hamiltonians to classical LC networks.

The port voltages of the synthesized network follow the real part of the
wave function; the squared envelopes of those voltages estimate the Born
probabilities.
"""

from .estimators import CircuitEmulator, EnvelopeTransformer
from .exceptions import (
    CommutatorError,
    DegenerateMergeError,
    DimensionError,
    HermiticityError,
    InfiniteInductanceError,
    NetlistError,
    NormalizationError,
    QsimnetError,
    SignalError,
    SimulationError,
    SingularMatrixError,
    SingularRealPartError,
    StrategyError,
    SynthesisError,
)
from .netlist import Netlist, export_netlist, parse_netlist
from .quantum import (
    Hamiltonian,
    PauliCoefficients,
    QuantumTrajectory,
    StateVector,
    born_probabilities,
    pauli_to_matrix,
    propagate,
    shift_spectrum,
    similarity_transform,
)
from .realify import (
    BlockFirstOrder,
    InitialData,
    RealifiedState,
    SecondOrderSystem,
    build_first_order,
    decomplexify,
    initial_conditions,
    recomplexify,
    second_order_coeffs,
)
from .signal import (
    AnalyticTrace,
    BornEstimate,
    VerificationReport,
    analytic_signal,
    born_from_traces,
    discrete_hilbert,
    envelope,
    verify_against_quantum,
)
from .simulate import (
    SimulationConfig,
    TraceSet,
    exact_linear_solution,
    simulate_first_order,
    simulate_second_order,
)
from .synthesis import (
    CircuitDesign,
    InteractionNetwork,
    PauliCircuit,
    PortTank,
    check_realizability,
    merge_parallel,
    reconstruct_AB,
    synthesize_network,
    synthesize_pauli,
)

__version__ = "0.1.0"
