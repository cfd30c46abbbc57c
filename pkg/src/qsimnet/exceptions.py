"""Exception hierarchy.

Input-validation errors subclass ``ValueError`` so that generic callers can
catch them; synthesis failures share :class:`SynthesisError` so the CLI can
map them to a single exit code.
"""


class QsimnetError(Exception):
    """Base class for all package errors."""


class HermiticityError(QsimnetError, ValueError):
    pass


class DimensionError(QsimnetError, ValueError):
    pass


class NormalizationError(QsimnetError, ValueError):
    pass


class SingularMatrixError(QsimnetError, ValueError):
    pass


class SingularRealPartError(SingularMatrixError):
    """Re(H) is not invertible, so the general second-order route is unavailable.

    The first-order block system is always valid and should be used instead.
    """


class CommutatorError(QsimnetError, ValueError):
    """The commuting-form coefficients were requested but [Re H, Im H] != 0."""

    def __init__(self, commutator_norm: float, threshold: float):
        self.commutator_norm = commutator_norm
        self.threshold = threshold
        super().__init__(
            f"commuting form requires ||[H1, H2]|| <= {threshold:.3g}, "
            f"got {commutator_norm:.6g}"
        )


class SynthesisError(QsimnetError):
    pass


class StrategyError(SynthesisError, ValueError):
    pass


class InfiniteInductanceError(SynthesisError, ValueError):
    pass


class DegenerateMergeError(SynthesisError, ValueError):
    pass


class NetlistError(QsimnetError, ValueError):
    pass


class SimulationError(QsimnetError, RuntimeError):
    def __init__(self, message: str, t_fail: float | None = None):
        self.t_fail = t_fail
        super().__init__(message if t_fail is None else f"{message} (t = {t_fail:.6g})")


class SignalError(QsimnetError, ValueError):
    pass
