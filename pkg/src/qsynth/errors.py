"""Exception types shared across the toolkit."""


class QsynthError(Exception):
    """Base class for all toolkit errors."""


class NonUnitaryGate(QsynthError):
    """A gate matrix failed the unitarity check."""


class NonUnitaryInput(QsynthError):
    """A user-supplied matrix that must be unitary is not."""


class TargetOutOfRange(QsynthError):
    """A gate references a qubit outside the circuit or state."""


class UnboundOracle(QsynthError):
    """An oracle call has no binding for its oracle id."""


class TooManyQubits(QsynthError):
    """Request exceeds the configured dense-simulation cap."""


class LayerConflict(QsynthError):
    """Two gates in one layer touch the same qubit."""


class NotABijection(QsynthError):
    """A permutation table is not a bijection."""


class DimensionMismatch(QsynthError):
    """Operands have incompatible qubit counts or shapes."""


class QramPropertyViolated(QsynthError):
    """An oracle does not load the expected output state."""


class UnnormalizedState(QsynthError):
    """A state vector is not normalized to unit length."""


class MalformedOracle(QsynthError):
    """A classical bit-table oracle is missing or corrupt entries."""


class RoundCapExceeded(QsynthError):
    """The teleportation loop hit its round cap before a clean correction."""
