"""Exception types raised across the simulator."""


class MhsimError(Exception):
    """Base class for all simulator errors."""


class ParameterError(MhsimError, ValueError):
    """An argument is outside its documented range."""


class StructuralError(MhsimError, ValueError):
    """A topology violates a structural precondition (e.g. no links)."""


class TopologyFormatError(MhsimError, ValueError):
    """An edge-list file could not be parsed; message carries the line number."""


class SamplingError(MhsimError, ValueError):
    """No valid multihome setup can be drawn from the topology."""


class InfeasibleStrategyError(MhsimError, ValueError):
    """A strategy selects an unreachable (client, ISP) pair."""


class StatsError(MhsimError, ValueError):
    """Setup statistics are undefined (all clients unreachable)."""


class EnumerationTooLargeError(MhsimError, ValueError):
    """The strategy space exceeds the configured cap."""


class NoFeasibleStrategyError(MhsimError, ValueError):
    """Every enumerated strategy is infeasible."""


class BaselineError(MhsimError, ValueError):
    """The static baseline strategy is itself infeasible."""


class UndefinedGainError(MhsimError, ZeroDivisionError):
    """Performance gain is undefined because the static throughput is zero."""


class SelectionError(MhsimError, ValueError):
    """Strategy selection was invoked on an empty parameter table."""
