"""
Error types raised by the toolkit

All of them derive from ValueError so callers that only care about
"bad input" can keep catching that.
"""


class BootstrapTestError(ValueError):
    """Base class for every toolkit error"""


class EmptyInput(BootstrapTestError):
    """An operation received an empty sample, grid or replicate list"""


class KindMismatch(BootstrapTestError):
    """A norm or functional of the wrong kind was supplied"""


class DegenerateDesign(BootstrapTestError):
    """The regressor has zero empirical variance"""


class TiesDetected(BootstrapTestError):
    """A marginal contains duplicate values where continuity is required"""


class OutOfRange(BootstrapTestError):
    """A parameter or Kendall tau lies outside a family's domain"""


class NonFiniteCriterion(BootstrapTestError):
    """The minimum-distance criterion evaluated to NaN or infinity"""


class IncompatiblePair(BootstrapTestError):
    """The resampling scheme and functional/statistic do not combine"""


class AllReplicatesNonFinite(BootstrapTestError):
    """Every bootstrap replicate failed"""


class DataError(BootstrapTestError):
    """A data file could not be parsed into a valid sample"""


class ConfigError(BootstrapTestError):
    """A configuration document is malformed or inconsistent"""
