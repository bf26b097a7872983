"""Exception types shared across the laboratory."""


class FracLimitError(Exception):
    """Base class for all package errors."""


class AlphaOutOfRange(FracLimitError):
    pass


class NonPositiveDomain(FracLimitError):
    pass


class EmptyEpsilonSchedule(FracLimitError):
    pass


class CrossSectionBoundsViolated(FracLimitError):
    pass


class OddNodeCount(FracLimitError):
    pass


class NonPositiveExtent(FracLimitError):
    pass


class GridMismatch(FracLimitError):
    pass


class NonEquilibriumF(FracLimitError):
    pass


class PowerIterationStalled(FracLimitError):
    pass


class NegativeEntries(FracLimitError):
    pass


class SingularSystem(FracLimitError):
    pass


class QuadratureMismatch(FracLimitError):
    pass


class TailDivergence(FracLimitError):
    pass


class NonMonotoneTime(FracLimitError):
    pass


class StabilityViolation(FracLimitError):
    pass


class ConfigRegimeMismatch(FracLimitError):
    pass
