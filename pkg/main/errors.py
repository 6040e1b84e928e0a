class WitnessError(ValueError):
    """Base class for every error raised by the witness toolkit."""


class DimensionError(WitnessError):
    pass


class NotHermitianError(WitnessError):
    pass


class ValidationError(WitnessError):
    """A parameter violates the documented preconditions of an operation."""


class RankError(WitnessError):
    pass


class MatrixFileError(WitnessError):
    pass
