"""Exception hierarchy shared by all modules."""


class AccuracyLimitError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(AccuracyLimitError, ValueError):
    """Invalid configuration: non-chaining layers, bad control values, missing seed."""


class ShapeError(AccuracyLimitError, ValueError):
    pass


class DomainError(AccuracyLimitError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NumericError(AccuracyLimitError, ArithmeticError):
    pass


class InputError(AccuracyLimitError, ValueError):
    """Empty or otherwise unusable input data."""


class FitError(AccuracyLimitError, ValueError):
    """A classifier could not be fitted (e.g. a class has too few samples)."""


class CoverageError(AccuracyLimitError, ValueError):
    """Integration grid does not hold enough probability mass of some class."""


class FormatError(AccuracyLimitError, ValueError):
    """Malformed input file (bad magic number, bad header, wrong layout)."""
