"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Input arrays have incompatible or unexpected dimensions."""


class EmptyInputError(ValueError):
    """An operation received an empty batch, vector, or dataset."""


class ConfigError(ValueError):
    """A configuration value violates its documented bounds."""


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss; the message names the epoch."""


class SchemaError(ValueError):
    """A CSV file does not match the documented column layout."""


class RowError(ValueError):
    """A CSV row failed to parse or violates record invariants."""


class SplitError(ValueError):
    """A year-based split left one side empty."""


class ConstantColumnError(ValueError):
    """A column selected for min-max scaling has zero range."""


class UndefinedDenominatorError(ValueError):
    """A metric denominator (sum of squared targets, mean target) is zero."""
