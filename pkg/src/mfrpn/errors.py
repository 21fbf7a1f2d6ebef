"""Exception hierarchy shared across the package.

Each top-level category maps to a distinct CLI exit code; OSError is kept
separate and mapped to the I/O code at the CLI boundary.
"""


class MfrpnError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(MfrpnError):
    """Invalid configuration: bad architecture, bad fractions, schema or
    normalization mismatches, unknown groupings."""

    exit_code = 2


class StateError(ConfigError):
    """Operation applied to an object in the wrong state (e.g. normalizing
    an already-normalized dataset, querying an empty ensemble)."""


class DataError(MfrpnError):
    """Invalid data content: empty datasets, non-finite values, checksum or
    shape mismatches on load."""

    exit_code = 3


class ShapeError(DataError):
    """Array shape inconsistent with the declared architecture or schema."""


class NumericError(MfrpnError):
    """Numerical failure: non-finite gradients or losses."""

    exit_code = 4


class UndefinedMetricError(NumericError):
    """Metric undefined for the given inputs (e.g. zero target variance)."""


IO_EXIT_CODE = 5
