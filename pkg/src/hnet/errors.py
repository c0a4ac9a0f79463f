"""Exception types raised by the public API.

Everything deliberate derives from HnetError so callers (and the CLI) can
distinguish data/validation problems from genuine bugs.
"""


class HnetError(Exception):
    """Base class for all errors raised on bad input or bad configuration."""


# --- ingest ---------------------------------------------------------------

class MalformedCsv(HnetError):
    """The byte stream is not parseable RFC-4180 CSV (ragged rows, bad
    header, undecodable bytes)."""


class EmptyInput(HnetError):
    """The input contains no header and no rows."""


class UnknownTypeOverride(HnetError):
    """A type override names a column that does not exist."""


class NoUsableColumns(HnetError):
    """After typing and the minimum-support filter no category survives."""


# --- statistics -----------------------------------------------------------

class InvalidCounts(HnetError):
    """A contingency count tuple violates its own consistency bounds."""


class SameFeaturePair(HnetError):
    """Both categories derive from a shared parent feature; the pair is not
    testable."""


class DegenerateSplit(HnetError):
    """A two-group comparison where one group has fewer than two members."""


class CombinatorialBudgetExceeded(HnetError):
    """Candidate generation for combined categories passed the configured
    cap."""


class NoTestsPerformed(HnetError):
    """The run produced no testable pair at all."""


# --- graphs ---------------------------------------------------------------

class GraphSchemaError(HnetError):
    """A serialized graph does not match the expected schema."""


class UnsupportedFormat(HnetError):
    """Unknown export or import format name."""


# --- simulation -----------------------------------------------------------

class NetworkSchemaError(HnetError):
    """A network definition file does not match the expected schema."""


class UnknownParent(NetworkSchemaError):
    """A node lists a parent that is not defined in the network."""


class CyclicGraph(NetworkSchemaError):
    """The parent relation contains a cycle."""


class MalformedCpt(NetworkSchemaError):
    """A conditional probability table has the wrong shape, rows that do not
    sum to one, or entries outside [0, 1]."""


# --- scoring --------------------------------------------------------------

class DimensionMismatch(HnetError):
    """Two edge labelings do not share the same variable order."""


class UnknownVariable(HnetError):
    """A graph references a variable absent from the reference network."""


# --- cli ------------------------------------------------------------------

class UsageError(HnetError):
    """Bad command line: unknown flag, missing argument, unparseable value."""
