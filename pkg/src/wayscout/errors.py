"""Exception types shared across the package."""


class WayscoutError(Exception):
    """Base class for all package errors."""


class WorldFormatError(WayscoutError):
    """World document is not valid JSON or is missing required keys."""


class WorldValidationError(WayscoutError):
    """World document parsed but violates an invariant (names the element)."""


class UnreachableGoalError(WayscoutError):
    """No obstacle-avoiding path exists from the start to any goal location."""


class NoCandidatesError(WayscoutError):
    """The world has no object that could anchor a goal of the requested level."""


class EmptyBufferError(WayscoutError):
    """Selection was attempted with no open frontier left (exploration exhausted)."""


class NodeNotOpenError(WayscoutError):
    """Commit was attempted on a node that is not in the open set."""


class BackendError(WayscoutError):
    """A single reasoning query failed; the caller may score the node fail-low.

    ``latency`` carries the wall-clock time consumed by the failed attempt(s)
    so the compute ledger stays honest.
    """

    def __init__(self, message, latency=0.0):
        super().__init__(message)
        self.latency = latency


class ReplyParseError(BackendError):
    """The backend replied but no score/verdict could be extracted."""


class BackendUnavailableError(WayscoutError):
    """The reasoning backend is down; the episode must abort."""


class ConfigError(WayscoutError):
    """Suite configuration failed validation; message names the field."""


class MalformedLogError(WayscoutError):
    """An episode log file could not be parsed or misses required keys."""
