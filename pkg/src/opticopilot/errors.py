"""Exception types shared across the package."""


class OpticopilotError(Exception):
    """Base class for package errors."""


class ConfigurationError(OpticopilotError):
    """Bad or missing configuration (empty corpus, unreadable data file, ...)."""


class CorpusShapeError(OpticopilotError):
    """Evaluation corpus violates its declared shape."""


class TransportError(OpticopilotError):
    """HTTP failure or timeout talking to the chat-completion endpoint."""


class MockRuleMissError(OpticopilotError):
    """Mock gateway had no rule matching the request."""


class ResourceLimitError(OpticopilotError):
    """A configured resource cap (e.g. grounded-action count) was exceeded."""


class PddlError(OpticopilotError):
    """Domain or problem text is malformed or outside the supported subset."""


class StateConflictError(OpticopilotError):
    """Operation not allowed in the session's current state."""
