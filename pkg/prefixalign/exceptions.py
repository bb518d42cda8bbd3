"""
prefixalign exception hierarchy.

All custom exceptions live here to avoid circular imports.
"""


class CliError(Exception):
    """Exit code 1: validation, parse, search and consistency errors."""

    exit_code = 1

    def __init__(self, message, *, recovery_hint=None):
        super().__init__(message)
        self.recovery_hint = recovery_hint


class ModelError(CliError):
    """Exit code 2: reference model missing, unparseable or not a WF-net."""

    exit_code = 2

    def __init__(self, message, *, violations=None, recovery_hint=None):
        super().__init__(message, recovery_hint=recovery_hint)
        self.violations = list(violations or [])


class LogFormatError(CliError):
    """Event log could not be read. ``row`` is the 1-based data row when known."""

    def __init__(self, message, *, row=None, recovery_hint=None):
        super().__init__(message, recovery_hint=recovery_hint)
        self.row = row


class FiringError(CliError):
    """A transition was fired while disabled."""

    def __init__(self, message, *, transition=None, index=None):
        super().__init__(message)
        self.transition = transition
        self.index = index


class SearchError(CliError):
    """Search state and SPN disagree, or no goal marking is reachable."""


class SearchLimitError(SearchError):
    """Search state grew past the configured record cap."""

    def __init__(self, message, *, limit):
        super().__init__(message, recovery_hint="Raise PREFIXALIGN_MAX_RECORDS or --max-records.")
        self.limit = limit


class ConsistencyError(CliError):
    """Internal invariant broken (e.g. a cached alignment no longer replays)."""


class TopicClosedError(CliError):
    """Produce attempted on a closed topic."""
