"""Shared exception types, mapped to CLI exit codes by the front end."""


class ParseError(ValueError):
    """Malformed input text (pattern files, formula files, polynomial strings)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BudgetExceededError(RuntimeError):
    """An enumeration or search would exceed the configured budget."""

    def __init__(self, message, required=None, budget=None):
        if required is not None and budget is not None:
            message = f"{message} (required {required}, budget {budget})"
        super().__init__(message)
        self.required = required
        self.budget = budget


class PreconditionError(ValueError):
    """An operation was invoked outside its stated preconditions."""


# Default caps.  Enumeration-style operations refuse to start (or abort) once
# they would touch more labellings than this; backtracking searches count
# explored nodes against the search cap.
DEFAULT_MAX_TREES = 1 << 26
DEFAULT_MAX_SEARCH_NODES = 1 << 20
