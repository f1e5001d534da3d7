"""Exception types shared across the package."""


class GrammarError(ValueError):
    """A grammar is structurally invalid."""


class ParseError(GrammarError):
    """A grammar or graph document failed to parse.

    Carries the 1-based line and column of the offending token.
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NotNormalizableError(GrammarError):
    """The input grammar is deleting or permuting, which the normal-form
    transformation does not support."""


class BudgetError(RuntimeError):
    """A configured size budget (oracle tuples or engine facts) was exceeded."""
