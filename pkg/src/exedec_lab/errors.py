"""Exception hierarchy shared by every module of the package."""


class ExedecLabError(Exception):
    """Base class for all errors raised by exedec_lab."""


class ParseError(ExedecLabError):
    """Program text could not be parsed.

    ``line`` and ``col`` are 1-based and point at the offending token.
    """

    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


class ProgramError(ExedecLabError, ValueError):
    """A syntax tree violates a structural rule (scoping, arity, parameter range)."""


class SpecError(ExedecLabError, ValueError):
    """A task specification or value list is malformed."""


class ExecutionError(ExedecLabError):
    """Runtime failure of a DSL program.

    ``step`` is set to the index of the failing step when the error escapes
    a whole-program evaluation.
    """

    step: int | None = None


class EmptyListError(ExecutionError):
    pass


class IndexOutOfRange(ExecutionError):
    pass


class ValueRangeError(ExecutionError):
    pass


class MatchError(ExecutionError):
    pass


class PrefixError(ExecutionError):
    """A RobustFill step produced text that does not prefix the remaining output."""


class BudgetExhausted(ExedecLabError):
    pass


class BackendError(ExedecLabError):
    """Transport-level failure talking to a prediction backend."""


class ProtocolError(BackendError):
    """A backend answered with a message that violates the wire protocol."""
