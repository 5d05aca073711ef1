"""Exception hierarchy shared by every tdlaudit module."""


class TDLError(Exception):
    """Base class for all errors raised by tdlaudit."""


class FormulaSyntaxError(TDLError, ValueError):
    def __init__(self, message, line, column, expected=()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f"line {line}, column {column}: {message}"
        if self.expected:
            detail += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


class EvaluationError(TDLError):
    pass


class UnboundVariableError(EvaluationError):
    pass


class UnknownPredicateError(EvaluationError):
    pass


class ArityError(EvaluationError):
    pass


class ModelOverflowError(TDLError):
    pass


class ModelFormatError(TDLError, ValueError):
    pass


class DatasetError(TDLError):
    pass


class MissingColumnError(DatasetError):
    pass


class CoercionError(DatasetError):
    def __init__(self, row, column, value, type_tag):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(
            f"row {row}, column {column!r}: cannot read {value!r} as {type_tag}"
        )


class DuplicateIdError(DatasetError):
    pass


class EmptyDatasetError(DatasetError):
    pass


class ConfigError(TDLError):
    pass


class BindingError(TDLError):
    pass


class StrictModeError(TDLError):
    pass


class SolverOutputError(TDLError):
    pass


class SolverUnknownError(SolverOutputError):
    pass


class ExplanationError(TDLError):
    pass
