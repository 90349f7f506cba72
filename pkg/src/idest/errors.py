"""Exception hierarchy shared by every idest module."""


class IdestError(Exception):
    """Base class for all errors raised by idest."""


class ValidationError(IdestError, ValueError):
    """Input data or configuration violates a precondition."""


class EstimationError(IdestError, ArithmeticError):
    """An estimator could not produce a value from otherwise valid input."""


class NonFiniteInput(ValidationError):
    pass


class DuplicatePoints(ValidationError):
    pass


class KTooLarge(ValidationError):
    pass


class InvalidConfig(ValidationError):
    pass


class InvalidSpec(ValidationError):
    pass


class NonPositiveInput(ValidationError):
    pass


class RaggedRows(ValidationError):
    pass


class NonNumericCell(ValidationError):
    def __init__(self, row, column, text):
        super().__init__(f"non-numeric cell at row {row}, column {column}: {text!r}")
        self.row = row
        self.column = column
        self.text = text


class EmptyFile(ValidationError):
    pass


class IoFailure(ValidationError, OSError):
    pass


class DegenerateNeighborhood(EstimationError):
    def __init__(self, point, message=None):
        super().__init__(message or f"degenerate neighborhood at point {point}")
        self.point = point


class DegenerateQuadratic(EstimationError):
    pass


class DegenerateFit(EstimationError):
    pass


class InsufficientFitPoints(EstimationError):
    pass
