"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the command line
front end can surface it without string matching.
"""


class DsoncError(Exception):
    code = "ERROR"


class DimensionMismatch(DsoncError, ValueError):
    code = "DIMENSION_MISMATCH"


class NotASimplex(DsoncError, ValueError):
    code = "NOT_A_SIMPLEX"


class NotInRelativeInterior(DsoncError, ValueError):
    code = "NOT_IN_RELATIVE_INTERIOR"


class EnumerationCapExceeded(DsoncError):
    code = "ENUMERATION_CAP_EXCEEDED"


class VertexSignViolation(DsoncError, ValueError):
    code = "VERTEX_SIGN_VIOLATION"

    def __init__(self, message, vertices=()):
        super().__init__(message)
        self.vertices = list(vertices)


class SingularMatrix(DsoncError, ValueError):
    code = "SINGULAR_MATRIX"


class SupportMismatch(DsoncError, ValueError):
    code = "SUPPORT_MISMATCH"


class NonNegativeInnerCoefficient(DsoncError, ValueError):
    code = "NONNEGATIVE_INNER_COEFFICIENT"


class NumericalBreakdown(DsoncError, ArithmeticError):
    code = "NUMERICAL_BREAKDOWN"


class Infeasible(DsoncError):
    code = "INFEASIBLE"


class NoCertificate(DsoncError):
    code = "NO_CERTIFICATE"

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = list(failed)


class UnboundedDirection(DsoncError):
    code = "UNBOUNDED_DIRECTION"


class InfeasibleLambda(DsoncError, ValueError):
    code = "INFEASIBLE_LAMBDA"


class DegenerateCircuit(DsoncError, ValueError):
    code = "DEGENERATE_CIRCUIT"


class BoxTooLarge(DsoncError):
    code = "BOX_TOO_LARGE"


class PreconditionViolation(DsoncError, ValueError):
    code = "PRECONDITION_VIOLATION"


class DocumentError(DsoncError, ValueError):
    code = "PARSE_ERROR"

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
