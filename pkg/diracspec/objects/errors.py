"""
Exception hierarchy. Every error carries the exit code the CLI maps it to.
"""


class DiracSpecError(Exception):
    code: int = 1


class ParseError(DiracSpecError):
    """
    Malformed input file.

    Args:
        message: What is wrong
        path: File being parsed
        line: 1-based line, when known
        column: 1-based column, when known
        field: Offending field path, e.g. items[3].lambda
    """
    code = 2

    def __init__(self, message: str, path: str | None = None, line: int | None = None,
                 column: int | None = None, field: str | None = None) -> None:
        self.message = message
        self.path = path
        self.line = line
        self.column = column
        self.field = field
        super().__init__(self.__str__())

    def __str__(self) -> str:
        where = self.path or '<input>'
        if self.line is not None:
            where += f':{self.line}'
            if self.column is not None:
                where += f':{self.column}'
        if self.field:
            return f'{where}: {self.field}: {self.message}'
        return f'{where}: {self.message}'


class ContractViolation(DiracSpecError):
    code = 3


class DomainError(ContractViolation):
    pass


class ShapeError(ContractViolation):
    pass


class NumericError(ContractViolation):
    pass


class BracketError(ContractViolation):
    def __init__(self, n: int, message: str | None = None) -> None:
        self.n = n
        super().__init__(message or f'no sign change of the characteristic function near index {n}')


class EnumerationError(ContractViolation):
    pass


class IntegrationError(ContractViolation):
    pass


class DegenerateNormalizationError(ContractViolation):
    pass


class CoincidentSpectraError(ContractViolation):
    pass


class InterlacingError(ContractViolation):
    pass


class PoleError(ContractViolation):
    def __init__(self, nearest: float, message: str | None = None) -> None:
        self.nearest = nearest
        super().__init__(message or f'spectral parameter too close to the pole {nearest!r}')


class InapplicableError(ContractViolation):
    pass


class SingularSystemError(ContractViolation):
    def __init__(self, x: float, message: str | None = None) -> None:
        self.x = x
        super().__init__(message or f'singular linear system at x = {x!r}')


class InconsistentDataError(ContractViolation):
    def __init__(self, n: int, m: int, defect: float) -> None:
        self.n = n
        self.m = m
        self.defect = defect
        super().__init__(f'spectral data inconsistent at (n, m) = ({n}, {m}), defect {defect:.3e}')


class LogDomainError(ContractViolation):
    def __init__(self, n: int) -> None:
        self.n = n
        super().__init__(f'|phi_2(pi)| vanishes for index {n}, logarithm undefined')


class TruncationError(ContractViolation):
    pass


class PlanError(ContractViolation):
    pass
