from typing import Optional


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DiagramSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class InvalidDiagramError(ValueError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class BoundaryError(ValueError):
    pass


class StateBudgetExceeded(RuntimeError):
    def __init__(self, requested: int, allowed: int, hint: Optional[str] = None):
        message = f"{requested} states requested but the budget is {allowed}"
        if hint:
            message = f"{message}; {hint}"
        super().__init__(message)
        self.requested = requested
        self.allowed = allowed


class GroebnerTimeout(RuntimeError):
    def __init__(self, seconds: float, basis_size: int, pending_pairs: int):
        super().__init__(
            f"Buchberger exceeded {seconds:.0f}s with {basis_size} basis elements "
            f"and {pending_pairs} pairs pending"
        )
        self.seconds = seconds
        self.basis_size = basis_size
        self.pending_pairs = pending_pairs


class BasisCacheError(OSError):
    pass
