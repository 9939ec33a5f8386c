class DiracAlgError(Exception):
    """Base class for every error raised by the package."""


class ForbiddenProductError(DiracAlgError):
    """A product that has no consistent meaning, e.g. two Dirac deltas."""


class UnsupportedOperationError(DiracAlgError):
    pass


class SingularError(DiracAlgError):
    def __init__(self, message: str, rank_defect: int = 0):
        super().__init__(message)
        self.rank_defect = rank_defect


class InvalidProblemError(DiracAlgError):
    pass


class IllPosedError(DiracAlgError):
    pass


class IntervalError(DiracAlgError):
    pass


class RewriteLimitError(DiracAlgError):
    pass


class ParseError(DiracAlgError):
    def __init__(self, message: str, source: str = "", position: int | None = None):
        self.source = source
        self.position = position
        if position is not None and source:
            message = f"{message} at column {position + 1}\n  {source}\n  {' ' * position}^"
        super().__init__(message)
