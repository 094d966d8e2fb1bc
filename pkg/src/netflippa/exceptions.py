"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Input violates a documented precondition (shape, range, finiteness)."""


class ModelValidityError(ValueError):
    """Blockmodel parameters imply an edge probability outside [0, 1]."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
