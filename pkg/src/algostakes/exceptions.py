"""Exception types raised by the solver."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition (non-finite, out of range)."""


class ConfigError(InvalidInputError):
    """A scenario configuration record is malformed or inconsistent."""


class DegenerateDenominatorError(ArithmeticError):
    """The closed-form critical point has a vanishing denominator.

    The designer payoff is linear in the free coordinate, so the caller has
    to compare corners instead.
    """


class BracketError(RuntimeError):
    """A root bracket could not be established within the search cap."""


class NullClassifierError(ValueError):
    """The operation is undefined for a null (unresponsive) classifier."""
