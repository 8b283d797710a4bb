"""
Exception hierarchy. Every error carries the CLI exit code it maps to:
2 for bad input, 3 for numerical failures. A failed reciprocity check is
not an exception; it is a report with passed=False (exit code 1).
"""


class CsrecError(Exception):
    exit_code = 3


class InputError(CsrecError, ValueError):
    """Malformed input or violated precondition."""
    exit_code = 2


class NumericalFailure(CsrecError, ArithmeticError):
    exit_code = 3


class NonConvergence(NumericalFailure):
    pass


class NonIntegerFlattening(NumericalFailure):
    def __init__(self, value, tolerance):
        super().__init__(f"flattening value {value} is not within {tolerance:g} of an integer")
        self.value = value
        self.tolerance = tolerance


class DegenerateTuple(NumericalFailure):
    """A tuple whose Hopf images are not pairwise distinct."""


class DegenerateAfterRetries(NumericalFailure):
    def __init__(self, attempts, last_error):
        super().__init__(f"chain still degenerate after {attempts} attempts: {last_error}")
        self.attempts = attempts
        self.last_error = last_error


class PositiveDimensional(NumericalFailure):
    """Elimination collapsed: the solution set is not finite."""


class ChainCheckFailure(NumericalFailure):
    """A boundary identity failed after evaluation (bad relators, rho or d3 data)."""
