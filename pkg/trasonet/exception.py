from typing import List


class TrasonetException(Exception):
    pass


class ConfigurationException(TrasonetException):
    pass


class InvalidComparisonMatrixException(TrasonetException):
    pass


class UnsupportedDimensionException(TrasonetException):
    pass


class IncompleteRulebaseException(TrasonetException):
    pass


class InvariantViolationException(TrasonetException):
    pass


class EstimateUnavailableException(TrasonetException):
    pass


class MultipleExceptions(TrasonetException):
    def __init__(self, message: str, exceptions: List[Exception]):
        super().__init__(f"Multiple exceptions occurred: {message}")
        self.exceptions = exceptions


class EmptyTrafficMatrixWarning(UserWarning):
    pass
