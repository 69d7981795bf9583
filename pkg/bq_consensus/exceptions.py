"""
Exception classes shared by the bq_consensus modules.

Everything derived from ValidationError is a problem with the user's input
(graph, quantizer, configuration) and maps to exit status 1 in the command
line interface. InvariantViolation marks a broken mathematical guarantee at
run time and is an AssertionError so it reads the same way the rest of the
model assertions do.
"""


class ValidationError(ValueError):
    """
    Base class for input validation failures
    """
    pass


class ConfigError(ValidationError):
    """
    Scenario configuration error.

    Parameters:
    ----------
    :param str field: name of the offending configuration field
    :param str message: description of the problem
    """
    def __init__(self, field, message):
        self.field = field
        super(ConfigError, self).__init__('{}: {}'.format(field, message))


class GraphValidationError(ValidationError):
    pass


class DisconnectedGraphError(GraphValidationError):
    pass


class SelfLoopError(GraphValidationError):
    pass


class DuplicateEdgeError(GraphValidationError):
    pass


class NodeCountError(GraphValidationError):
    pass


class InfeasibleEdgeCountError(GraphValidationError):
    pass


class MalformedEdgeError(GraphValidationError):
    pass


class QuantizerSpecError(ValidationError):
    pass


class PreconditionError(ValidationError):
    pass


class NonFiniteInputError(ValueError):
    pass


class ColumnSpaceError(ValueError):
    pass


class OutcomeError(ValueError):
    pass


class InvariantViolation(AssertionError):
    """
    Raised when a guaranteed property of an iteration fails

    Parameters:
    ----------
    :param str message: description of the violated property
    :param int iteration: iteration index the violation was found at
    """
    def __init__(self, message, iteration=None):
        self.iteration = iteration
        if iteration is not None:
            message = '{} (iteration {})'.format(message, iteration)
        super(InvariantViolation, self).__init__(message)
