# Licensed under an MIT open source license - see LICENSE
'''
Errors and warnings raised by dualmarg.

Errors deriving from `ValidationError` mean the input was wrong, those
deriving from `NumericalError` mean a computation could not be completed.
'''


class DualMargError(Exception):
    '''
    Base class for all dualmarg errors.
    '''


class ValidationError(DualMargError, ValueError):
    '''
    Invalid graph, model or experiment input.
    '''


class GraphValidationError(ValidationError):
    '''
    The graph specification is not a connected simple graph.
    '''


class ModeError(ValidationError):
    '''
    The alphabet order does not match the requested model.
    '''


class UnsupportedFeatureError(ValidationError):
    '''
    The requested model variant is not supported (e.g. Potts with a field).
    '''


class DomainError(ValidationError):
    '''
    Parameters fall outside the domain a method is valid for.
    '''


class EnumerationBudgetError(ValidationError):
    '''
    Exact enumeration would exceed the configured budget.
    '''


class NumericalError(DualMargError, ArithmeticError):
    '''
    Base class for failed numerical computations.
    '''


class DegenerateModelError(NumericalError):
    '''
    The partition function vanishes.
    '''


class SingularMappingError(NumericalError):
    '''
    A factor entry is zero, so the marginal mapping is undefined.
    '''


class ComplexTableError(NumericalError):
    '''
    A transformed table has a non-negligible imaginary part.
    '''


class QuadratureError(NumericalError):
    '''
    Numerical integration did not reach the requested tolerance.
    '''

    def __init__(self, message, diagnostics=None):
        super(QuadratureError, self).__init__(message)
        self.diagnostics = diagnostics or {}


class DualMargWarning(Warning):
    '''
    Base class for dualmarg warnings.
    '''


class ConvergenceWarning(DualMargWarning):
    '''
    An iterative method stopped before reaching its tolerance.
    '''


class SignedMarginalWarning(DualMargWarning):
    '''
    Dual factors take negative values, so dual "marginals" are signed
    marginal functions rather than densities.
    '''


class BoundViolationWarning(DualMargWarning):
    '''
    An exact marginal falls below the ferromagnetic lower bounds.
    '''


class AlternatePrefactorWarning(DualMargWarning):
    '''
    The internal energy was evaluated with the 1 / (2 pi) prefactor, which
    does not reproduce the zero-temperature limit.
    '''
