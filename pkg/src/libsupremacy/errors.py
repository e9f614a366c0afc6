class DomainError(ValueError):
    '''Raised when a numeric input lies outside the domain of an analysis.'''


class DivergenceError(DomainError):
    '''Raised when a series is evaluated outside its convergence region.'''


class InputDataError(DomainError):
    '''Raised when an externally supplied table is missing entries.'''


class UnsupportedCircuitError(DomainError):
    '''Raised for circuits the Pauli-frame simulator cannot handle.'''


class ResourceLimitError(RuntimeError):
    '''Raised when an enumeration would exceed its configured ceiling.'''


class SolverError(RuntimeError):
    '''Raised when a root solve has no valid (monotone, bracketing) interval.'''
