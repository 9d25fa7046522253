"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(EngineError):
    """Invalid configuration or incompatible inputs."""


class BackendMismatchError(ConfigurationError):
    """Exact and float coefficient values were mixed implicitly."""


class SingularSeriesError(EngineError):
    """A series required to be a unit has a zero (or sub-tolerance) leading term."""


class TruncationError(EngineError):
    """A requested order exceeds what the truncated inputs can soundly support."""


class OdeSyntaxError(EngineError):
    """Syntax error while parsing an ODE expression or file."""

    def __init__(self, message: str, offset: int | None = None,
                 line: int | None = None, col: int | None = None):
        loc = ""
        if line is not None:
            loc = f" at line {line}, column {col}"
        elif offset is not None:
            loc = f" at offset {offset}"
        super().__init__(message + loc)
        self.offset = offset
        self.line = line
        self.col = col


class NotASolutionError(EngineError):
    """The supplied series does not solve the equation to the retained order."""

    def __init__(self, message: str, grade: int | None = None):
        super().__init__(message)
        self.grade = grade


class ReductionError(EngineError):
    """The change of unknown did not produce the expected quasi-linear form."""


class LatticeViolationError(EngineError):
    """The indicial polynomial vanishes on the exponent lattice."""

    def __init__(self, message: str, k: int | None = None, j: int | None = None):
        super().__init__(message)
        self.k = k
        self.j = j


class RootFindingError(EngineError):
    """Numerical root finding failed or is too ill-conditioned to trust."""


class EmptySectorError(EngineError):
    """No sub-sector of the branch realizes the requested modulus band."""

    def __init__(self, message: str, required_range: tuple | None = None):
        super().__init__(message)
        self.required_range = required_range


class DegenerateParameterError(EngineError):
    """A parameter value violates the nondegeneracy margin of the fixed point."""


class OutsideDomainError(EngineError):
    """The fixed-point iteration left the domain it is contractive on."""


class IndeterminateError(EngineError):
    """A numeric result could not be certified at the configured orders."""
