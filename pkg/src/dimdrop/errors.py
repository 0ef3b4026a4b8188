"""Exception hierarchy.

Every error carries a stable ``code`` string and the CLI exit status it maps
to (1 for invalid input, 2 for numerical non-convergence).
"""


class DimdropError(Exception):
    code = "error"
    exit_status = 1


class ParseError(DimdropError, ValueError):
    """Malformed input text; ``line`` and ``column`` locate it when known."""

    code = "parse_error"

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class WordParseError(ParseError):
    code = "word_parse"


class NotReducedError(DimdropError, ValueError):
    code = "not_reduced"


# walk_measure
class NonNormalized(DimdropError, ValueError):
    code = "non_normalized"


class EmptySupport(DimdropError, ValueError):
    code = "empty_support"


class EpsilonAtom(DimdropError, ValueError):
    code = "epsilon_atom"


# prefix graph
class WordNotInSupport(DimdropError, KeyError):
    code = "word_not_in_support"


# hidden markov
class NotConverged(DimdropError, RuntimeError):
    code = "not_converged"
    exit_status = 2

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class SingularSystem(DimdropError, RuntimeError):
    code = "singular_system"
    exit_status = 2

    def __init__(self, message, spectral_radius=None):
        super().__init__(message)
        self.spectral_radius = spectral_radius


class NormalizationFailure(DimdropError, RuntimeError):
    code = "normalization_failure"
    exit_status = 2


# hyperbolic
class NotSchottky(DimdropError, ValueError):
    code = "not_schottky"


class PointOnBoundary(DimdropError, ValueError):
    code = "point_on_boundary"


class BoundaryPointInvalid(DimdropError, ValueError):
    code = "boundary_point_invalid"


class NotHyperbolic(DimdropError, ValueError):
    code = "not_hyperbolic"


# thermo
class PowerIterationStalled(DimdropError, RuntimeError):
    code = "power_iteration_stalled"
    exit_status = 2


class BracketError(DimdropError, RuntimeError):
    code = "bracket_error"
    exit_status = 2


# analysis
class ZeroCylinder(DimdropError, ValueError):
    code = "zero_cylinder"


class DegenerateDistribution(DimdropError, ValueError):
    code = "degenerate_distribution"


# cli / config
class SchemaError(DimdropError, ValueError):
    code = "schema_error"

    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path


class ValidationError(DimdropError, ValueError):
    """A config that parses but describes an invalid walk or representation."""

    code = "validation_error"

    def __init__(self, message, cause=None):
        super().__init__(message)
        self.cause = cause

    @property
    def cause_code(self):
        return getattr(self.cause, "code", None)
