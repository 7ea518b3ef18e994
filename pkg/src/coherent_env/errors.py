"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can report
user errors without a traceback.
"""


class CoherentEnvError(Exception):
    code = "error"


class NonMonotoneError(CoherentEnvError):
    code = "non-monotone"


class IrrelevantComponentError(CoherentEnvError):
    code = "irrelevant-component"


class DegenerateSystemError(CoherentEnvError):
    code = "degenerate-system"


class OutOfRangeError(CoherentEnvError, ValueError):
    code = "out-of-range"


class DimensionMismatchError(CoherentEnvError, ValueError):
    code = "dimension-mismatch"


class OutOfUnitCubeError(CoherentEnvError, ValueError):
    code = "out-of-unit-cube"


class BoundaryPointError(CoherentEnvError, ValueError):
    code = "boundary-point"


class TooManyPathsError(CoherentEnvError):
    code = "too-many-paths"


class NegativeTimeError(CoherentEnvError, ValueError):
    code = "negative-time"


class ThetaOutOfSupportError(CoherentEnvError, ValueError):
    code = "theta-out-of-support"


class UndefinedAtZeroError(CoherentEnvError, ValueError):
    code = "undefined-at-zero"


class QuadratureNotConvergedError(CoherentEnvError):
    code = "quadrature-not-converged"


class EvaluatorFailureError(CoherentEnvError):
    code = "evaluator-failure"


class RatioUndefinedError(CoherentEnvError):
    code = "ratio-undefined"


class NegativeValueError(CoherentEnvError, ValueError):
    code = "negative-value"


class IndexConstraintViolatedError(CoherentEnvError, ValueError):
    code = "index-constraint-violated"


class UnsupportedFamilyDimensionError(CoherentEnvError):
    code = "unsupported-family-dimension"


class ScenarioError(CoherentEnvError):
    code = "schema"


class ParseError(ScenarioError):
    code = "parse"


class SchemaError(ScenarioError):
    code = "schema"
