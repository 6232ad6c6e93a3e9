"""Exception hierarchy shared by all analysis modules.

Every exception carries a ``code`` of the form ``<module>.<Name>`` so the CLI
can print a single machine-parsable line on failure.
"""


class DispersionLabError(Exception):
    module = "core"

    @property
    def code(self):
        return f"{self.module}.{type(self).__name__}"


class ValidationError(DispersionLabError, ValueError):
    """A material description violates one of its invariants."""

    module = "material"


class SchemaError(DispersionLabError, ValueError):
    """A spec file is missing a field or has a field of the wrong type.

    ``path`` is the JSON path of the offending field, e.g. ``electric[0].coupling``.
    """

    module = "cli"

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class PoleHit(DispersionLabError, ZeroDivisionError):
    module = "material"


class IllConditioned(DispersionLabError):
    module = "material"


class AssumptionViolated(DispersionLabError):
    """An operation needs a structural assumption the medium does not satisfy."""

    module = "dispersion"

    def __init__(self, flag, message=None):
        super().__init__(message or f"assumption violated: {flag}")
        self.flag = flag


class QuadratureFailure(DispersionLabError):
    module = "measure"


class NonConvergent(DispersionLabError):
    module = "measure"


class TruncationError(DispersionLabError):
    module = "measure"


class BranchSwapSuspected(DispersionLabError):
    module = "dispersion"


class DerivativeVanishes(DispersionLabError, ZeroDivisionError):
    module = "dispersion"


class RegressionUnstable(DispersionLabError):
    module = "dispersion"

    def __init__(self, message, r2=None):
        super().__init__(message)
        self.r2 = r2


class ClusterSeparationFailure(DispersionLabError):
    module = "modal"


class StepTooLarge(DispersionLabError, ValueError):
    module = "modal"
