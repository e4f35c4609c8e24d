"""Exception types shared across the package."""


class AiryBohmError(Exception):
    """Base class for all package-specific errors."""


class TabulatedWindowError(AiryBohmError):
    """Tabulated potential samples do not cover the requested time window."""


class ToleranceError(AiryBohmError):
    """Adaptive step control could not meet the requested local tolerance."""


class CausticDomainError(AiryBohmError):
    """Evaluation requested at or beyond the first caustic (zero of delta).

    The analytic construction (scale transformation, reparametrized time,
    closed-form trajectories) is valid only on 0 <= t < caustic_time.
    """

    def __init__(self, t: float, caustic_time: float):
        self.t = float(t)
        self.caustic_time = float(caustic_time)
        super().__init__(
            f"t = {self.t:.12g} is not before the first caustic at "
            f"caustic_time = {self.caustic_time:.17g}"
        )


class GridError(AiryBohmError):
    """Invalid spatial grid for the spectral solver."""


class StabilityError(AiryBohmError):
    """Split-step evolution lost unitarity or leaked mass to the boundary."""


class WindowError(AiryBohmError):
    """Comparison window extends beyond the evolved time range."""


class ScenarioError(AiryBohmError):
    """Scenario file failed validation; message carries file/line context."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(prefix + message)
