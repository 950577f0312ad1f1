"""Custom exceptions."""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5


class CoverageError(Exception):
    """Base exception for the coverage engine."""

    exit_code = EXIT_VALIDATION


class DomainError(CoverageError):
    """Raised when a scalar input lies outside the domain of an operation."""

    pass


class DegenerateGeometryError(DomainError):
    """Raised when two nodes that must be separated coincide."""

    def __init__(self, first: str, second: str):
        self.first = first
        self.second = second
        message = f"Degenerate geometry: '{first}' and '{second}' coincide"
        super().__init__(message)


class OutOfModelError(DomainError):
    """Raised when a link distance is below the reference distance of the path-loss law."""

    def __init__(self, distance: float, ref_distance: float):
        self.distance = distance
        self.ref_distance = ref_distance
        message = (
            f"Distance {distance:.4g} m is below the reference distance "
            f"{ref_distance:.4g} m"
        )
        super().__init__(message)


class ZeroGainError(DomainError):
    """Raised when an IRS angle leaves no power on the reflect side."""

    def __init__(self, name: str, angle_rad: float):
        self.name = name
        self.angle_rad = angle_rad
        message = f"Angle '{name}' = {angle_rad:.6g} rad gives a non-positive cosine"
        super().__init__(message)


class DegenerateModelError(DomainError):
    """Raised when a coverage model has no interfering density."""

    pass


class ScenarioValidationError(CoverageError):
    """Raised when a scenario document fails validation."""

    def __init__(self, key_path: str, reason: str):
        self.key_path = key_path
        self.reason = reason
        super().__init__(f"Invalid scenario at '{key_path}': {reason}")


class CatalogError(CoverageError):
    """Raised when a preset name is not in the catalog."""

    def __init__(self, name: str, valid_names: list[str]):
        self.name = name
        self.valid_names = valid_names
        message = f"Unknown preset '{name}'. Valid presets: {', '.join(valid_names)}"
        super().__init__(message)


class NumericalError(CoverageError):
    """Raised when a numerical procedure misses its requested tolerance."""

    exit_code = EXIT_NUMERICAL

    def __init__(self, reason: str, error_estimate: float | None = None):
        self.reason = reason
        self.error_estimate = error_estimate
        message = reason
        if error_estimate is not None:
            message = f"{reason} (achieved error estimate {error_estimate:.3e})"
        super().__init__(message)


class ResourceLimitError(CoverageError):
    """Raised when a simulation would exceed its configured point budget."""

    exit_code = EXIT_NUMERICAL

    def __init__(self, expected: float, cap: float):
        self.expected = expected
        self.cap = cap
        message = f"Expected {expected:.3e} points per draw exceeds the cap of {cap:.3e}"
        super().__init__(message)


class UsageError(CoverageError):
    """Raised on command-line misuse."""

    exit_code = EXIT_USAGE


class RadiusRequiredError(UsageError):
    """Raised when an infinite-field oracle run is requested for alpha <= 2."""

    def __init__(self, alpha: float):
        self.alpha = alpha
        message = (
            f"alpha = {alpha:g} <= 2: aggregate interference of an infinite PPP field "
            "diverges, pass an explicit --radius (results will depend on it)"
        )
        super().__init__(message)


class SweepPointError(CoverageError):
    """Raised when one point of a threshold sweep fails."""

    def __init__(self, threshold_db: float, cause: CoverageError):
        self.threshold_db = threshold_db
        self.cause = cause
        self.exit_code = cause.exit_code
        super().__init__(f"Sweep failed at {threshold_db:g} dB: {cause}")
