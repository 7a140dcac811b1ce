"""
SlitPaths - Errors
Exception hierarchy shared by the numerical modules and the CLI
"""


class SlitPathsError(Exception):
    """Base class for every error raised by slitpaths"""
    exit_code = 1


class ConfigError(SlitPathsError, ValueError):
    """Invalid configuration value; `field` names the offending key"""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class GeometryError(ConfigError):
    """Physically inconsistent geometry, grid or quadrature settings"""


class GridMismatchError(SlitPathsError, ValueError):
    """Profiles that should share a screen grid do not"""


class WindowError(SlitPathsError, ValueError):
    """Integration window outside the sampled screen"""


class DegenerateError(SlitPathsError, ArithmeticError):
    """Normalization or inversion is singular"""


class ConvergenceError(SlitPathsError, ArithmeticError):
    """Quadrature result moved by more than the tolerance under node doubling"""
    exit_code = 2

    def __init__(self, what, change, tolerance):
        self.what = what
        self.change = change
        self.tolerance = tolerance
        super().__init__(
            f"{what}: relative change {change:.3e} under node doubling "
            f"exceeds tolerance {tolerance:.1e}"
        )


class ReportError(SlitPathsError, OSError):
    """CSV input/output failure"""
    exit_code = 3


class PrecisionWarning(UserWarning):
    """Result is valid but numerically fragile"""


def exit_code_for(exc):
    """Map an exception to the CLI exit code"""
    if isinstance(exc, SlitPathsError):
        return exc.exit_code
    if isinstance(exc, OSError):
        return 3
    return 1
