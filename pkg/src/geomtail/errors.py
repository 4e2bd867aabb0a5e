"""Exception types shared across the package."""


class GeomtailError(Exception):
    """Base class for all package-specific errors."""


class DegenerateTriple(GeomtailError):
    """Three points are collinear within tolerance; no circumcircle exists.

    Callers that iterate over random tuples treat this configuration as
    measure-zero and skip it.
    """


class SparsityViolation(GeomtailError):
    """A regime's n * r^d exceeds the sparse-regime guard."""


class NonConvergence(GeomtailError):
    """The dual maximization did not converge.

    Raised when the requested point lies outside the effective domain
    interior (e.g. a zero coordinate where the mean is positive) or when
    degenerate score components make the dual Hessian singular.
    """


class InsufficientData(GeomtailError):
    """Too few usable grid points to fit a slope."""


class LogMgfOverflow(GeomtailError):
    """An exponent in the log-MGF sum would overflow.

    Carries the offending support atom in ``args[1]``.
    """


class ConfigError(GeomtailError):
    """Invalid or unknown experiment configuration."""
